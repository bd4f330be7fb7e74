#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "straddle/circuit.hpp"
#include "straddle/stateprep.hpp"

namespace straddle {

inline constexpr const char* kToolVersion = "0.1.0";

// Deterministic JSON value: objects serialize with sorted keys and reals with
// 17 significant digits, so equal values always produce equal bytes.
struct Json {
    enum class Kind { Null, Bool, Int, Real, Str, Arr, Obj };
    Kind kind = Kind::Null;
    bool b = false;
    long long i = 0;
    double d = 0.0;
    std::string s;
    std::vector<Json> items;
    std::map<std::string, Json> fields;

    static Json boolean(bool v);
    static Json integer(long long v);
    static Json real(double v);
    static Json str(std::string v);
    static Json array(std::vector<Json> v = {});
    static Json object();

    Json& set(const std::string& key, Json v);
    std::string dump() const;  // two-space indent, trailing newline
};

std::string format_real(double v);  // printf %.17g, round-trip exact
std::string format_complex(cx v);   // "(re,im)"
cx parse_complex(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// {"n": ..., "amplitudes": [[re, im], ...]}, 2^n entries, qubit 0 = lsb.
PureState read_state_json(const std::string& path);
Json state_to_json(const PureState& s);
void write_state_json(const std::string& path, const PureState& s);

// {"n": ..., "matrix": [[[re, im], ...], ...]}, row-major 2^n x 2^n.
Matrix read_unitary_json(const std::string& path);
void write_unitary_json(const std::string& path, const Matrix& u);

// {"parties": [[qubits...], ...]}
PartitionSpec read_partition_json(const std::string& path);
void write_partition_json(const std::string& path, const PartitionSpec& p);

// Compact "0,1|2,3" form shared by the circuit header and the --cut flag.
PartitionSpec parse_partition_string(const std::string& text);
std::string partition_to_string(const PartitionSpec& p);

struct SqcFile {
    Circuit circuit;
    std::optional<PartitionSpec> partition;
};

// Text circuit format.  Canonical output round-trips byte-identically:
// parse(serialize(c)) re-serializes to the same string.
SqcFile parse_sqc(const std::string& text);
std::string sqc_to_string(const Circuit& c,
                          const std::optional<PartitionSpec>& partition = std::nullopt);
SqcFile read_sqc(const std::string& path);
void write_sqc(const std::string& path, const Circuit& c,
               const std::optional<PartitionSpec>& partition = std::nullopt);

uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

Json report_to_json(const SynthesisReport& r);

// Envelope around a subcommand payload.  Wall time goes to the log stream,
// not the file, so identical invocations write identical bytes.
Json run_report(const std::string& command,
                const std::map<std::string, std::string>& input_digests, Json payload,
                std::optional<uint64_t> seed = std::nullopt);

}  // namespace straddle
