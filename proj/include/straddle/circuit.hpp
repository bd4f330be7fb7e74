#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "straddle/types.hpp"

namespace straddle {

// Disjoint parties covering qubits 0..n-1.  Qubit 0 is the least significant
// bit of a basis index everywhere in this library.
struct PartitionSpec {
    std::vector<std::vector<int>> parties;

    int num_qubits() const;
    int num_parties() const { return static_cast<int>(parties.size()); }
    int party_of(int qubit) const;
    std::vector<int> party_sorted(int j) const;       // qubit indices ascending
    std::vector<int> sizes_sorted() const;            // k_1 <= ... <= k_m
    void validate() const;                            // throws InvalidInput

    static PartitionSpec bipartition(const std::vector<int>& a, const std::vector<int>& b);
};

enum class Axis { Y, Z };

struct SingleQubitGate {
    int qubit;
    Matrix u;  // 2 x 2
};

struct TwoQubitGate {
    int q1, q2;   // q1 is the most significant bit of the 4 x 4 matrix
    Matrix u;
};

struct CnotGate {
    int control, target;
};

// Multiplexed rotation: for each assignment of the controls (first listed
// control = most significant bit) rotate the target by angles[assignment].
struct MuxRotGate {
    Axis axis;
    int target;
    std::vector<int> controls;
    std::vector<double> angles;  // size 2^controls
};

// Unitary confined to one party.  Qubits are listed most significant first.
struct LocalBlockGate {
    int party;
    std::vector<int> qubits;
    Matrix u;  // 2^k x 2^k
};

using Gate = std::variant<SingleQubitGate, TwoQubitGate, CnotGate, MuxRotGate, LocalBlockGate>;

struct Circuit {
    int n = 0;
    std::vector<Gate> gates;
};

struct PureState {
    int n = 0;
    Vector amps;  // size 2^n, unit norm

    static PureState zero(int n);
    static PureState from_amps(int n, Vector a);
    double norm() const { return amps.norm(); }
};

Matrix rotation_matrix(Axis axis, double angle);              // exp(-i angle P/2)
Matrix controlled_rotation_matrix(Axis axis, double angle);   // 4 x 4, control = msb
Matrix mux_local_matrix(Axis axis, const std::vector<double>& angles);  // diag of rotations
Matrix cnot_matrix();

// dense matrix of a single gate embedded in the n-qubit space (for oracles)
Matrix gate_matrix(const Gate& g, int n);

int gate_qubit_span(const Gate& g, std::vector<int>& qubits_out);
std::string gate_name(const Gate& g);
void validate_gate(const Gate& g, int n, const Tolerances& tol = default_tol());

PureState apply_gate(const Gate& g, const PureState& s);
PureState apply_circuit(const Circuit& c, const PureState& in,
                        const Tolerances& tol = default_tol());

// Full operator of the circuit; capped at 10 qubits.
Matrix circuit_unitary(const Circuit& c, const Tolerances& tol = default_tol());

Gate inverse_gate(const Gate& g);
Circuit inverse_circuit(const Circuit& c);

struct LowerOptions {
    bool expand_local_blocks = false;  // also rewrite LocalBlocks into 1/2-qubit gates
};

// Per-segment rotation angles of the Gray-code walk: solves the sign-matrix
// system so that composing the 2^p segments with the walk's Cnots reproduces
// the multiplexed rotation.  Input angles are remote-major: index (r << q) | l.
std::vector<std::vector<double>> gray_segment_angles(const std::vector<double>& remote_major,
                                                     int p, int q);

// Gray-code walk for a multiplexed rotation.  `angles` are indexed with the
// remote assignment as the high bits and the local assignment as the low bits
// (each most-significant-first in list order).  Emits alternating rotation
// segments and Cnots from the bit-change control to the target; a mux whose
// support is two qubits collapses to one TwoQubit gate.  target_party is only
// used to tag emitted LocalBlocks.
std::vector<Gate> graycode_mux_gates(Axis axis, int target, const std::vector<int>& remote,
                                     const std::vector<int>& local,
                                     const std::vector<double>& angles, int target_party);

// Rewrite every MuxRot into LocalBlocks plus Cnots via the Gray-code walk over
// its remote controls.  Gates that are already primitive pass through.
Circuit lower(const Circuit& c, const PartitionSpec& p, const LowerOptions& opt = {},
              const Tolerances& tol = default_tol());

// Peephole pass: adjacent two-qubit gates on one unordered pair merge, with
// intervening single-qubit gates on those wires absorbed; merged identities
// (up to global phase) are deleted.
Circuit fuse_straddling(const Circuit& c, const PartitionSpec& p,
                        const Tolerances& tol = default_tol());

struct StraddleCount {
    long total = 0;
    std::map<std::pair<int, int>, long> per_pair;  // party index pairs, i < j
};

// Counts two-qubit gates whose endpoints sit in different parties.  Macro
// gates are rejected: lower the circuit first.
StraddleCount count_straddling(const Circuit& c, const PartitionSpec& p);

double fidelity(const PureState& a, const PureState& b);
double operator_distance_up_to_phase(const Matrix& a, const Matrix& b);

}  // namespace straddle
