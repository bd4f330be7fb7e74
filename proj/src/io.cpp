#include "straddle/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace straddle {

namespace {

using njson = nlohmann::json;

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned char>(c));
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

bool is_scalar(const Json& v) { return v.kind != Json::Kind::Arr && v.kind != Json::Kind::Obj; }

void dump_rec(const Json& v, std::string& out, int depth) {
    switch (v.kind) {
        case Json::Kind::Null:
            out += "null";
            break;
        case Json::Kind::Bool:
            out += v.b ? "true" : "false";
            break;
        case Json::Kind::Int:
            out += std::to_string(v.i);
            break;
        case Json::Kind::Real:
            out += format_real(v.d);
            break;
        case Json::Kind::Str:
            out += '"';
            out += escape_json(v.s);
            out += '"';
            break;
        case Json::Kind::Arr: {
            if (v.items.empty()) {
                out += "[]";
                break;
            }
            bool inline_ok = true;
            for (const Json& e : v.items)
                if (!is_scalar(e)) inline_ok = false;
            if (inline_ok) {
                out += '[';
                for (size_t i = 0; i < v.items.size(); ++i) {
                    if (i) out += ", ";
                    dump_rec(v.items[i], out, depth + 1);
                }
                out += ']';
                break;
            }
            const std::string pad(size_t(depth) * 2, ' ');
            const std::string pad1(size_t(depth + 1) * 2, ' ');
            out += "[\n";
            for (size_t i = 0; i < v.items.size(); ++i) {
                out += pad1;
                dump_rec(v.items[i], out, depth + 1);
                out += i + 1 < v.items.size() ? ",\n" : "\n";
            }
            out += pad;
            out += ']';
            break;
        }
        case Json::Kind::Obj: {
            if (v.fields.empty()) {
                out += "{}";
                break;
            }
            const std::string pad(size_t(depth) * 2, ' ');
            const std::string pad1(size_t(depth + 1) * 2, ' ');
            out += "{\n";
            size_t i = 0;
            for (const auto& [key, val] : v.fields) {
                out += pad1;
                out += '"';
                out += escape_json(key);
                out += "\": ";
                dump_rec(val, out, depth + 1);
                out += ++i < v.fields.size() ? ",\n" : "\n";
            }
            out += pad;
            out += '}';
            break;
        }
    }
}

njson parse_json_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return njson::parse(text);
    } catch (const std::exception& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

double number_at(const njson& v, const std::string& where) {
    if (!v.is_number()) throw InvalidInput(where + ": expected a number");
    return v.get<double>();
}

int int_field(const njson& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_number_integer())
        throw InvalidInput(where + ": missing integer field \"" + key + "\"");
    return j.at(key).get<int>();
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

struct SqcError : InvalidInput {
    SqcError(int line, const std::string& msg)
        : InvalidInput("sqc line " + std::to_string(line) + ": " + msg) {}
};

int parse_int(const std::string& tok, int line) {
    try {
        size_t used = 0;
        int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw SqcError(line, "expected an integer, got \"" + tok + "\"");
    }
}

double parse_double(const std::string& tok, int line) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + tok.size() || tok.empty())
        throw SqcError(line, "expected a number, got \"" + tok + "\"");
    return v;
}

std::vector<int> parse_int_list(const std::string& s, int line) {
    std::vector<int> out;
    for (const std::string& tok : split_on(s, ',')) out.push_back(parse_int(tok, line));
    return out;
}

// value of a "key=..." token
std::string tagged(const std::string& tok, const std::string& key, int line) {
    const std::string prefix = key + "=";
    if (tok.rfind(prefix, 0) != 0) throw SqcError(line, "expected " + prefix + "..., got \"" + tok + "\"");
    return tok.substr(prefix.size());
}

Matrix parse_matrix_tokens(const std::vector<std::string>& toks, size_t first, int dim, int line) {
    if (toks.size() != first + size_t(dim) * size_t(dim))
        throw SqcError(line, "expected " + std::to_string(dim * dim) + " matrix entries");
    Matrix m(dim, dim);
    size_t k = first;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            try {
                m(r, c) = parse_complex(toks[k++]);
            } catch (const InvalidInput& e) {
                throw SqcError(line, e.what());
            }
        }
    return m;
}

void append_matrix(std::string& out, const Matrix& m) {
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            out += ' ';
            out += format_complex(m(r, c));
        }
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

std::string join_reals(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_real(v[i]);
    }
    return out;
}

}  // namespace

Json Json::boolean(bool v) {
    Json j;
    j.kind = Kind::Bool;
    j.b = v;
    return j;
}

Json Json::integer(long long v) {
    Json j;
    j.kind = Kind::Int;
    j.i = v;
    return j;
}

Json Json::real(double v) {
    Json j;
    j.kind = Kind::Real;
    j.d = v;
    return j;
}

Json Json::str(std::string v) {
    Json j;
    j.kind = Kind::Str;
    j.s = std::move(v);
    return j;
}

Json Json::array(std::vector<Json> v) {
    Json j;
    j.kind = Kind::Arr;
    j.items = std::move(v);
    return j;
}

Json Json::object() {
    Json j;
    j.kind = Kind::Obj;
    return j;
}

Json& Json::set(const std::string& key, Json v) {
    if (kind != Kind::Obj) throw InvalidInput("json: set() on a non-object");
    fields[key] = std::move(v);
    return *this;
}

std::string Json::dump() const {
    std::string out;
    dump_rec(*this, out, 0);
    out += '\n';
    return out;
}

std::string format_real(double v) {
    if (!std::isfinite(v)) throw InvalidInput("refusing to serialize a non-finite number");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_complex(cx v) {
    std::string out = "(";
    out += format_real(v.real());
    out += ',';
    out += format_real(v.imag());
    out += ')';
    return out;
}

cx parse_complex(const std::string& text) {
    if (text.size() < 5 || text.front() != '(' || text.back() != ')')
        throw InvalidInput("bad complex literal \"" + text + "\", want (re,im)");
    const size_t comma = text.find(',');
    if (comma == std::string::npos)
        throw InvalidInput("bad complex literal \"" + text + "\", want (re,im)");
    const std::string re = text.substr(1, comma - 1);
    const std::string im = text.substr(comma + 1, text.size() - comma - 2);
    const char* rb = re.c_str();
    const char* ib = im.c_str();
    char* end = nullptr;
    double rv = std::strtod(rb, &end);
    if (re.empty() || end != rb + re.size())
        throw InvalidInput("bad real part in \"" + text + "\"");
    double iv = std::strtod(ib, &end);
    if (im.empty() || end != ib + im.size())
        throw InvalidInput("bad imaginary part in \"" + text + "\"");
    return {rv, iv};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw InvalidInput("read error on " + path);
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw InvalidInput("write error on " + path);
}

PureState read_state_json(const std::string& path) {
    const njson j = parse_json_file(path);
    const int n = int_field(j, "n", path);
    if (n < 1 || n > 24) throw InvalidInput(path + ": n out of range [1, 24]");
    if (!j.contains("amplitudes") || !j.at("amplitudes").is_array())
        throw InvalidInput(path + ": missing \"amplitudes\" array");
    const auto& amps = j.at("amplitudes");
    const int64_t dim = int64_t(1) << n;
    if (static_cast<int64_t>(amps.size()) != dim)
        throw InvalidInput(path + ": amplitudes must hold 2^n [re, im] pairs");
    Vector v(dim);
    for (int64_t i = 0; i < dim; ++i) {
        const auto& e = amps[size_t(i)];
        const std::string where = path + ": amplitude " + std::to_string(i);
        if (!e.is_array() || e.size() != 2) throw InvalidInput(where + ": expected [re, im]");
        v(i) = cx(number_at(e[0], where), number_at(e[1], where));
    }
    return PureState::from_amps(n, std::move(v));
}

Json state_to_json(const PureState& s) {
    std::vector<Json> amps;
    amps.reserve(size_t(s.amps.size()));
    for (int64_t i = 0; i < s.amps.size(); ++i)
        amps.push_back(Json::array({Json::real(s.amps(i).real()), Json::real(s.amps(i).imag())}));
    Json j = Json::object();
    j.set("amplitudes", Json::array(std::move(amps)));
    j.set("n", Json::integer(s.n));
    return j;
}

void write_state_json(const std::string& path, const PureState& s) {
    write_file(path, state_to_json(s).dump());
}

Matrix read_unitary_json(const std::string& path) {
    const njson j = parse_json_file(path);
    const int n = int_field(j, "n", path);
    if (n < 1 || n > 10) throw InvalidInput(path + ": n out of range [1, 10]");
    if (!j.contains("matrix") || !j.at("matrix").is_array())
        throw InvalidInput(path + ": missing \"matrix\" array");
    const auto& rows = j.at("matrix");
    const int64_t dim = int64_t(1) << n;
    if (static_cast<int64_t>(rows.size()) != dim)
        throw InvalidInput(path + ": matrix must be 2^n x 2^n");
    Matrix m(dim, dim);
    for (int64_t r = 0; r < dim; ++r) {
        const auto& row = rows[size_t(r)];
        if (!row.is_array() || static_cast<int64_t>(row.size()) != dim)
            throw InvalidInput(path + ": row " + std::to_string(r) + " must hold 2^n entries");
        for (int64_t c = 0; c < dim; ++c) {
            const auto& e = row[size_t(c)];
            const std::string where =
                path + ": entry (" + std::to_string(r) + ", " + std::to_string(c) + ")";
            if (!e.is_array() || e.size() != 2) throw InvalidInput(where + ": expected [re, im]");
            m(r, c) = cx(number_at(e[0], where), number_at(e[1], where));
        }
    }
    if (!m.allFinite()) throw InvalidInput(path + ": non-finite entries");
    return m;
}

void write_unitary_json(const std::string& path, const Matrix& u) {
    if (u.rows() != u.cols()) throw InvalidInput("unitary writer: matrix not square");
    int n = 0;
    while ((int64_t(1) << n) < u.rows()) ++n;
    if ((int64_t(1) << n) != u.rows()) throw InvalidInput("unitary writer: dimension not a power of two");
    std::vector<Json> rows;
    rows.reserve(size_t(u.rows()));
    for (int64_t r = 0; r < u.rows(); ++r) {
        std::vector<Json> row;
        row.reserve(size_t(u.cols()));
        for (int64_t c = 0; c < u.cols(); ++c)
            row.push_back(Json::array({Json::real(u(r, c).real()), Json::real(u(r, c).imag())}));
        rows.push_back(Json::array(std::move(row)));
    }
    Json j = Json::object();
    j.set("matrix", Json::array(std::move(rows)));
    j.set("n", Json::integer(n));
    write_file(path, j.dump());
}

PartitionSpec read_partition_json(const std::string& path) {
    const njson j = parse_json_file(path);
    if (!j.is_object() || !j.contains("parties") || !j.at("parties").is_array())
        throw InvalidInput(path + ": expected object with \"parties\" array");
    PartitionSpec p;
    for (const auto& party : j.at("parties")) {
        if (!party.is_array()) throw InvalidInput(path + ": each party must be an array of qubits");
        std::vector<int> qs;
        for (const auto& q : party) {
            if (!q.is_number_integer()) throw InvalidInput(path + ": qubit indices must be integers");
            qs.push_back(q.get<int>());
        }
        p.parties.push_back(std::move(qs));
    }
    p.validate();
    return p;
}

void write_partition_json(const std::string& path, const PartitionSpec& p) {
    std::vector<Json> parties;
    for (const auto& party : p.parties) {
        std::vector<Json> qs;
        for (int q : party) qs.push_back(Json::integer(q));
        parties.push_back(Json::array(std::move(qs)));
    }
    Json j = Json::object();
    j.set("parties", Json::array(std::move(parties)));
    write_file(path, j.dump());
}

PartitionSpec parse_partition_string(const std::string& text) {
    PartitionSpec p;
    for (const std::string& party : split_on(text, '|')) {
        std::vector<int> qs;
        for (const std::string& tok : split_on(party, ',')) {
            try {
                size_t used = 0;
                qs.push_back(std::stoi(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw InvalidInput("bad partition \"" + text + "\": token \"" + tok + "\"");
            }
        }
        p.parties.push_back(std::move(qs));
    }
    p.validate();
    return p;
}

std::string partition_to_string(const PartitionSpec& p) {
    std::string out;
    for (size_t j = 0; j < p.parties.size(); ++j) {
        if (j) out += '|';
        out += join_ints(p.parties[j]);
    }
    return out;
}

SqcFile parse_sqc(const std::string& text) {
    SqcFile out;
    bool saw_header = false;
    bool saw_qubits = false;
    int lineno = 0;
    std::istringstream stream(text);
    std::string raw;
    while (std::getline(stream, raw)) {
        ++lineno;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::vector<std::string> toks = split_ws(raw);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        if (!saw_header) {
            if (kw != "sqc" || toks.size() != 2 || toks[1] != "1")
                throw SqcError(lineno, "file must start with \"sqc 1\"");
            saw_header = true;
            continue;
        }
        if (!saw_qubits) {
            if (kw != "qubits" || toks.size() != 2)
                throw SqcError(lineno, "expected \"qubits <n>\" after the header");
            out.circuit.n = parse_int(toks[1], lineno);
            if (out.circuit.n < 1 || out.circuit.n > 24)
                throw SqcError(lineno, "qubit count out of range [1, 24]");
            saw_qubits = true;
            continue;
        }
        if (kw == "partition") {
            if (toks.size() != 2) throw SqcError(lineno, "expected \"partition a,b|c,...\"");
            if (out.partition) throw SqcError(lineno, "duplicate partition line");
            try {
                out.partition = parse_partition_string(toks[1]);
            } catch (const InvalidInput& e) {
                throw SqcError(lineno, e.what());
            }
            if (out.partition->num_qubits() != out.circuit.n)
                throw SqcError(lineno, "partition does not cover the declared qubits");
            continue;
        }
        Gate g;
        if (kw == "cnot") {
            if (toks.size() != 3) throw SqcError(lineno, "expected \"cnot <control> <target>\"");
            g = CnotGate{parse_int(toks[1], lineno), parse_int(toks[2], lineno)};
        } else if (kw == "u1") {
            if (toks.size() < 2) throw SqcError(lineno, "expected \"u1 <qubit> <4 entries>\"");
            g = SingleQubitGate{parse_int(toks[1], lineno), parse_matrix_tokens(toks, 2, 2, lineno)};
        } else if (kw == "u2") {
            if (toks.size() < 3) throw SqcError(lineno, "expected \"u2 <q1> <q2> <16 entries>\"");
            g = TwoQubitGate{parse_int(toks[1], lineno), parse_int(toks[2], lineno),
                             parse_matrix_tokens(toks, 3, 4, lineno)};
        } else if (kw == "muxry" || kw == "muxrz") {
            if (toks.size() != 4)
                throw SqcError(lineno, "expected \"" + kw + " <target> ctrls=... angles=...\"");
            MuxRotGate m;
            m.axis = kw == "muxry" ? Axis::Y : Axis::Z;
            m.target = parse_int(toks[1], lineno);
            m.controls = parse_int_list(tagged(toks[2], "ctrls", lineno), lineno);
            for (const std::string& a : split_on(tagged(toks[3], "angles", lineno), ','))
                m.angles.push_back(parse_double(a, lineno));
            if (m.angles.size() != size_t(1) << m.controls.size())
                throw SqcError(lineno, "angle count must be 2^controls");
            g = std::move(m);
        } else if (kw == "local") {
            if (toks.size() < 3)
                throw SqcError(lineno, "expected \"local party=<j> qubits=... <entries>\"");
            LocalBlockGate b;
            b.party = parse_int(tagged(toks[1], "party", lineno), lineno);
            b.qubits = parse_int_list(tagged(toks[2], "qubits", lineno), lineno);
            if (b.qubits.empty() || b.qubits.size() > 12)
                throw SqcError(lineno, "local block needs between 1 and 12 qubits");
            b.u = parse_matrix_tokens(toks, 3, 1 << b.qubits.size(), lineno);
            g = std::move(b);
        } else {
            throw SqcError(lineno, "unknown keyword \"" + kw + "\"");
        }
        try {
            validate_gate(g, out.circuit.n);
        } catch (const InvalidInput& e) {
            throw SqcError(lineno, e.what());
        }
        out.circuit.gates.push_back(std::move(g));
    }
    if (!saw_header) throw InvalidInput("sqc: empty file, expected \"sqc 1\" header");
    if (!saw_qubits) throw InvalidInput("sqc: missing \"qubits <n>\" line");
    return out;
}

std::string sqc_to_string(const Circuit& c, const std::optional<PartitionSpec>& partition) {
    std::string out = "sqc 1\nqubits " + std::to_string(c.n) + "\n";
    if (partition) {
        out += "partition ";
        out += partition_to_string(*partition);
        out += '\n';
    }
    for (const Gate& g : c.gates) {
        if (const auto* x = std::get_if<CnotGate>(&g)) {
            out += "cnot " + std::to_string(x->control) + ' ' + std::to_string(x->target);
        } else if (const auto* s = std::get_if<SingleQubitGate>(&g)) {
            out += "u1 " + std::to_string(s->qubit);
            append_matrix(out, s->u);
        } else if (const auto* t = std::get_if<TwoQubitGate>(&g)) {
            out += "u2 " + std::to_string(t->q1) + ' ' + std::to_string(t->q2);
            append_matrix(out, t->u);
        } else if (const auto* m = std::get_if<MuxRotGate>(&g)) {
            out += m->axis == Axis::Y ? "muxry " : "muxrz ";
            out += std::to_string(m->target);
            out += " ctrls=" + join_ints(m->controls);
            out += " angles=" + join_reals(m->angles);
        } else if (const auto* b = std::get_if<LocalBlockGate>(&g)) {
            out += "local party=" + std::to_string(b->party);
            out += " qubits=" + join_ints(b->qubits);
            append_matrix(out, b->u);
        }
        out += '\n';
    }
    return out;
}

SqcFile read_sqc(const std::string& path) {
    try {
        return parse_sqc(read_file(path));
    } catch (const InvalidInput& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

void write_sqc(const std::string& path, const Circuit& c,
               const std::optional<PartitionSpec>& partition) {
    write_file(path, sqc_to_string(c, partition));
}

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string digest_hex(const std::string& bytes) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

Json report_to_json(const SynthesisReport& r) {
    Json extras = Json::object();
    for (const auto& [key, value] : r.extras) extras.set(key, Json::real(value));
    Json per_pair = Json::object();
    for (const auto& [pair, count] : r.per_pair)
        per_pair.set(std::to_string(pair.first) + "|" + std::to_string(pair.second),
                     Json::integer(count));
    Json j = Json::object();
    j.set("extras", std::move(extras));
    j.set("fidelity", Json::real(r.fidelity));
    j.set("method", Json::str(r.method));
    j.set("per_pair", std::move(per_pair));
    j.set("predicted", Json::integer(r.predicted));
    j.set("published_bound", Json::integer(r.published_bound));
    j.set("published_bound_kind", Json::str(r.published_bound_kind));
    j.set("straddling_total", Json::integer(r.straddling_total));
    return j;
}

Json run_report(const std::string& command,
                const std::map<std::string, std::string>& input_digests, Json payload,
                std::optional<uint64_t> seed) {
    Json inputs = Json::object();
    for (const auto& [flag, digest] : input_digests) inputs.set(flag, Json::str(digest));
    Json j = Json::object();
    j.set("command", Json::str(command));
    j.set("inputs", std::move(inputs));
    j.set("payload", std::move(payload));
    if (seed) j.set("seed", Json::integer(static_cast<long long>(*seed)));
    j.set("version", Json::str(kToolVersion));
    return j;
}

}  // namespace straddle
