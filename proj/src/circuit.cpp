#include "straddle/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "straddle/linalg.hpp"

namespace straddle {

int PartitionSpec::num_qubits() const {
    int n = 0;
    for (const auto& p : parties) n += static_cast<int>(p.size());
    return n;
}

int PartitionSpec::party_of(int qubit) const {
    for (int j = 0; j < num_parties(); ++j)
        for (int q : parties[j])
            if (q == qubit) return j;
    throw InvalidInput("partition: qubit " + std::to_string(qubit) + " not in any party");
}

std::vector<int> PartitionSpec::party_sorted(int j) const {
    std::vector<int> out = parties.at(j);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> PartitionSpec::sizes_sorted() const {
    std::vector<int> out;
    for (const auto& p : parties) out.push_back(static_cast<int>(p.size()));
    std::sort(out.begin(), out.end());
    return out;
}

void PartitionSpec::validate() const {
    if (parties.empty()) throw InvalidInput("partition: no parties");
    std::set<int> seen;
    for (const auto& p : parties) {
        if (p.empty()) throw InvalidInput("partition: empty party");
        for (int q : p) {
            if (q < 0) throw InvalidInput("partition: negative qubit index");
            if (!seen.insert(q).second)
                throw InvalidInput("partition: qubit " + std::to_string(q) + " repeated");
        }
    }
    int n = num_qubits();
    for (int q = 0; q < n; ++q)
        if (!seen.count(q))
            throw InvalidInput("partition: qubit " + std::to_string(q) + " missing");
}

PartitionSpec PartitionSpec::bipartition(const std::vector<int>& a, const std::vector<int>& b) {
    PartitionSpec p;
    p.parties = {a, b};
    p.validate();
    return p;
}

PureState PureState::zero(int n) {
    PureState s;
    s.n = n;
    s.amps = Vector::Zero(int64_t(1) << n);
    s.amps(0) = 1.0;
    return s;
}

PureState PureState::from_amps(int n, Vector a) {
    if (a.size() != (int64_t(1) << n)) throw InvalidInput("state: amplitude count != 2^n");
    if (!a.allFinite()) throw InvalidInput("state: non-finite amplitude");
    PureState s;
    s.n = n;
    s.amps = std::move(a);
    return s;
}

Matrix rotation_matrix(Axis axis, double angle) {
    Matrix r(2, 2);
    double c = std::cos(angle / 2), s = std::sin(angle / 2);
    if (axis == Axis::Y) {
        r << cx(c, 0), cx(-s, 0), cx(s, 0), cx(c, 0);
    } else {
        r << cx(c, -s), cx(0, 0), cx(0, 0), cx(c, s);
    }
    return r;
}

Matrix controlled_rotation_matrix(Axis axis, double angle) {
    Matrix m = Matrix::Identity(4, 4);
    m.block(2, 2, 2, 2) = rotation_matrix(axis, angle);
    return m;
}

Matrix mux_local_matrix(Axis axis, const std::vector<double>& angles) {
    const int segs = static_cast<int>(angles.size());
    Matrix m = Matrix::Zero(2 * segs, 2 * segs);
    for (int l = 0; l < segs; ++l) m.block(2 * l, 2 * l, 2, 2) = rotation_matrix(axis, angles[l]);
    return m;
}

Matrix cnot_matrix() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

int gate_qubit_span(const Gate& g, std::vector<int>& qubits_out) {
    qubits_out.clear();
    std::visit(
        [&](const auto& gate) {
            using T = std::decay_t<decltype(gate)>;
            if constexpr (std::is_same_v<T, SingleQubitGate>) {
                qubits_out = {gate.qubit};
            } else if constexpr (std::is_same_v<T, TwoQubitGate>) {
                qubits_out = {gate.q1, gate.q2};
            } else if constexpr (std::is_same_v<T, CnotGate>) {
                qubits_out = {gate.control, gate.target};
            } else if constexpr (std::is_same_v<T, MuxRotGate>) {
                qubits_out = gate.controls;
                qubits_out.push_back(gate.target);
            } else {
                qubits_out = gate.qubits;
            }
        },
        g);
    std::sort(qubits_out.begin(), qubits_out.end());
    return static_cast<int>(qubits_out.size());
}

std::string gate_name(const Gate& g) {
    switch (g.index()) {
        case 0: return "single";
        case 1: return "two-qubit";
        case 2: return "cnot";
        case 3: return "mux-rotation";
        default: return "local-block";
    }
}

void validate_gate(const Gate& g, int n, const Tolerances& tol) {
    std::vector<int> span;
    gate_qubit_span(g, span);
    for (size_t i = 0; i < span.size(); ++i) {
        if (span[i] < 0 || span[i] >= n)
            throw InvalidInput(gate_name(g) + ": qubit index out of range");
        if (i > 0 && span[i] == span[i - 1])
            throw InvalidInput(gate_name(g) + ": repeated qubit index");
    }
    if (const auto* s = std::get_if<SingleQubitGate>(&g)) {
        if (s->u.rows() != 2 || s->u.cols() != 2) throw InvalidInput("single: matrix must be 2x2");
        require_unitary(s->u, "single-qubit gate", tol.unitarity);
    } else if (const auto* t = std::get_if<TwoQubitGate>(&g)) {
        if (t->u.rows() != 4 || t->u.cols() != 4)
            throw InvalidInput("two-qubit: matrix must be 4x4");
        require_unitary(t->u, "two-qubit gate", tol.unitarity);
    } else if (const auto* m = std::get_if<MuxRotGate>(&g)) {
        if (m->controls.size() > 20) throw InvalidInput("mux-rotation: too many controls");
        if (m->angles.size() != (size_t(1) << m->controls.size()))
            throw InvalidInput("mux-rotation: need one angle per control assignment");
        for (double a : m->angles)
            if (!std::isfinite(a)) throw InvalidInput("mux-rotation: non-finite angle");
    } else if (const auto* b = std::get_if<LocalBlockGate>(&g)) {
        int k = static_cast<int>(b->qubits.size());
        if (k == 0 || k > 20) throw InvalidInput("local-block: bad qubit count");
        if (b->u.rows() != (int64_t(1) << k) || b->u.cols() != (int64_t(1) << k))
            throw InvalidInput("local-block: matrix size must be 2^k");
        require_unitary(b->u, "local-block gate", tol.unitarity);
    }
}

namespace {

void apply_single_impl(Vector& a, int q, const Matrix& u) {
    const int64_t n = a.size();
    const int64_t bit = int64_t(1) << q;
    for (int64_t i = 0; i < n; ++i) {
        if (i & bit) continue;
        cx a0 = a(i), a1 = a(i | bit);
        a(i) = u(0, 0) * a0 + u(0, 1) * a1;
        a(i | bit) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void apply_two_impl(Vector& a, int q1, int q2, const Matrix& u) {
    // q1 is the most significant bit of the local index
    const int64_t n = a.size();
    const int64_t b1 = int64_t(1) << q1, b2 = int64_t(1) << q2;
    for (int64_t i = 0; i < n; ++i) {
        if ((i & b1) || (i & b2)) continue;
        int64_t idx[4] = {i, i | b2, i | b1, i | b1 | b2};
        cx in[4];
        for (int k = 0; k < 4; ++k) in[k] = a(idx[k]);
        for (int r = 0; r < 4; ++r) {
            cx acc = 0;
            for (int k = 0; k < 4; ++k) acc += u(r, k) * in[k];
            a(idx[r]) = acc;
        }
    }
}

void apply_cnot_impl(Vector& a, int control, int target) {
    const int64_t n = a.size();
    const int64_t cb = int64_t(1) << control, tb = int64_t(1) << target;
    for (int64_t i = 0; i < n; ++i)
        if ((i & cb) && !(i & tb)) std::swap(a(i), a(i | tb));
}

void apply_muxrot_impl(Vector& a, const MuxRotGate& g) {
    const int64_t n = a.size();
    const int64_t tb = int64_t(1) << g.target;
    const int k = static_cast<int>(g.controls.size());
    for (int64_t i = 0; i < n; ++i) {
        if (i & tb) continue;
        int64_t assign = 0;
        for (int c = 0; c < k; ++c)
            assign = (assign << 1) | ((i >> g.controls[c]) & 1);
        Matrix r = rotation_matrix(g.axis, g.angles[assign]);
        cx a0 = a(i), a1 = a(i | tb);
        a(i) = r(0, 0) * a0 + r(0, 1) * a1;
        a(i | tb) = r(1, 0) * a0 + r(1, 1) * a1;
    }
}

void apply_block_impl(Vector& a, const std::vector<int>& qubits, const Matrix& u) {
    // qubits listed most significant first
    const int k = static_cast<int>(qubits.size());
    const int64_t d = int64_t(1) << k;
    const int64_t n = a.size();
    int64_t mask = 0;
    std::vector<int64_t> spread(d, 0);
    for (int q : qubits) mask |= int64_t(1) << q;
    for (int64_t j = 0; j < d; ++j) {
        int64_t s = 0;
        for (int b = 0; b < k; ++b)
            if ((j >> (k - 1 - b)) & 1) s |= int64_t(1) << qubits[b];
        spread[j] = s;
    }
    Vector sub(d);
    for (int64_t base = 0; base < n; ++base) {
        if (base & mask) continue;
        for (int64_t j = 0; j < d; ++j) sub(j) = a(base | spread[j]);
        Vector res = u * sub;
        for (int64_t j = 0; j < d; ++j) a(base | spread[j]) = res(j);
    }
}

void apply_gate_impl(const Gate& g, Vector& a) {
    if (const auto* s = std::get_if<SingleQubitGate>(&g)) {
        apply_single_impl(a, s->qubit, s->u);
    } else if (const auto* t = std::get_if<TwoQubitGate>(&g)) {
        apply_two_impl(a, t->q1, t->q2, t->u);
    } else if (const auto* c = std::get_if<CnotGate>(&g)) {
        apply_cnot_impl(a, c->control, c->target);
    } else if (const auto* m = std::get_if<MuxRotGate>(&g)) {
        apply_muxrot_impl(a, *m);
    } else {
        const auto& b = std::get<LocalBlockGate>(g);
        apply_block_impl(a, b.qubits, b.u);
    }
}

}  // namespace

PureState apply_gate(const Gate& g, const PureState& s) {
    validate_gate(g, s.n);
    PureState out = s;
    apply_gate_impl(g, out.amps);
    return out;
}

PureState apply_circuit(const Circuit& c, const PureState& in, const Tolerances& tol) {
    if (c.n != in.n) throw InvalidInput("apply_circuit: qubit count mismatch");
    for (const auto& g : c.gates) validate_gate(g, c.n, tol);
    PureState out = in;
    for (const auto& g : c.gates) apply_gate_impl(g, out.amps);
    return out;
}

Matrix circuit_unitary(const Circuit& c, const Tolerances& tol) {
    if (c.n > 10) throw ResourceLimit("circuit_unitary: capped at 10 qubits");
    if (c.n < 1) throw InvalidInput("circuit_unitary: empty register");
    for (const auto& g : c.gates) validate_gate(g, c.n, tol);
    const int64_t dim = int64_t(1) << c.n;
    Matrix m = Matrix::Identity(dim, dim);
    Vector col(dim);
    for (int64_t j = 0; j < dim; ++j) {
        col = m.col(j);
        for (const auto& g : c.gates) apply_gate_impl(g, col);
        m.col(j) = col;
    }
    return m;
}

Matrix gate_matrix(const Gate& g, int n) {
    Circuit c;
    c.n = n;
    c.gates = {g};
    return circuit_unitary(c);
}

Gate inverse_gate(const Gate& g) {
    if (const auto* s = std::get_if<SingleQubitGate>(&g))
        return SingleQubitGate{s->qubit, s->u.adjoint()};
    if (const auto* t = std::get_if<TwoQubitGate>(&g))
        return TwoQubitGate{t->q1, t->q2, t->u.adjoint()};
    if (std::holds_alternative<CnotGate>(g)) return g;
    if (const auto* m = std::get_if<MuxRotGate>(&g)) {
        std::vector<double> neg(m->angles.size());
        for (size_t i = 0; i < neg.size(); ++i) neg[i] = -m->angles[i];
        return MuxRotGate{m->axis, m->target, m->controls, neg};
    }
    const auto& b = std::get<LocalBlockGate>(g);
    return LocalBlockGate{b.party, b.qubits, b.u.adjoint()};
}

Circuit inverse_circuit(const Circuit& c) {
    Circuit out;
    out.n = c.n;
    out.gates.reserve(c.gates.size());
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it)
        out.gates.push_back(inverse_gate(*it));
    return out;
}

std::vector<std::vector<double>> gray_segment_angles(const std::vector<double>& remote_major,
                                                     int p, int q) {
    const int64_t segs = int64_t(1) << p;
    const int64_t locs = int64_t(1) << q;
    if (static_cast<int64_t>(remote_major.size()) != segs * locs)
        throw InvalidInput("gray_segment_angles: angle count does not match 2^(p+q)");
    // solve M alpha = theta over remote assignments; M_{rj} = (-1)^{bits(r).gray(j)},
    // and M M^T = 2^p I gives the inverse directly
    auto gray = [](int64_t x) { return x ^ (x >> 1); };
    std::vector<std::vector<double>> alpha(segs, std::vector<double>(locs));
    for (int64_t j = 0; j < segs; ++j) {
        for (int64_t l = 0; l < locs; ++l) {
            double acc = 0;
            for (int64_t r = 0; r < segs; ++r) {
                int sign = std::popcount(static_cast<uint64_t>(r & gray(j))) & 1 ? -1 : 1;
                acc += sign * remote_major[(r << q) | l];
            }
            alpha[j][l] = acc / static_cast<double>(segs);
        }
    }
    return alpha;
}

std::vector<Gate> graycode_mux_gates(Axis axis, int target, const std::vector<int>& remote,
                                     const std::vector<int>& local,
                                     const std::vector<double>& angles, int target_party) {
    const int p = static_cast<int>(remote.size());
    const int q = static_cast<int>(local.size());
    const int64_t segs = int64_t(1) << p;
    std::vector<Gate> out;

    if (p == 0) {
        std::vector<int> qubits = local;
        qubits.push_back(target);
        out.push_back(LocalBlockGate{target_party, qubits, mux_local_matrix(axis, angles)});
        return out;
    }
    if (p == 1 && q == 0) {
        Matrix m = Matrix::Zero(4, 4);
        m.block(0, 0, 2, 2) = rotation_matrix(axis, angles[0]);
        m.block(2, 2, 2, 2) = rotation_matrix(axis, angles[1]);
        out.push_back(TwoQubitGate{remote[0], target, m});
        return out;
    }

    auto gray = [](int64_t x) { return x ^ (x >> 1); };
    std::vector<std::vector<double>> alpha = gray_segment_angles(angles, p, q);

    for (int64_t j = 0; j < segs; ++j) {
        if (q == 0) {
            out.push_back(SingleQubitGate{target, rotation_matrix(axis, alpha[j][0])});
        } else {
            std::vector<int> qubits = local;
            qubits.push_back(target);
            out.push_back(LocalBlockGate{target_party, qubits, mux_local_matrix(axis, alpha[j])});
        }
        int64_t diff = gray(j) ^ gray((j + 1) & (segs - 1));
        int bitpos = std::countr_zero(static_cast<uint64_t>(diff));
        // remote list is most-significant-first: bit b of the assignment
        // belongs to remote[p - 1 - b]
        out.push_back(CnotGate{remote[p - 1 - bitpos], target});
    }
    return out;
}

namespace {

// expansion of a local block into 1/2-qubit gates (export path)
std::vector<Gate> expand_block(const Matrix& u, const std::vector<int>& qubits) {
    const int k = static_cast<int>(qubits.size());
    std::vector<Gate> out;
    if (k == 1) {
        out.push_back(SingleQubitGate{qubits[0], u});
        return out;
    }
    if (k == 2) {
        out.push_back(TwoQubitGate{qubits[0], qubits[1], u});
        return out;
    }
    int t = qubits[0];  // most significant bit of the block index
    std::vector<int> rest(qubits.begin() + 1, qubits.end());
    auto cs = linalg::cs_decompose(u);
    auto dl = linalg::demultiplex(cs.l1, cs.l2);
    auto dr = linalg::demultiplex(cs.r1, cs.r2);
    const auto segs = static_cast<size_t>(cs.theta.size());
    std::vector<double> ry(segs), rzl(segs), rzr(segs);
    for (size_t i = 0; i < segs; ++i) {
        ry[i] = 2.0 * cs.theta(i);
        rzl[i] = -2.0 * std::arg(dl.d(i));
        rzr[i] = -2.0 * std::arg(dr.d(i));
    }
    auto append = [&out](std::vector<Gate> gs) {
        for (auto& g : gs) out.push_back(std::move(g));
    };
    append(expand_block(dr.w, rest));
    append(graycode_mux_gates(Axis::Z, t, rest, {}, rzr, -1));
    append(expand_block(dr.v, rest));
    append(graycode_mux_gates(Axis::Y, t, rest, {}, ry, -1));
    append(expand_block(dl.w, rest));
    append(graycode_mux_gates(Axis::Z, t, rest, {}, rzl, -1));
    append(expand_block(dl.v, rest));
    return out;
}

}  // namespace

Circuit lower(const Circuit& c, const PartitionSpec& p, const LowerOptions& opt,
              const Tolerances& tol) {
    p.validate();
    if (p.num_qubits() != c.n) throw InvalidInput("lower: partition does not match circuit");
    for (const auto& g : c.gates) validate_gate(g, c.n, tol);

    Circuit out;
    out.n = c.n;
    for (const auto& g : c.gates) {
        if (const auto* m = std::get_if<MuxRotGate>(&g)) {
            int tp = p.party_of(m->target);
            std::vector<int> remote, local;
            for (int ctrl : m->controls)
                (p.party_of(ctrl) == tp ? local : remote).push_back(ctrl);
            // regroup angles so remote bits form the high part of the index
            const int qk = static_cast<int>(local.size());
            const int total = static_cast<int>(m->controls.size());
            std::vector<double> regrouped(size_t(1) << total);
            for (int64_t orig = 0; orig < (int64_t(1) << total); ++orig) {
                int64_t r = 0, l = 0;
                for (int i = 0; i < total; ++i) {
                    int bit = static_cast<int>((orig >> (total - 1 - i)) & 1);
                    if (p.party_of(m->controls[i]) == tp)
                        l = (l << 1) | bit;
                    else
                        r = (r << 1) | bit;
                }
                regrouped[(r << qk) | l] = m->angles[orig];
            }
            for (auto& gg : graycode_mux_gates(m->axis, m->target, remote, local, regrouped, tp))
                out.gates.push_back(std::move(gg));
        } else if (opt.expand_local_blocks) {
            if (const auto* b = std::get_if<LocalBlockGate>(&g)) {
                for (auto& gg : expand_block(b->u, b->qubits)) out.gates.push_back(std::move(gg));
            } else {
                out.gates.push_back(g);
            }
        } else {
            out.gates.push_back(g);
        }
    }
    return out;
}

namespace {

Matrix canonical_pair_matrix(const Gate& g, int hi) {
    // 4 x 4 matrix of the gate in the basis where `hi` is the most
    // significant bit
    if (const auto* c = std::get_if<CnotGate>(&g)) {
        Matrix m = Matrix::Zero(4, 4);
        if (c->control == hi) {
            m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
        } else {
            m(0, 0) = m(1, 3) = m(2, 2) = m(3, 1) = 1.0;
        }
        return m;
    }
    const auto& t = std::get<TwoQubitGate>(g);
    if (t.q1 == hi) return t.u;
    Matrix p = Matrix::Zero(4, 4);
    p(0, 0) = p(1, 2) = p(2, 1) = p(3, 3) = 1.0;
    return p * t.u * p;
}

bool is_pair_gate(const Gate& g) {
    return std::holds_alternative<CnotGate>(g) || std::holds_alternative<TwoQubitGate>(g);
}

std::pair<int, int> pair_of(const Gate& g) {
    if (const auto* c = std::get_if<CnotGate>(&g)) return {std::max(c->control, c->target),
                                                           std::min(c->control, c->target)};
    const auto& t = std::get<TwoQubitGate>(g);
    return {std::max(t.q1, t.q2), std::min(t.q1, t.q2)};
}

bool identity_up_to_phase(const Matrix& m, double tol) {
    cx tr = m.trace();
    if (std::abs(tr) < 1e-9) return false;
    cx phase = tr / std::abs(tr);
    return (m - phase * Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

Circuit fuse_straddling(const Circuit& c, const PartitionSpec& p, const Tolerances& tol) {
    p.validate();
    if (p.num_qubits() != c.n) throw InvalidInput("fuse_straddling: partition mismatch");

    std::vector<Gate> stack;
    for (const auto& g : c.gates) {
        if (!is_pair_gate(g)) {
            stack.push_back(g);
            continue;
        }
        auto [hi, lo] = pair_of(g);
        // scan back over absorbable single-qubit gates on the pair wires
        int idx = static_cast<int>(stack.size()) - 1;
        while (idx >= 0) {
            const auto* s = std::get_if<SingleQubitGate>(&stack[idx]);
            if (s && (s->qubit == hi || s->qubit == lo))
                --idx;
            else
                break;
        }
        bool merged = false;
        if (idx >= 0 && is_pair_gate(stack[idx]) && pair_of(stack[idx]) == std::make_pair(hi, lo)) {
            Matrix m = canonical_pair_matrix(stack[idx], hi);
            for (size_t j = idx + 1; j < stack.size(); ++j) {
                const auto& s = std::get<SingleQubitGate>(stack[j]);
                Matrix embedded = (s.qubit == hi) ? linalg::kron(s.u, Matrix::Identity(2, 2))
                                                  : linalg::kron(Matrix::Identity(2, 2), s.u);
                m = embedded * m;
            }
            m = canonical_pair_matrix(g, hi) * m;
            stack.resize(idx);
            if (!identity_up_to_phase(m, tol.unitarity)) stack.push_back(TwoQubitGate{hi, lo, m});
            merged = true;
        }
        if (!merged) stack.push_back(g);
    }
    Circuit out;
    out.n = c.n;
    out.gates = std::move(stack);
    return out;
}

StraddleCount count_straddling(const Circuit& c, const PartitionSpec& p) {
    p.validate();
    if (p.num_qubits() != c.n) throw InvalidInput("count_straddling: partition mismatch");
    StraddleCount count;
    for (const auto& g : c.gates) {
        if (std::holds_alternative<MuxRotGate>(g))
            throw InvalidInput("count_straddling: macro mux-rotation present; lower the circuit first");
        if (const auto* b = std::get_if<LocalBlockGate>(&g)) {
            int party = p.party_of(b->qubits.at(0));
            for (int q : b->qubits)
                if (p.party_of(q) != party)
                    throw InvalidInput("count_straddling: local block crosses parties");
            continue;
        }
        int a = -1, b2 = -1;
        if (const auto* t = std::get_if<TwoQubitGate>(&g)) {
            a = t->q1;
            b2 = t->q2;
        } else if (const auto* cn = std::get_if<CnotGate>(&g)) {
            a = cn->control;
            b2 = cn->target;
        } else {
            continue;  // single-qubit
        }
        int pa = p.party_of(a), pb = p.party_of(b2);
        if (pa != pb) {
            ++count.total;
            ++count.per_pair[{std::min(pa, pb), std::max(pa, pb)}];
        }
    }
    return count;
}

double fidelity(const PureState& a, const PureState& b) {
    if (a.n != b.n) throw InvalidInput("fidelity: qubit count mismatch");
    return std::norm((a.amps.adjoint() * b.amps)(0));
}

double operator_distance_up_to_phase(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw InvalidInput("operator distance: size mismatch");
    cx tr = (b.adjoint() * a).trace();
    cx phase = std::abs(tr) > 1e-14 ? tr / std::abs(tr) : cx(1, 0);
    return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace straddle
