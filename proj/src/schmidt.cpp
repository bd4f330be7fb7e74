#include "straddle/schmidt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "straddle/linalg.hpp"

namespace straddle {

namespace {

void check_state(const PureState& s) {
    if (s.n <= 0 || s.amps.size() != (int64_t{1} << s.n))
        throw InvalidInput("state: amplitude count does not match qubit count");
    if (!s.amps.allFinite()) throw InvalidInput("state: non-finite amplitudes");
    if (std::abs(s.amps.norm() - 1.0) > 1e-8) throw InvalidInput("state: not normalized");
}

// Gather the bits of x sitting at `positions` (ascending); listed position j
// becomes bit j of the result.
int64_t gather_bits(int64_t x, const std::vector<int>& positions) {
    int64_t out = 0;
    for (size_t j = 0; j < positions.size(); ++j) out |= ((x >> positions[j]) & 1) << j;
    return out;
}

int64_t scatter_bits(int64_t compact, const std::vector<int>& positions) {
    int64_t out = 0;
    for (size_t j = 0; j < positions.size(); ++j) out |= ((compact >> j) & 1) << positions[j];
    return out;
}

// Reshape a vector over `nbits` wires into a matrix indexed by the bits at
// a_pos (rows) against all remaining bits (columns).
Matrix reshape_cut(const Vector& v, const std::vector<int>& a_pos, int nbits) {
    std::vector<int> b_pos;
    std::vector<bool> in_a(nbits, false);
    for (int q : a_pos) in_a[q] = true;
    for (int q = 0; q < nbits; ++q)
        if (!in_a[q]) b_pos.push_back(q);
    Matrix m(int64_t{1} << a_pos.size(), int64_t{1} << b_pos.size());
    for (int64_t x = 0; x < v.size(); ++x)
        m(gather_bits(x, a_pos), gather_bits(x, b_pos)) = v(x);
    return m;
}

SchmidtDecomposition decompose_local(const Vector& v, const std::vector<int>& a_pos, int nbits,
                                     const Tolerances& tol) {
    Matrix m = reshape_cut(v, a_pos, nbits);
    auto sv = linalg::svd(m, tol);
    SchmidtDecomposition d;
    d.tolerance = tol.rank_cutoff;
    for (int i = 0; i < sv.s.size(); ++i) {
        if (sv.s(i) <= tol.rank_cutoff) break;
        d.weights.push_back(sv.s(i));
        d.left_basis.push_back(sv.u.col(i));
        d.right_basis.push_back(sv.vdag.row(i).transpose());
    }
    d.rank = static_cast<int>(d.weights.size());
    return d;
}

std::vector<int> positions_within(const std::vector<int>& wires, const std::vector<int>& subset) {
    std::vector<int> pos;
    for (size_t i = 0; i < wires.size(); ++i)
        if (std::find(subset.begin(), subset.end(), wires[i]) != subset.end())
            pos.push_back(static_cast<int>(i));
    return pos;
}

}  // namespace

SchmidtDecomposition schmidt_decompose(const PureState& s, const PartitionSpec& cut,
                                       const Tolerances& tol) {
    check_state(s);
    cut.validate();
    if (cut.num_parties() != 2) throw InvalidInput("schmidt_decompose: need exactly two parties");
    if (cut.num_qubits() != s.n) throw InvalidInput("schmidt_decompose: partition size mismatch");
    return decompose_local(s.amps, cut.party_sorted(0), s.n, tol);
}

PureState schmidt_reconstruct(const SchmidtDecomposition& d, const PartitionSpec& cut) {
    std::vector<int> a_pos = cut.party_sorted(0), b_pos = cut.party_sorted(1);
    int n = cut.num_qubits();
    Vector amps = Vector::Zero(int64_t{1} << n);
    for (int i = 0; i < d.rank; ++i)
        for (int64_t a = 0; a < d.left_basis[i].size(); ++a)
            for (int64_t b = 0; b < d.right_basis[i].size(); ++b)
                amps(scatter_bits(a, a_pos) | scatter_bits(b, b_pos)) +=
                    d.weights[i] * d.left_basis[i](a) * d.right_basis[i](b);
    return PureState::from_amps(n, amps);
}

std::vector<long> IteratedDecomposition::level_terms() const {
    std::vector<long> out;
    for (const auto& level : levels) {
        long total = 0;
        for (const auto& d : level) total += d.rank;
        out.push_back(total);
    }
    return out;
}

IteratedDecomposition iterated_decompose(const PureState& s, const PartitionSpec& p,
                                         const Tolerances& tol) {
    check_state(s);
    p.validate();
    if (p.num_qubits() != s.n) throw InvalidInput("iterated_decompose: partition size mismatch");
    if (p.num_parties() < 2) throw InvalidInput("iterated_decompose: need at least two parties");

    IteratedDecomposition out;
    std::vector<int> wires(s.n);
    for (int i = 0; i < s.n; ++i) wires[i] = i;
    std::vector<std::pair<Vector, std::vector<int>>> branches = {{s.amps, wires}};

    for (int j = 0; j + 1 < p.num_parties(); ++j) {
        std::vector<SchmidtDecomposition> level;
        std::vector<std::pair<Vector, std::vector<int>>> next;
        std::vector<int> party = p.party_sorted(j);
        for (auto& [v, w] : branches) {
            std::vector<int> a_pos = positions_within(w, party);
            SchmidtDecomposition d =
                decompose_local(v, a_pos, static_cast<int>(w.size()), tol);
            std::vector<int> rest;
            for (int q : w)
                if (std::find(party.begin(), party.end(), q) == party.end()) rest.push_back(q);
            for (int i = 0; i < d.rank; ++i) next.emplace_back(d.right_basis[i], rest);
            level.push_back(std::move(d));
        }
        out.levels.push_back(std::move(level));
        branches = std::move(next);
    }
    return out;
}

DecomposabilityResult is_schmidt_decomposable(const PureState& s, const PartitionSpec& p,
                                              const Tolerances& tol) {
    check_state(s);
    p.validate();
    if (p.num_qubits() != s.n)
        throw InvalidInput("is_schmidt_decomposable: partition size mismatch");
    const int m = p.num_parties();
    if (m < 2) throw InvalidInput("is_schmidt_decomposable: need at least two parties");

    SchmidtDecomposition top = schmidt_decompose(
        s, PartitionSpec::bipartition(p.party_sorted(0), [&] {
            std::vector<int> rest;
            for (int j = 1; j < m; ++j)
                for (int q : p.party_sorted(j)) rest.push_back(q);
            std::sort(rest.begin(), rest.end());
            return rest;
        }()),
        tol);

    bool degenerate = false;
    for (int i = 1; i < top.rank; ++i)
        if (std::abs(top.weights[i - 1] - top.weights[i]) <= tol.degeneracy) degenerate = true;

    DecomposabilityResult res;
    auto fail = [&](const std::string& why) {
        if (degenerate) {
            res.verdict = DecomposabilityResult::Verdict::indeterminate;
            res.reason = why + " (degenerate spectrum: a rotated basis might still factor)";
        } else {
            res.verdict = DecomposabilityResult::Verdict::no;
            res.reason = why;
        }
        return res;
    };

    SchmidtDecomposableForm form;
    form.weights = top.weights;
    form.party_bases.resize(m);
    form.party_bases[0] = top.left_basis;

    // Remaining wires in ascending order carry the right vectors' indexing.
    std::vector<int> rest_wires;
    for (int j = 1; j < m; ++j)
        for (int q : p.party_sorted(j)) rest_wires.push_back(q);
    std::sort(rest_wires.begin(), rest_wires.end());

    for (int i = 0; i < top.rank; ++i) {
        Vector v = top.right_basis[i];
        std::vector<int> wires = rest_wires;
        for (int j = 1; j < m; ++j) {
            if (j == m - 1) {
                form.party_bases[j].push_back(v);
                break;
            }
            std::vector<int> a_pos = positions_within(wires, p.party_sorted(j));
            SchmidtDecomposition d =
                decompose_local(v, a_pos, static_cast<int>(wires.size()), tol);
            if (d.rank != 1)
                return fail("term " + std::to_string(i) + " is entangled across party " +
                            std::to_string(j) + " and the remainder");
            form.party_bases[j].push_back(d.left_basis[0]);
            v = d.right_basis[0];
            std::vector<int> next_wires;
            std::vector<int> party = p.party_sorted(j);
            for (int q : wires)
                if (std::find(party.begin(), party.end(), q) == party.end())
                    next_wires.push_back(q);
            wires = std::move(next_wires);
        }
    }

    for (int j = 1; j < m; ++j)
        for (int a = 0; a < top.rank; ++a)
            for (int b = 0; b < a; ++b)
                if (std::abs((form.party_bases[j][a].adjoint() * form.party_bases[j][b])(0)) >
                    tol.orthonormality)
                    return fail("party " + std::to_string(j) +
                                " factor family is not orthonormal");

    PureState recon = reconstruct_form(form, p);
    if ((recon.amps - s.amps).cwiseAbs().maxCoeff() > 1e-8)
        return fail("assembled form does not reproduce the state");

    res.verdict = DecomposabilityResult::Verdict::yes;
    res.form = std::move(form);
    return res;
}

PureState reconstruct_form(const SchmidtDecomposableForm& f, const PartitionSpec& p) {
    int n = p.num_qubits();
    Vector amps = Vector::Zero(int64_t{1} << n);
    for (int64_t g = 0; g < amps.size(); ++g) {
        cx total = 0;
        for (size_t i = 0; i < f.weights.size(); ++i) {
            cx term = f.weights[i];
            for (int j = 0; j < p.num_parties(); ++j)
                term *= f.party_bases[j][i](gather_bits(g, p.party_sorted(j)));
            total += term;
        }
        amps(g) = total;
    }
    return PureState::from_amps(n, amps);
}

double entanglement_entropy(const PureState& s, const PartitionSpec& cut,
                            const Tolerances& tol) {
    SchmidtDecomposition d = schmidt_decompose(s, cut, tol);
    double h = 0;
    for (double w : d.weights) {
        double p = w * w;
        if (p > 0) h -= p * std::log2(p);
    }
    return h;
}

CompressionResult compress_support(const PureState& s, const PartitionSpec& cut, int side,
                                   const Tolerances& tol) {
    if (side != 0 && side != 1) throw InvalidInput("compress_support: side must be 0 or 1");
    SchmidtDecomposition d = schmidt_decompose(s, cut, tol);
    const std::vector<Vector>& basis = side == 0 ? d.left_basis : d.right_basis;
    std::vector<int> qubits = cut.party_sorted(side);
    int k = static_cast<int>(qubits.size());

    std::vector<Vector> cols(basis.begin(), basis.end());
    Matrix b = linalg::complete_basis(cols, int64_t{1} << k, tol);

    CompressionResult out;
    out.rank = d.rank;
    out.active_qubits = d.rank <= 1 ? 0 : std::bit_width(static_cast<unsigned>(d.rank - 1));
    std::vector<int> listed(qubits.rbegin(), qubits.rend());  // most significant first
    out.gate = LocalBlockGate{side, listed, b.adjoint()};
    out.state = apply_gate(out.gate, s);

    // support must now sit below 2^active on the compressed side
    std::vector<int> pos = cut.party_sorted(side);
    for (int64_t g = 0; g < out.state.amps.size(); ++g)
        if (gather_bits(g, pos) >= (int64_t{1} << out.active_qubits) &&
            std::abs(out.state.amps(g)) > 1e-8)
            throw VerificationFailure("compress_support: support escaped the compressed block");
    return out;
}

}  // namespace straddle
