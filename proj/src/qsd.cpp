#include "straddle/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "straddle/linalg.hpp"
#include "straddle/multiplexor.hpp"

namespace straddle {
namespace {

constexpr double kSupportTol = 1e-11;
constexpr double kAngleTol = 1e-11;
constexpr double kReconstructTol = 1e-8;

// A wire is idle when the operator never flips it and acts identically on
// both of its branches.
bool wire_trivial(const Matrix& u, int bit) {
    const int64_t dim = u.rows();
    const int64_t m = int64_t(1) << bit;
    for (int64_t r = 0; r < dim; ++r)
        for (int64_t c = 0; c < dim; ++c) {
            if (((r ^ c) & m) != 0 && std::abs(u(r, c)) > kSupportTol) return false;
            if ((r & m) == 0 && (c & m) == 0 &&
                std::abs(u(r, c) - u(r | m, c | m)) > kSupportTol)
                return false;
        }
    return true;
}

Matrix restrict_to_bits(const Matrix& u, const std::vector<int>& keep) {
    const int k = static_cast<int>(keep.size());
    const int64_t dim = int64_t(1) << k;
    auto expand = [&](int64_t x) {
        int64_t y = 0;
        for (int i = 0; i < k; ++i)
            if ((x >> i) & 1) y |= int64_t(1) << keep[i];
        return y;
    };
    Matrix out(dim, dim);
    for (int64_t r = 0; r < dim; ++r)
        for (int64_t c = 0; c < dim; ++c) out(r, c) = u(expand(r), expand(c));
    return out;
}

// Re-index so that bit `pos` becomes the top bit; the others keep their order.
Matrix move_bit_to_top(const Matrix& u, int k, int pos) {
    const int64_t dim = int64_t(1) << k;
    auto remap = [&](int64_t x) {
        int64_t y = 0;
        for (int i = 0; i < k; ++i) {
            int dst = (i == pos) ? k - 1 : (i < pos ? i : i - 1);
            if ((x >> i) & 1) y |= int64_t(1) << dst;
        }
        return y;
    };
    Matrix out(dim, dim);
    for (int64_t r = 0; r < dim; ++r)
        for (int64_t c = 0; c < dim; ++c) out(remap(r), remap(c)) = u(r, c);
    return out;
}

struct QsdCtx {
    const PartitionSpec* part = nullptr;
    const QsdConfig* cfg = nullptr;
    const Tolerances* tol = nullptr;
    std::vector<Gate> gates;
    long predicted = 0;
};

// Next qubit to peel: the configured order first, then whichever side has
// fewer active wires (highest index there).
std::pair<int, size_t> pick_target(const std::vector<int>& wires, size_t split_from,
                                   const QsdCtx& ctx) {
    const auto& order = ctx.cfg->split_order;
    for (size_t i = split_from; i < order.size(); ++i)
        if (std::find(wires.begin(), wires.end(), order[i]) != wires.end())
            return {order[i], i + 1};
    int count[2] = {0, 0};
    for (int w : wires) ++count[ctx.part->party_of(w)];
    const int side = (count[0] <= count[1]) ? 0 : 1;
    int t = -1;
    for (int w : wires)
        if (ctx.part->party_of(w) == side) t = std::max(t, w);
    return {t, split_from};
}

// Append one multiplexed rotation, minus controls that never change the
// angle.  Returns its straddling cost.
long emit_mux(Axis axis, int target, std::vector<int> ctrls, std::vector<double> angles,
              QsdCtx& ctx) {
    for (size_t i = 0; i < ctrls.size();) {
        const int64_t m = int64_t(1) << (ctrls.size() - 1 - i);
        bool matters = false;
        for (int64_t a = 0; a < static_cast<int64_t>(angles.size()) && !matters; ++a)
            if ((a & m) == 0 && std::abs(angles[a] - angles[a | m]) > kAngleTol) matters = true;
        if (matters) {
            ++i;
            continue;
        }
        std::vector<double> reduced;
        reduced.reserve(angles.size() / 2);
        for (int64_t a = 0; a < static_cast<int64_t>(angles.size()); ++a)
            if ((a & m) == 0) reduced.push_back(angles[a]);
        angles = std::move(reduced);
        ctrls.erase(ctrls.begin() + static_cast<long>(i));
    }
    if (std::all_of(angles.begin(), angles.end(),
                    [](double a) { return std::abs(a) <= kAngleTol; }))
        return 0;
    if (ctrls.empty()) {
        ctx.gates.push_back(SingleQubitGate{target, rotation_matrix(axis, angles[0])});
        return 0;
    }
    int remote = 0;
    const int tp = ctx.part->party_of(target);
    for (int c : ctrls)
        if (ctx.part->party_of(c) != tp) ++remote;
    const int local = static_cast<int>(ctrls.size()) - remote;
    ctx.gates.push_back(MuxRotGate{axis, target, std::move(ctrls), std::move(angles)});
    return mux_straddle_exact(remote, local);
}

void synth_node(Matrix u, std::vector<int> wires, size_t split_from, QsdCtx& ctx) {
    const int k = static_cast<int>(wires.size());
    if (k == 0) return;
    std::vector<int> keep;
    for (int i = 0; i < k; ++i)
        if (!wire_trivial(u, i)) keep.push_back(i);
    if (keep.empty()) return;
    if (static_cast<int>(keep.size()) < k) {
        std::vector<int> sub;
        for (int i : keep) sub.push_back(wires[i]);
        synth_node(restrict_to_bits(u, keep), std::move(sub), split_from, ctx);
        return;
    }

    const int p0 = ctx.part->party_of(wires[0]);
    bool cross = false;
    for (int w : wires)
        if (ctx.part->party_of(w) != p0) cross = true;
    if (!cross) {
        std::vector<int> desc(wires.rbegin(), wires.rend());
        ctx.gates.push_back(LocalBlockGate{p0, std::move(desc), std::move(u)});
        return;
    }
    if (k == 2) {
        ctx.gates.push_back(TwoQubitGate{wires[1], wires[0], std::move(u)});
        ++ctx.predicted;
        return;
    }

    auto [t, next_split] = pick_target(wires, split_from, ctx);
    const int pos = static_cast<int>(std::find(wires.begin(), wires.end(), t) - wires.begin());
    if (pos != k - 1) u = move_bit_to_top(u, k, pos);
    std::vector<int> rest = wires;
    rest.erase(rest.begin() + pos);
    std::vector<int> ctrls(rest.rbegin(), rest.rend());

    auto cs = linalg::cs_decompose(u, *ctx.tol);
    auto dr = linalg::demultiplex(cs.r1, cs.r2, *ctx.tol);
    auto dl = linalg::demultiplex(cs.l1, cs.l2, *ctx.tol);
    const int64_t half = int64_t(1) << (k - 1);
    std::vector<double> zr(half), ay(half), zl(half);
    for (int64_t i = 0; i < half; ++i) {
        zr[i] = -2.0 * std::arg(dr.d(i));
        ay[i] = 2.0 * cs.theta(i);
        zl[i] = -2.0 * std::arg(dl.d(i));
    }

    synth_node(dr.w, rest, next_split, ctx);
    ctx.predicted += emit_mux(Axis::Z, t, ctrls, std::move(zr), ctx);
    synth_node(dr.v, rest, next_split, ctx);
    ctx.predicted += emit_mux(Axis::Y, t, ctrls, std::move(ay), ctx);
    synth_node(dl.w, rest, next_split, ctx);
    ctx.predicted += emit_mux(Axis::Z, t, ctrls, std::move(zl), ctx);
    synth_node(dl.v, rest, next_split, ctx);
}

}  // namespace

QsdResult synth_unitary_qsd(const Matrix& u, const PartitionSpec& cut, const QsdConfig& cfg,
                            const Tolerances& tol) {
    cut.validate();
    if (cut.num_parties() != 2) throw InvalidInput("qsd: need exactly two parties");
    const int n = cut.num_qubits();
    if (cfg.max_qubits < 2 || cfg.max_qubits > 10)
        throw InvalidInput("qsd: max_qubits must lie in [2, 10]");
    if (n > cfg.max_qubits)
        throw ResourceLimit("qsd: " + std::to_string(n) + " qubits exceeds the cap of " +
                            std::to_string(cfg.max_qubits));
    const int64_t dim = int64_t(1) << n;
    if (u.rows() != dim || u.cols() != dim)
        throw InvalidInput("qsd: matrix size does not match the partition");
    if ((u * u.adjoint() - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol.unitarity)
        throw InvalidInput("qsd: input is not unitary");
    for (size_t i = 0; i < cfg.split_order.size(); ++i) {
        const int q = cfg.split_order[i];
        if (q < 0 || q >= n) throw InvalidInput("qsd: split_order qubit out of range");
        for (size_t j = 0; j < i; ++j)
            if (cfg.split_order[j] == q) throw InvalidInput("qsd: split_order repeats a qubit");
    }

    QsdCtx ctx;
    ctx.part = &cut;
    ctx.cfg = &cfg;
    ctx.tol = &tol;
    std::vector<int> wires(n);
    for (int i = 0; i < n; ++i) wires[i] = i;
    synth_node(u, std::move(wires), 0, ctx);

    QsdResult res;
    res.circuit.n = n;
    res.circuit.gates = std::move(ctx.gates);

    const Circuit fused = fuse_straddling(lower(res.circuit, cut, {}, tol), cut, tol);
    const StraddleCount sc = count_straddling(fused, cut);
    const double dist = operator_distance_up_to_phase(circuit_unitary(res.circuit, tol), u);
    if (dist > kReconstructTol)
        throw VerificationFailure("qsd: reconstruction distance " + std::to_string(dist));
    if (sc.total != ctx.predicted)
        throw VerificationFailure("qsd: counted " + std::to_string(sc.total) +
                                  " straddling gates, construction predicted " +
                                  std::to_string(ctx.predicted));

    const auto sizes = cut.sizes_sorted();
    const int k1 = sizes.front(), k2 = sizes.back();
    SynthesisReport& rep = res.report;
    rep.method = "qsd";
    rep.straddling_total = sc.total;
    rep.per_pair = sc.per_pair;
    rep.predicted = ctx.predicted;
    rep.published_bound = int64_t(1) << (2 * k1);
    rep.published_bound_kind = "4^k1";
    rep.fidelity = 1.0 - dist;
    rep.extras["operator_distance"] = dist;
    rep.extras["cost_model"] = static_cast<double>(cost_model_qsd(k1, k2));
    rep.extras["cost_model_peel_large"] = static_cast<double>(cost_model_qsd_peel(k2, k1));
    rep.extras["closed_form_bound"] = static_cast<double>(qsd_closed_form_bound(k1, k2));
    rep.extras["param_lower_bound"] = static_cast<double>(param_lower_bound(k1, k2));
    rep.extras["k1"] = k1;
    rep.extras["k2"] = k2;
    return res;
}

long cost_model_qsd_peel(int peel_side, int other_side) {
    if (peel_side < 0 || other_side < 0) throw InvalidInput("cost model: negative party size");
    if (peel_side == 0 || other_side == 0) return 0;
    if (peel_side == 1 && other_side == 1) return 1;
    if (peel_side == 1) return 3 * mux_straddle_exact(other_side, 0);
    return 3 * mux_straddle_exact(other_side, peel_side - 1) +
           4 * cost_model_qsd_peel(peel_side - 1, other_side);
}

long cost_model_qsd(int p, int q) { return cost_model_qsd_peel(std::min(p, q), std::max(p, q)); }

long qsd_closed_form_bound(int p, int q) {
    if (p > q) std::swap(p, q);
    if (p < 0) throw InvalidInput("closed form: negative party size");
    if (p <= 1) return cost_model_qsd(p, q);
    const long base = cost_model_qsd(1, q);
    return (long(1) << (2 * (p - 1))) * (base + 3 * (long(1) << (p - 1))) -
           3 * (long(1) << p);
}

long param_lower_bound(int p, int q) {
    if (p < 0 || q < 0) throw InvalidInput("parameter bound: negative party size");
    if (p + q > 15) throw ResourceLimit("parameter bound: system too large");
    const long num = (long(1) << (2 * (p + q))) - 1 - (long(1) << (2 * p)) - (long(1) << (2 * q));
    const long den = 15 + (long(1) << (2 * p)) + (long(1) << (2 * q));
    if (num <= 0) return 0;
    return (num + den - 1) / den;
}

}  // namespace straddle
