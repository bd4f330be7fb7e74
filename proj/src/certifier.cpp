#include "straddle/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "straddle/linalg.hpp"
#include "straddle/random.hpp"

namespace straddle {
namespace {

constexpr double kAchieveGap = 1e-6;
constexpr double kConvergeGap = 1e-12;
constexpr int kMaxIters = 10000;
constexpr int kMaxCertQubits = 5;
constexpr int kMaxPartyQubits = 2;
constexpr int kMaxBudget = 8;

// All qubit relabelings that permute only within parties.  Party sizes are
// capped at two, so each party contributes at most one swap.
std::vector<std::vector<int>> party_relabelings(const PartitionSpec& p) {
    const int n = p.num_qubits();
    std::vector<int> ident(n);
    std::iota(ident.begin(), ident.end(), 0);
    std::vector<std::vector<int>> maps{ident};
    for (int j = 0; j < p.num_parties(); ++j) {
        const auto qs = p.party_sorted(j);
        if (qs.size() != 2) continue;
        const size_t cur = maps.size();
        for (size_t i = 0; i < cur; ++i) {
            auto m = maps[i];
            std::swap(m[qs[0]], m[qs[1]]);
            maps.push_back(std::move(m));
        }
    }
    return maps;
}

std::vector<std::pair<int, int>> relabel_sequence(const std::vector<std::pair<int, int>>& seq,
                                                  const std::vector<int>& map) {
    std::vector<std::pair<int, int>> out;
    out.reserve(seq.size());
    for (auto [a, b] : seq) {
        int x = map[a], y = map[b];
        out.emplace_back(std::min(x, y), std::max(x, y));
    }
    return out;
}

struct Piece {
    bool slot = false;
    int party = -1;
    std::vector<int> qubits;  // LocalBlock listing (desc) or {hi, lo}
    int offset = 0;
    int nparams = 0;
};

struct Ansatz {
    int n = 0;
    std::vector<Piece> pieces;
    std::vector<int> owner;  // parameter index -> piece index
    int total = 0;
};

Ansatz build_ansatz(const PartitionSpec& p, const std::vector<std::pair<int, int>>& slots) {
    Ansatz az;
    az.n = p.num_qubits();
    auto add = [&](Piece pc) {
        pc.offset = az.total;
        az.total += pc.nparams;
        for (int i = 0; i < pc.nparams; ++i) az.owner.push_back(static_cast<int>(az.pieces.size()));
        az.pieces.push_back(std::move(pc));
    };
    auto add_layer = [&] {
        for (int j = 0; j < p.num_parties(); ++j) {
            auto qs = p.party_sorted(j);
            std::vector<int> desc(qs.rbegin(), qs.rend());
            const int dim = 1 << static_cast<int>(qs.size());
            add(Piece{false, j, std::move(desc), 0, dim * dim});
        }
    };
    add_layer();
    for (auto [a, b] : slots) {
        add(Piece{true, -1, {std::min(a, b), std::max(a, b)}, 0, 0});
        add_layer();
    }
    return az;
}

Matrix hermitian_from(const double* t, int dim) {
    Matrix h(dim, dim);
    size_t k = 0;
    for (int i = 0; i < dim; ++i) h(i, i) = t[k++];
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
            const double re = t[k++], im = t[k++];
            h(i, j) = cx(re, im);
            h(j, i) = cx(re, -im);
        }
    return h;
}

Gate piece_gate(const Piece& pc, const double* params) {
    if (pc.slot) return CnotGate{pc.qubits[0], pc.qubits[1]};
    const int dim = 1 << static_cast<int>(pc.qubits.size());
    Matrix u = linalg::expi_hermitian(hermitian_from(params + pc.offset, dim));
    return LocalBlockGate{pc.party, pc.qubits, std::move(u)};
}

struct Evaluator {
    const Ansatz* az;
    const PureState* target;
    std::vector<Gate> gates;

    void rebuild_all(const std::vector<double>& th) {
        gates.clear();
        gates.reserve(az->pieces.size());
        for (const auto& pc : az->pieces) gates.push_back(piece_gate(pc, th.data()));
    }
    void rebuild_one(int pi, const std::vector<double>& th) {
        gates[pi] = piece_gate(az->pieces[pi], th.data());
    }
    double overlap() const {
        PureState s = PureState::zero(az->n);
        for (const auto& g : gates) s = apply_gate(g, s);
        return std::norm(target->amps.dot(s.amps));
    }
};

// Adaptive-step ascent with central-difference gradients; stops on a sub-1e-12
// improvement, a dead line search, the iteration cap, or early success.
double optimize(Evaluator& ev, std::vector<double>& th, Rng& rng) {
    for (auto& v : th) v = rng.gaussian() * 0.7;
    ev.rebuild_all(th);
    double f = ev.overlap();
    const double h = 1e-5;
    double step = 0.3;
    std::vector<double> grad(th.size()), trial;
    for (int iter = 0; iter < kMaxIters; ++iter) {
        for (size_t k = 0; k < th.size(); ++k) {
            const int pi = ev.az->owner[k];
            const double orig = th[k];
            th[k] = orig + h;
            ev.rebuild_one(pi, th);
            const double fp = ev.overlap();
            th[k] = orig - h;
            ev.rebuild_one(pi, th);
            const double fm = ev.overlap();
            th[k] = orig;
            ev.rebuild_one(pi, th);
            grad[k] = (fp - fm) / (2.0 * h);
        }
        double tried = step, ft = -1.0;
        bool ok = false;
        while (tried > 1e-10) {
            trial = th;
            for (size_t k = 0; k < th.size(); ++k) trial[k] += tried * grad[k];
            ev.rebuild_all(trial);
            ft = ev.overlap();
            if (ft > f) {
                ok = true;
                break;
            }
            tried *= 0.5;
        }
        if (!ok) return f;
        const double gain = ft - f;
        th = trial;
        f = ft;
        step = std::min(tried * 2.0, 2.0);
        if (f >= 1.0 - kAchieveGap || gain < kConvergeGap) return f;
    }
    return f;
}

}  // namespace

std::vector<std::vector<std::pair<int, int>>> enumerate_templates(const PartitionSpec& p,
                                                                  int budget) {
    p.validate();
    if (budget < 0) throw InvalidInput("certify: negative budget");
    if (budget == 0) return {{}};

    std::vector<std::pair<int, int>> pairs;
    const int n = p.num_qubits();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (p.party_of(a) != p.party_of(b)) pairs.emplace_back(a, b);
    if (pairs.empty()) return {};

    const auto maps = party_relabelings(p);
    std::vector<std::vector<std::pair<int, int>>> out;
    std::vector<size_t> idx(budget, 0);
    while (true) {
        std::vector<std::pair<int, int>> seq;
        seq.reserve(budget);
        for (size_t i : idx) seq.push_back(pairs[i]);
        bool canonical = true;
        for (const auto& m : maps)
            if (relabel_sequence(seq, m) < seq) {
                canonical = false;
                break;
            }
        if (canonical) out.push_back(std::move(seq));
        int d = budget - 1;
        while (d >= 0 && ++idx[d] == pairs.size()) idx[d--] = 0;
        if (d < 0) break;
    }
    return out;
}

CertificateResult certify_min_straddle(const PureState& target, const PartitionSpec& p,
                                       int budget, int restarts, uint64_t seed,
                                       const Tolerances& tol) {
    p.validate();
    const int n = p.num_qubits();
    if (target.n != n) throw InvalidInput("certify: state size does not match the partition");
    if (std::abs(target.norm() - 1.0) > 1e-6)
        throw InvalidInput("certify: state is not normalized");
    if (n > kMaxCertQubits)
        throw ResourceLimit("certify: at most " + std::to_string(kMaxCertQubits) + " qubits");
    for (int j = 0; j < p.num_parties(); ++j)
        if (p.party_sorted(j).size() > kMaxPartyQubits)
            throw ResourceLimit("certify: parties capped at " +
                                std::to_string(kMaxPartyQubits) + " qubits");
    if (budget < 0) throw InvalidInput("certify: negative budget");
    if (budget > kMaxBudget) throw ResourceLimit("certify: budget capped at 8");
    if (restarts < 1) throw InvalidInput("certify: need at least one restart");
    (void)tol;

    CertificateResult res;
    res.seed = seed;
    Rng rng(seed);
    const auto templates = enumerate_templates(p, budget);
    for (size_t ti = 0; ti < templates.size(); ++ti) {
        res.templates_tried = static_cast<int>(ti) + 1;
        const Ansatz az = build_ansatz(p, templates[ti]);
        Evaluator ev{&az, &target, {}};
        std::vector<double> th(az.total);
        for (int r = 0; r < restarts; ++r) {
            ++res.restarts_used;
            const double f = optimize(ev, th, rng);
            res.best_fidelity = std::max(res.best_fidelity, f);
            if (f >= 1.0 - kAchieveGap) {
                ev.rebuild_all(th);
                Circuit c;
                c.n = n;
                c.gates = ev.gates;
                res.verdict = CertVerdict::Achievable;
                res.best_fidelity = f;
                res.circuit = std::move(c);
                return res;
            }
        }
    }
    res.verdict = CertVerdict::NotFound;
    return res;
}

}  // namespace straddle
