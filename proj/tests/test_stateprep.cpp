#include <doctest.h>

#include <bit>
#include <cmath>

#include "straddle/random.hpp"
#include "straddle/schmidt.hpp"
#include "straddle/stateprep.hpp"

using namespace straddle;

namespace {

int ceil_log2(long r) { return r <= 1 ? 0 : std::bit_width(static_cast<unsigned long>(r - 1)); }

PartitionSpec split(const std::vector<int>& sizes) {
    PartitionSpec p;
    int q = 0;
    for (int s : sizes) {
        std::vector<int> party;
        for (int i = 0; i < s; ++i) party.push_back(q++);
        p.parties.push_back(party);
    }
    return p;
}

PureState random_state(int n, uint64_t seed) {
    Rng rng(seed);
    return PureState::from_amps(n, random_state_vector(int64_t{1} << n, rng));
}

double prep_fidelity_oracle(const Circuit& c, const PureState& target) {
    return fidelity(apply_circuit(c, PureState::zero(c.n)), target);
}

long recount_oracle(const Circuit& c, const PartitionSpec& p) {
    return count_straddling(fuse_straddling(lower(c, p), p), p).total;
}

void check_report(const PrepResult& res, const PureState& target, const PartitionSpec& p) {
    CHECK(res.report.fidelity >= 1 - 1e-8);
    CHECK(prep_fidelity_oracle(res.circuit, target) >= 1 - 1e-8);
    CHECK(res.report.straddling_total == res.report.predicted);
    CHECK(res.report.straddling_total == recount_oracle(res.circuit, p));
    long pair_sum = 0;
    for (const auto& [pair, cnt] : res.report.per_pair) pair_sum += cnt;
    CHECK(pair_sum == res.report.straddling_total);
}

}  // namespace

TEST_CASE("state library matches the closed forms") {
    PureState g = state_library("ghz", {.n = 3});
    CHECK(std::abs(g.amps(0) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(g.amps(7) - 1.0 / std::sqrt(2.0)) < 1e-15);
    for (int i = 1; i < 7; ++i) CHECK(std::abs(g.amps(i)) == 0.0);

    PureState w = state_library("w", {.n = 3});
    for (int i = 0; i < 8; ++i) {
        double want = (i == 1 || i == 2 || i == 4) ? 1.0 / std::sqrt(3.0) : 0.0;
        CHECK(std::abs(w.amps(i) - want) < 1e-15);
    }
}

TEST_CASE("state library output is normalized and seed-deterministic") {
    for (const char* name : {"product", "random"}) {
        PureState a = state_library(name, {.n = 5, .seed = 11});
        PureState b = state_library(name, {.n = 5, .seed = 11});
        PureState c = state_library(name, {.n = 5, .seed = 12});
        CHECK(a.amps == b.amps);
        CHECK((a.amps - c.amps).norm() > 1e-3);
        CHECK(std::abs(a.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("product states factor at every cut") {
    PureState s = state_library("product", {.n = 6, .seed = 3});
    for (auto sizes : std::vector<std::vector<int>>{{1, 5}, {3, 3}, {2, 4}}) {
        auto d = schmidt_decompose(s, split(sizes));
        CHECK(d.rank == 1);
    }
}

TEST_CASE("random-rank states hit the requested rank exactly") {
    for (int r : {1, 2, 3, 4, 6, 8}) {
        StateParams params{.n = 8, .seed = uint64_t(40 + r), .rank = r, .partition = split({3, 5})};
        PureState s = state_library("random-rank", params);
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
        CHECK(schmidt_decompose(s, split({3, 5})).rank == r);
    }
}

TEST_CASE("random-rank respects multi-party cuts too") {
    StateParams params{.n = 8, .seed = 7, .rank = 4, .partition = split({2, 2, 2, 2})};
    PureState s = state_library("random-rank", params);
    PartitionSpec p = split({2, 2, 2, 2});
    // every party-vs-rest cut sees the same rank
    for (int j = 0; j < 4; ++j) {
        std::vector<int> mine = p.party_sorted(j), rest;
        for (int q = 0; q < 8; ++q)
            if (p.party_of(q) != j) rest.push_back(q);
        CHECK(schmidt_decompose(s, PartitionSpec::bipartition(mine, rest)).rank == 4);
    }
}

TEST_CASE("state library rejects bad requests") {
    CHECK_THROWS_AS(state_library("ghz", {.n = 0}), InvalidInput);
    CHECK_THROWS_AS(state_library("nope", {.n = 3}), InvalidInput);
    CHECK_THROWS_AS(state_library("random-rank", {.n = 4, .rank = 2}), InvalidInput);
    StateParams too_big{.n = 8, .seed = 1, .rank = 9, .partition = split({3, 5})};
    CHECK_THROWS_AS(state_library("random-rank", too_big), InvalidInput);
}

// ---------- schmidt register path ----------

TEST_CASE("schmidt path on a product state uses no straddling gates") {
    PureState s = state_library("product", {.n = 6, .seed = 9});
    auto res = prep_schmidt_path(s, split({2, 4}));
    CHECK(res.report.straddling_total == 0);
    check_report(res, s, split({2, 4}));
}

TEST_CASE("one straddling gate suffices for any partially entangled pair") {
    for (double eps : {1e-3, 0.1, 0.5, 0.9}) {
        Vector a = Vector::Zero(4);
        a(0) = std::sqrt(1 - eps);
        a(3) = std::sqrt(eps);
        PureState s = PureState::from_amps(2, a);
        auto res = prep_schmidt_path(s, split({1, 1}));
        CHECK(res.report.straddling_total == 1);
        check_report(res, s, split({1, 1}));
    }
}

TEST_CASE("rank-4 state on a 3|5 cut needs two register copies") {
    StateParams params{.n = 8, .seed = 23, .rank = 4, .partition = split({3, 5})};
    PureState s = state_library("random-rank", params);
    auto res = prep_schmidt_path(s, split({3, 5}));
    CHECK(res.report.straddling_total == 2);
    CHECK(res.report.published_bound == 4);
    CHECK(res.report.published_bound_kind == "schmidt-rank");
    check_report(res, s, split({3, 5}));
}

TEST_CASE("schmidt path count is the register width, monotone in rank") {
    long last = 0;
    for (int r = 1; r <= 8; ++r) {
        StateParams params{.n = 6, .seed = uint64_t(100 + r), .rank = r,
                           .partition = split({3, 3})};
        PureState s = state_library("random-rank", params);
        auto res = prep_schmidt_path(s, split({3, 3}));
        CHECK(res.report.straddling_total == ceil_log2(r));
        CHECK(res.report.straddling_total >= last);
        last = res.report.straddling_total;
        check_report(res, s, split({3, 3}));
    }
}

TEST_CASE("schmidt path orientation is canonical") {
    // larger side listed first still prepares the same state
    PureState s = random_state(5, 77);
    PartitionSpec p = split({3, 2});
    auto res = prep_schmidt_path(s, p);
    CHECK(res.report.straddling_total == 2);  // rank 4 generic on a 2|3 cut
    check_report(res, s, p);
}

// ---------- multiplexed-rotation disentangling ----------

TEST_CASE("mux disentangle leaves product states free") {
    PureState s = state_library("product", {.n = 5, .seed = 31});
    auto res = prep_mux_disentangle(s, split({2, 3}));
    CHECK(res.report.straddling_total == 0);
    check_report(res, s, split({2, 3}));
}

TEST_CASE("bell pair costs a single straddling gate after fusion") {
    PureState s = state_library("ghz", {.n = 2});
    PartitionSpec p = split({1, 1});
    auto res = prep_mux_disentangle(s, p);
    CHECK(res.report.straddling_total == 1);
    CHECK(count_straddling(lower(res.circuit, p), p).total <= 2);  // pre-fusion
    check_report(res, s, p);
}

TEST_CASE("one hundred random states at k1 = 3 stay under the derived bound") {
    PartitionSpec p = split({3, 3});
    for (uint64_t seed = 0; seed < 100; ++seed) {
        PureState s = random_state(6, 1000 + seed);
        auto res = prep_mux_disentangle(s, p);
        CHECK(res.report.straddling_total <= 32);
        CHECK(res.report.published_bound == 6);  // 2^3 - 2, reported only
        CHECK(res.report.fidelity >= 1 - 1e-8);
        CHECK(res.report.straddling_total == res.report.predicted);
    }
}

TEST_CASE("disentangling cost ratio stays bounded across register widths") {
    for (int k1 = 1; k1 <= 5; ++k1) {
        int n = 2 * k1;
        std::vector<int> sizes{k1, n - k1};
        PureState s = random_state(n, uint64_t(500 + k1));
        auto res = prep_mux_disentangle(s, split(sizes));
        double ratio = double(res.report.straddling_total) / double(1 << k1);
        CHECK(ratio <= 8.0);
        CHECK(res.report.straddling_total <= (1 << (k1 + 2)));
        CHECK(res.report.fidelity >= 1 - 1e-8);
    }
}

TEST_CASE("mux disentangle handles unbalanced cuts and scrambled wire order") {
    PartitionSpec p;
    p.parties = {{5, 0, 3}, {2, 1, 4}};  // deliberately unsorted
    PureState s = random_state(6, 4242);
    auto res = prep_mux_disentangle(s, p);
    CHECK(res.report.straddling_total <= 32);
    check_report(res, s, p);

    PureState t = random_state(7, 4243);
    auto res2 = prep_mux_disentangle(t, split({2, 5}));
    CHECK(res2.report.straddling_total <= 16);
    check_report(res2, t, split({2, 5}));
}

// ---------- multipartite disentangling ----------

TEST_CASE("multipartite prep of a fully product state is free") {
    PureState s = state_library("product", {.n = 6, .seed = 55});
    auto res = prep_multipartite(s, split({1, 2, 3}));
    CHECK(res.report.straddling_total == 0);
    check_report(res, s, split({1, 2, 3}));
}

TEST_CASE("random six-qubit state on parties (1,1,4) fits the anchor bound") {
    PartitionSpec p = split({1, 1, 4});
    for (uint64_t seed = 0; seed < 10; ++seed) {
        PureState s = random_state(6, 7000 + seed);
        auto res = prep_multipartite(s, p);
        CHECK(res.report.straddling_total <= 32);  // 8 * 2^(6-4)
        CHECK(res.report.published_bound == 32);
        check_report(res, s, p);
    }
}

TEST_CASE("two equal halves recover the bipartite cost") {
    PartitionSpec p = split({3, 3});
    for (uint64_t seed = 0; seed < 3; ++seed) {
        PureState s = random_state(6, 9100 + seed);
        auto multi = prep_multipartite(s, p);
        auto bi = prep_mux_disentangle(s, p);
        CHECK(multi.report.straddling_total == bi.report.straddling_total);
        CHECK(multi.report.straddling_total <= 8 * (1 << 3));
        check_report(multi, s, p);
    }
}

TEST_CASE("anchor bound holds across assorted party shapes") {
    for (auto sizes : std::vector<std::vector<int>>{
             {1, 2, 3}, {2, 2, 2}, {1, 1, 1, 3}, {2, 3, 3}, {1, 1, 2, 2}}) {
        int n = 0, km = 0;
        for (int s : sizes) {
            n += s;
            km = std::max(km, s);
        }
        PureState s = random_state(n, uint64_t(7700 + n * 13 + km));
        auto res = prep_multipartite(s, split(sizes));
        CHECK(res.report.straddling_total <= (8L << (n - km)));
        CHECK(res.report.published_bound == (8L << (n - km)));
        check_report(res, s, split(sizes));
    }
}

TEST_CASE("ghz across parties is cheap for the generic engine too") {
    PureState s = state_library("ghz", {.n = 6});
    auto res = prep_multipartite(s, split({1, 2, 3}));
    CHECK(res.report.straddling_total <= 8);
    check_report(res, s, split({1, 2, 3}));
}

// ---------- schmidt-decomposable path ----------

TEST_CASE("ghz over single-qubit parties costs m - 1 fanout gates") {
    for (int m = 3; m <= 8; ++m) {
        PureState s = state_library("ghz", {.n = m});
        PartitionSpec p = split(std::vector<int>(m, 1));
        auto res = prep_schmidt_decomposable(s, p);
        CHECK(res.report.straddling_total == m - 1);
        CHECK(res.report.published_bound == 2 * m);
        check_report(res, s, p);
    }
}

TEST_CASE("decomposable prep of a product state is free") {
    PureState s = state_library("product", {.n = 6, .seed = 77});
    auto res = prep_schmidt_decomposable(s, split({2, 2, 2}));
    CHECK(res.report.straddling_total == 0);
    check_report(res, s, split({2, 2, 2}));
}

TEST_CASE("four parties of two qubits at rank four need six fanout gates") {
    PartitionSpec p = split({2, 2, 2, 2});
    StateParams params{.n = 8, .seed = 81, .rank = 4, .partition = p};
    PureState s = state_library("random-rank", params);
    auto res = prep_schmidt_decomposable(s, p);
    CHECK(res.report.straddling_total == 6);  // (4-1) * ceil(log2 4)
    check_report(res, s, p);
}

TEST_CASE("an explicit form synthesizes without re-certification") {
    SchmidtDecomposableForm form;
    form.weights = {std::sqrt(0.75), std::sqrt(0.25)};
    for (int j = 0; j < 3; ++j) {
        Vector v0 = Vector::Zero(4), v1 = Vector::Zero(4);
        v0(0) = 1.0;
        v1(3) = 1.0;
        form.party_bases.push_back({v0, v1});
    }
    PartitionSpec p = split({2, 2, 2});
    auto res = prep_schmidt_decomposable(form, p);
    CHECK(res.report.straddling_total == 2);
    PureState target = reconstruct_form(form, p);
    CHECK(prep_fidelity_oracle(res.circuit, target) >= 1 - 1e-8);
}

TEST_CASE("non-decomposable states are refused with the failed check named") {
    PureState w = state_library("w", {.n = 3});
    PartitionSpec p = split({1, 1, 1});
    CHECK_THROWS_WITH_AS(prep_schmidt_decomposable(w, p),
                         doctest::Contains("not decomposable"), InvalidInput);
}

TEST_CASE("degenerate undecidable states are refused with a diagnostic") {
    // branch vectors entangle party B with party C and no rotation can fix it,
    // but the degenerate top-level weights make that impossible to certify
    Vector a = Vector::Zero(16);
    a(0) = a(6) = a(9) = a(15) = 0.5;
    PureState s = PureState::from_amps(4, a);
    PartitionSpec p = split({1, 1, 2});
    CHECK_THROWS_WITH_AS(prep_schmidt_decomposable(s, p),
                         doctest::Contains("cannot certify"), InvalidInput);
}

TEST_CASE("malformed explicit forms are rejected") {
    SchmidtDecomposableForm form;
    form.weights = {1.0};
    CHECK_THROWS_AS(prep_schmidt_decomposable(form, split({1, 1})), InvalidInput);

    SchmidtDecomposableForm big;
    big.weights = {0.5, 0.5, 0.5, 0.5};
    big.weights.push_back(0.0);  // rank 5 > dim 4 of a 2-qubit party
    for (int j = 0; j < 2; ++j) {
        std::vector<Vector> fam;
        for (int i = 0; i < 5; ++i) fam.push_back(Vector::Zero(4));
        big.party_bases.push_back(fam);
    }
    CHECK_THROWS_AS(prep_schmidt_decomposable(big, split({2, 2})), InvalidInput);
}

// ---------- cross-method properties ----------

TEST_CASE("every method reaches its target over a wide seeded sweep") {
    long cases = 0;
    for (uint64_t seed = 0; seed < 25; ++seed) {
        PureState s = random_state(6, 20000 + seed);
        for (auto sizes : std::vector<std::vector<int>>{{2, 4}, {3, 3}}) {
            auto a = prep_schmidt_path(s, split(sizes));
            auto b = prep_mux_disentangle(s, split(sizes));
            CHECK(a.report.fidelity >= 1 - 1e-8);
            CHECK(b.report.fidelity >= 1 - 1e-8);
            CHECK(a.report.straddling_total == a.report.predicted);
            CHECK(b.report.straddling_total == b.report.predicted);
            cases += 2;
        }
        auto c = prep_multipartite(random_state(6, 30000 + seed), split({2, 2, 2}));
        CHECK(c.report.fidelity >= 1 - 1e-8);
        CHECK(c.report.straddling_total == c.report.predicted);
        ++cases;
    }
    for (uint64_t seed = 0; seed < 10; ++seed) {
        PureState s = random_state(10, 40000 + seed);
        auto res = prep_mux_disentangle(s, split({4, 6}));
        CHECK(res.report.fidelity >= 1 - 1e-8);
        CHECK(res.report.straddling_total == res.report.predicted);
        ++cases;
    }
    CHECK(cases >= 100);
}

TEST_CASE("reports disagree with nothing: recount matches on fresh circuits") {
    PureState s = random_state(7, 999);
    PartitionSpec p = split({3, 4});
    auto res = prep_mux_disentangle(s, p);
    check_report(res, s, p);
    auto res2 = prep_schmidt_path(s, p);
    check_report(res2, s, p);
}
