#include <doctest.h>

#include <cmath>

#include "straddle/circuit.hpp"
#include "straddle/linalg.hpp"
#include "straddle/random.hpp"

using namespace straddle;

namespace {

PureState random_pure(int n, Rng& rng) {
    return PureState::from_amps(n, random_state_vector(1 << n, rng));
}

Matrix s_gate() {
    Matrix s = Matrix::Identity(2, 2);
    s(1, 1) = cx(0, 1);
    return s;
}

}  // namespace

TEST_CASE("partition validation and lookups") {
    PartitionSpec p{{{0, 2}, {1, 3}}};
    p.validate();
    CHECK(p.num_qubits() == 4);
    CHECK(p.party_of(2) == 0);
    CHECK(p.party_of(3) == 1);
    CHECK(p.party_sorted(0) == std::vector<int>{0, 2});

    PartitionSpec overlap{{{0, 1}, {1, 2}}};
    CHECK_THROWS_AS(overlap.validate(), InvalidInput);
    PartitionSpec gap{{{0}, {2}}};
    CHECK_THROWS_AS(gap.validate(), InvalidInput);

    auto bi = PartitionSpec::bipartition({0, 1}, {2, 3, 4});
    CHECK(bi.num_parties() == 2);
    CHECK(bi.sizes_sorted() == std::vector<int>{2, 3});
}

TEST_CASE("cnot truth table with qubit 0 least significant") {
    // control qubit 0, target qubit 1: flips bit 1 when bit 0 is set
    PureState s = PureState::zero(2);
    s.amps.setZero();
    s.amps(1) = 1.0;  // |q1=0, q0=1>
    PureState out = apply_gate(CnotGate{0, 1}, s);
    CHECK(std::abs(out.amps(3) - cx(1, 0)) < 1e-15);

    s.amps.setZero();
    s.amps(2) = 1.0;  // |q1=1, q0=0>: control clear, nothing happens
    out = apply_gate(CnotGate{0, 1}, s);
    CHECK(std::abs(out.amps(2) - cx(1, 0)) < 1e-15);
}

TEST_CASE("two-qubit gate convention puts q1 at the most significant bit") {
    Rng rng(3);
    PureState s = random_pure(2, rng);
    PureState a = apply_gate(CnotGate{1, 0}, s);
    PureState b = apply_gate(TwoQubitGate{1, 0, cnot_matrix()}, s);
    CHECK((a.amps - b.amps).cwiseAbs().maxCoeff() < 1e-14);

    // swapped wire order must equal the reversed cnot
    PureState c = apply_gate(TwoQubitGate{0, 1, cnot_matrix()}, s);
    PureState d = apply_gate(CnotGate{0, 1}, s);
    CHECK((c.amps - d.amps).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single-qubit embedding matches kron layout") {
    Rng rng(5);
    Matrix u = random_unitary(2, rng);
    Matrix hi = gate_matrix(SingleQubitGate{1, u}, 2);
    CHECK((hi - linalg::kron(u, Matrix::Identity(2, 2))).cwiseAbs().maxCoeff() < 1e-14);
    Matrix lo = gate_matrix(SingleQubitGate{0, u}, 2);
    CHECK((lo - linalg::kron(Matrix::Identity(2, 2), u)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mux rotation diagonal for a z-axis example") {
    double a = 0.3, b = 1.1;
    Matrix m = gate_matrix(MuxRotGate{Axis::Z, 0, {1}, {a, b}}, 2);
    Vector diag(4);
    diag << std::exp(cx(0, -a / 2)), std::exp(cx(0, a / 2)), std::exp(cx(0, -b / 2)),
        std::exp(cx(0, b / 2));
    CHECK((m - Matrix(diag.asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mux rotation with zero angles is the identity") {
    Matrix m = gate_matrix(MuxRotGate{Axis::Y, 2, {0, 1}, {0, 0, 0, 0}}, 3);
    CHECK((m - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("local block listing qubits most significant first") {
    Rng rng(8);
    Matrix u = random_unitary(4, rng);
    // qubits [1,0]: natural ordering, matrix embeds as-is
    Matrix a = gate_matrix(LocalBlockGate{0, {1, 0}, u}, 2);
    CHECK((a - u).cwiseAbs().maxCoeff() < 1e-14);
    // qubits [0,1]: qubit 0 becomes the most significant wire of the matrix
    Matrix b = gate_matrix(LocalBlockGate{0, {0, 1}, cnot_matrix()}, 2);
    Matrix c = gate_matrix(CnotGate{0, 1}, 2);
    CHECK((b - c).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gate validation rejects malformed gates") {
    CHECK_THROWS_AS(validate_gate(SingleQubitGate{2, Matrix::Identity(2, 2)}, 2), InvalidInput);
    CHECK_THROWS_AS(validate_gate(CnotGate{1, 1}, 2), InvalidInput);
    Matrix notu(2, 2);
    notu << 1, 0, 0, 2;
    CHECK_THROWS_AS(validate_gate(SingleQubitGate{0, notu}, 1), InvalidInput);
    CHECK_THROWS_AS(validate_gate(MuxRotGate{Axis::Z, 0, {1}, {0.1}}, 2), InvalidInput);
    CHECK_THROWS_AS(validate_gate(LocalBlockGate{0, {0, 0}, Matrix::Identity(4, 4)}, 2),
                    InvalidInput);
}

TEST_CASE("apply_gate agrees with dense gate matrices") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 3;
        PureState s = random_pure(n, rng);
        std::vector<Gate> gates = {
            SingleQubitGate{static_cast<int>(rng.below(3)), random_unitary(2, rng)},
            TwoQubitGate{0, 2, random_unitary(4, rng)},
            CnotGate{2, 0},
            MuxRotGate{Axis::Y, 1, {2, 0}, {rng.uniform(), rng.uniform(), rng.uniform(),
                                            rng.uniform()}},
            LocalBlockGate{0, {2, 1, 0}, random_unitary(8, rng)},
        };
        for (const Gate& g : gates) {
            PureState fast = apply_gate(g, s);
            Vector slow = gate_matrix(g, n) * s.amps;
            CHECK((fast.amps - slow).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("circuit_unitary composes gates in application order") {
    Rng rng(23);
    Circuit c;
    c.n = 3;
    c.gates = {SingleQubitGate{0, random_unitary(2, rng)}, CnotGate{0, 2},
               TwoQubitGate{2, 1, random_unitary(4, rng)}};
    Matrix u = circuit_unitary(c);
    Matrix oracle = Matrix::Identity(8, 8);
    for (const Gate& g : c.gates) oracle = gate_matrix(g, 3) * oracle;
    CHECK((u - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lowering keeps the unitary and hits the expected gate counts") {
    Rng rng(31);
    PartitionSpec p{{{0, 1}, {2, 3}}};

    SUBCASE("all controls local: one block") {
        MuxRotGate m{Axis::Z, 0, {1}, {0.4, -0.2}};
        Circuit c{4, {m}};
        Circuit low = lower(c, p);
        REQUIRE(low.gates.size() == 1);
        CHECK(std::holds_alternative<LocalBlockGate>(low.gates[0]));
        CHECK(operator_distance_up_to_phase(circuit_unitary(low), circuit_unitary(c)) < 1e-10);
        CHECK(count_straddling(low, p).total == 0);
    }

    SUBCASE("one remote control, no locals: one straddling gate") {
        MuxRotGate m{Axis::Y, 0, {2}, {0.9, 0.1}};
        Circuit c{4, {m}};
        Circuit low = lower(c, p);
        REQUIRE(low.gates.size() == 1);
        CHECK(std::holds_alternative<TwoQubitGate>(low.gates[0]));
        CHECK(operator_distance_up_to_phase(circuit_unitary(low), circuit_unitary(c)) < 1e-10);
        CHECK(count_straddling(low, p).total == 1);
    }

    SUBCASE("two remote controls and one local: four cnots") {
        MuxRotGate m{Axis::Z, 0, {3, 2, 1}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8}};
        Circuit c{4, {m}};
        Circuit low = lower(c, p);
        CHECK(low.gates.size() == 8);  // four segments, four cnots
        CHECK(count_straddling(low, p).total == 4);
        CHECK(operator_distance_up_to_phase(circuit_unitary(low), circuit_unitary(c)) < 1e-10);
    }

    SUBCASE("random mux wire orders stay equivalent") {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<int> wires = {0, 1, 2, 3};
            int target = wires[rng.below(4)];
            std::vector<int> controls;
            for (int w : wires)
                if (w != target && rng.below(2)) controls.push_back(w);
            std::vector<double> angles(size_t{1} << controls.size());
            for (double& a : angles) a = 2 * rng.uniform() - 1;
            Axis ax = rng.below(2) ? Axis::Z : Axis::Y;
            Circuit c{4, {MuxRotGate{ax, target, controls, angles}}};
            Circuit low = lower(c, p);
            CHECK(operator_distance_up_to_phase(circuit_unitary(low), circuit_unitary(c)) <
                  1e-10);
            for (const Gate& g : low.gates) CHECK(!std::holds_alternative<MuxRotGate>(g));
        }
    }
}

TEST_CASE("expanding local blocks preserves the unitary") {
    Rng rng(37);
    PartitionSpec p{{{0, 1, 2}, {3}}};
    Circuit c{4, {LocalBlockGate{0, {2, 1, 0}, random_unitary(8, rng)}}};
    LowerOptions opt;
    opt.expand_local_blocks = true;
    Circuit low = lower(c, p, opt);
    for (const Gate& g : low.gates) {
        CHECK(!std::holds_alternative<LocalBlockGate>(g));
        CHECK(!std::holds_alternative<MuxRotGate>(g));
    }
    CHECK(operator_distance_up_to_phase(circuit_unitary(low), circuit_unitary(c)) < 1e-9);
    CHECK(count_straddling(low, p).total == 0);
}

TEST_CASE("fusion merges neighbours and deletes identities") {
    PartitionSpec p = PartitionSpec::bipartition({0}, {1});

    SUBCASE("cnot, phase, cnot collapse to one gate") {
        Circuit c{2, {CnotGate{1, 0}, SingleQubitGate{0, s_gate()}, CnotGate{1, 0}}};
        Circuit f = fuse_straddling(c, p);
        REQUIRE(f.gates.size() == 1);
        CHECK(std::holds_alternative<TwoQubitGate>(f.gates[0]));
        CHECK(operator_distance_up_to_phase(circuit_unitary(f), circuit_unitary(c)) < 1e-12);
    }

    SUBCASE("back-to-back cnots vanish") {
        Circuit c{2, {CnotGate{0, 1}, CnotGate{0, 1}}};
        CHECK(fuse_straddling(c, p).gates.empty());
    }

    SUBCASE("mixed orientations still cancel") {
        Circuit c{2, {CnotGate{0, 1}, TwoQubitGate{1, 0, gate_matrix(CnotGate{0, 1}, 2)}}};
        CHECK(fuse_straddling(c, p).gates.empty());
    }

    SUBCASE("gates on disjoint pairs are untouched") {
        PartitionSpec q = PartitionSpec::bipartition({0, 1}, {2, 3});
        Circuit c{4, {CnotGate{0, 2}, CnotGate{1, 3}, CnotGate{0, 2}}};
        Circuit f = fuse_straddling(c, q);
        CHECK(f.gates.size() == 3);
    }

    SUBCASE("fusion never raises the straddle count") {
        Rng rng(41);
        PartitionSpec q = PartitionSpec::bipartition({0, 1}, {2, 3});
        for (int trial = 0; trial < 15; ++trial) {
            Circuit c;
            c.n = 4;
            for (int g = 0; g < 12; ++g) {
                switch (rng.below(3)) {
                    case 0:
                        c.gates.push_back(
                            SingleQubitGate{static_cast<int>(rng.below(4)), random_unitary(2, rng)});
                        break;
                    case 1: {
                        int a = static_cast<int>(rng.below(4));
                        int b = (a + 1 + static_cast<int>(rng.below(3))) % 4;
                        c.gates.push_back(CnotGate{a, b});
                        break;
                    }
                    default: {
                        int a = static_cast<int>(rng.below(4));
                        int b = (a + 1 + static_cast<int>(rng.below(3))) % 4;
                        c.gates.push_back(TwoQubitGate{a, b, random_unitary(4, rng)});
                        break;
                    }
                }
            }
            Circuit f = fuse_straddling(c, q);
            CHECK(operator_distance_up_to_phase(circuit_unitary(f), circuit_unitary(c)) < 1e-9);
            CHECK(count_straddling(f, q).total <= count_straddling(c, q).total);
        }
    }
}

TEST_CASE("straddle counting splits by party pair and ignores local gates") {
    PartitionSpec p{{{0, 1}, {2}, {3, 4}}};
    Circuit c{5,
              {CnotGate{0, 1},                                 // local
               CnotGate{1, 2},                                 // parties 0-1
               TwoQubitGate{3, 2, Matrix::Identity(4, 4)},     // parties 1-2
               CnotGate{0, 4},                                 // parties 0-2
               CnotGate{2, 3}}};                               // parties 1-2
    auto sc = count_straddling(c, p);
    CHECK(sc.total == 4);
    CHECK(sc.per_pair.at({0, 1}) == 1);
    CHECK(sc.per_pair.at({1, 2}) == 2);
    CHECK(sc.per_pair.at({0, 2}) == 1);

    Circuit bad{5, {MuxRotGate{Axis::Z, 0, {2}, {0.1, 0.2}}}};
    CHECK_THROWS_AS(count_straddling(bad, p), InvalidInput);
}

TEST_CASE("straddle count is invariant under relabeling qubits within parties") {
    // swapping the two wires inside party 1 does not change any crossing count
    PartitionSpec p{{{0}, {1, 2}}};
    Circuit c{3, {CnotGate{0, 1}, CnotGate{2, 0}, CnotGate{1, 2}}};
    Circuit swapped{3, {CnotGate{0, 2}, CnotGate{1, 0}, CnotGate{2, 1}}};
    CHECK(count_straddling(c, p).total == count_straddling(swapped, p).total);
}

TEST_CASE("fidelity and operator distance ignore global phase") {
    Rng rng(47);
    PureState s = random_pure(2, rng);
    PureState t = s;
    t.amps *= std::exp(cx(0, 0.7));
    CHECK(fidelity(s, t) == doctest::Approx(1.0).epsilon(1e-12));

    Matrix u = random_unitary(4, rng);
    CHECK(operator_distance_up_to_phase(u, std::exp(cx(0, 1.2)) * u) < 1e-12);
    CHECK(operator_distance_up_to_phase(u, random_unitary(4, rng)) > 1e-3);
}
