#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "straddle/circuit.hpp"
#include "straddle/schmidt.hpp"

namespace straddle {

struct StateParams {
    int n = 0;
    uint64_t seed = 0;
    int rank = 0;                            // random-rank only
    std::optional<PartitionSpec> partition;  // random-rank only
};

// names: ghz, w, product, random, random-rank
PureState state_library(const std::string& name, const StateParams& params);

struct SynthesisReport {
    std::string method;
    long straddling_total = 0;
    std::map<std::pair<int, int>, long> per_pair;
    long predicted = 0;         // construction cost model, exact
    long published_bound = 0;   // quoted bound, reported but never asserted
    std::string published_bound_kind;
    double fidelity = 0.0;
    std::map<std::string, double> extras;
};

struct PrepResult {
    Circuit circuit;
    SynthesisReport report;
};

// Rank-register path: prepare the Schmidt weights on ceil(log2 r) qubits of
// the smaller side, copy them across with that many transversal Cnots, then
// rotate both sides onto their Schmidt bases.
PrepResult prep_schmidt_path(const PureState& target, const PartitionSpec& cut,
                             const Tolerances& tol = default_tol());

// Multiplexed-rotation path: compress both sides, peel the active qubits of
// the larger side one at a time with paired z/y multiplexed rotations, then
// invert the whole sequence.
PrepResult prep_mux_disentangle(const PureState& target, const PartitionSpec& cut,
                                const Tolerances& tol = default_tol());

// General m-party version of the disentangling path; the largest party is
// kept as the anchor and everything else is peeled against it.
PrepResult prep_multipartite(const PureState& target, const PartitionSpec& p,
                             const Tolerances& tol = default_tol());

// Register-and-fanout path for states carrying a common Schmidt form across
// all parties: (m-1) * ceil(log2 r) straddling Cnots.
PrepResult prep_schmidt_decomposable(const PureState& target, const PartitionSpec& p,
                                     const Tolerances& tol = default_tol());
PrepResult prep_schmidt_decomposable(const SchmidtDecomposableForm& form,
                                     const PartitionSpec& p,
                                     const Tolerances& tol = default_tol());

}  // namespace straddle
