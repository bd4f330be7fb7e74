#pragma once

#include <optional>
#include <string>
#include <vector>

#include "straddle/circuit.hpp"
#include "straddle/types.hpp"

namespace straddle {

// Bipartite decomposition s = sum_i weights[i] left[i] (x) right[i].
// Vectors are expressed in party-local index order: a party's qubits sorted
// ascending, the lowest global index being the least significant local bit.
// Only the `rank` terms above the cutoff are kept.
struct SchmidtDecomposition {
    std::vector<double> weights;   // positive, descending
    std::vector<Vector> left_basis;
    std::vector<Vector> right_basis;
    int rank = 0;
    double tolerance = 0.0;
};

SchmidtDecomposition schmidt_decompose(const PureState& s, const PartitionSpec& cut,
                                       const Tolerances& tol = default_tol());

// Reassemble the state from a decomposition (for checks and oracles).
PureState schmidt_reconstruct(const SchmidtDecomposition& d, const PartitionSpec& cut);

// Nested decomposition: level 0 cuts party 0 against the rest; level l+1 cuts
// the next party inside every branch vector of level l.  levels[l][b] is the
// decomposition of branch b, branches ordered by (parent branch, parent term).
struct IteratedDecomposition {
    std::vector<std::vector<SchmidtDecomposition>> levels;
    std::vector<long> level_terms() const;  // total Schmidt terms per level
};

IteratedDecomposition iterated_decompose(const PureState& s, const PartitionSpec& p,
                                         const Tolerances& tol = default_tol());

// s = sum_i weights[i] (x)_j party_bases[j][i], one orthonormal family per party.
struct SchmidtDecomposableForm {
    std::vector<double> weights;
    std::vector<std::vector<Vector>> party_bases;
};

struct DecomposabilityResult {
    enum class Verdict { yes, no, indeterminate };
    Verdict verdict = Verdict::indeterminate;
    std::optional<SchmidtDecomposableForm> form;  // set when verdict == yes
    std::string reason;
};

DecomposabilityResult is_schmidt_decomposable(const PureState& s, const PartitionSpec& p,
                                              const Tolerances& tol = default_tol());

PureState reconstruct_form(const SchmidtDecomposableForm& f, const PartitionSpec& p);

// In bits; -sum w^2 log2 w^2 over the Schmidt weights at the cut.
double entanglement_entropy(const PureState& s, const PartitionSpec& cut,
                            const Tolerances& tol = default_tol());

// Local rotation moving one side's Schmidt support onto its lowest-indexed
// qubits, plus the rotated state.  side is 0 or 1 within the cut.
struct CompressionResult {
    LocalBlockGate gate;
    PureState state;
    int rank = 0;
    int active_qubits = 0;  // ceil(log2 rank)
};

CompressionResult compress_support(const PureState& s, const PartitionSpec& cut, int side,
                                   const Tolerances& tol = default_tol());

}  // namespace straddle
