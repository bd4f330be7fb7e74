#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "straddle/circuit.hpp"

namespace straddle {

enum class CertVerdict { Achievable, NotFound };

struct CertificateResult {
    CertVerdict verdict = CertVerdict::NotFound;
    double best_fidelity = 0.0;
    std::optional<Circuit> circuit;  // filled on success: local layers + slot gates
    int restarts_used = 0;
    int templates_tried = 0;
    uint64_t seed = 0;
};

// Ordered straddling-slot layouts for the given budget.  Each template is a
// sequence of cross-party qubit pairs; sequences that differ only by
// relabeling qubits inside a party are collapsed, since free local unitaries
// absorb such relabelings.
std::vector<std::vector<std::pair<int, int>>> enumerate_templates(const PartitionSpec& p,
                                                                  int budget);

// Searches for a circuit with exactly `budget` straddling Cnot gates
// preparing the target: budget+1 free local layers interleaved with the
// template's Cnot slots, optimized by seeded multi-restart gradient ascent
// with numerical gradients.  Slot orientation is canonical (control = lower
// index); the neighboring layers absorb the flipped form.  Verdict is
// Achievable once any template reaches overlap 1 - 1e-6.
CertificateResult certify_min_straddle(const PureState& target, const PartitionSpec& p,
                                       int budget, int restarts, uint64_t seed,
                                       const Tolerances& tol = default_tol());

}  // namespace straddle
