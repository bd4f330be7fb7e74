#pragma once

#include <vector>

#include "straddle/stateprep.hpp"

namespace straddle {

struct QsdConfig {
    // Qubits to peel, outermost first.  Empty means: peel the smaller party's
    // qubits, highest global index first.  Once the list runs out the
    // synthesizer keeps peeling from the side with fewer active wires.
    std::vector<int> split_order;
    int max_qubits = 8;
};

struct QsdResult {
    Circuit circuit;
    SynthesisReport report;
};

// Recursive cosine-sine synthesis of a full operator across a bipartition.
// Each level peels one qubit into three multiplexed rotations and four
// half-size operators; recursion stops when the remaining support sits inside
// one party (free block) or on two straddling wires (one two-qubit gate).
QsdResult synth_unitary_qsd(const Matrix& u, const PartitionSpec& cut,
                            const QsdConfig& cfg = {}, const Tolerances& tol = default_tol());

// Straddling count the synthesis produces on a generic full-support unitary,
// found by unrolling the recursion with the given peel side.  The canonical
// model peels the smaller side.
long cost_model_qsd(int p, int q);
long cost_model_qsd_peel(int peel_side, int other_side);

// Upper bound of the same recursion family in closed form, cut off at
// single-qubit peel depth.  Reported for comparison, never asserted.
long qsd_closed_form_bound(int p, int q);

// Parameter-counting floor: straddling gates needed before the circuit family
// has enough real parameters to cover the full unitary group.
long param_lower_bound(int p, int q);

}  // namespace straddle
