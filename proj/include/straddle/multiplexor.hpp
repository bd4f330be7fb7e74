#pragma once

#include <string>
#include <vector>

#include "straddle/circuit.hpp"

namespace straddle {

enum class MuxStrategy { RecursionD1, RecursionD2, Graycode, BarencoControlled };

MuxStrategy parse_strategy(const std::string& name);  // throws InvalidInput
std::string strategy_name(MuxStrategy s);

struct MuxCostQuery {
    int p = 0;  // remote controls
    int q = 0;  // local controls
    MuxStrategy strategy = MuxStrategy::Graycode;
};

// Closed-form straddling counts: (2p-1)*2^q, 2^{p+1}-2, 2^p, or 2p-1.  The
// barenco-controlled form only covers a single multi-controlled rotation, so
// q must be 0 there.  p = 0 needs no straddling under any strategy.
long cost_model_T(const MuxCostQuery& query);

// Straddling count the Gray-code synthesis actually measures, including the
// p = 1 fusion cases the closed form rounds up.
long mux_straddle_exact(int p, int q);

// Splits a full multiplexor angle vector into the 2^p Gray-walk segment angle
// vectors (each of length 2^q).  The vector is indexed by the control
// assignment; remote_positions lists which index bits (0 = least significant)
// belong to remote controls.
std::vector<std::vector<double>> mux_angles_graycode(const std::vector<double>& angles,
                                                     const std::vector<int>& remote_positions);

// Multiplexed rotation with remote controls in another party: Gray-code
// construction, 2^p straddling Cnots for p >= 2.  `angles` are remote-major:
// remote assignment in the high index bits (listed order, first = most
// significant), local assignment in the low bits.
Circuit synth_mux_rotation(Axis axis, int target, const std::vector<int>& remote_controls,
                           const std::vector<int>& local_controls,
                           const std::vector<double>& angles, const PartitionSpec& p,
                           const Tolerances& tol = default_tol());

// Multi-controlled rotation across the cut, 2p - 1 straddling gates: halved
// rotations from a pivot control interleaved with free local multi-controlled
// flips, recursing on the remaining controls.
Circuit synth_controlled_rotation_cross(const std::vector<int>& controls, int target, Axis axis,
                                        double angle, const PartitionSpec& p,
                                        const Tolerances& tol = default_tol());

}  // namespace straddle
