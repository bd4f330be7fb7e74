#include "straddle/multiplexor.hpp"

#include <algorithm>
#include <bit>

namespace straddle {

MuxStrategy parse_strategy(const std::string& name) {
    if (name == "recursion-D1") return MuxStrategy::RecursionD1;
    if (name == "recursion-D2") return MuxStrategy::RecursionD2;
    if (name == "graycode") return MuxStrategy::Graycode;
    if (name == "barenco-controlled") return MuxStrategy::BarencoControlled;
    throw InvalidInput("unknown strategy: " + name);
}

std::string strategy_name(MuxStrategy s) {
    switch (s) {
        case MuxStrategy::RecursionD1: return "recursion-D1";
        case MuxStrategy::RecursionD2: return "recursion-D2";
        case MuxStrategy::Graycode: return "graycode";
        case MuxStrategy::BarencoControlled: return "barenco-controlled";
    }
    throw InvalidInput("unknown strategy value");
}

long cost_model_T(const MuxCostQuery& query) {
    if (query.p < 0 || query.q < 0) throw InvalidInput("cost_model_T: negative control count");
    if (query.p > 30 || query.q > 30) throw InvalidInput("cost_model_T: control count too large");
    if (query.p == 0) return 0;
    switch (query.strategy) {
        case MuxStrategy::RecursionD1:
            return (2L * query.p - 1) << query.q;
        case MuxStrategy::RecursionD2:
            return (2L << query.p) - 2;
        case MuxStrategy::Graycode:
            return 1L << query.p;
        case MuxStrategy::BarencoControlled:
            if (query.q != 0)
                throw InvalidInput("cost_model_T: barenco-controlled requires q = 0");
            return 2L * query.p - 1;
    }
    throw InvalidInput("cost_model_T: unknown strategy");
}

long mux_straddle_exact(int p, int q) {
    if (p < 0 || q < 0) throw InvalidInput("mux_straddle_exact: negative control count");
    if (p == 0) return 0;
    if (p == 1) return q == 0 ? 1 : 2;
    return 1L << p;
}

std::vector<std::vector<double>> mux_angles_graycode(const std::vector<double>& angles,
                                                     const std::vector<int>& remote_positions) {
    size_t total = angles.size();
    if (total == 0 || (total & (total - 1)) != 0)
        throw InvalidInput("mux_angles_graycode: angle count must be a power of two");
    int bits = std::bit_width(total) - 1;
    int p = static_cast<int>(remote_positions.size());
    if (p > bits) throw InvalidInput("mux_angles_graycode: more remote positions than bits");
    for (int pos : remote_positions)
        if (pos < 0 || pos >= bits)
            throw InvalidInput("mux_angles_graycode: remote position out of range");
    int q = bits - p;

    // regroup to remote-major order: remote bits (descending position) become
    // the high index bits, the rest keep their relative order below
    std::vector<int> remote_desc(remote_positions);
    std::sort(remote_desc.rbegin(), remote_desc.rend());
    std::vector<int> local_desc;
    for (int b = bits - 1; b >= 0; --b)
        if (std::find(remote_desc.begin(), remote_desc.end(), b) == remote_desc.end())
            local_desc.push_back(b);

    std::vector<double> remote_major(total);
    for (size_t x = 0; x < total; ++x) {
        size_t r = 0, l = 0;
        for (int b : remote_desc) r = (r << 1) | ((x >> b) & 1);
        for (int b : local_desc) l = (l << 1) | ((x >> b) & 1);
        remote_major[(r << q) | l] = angles[x];
    }
    return gray_segment_angles(remote_major, p, q);
}

Circuit synth_mux_rotation(Axis axis, int target, const std::vector<int>& remote_controls,
                           const std::vector<int>& local_controls,
                           const std::vector<double>& angles, const PartitionSpec& p,
                           const Tolerances& tol) {
    p.validate();
    int n = p.num_qubits();
    if (target < 0 || target >= n) throw InvalidInput("synth_mux_rotation: target out of range");
    int tp = p.party_of(target);
    std::vector<int> seen = {target};
    for (int c : remote_controls) {
        if (c < 0 || c >= n) throw InvalidInput("synth_mux_rotation: control out of range");
        if (std::find(seen.begin(), seen.end(), c) != seen.end())
            throw InvalidInput("synth_mux_rotation: repeated wire");
        if (p.party_of(c) == tp)
            throw InvalidInput("synth_mux_rotation: remote control shares the target's party");
        seen.push_back(c);
    }
    for (int c : local_controls) {
        if (c < 0 || c >= n) throw InvalidInput("synth_mux_rotation: control out of range");
        if (std::find(seen.begin(), seen.end(), c) != seen.end())
            throw InvalidInput("synth_mux_rotation: repeated wire");
        if (p.party_of(c) != tp)
            throw InvalidInput("synth_mux_rotation: local control outside the target's party");
        seen.push_back(c);
    }
    size_t expect = size_t{1} << (remote_controls.size() + local_controls.size());
    if (angles.size() != expect)
        throw InvalidInput("synth_mux_rotation: angle count does not match controls");
    for (double a : angles)
        if (!std::isfinite(a)) throw InvalidInput("synth_mux_rotation: non-finite angle");

    Circuit out;
    out.n = n;
    for (auto& g :
         graycode_mux_gates(axis, target, remote_controls, local_controls, angles, tp))
        out.gates.push_back(std::move(g));
    (void)tol;
    return out;
}

namespace {

// multi-controlled X on (controls..., pivot): identity except the last two
// basis states swap
Matrix mcx_matrix(int controls) {
    int64_t dim = int64_t{1} << (controls + 1);
    Matrix m = Matrix::Identity(dim, dim);
    m(dim - 2, dim - 2) = 0;
    m(dim - 1, dim - 1) = 0;
    m(dim - 2, dim - 1) = 1;
    m(dim - 1, dim - 2) = 1;
    return m;
}

void emit_controlled_rotation(std::vector<Gate>& out, std::vector<int> controls, int target,
                              Axis axis, double angle, int control_party) {
    if (controls.size() == 1) {
        out.push_back(TwoQubitGate{controls[0], target, controlled_rotation_matrix(axis, angle)});
        return;
    }
    int pivot = controls.back();
    std::vector<int> rest(controls.begin(), controls.end() - 1);
    std::vector<int> block = rest;
    block.push_back(pivot);
    Matrix mcx = mcx_matrix(static_cast<int>(rest.size()));

    out.push_back(TwoQubitGate{pivot, target, controlled_rotation_matrix(axis, angle / 2)});
    out.push_back(LocalBlockGate{control_party, block, mcx});
    out.push_back(TwoQubitGate{pivot, target, controlled_rotation_matrix(axis, -angle / 2)});
    out.push_back(LocalBlockGate{control_party, block, mcx});
    emit_controlled_rotation(out, rest, target, axis, angle / 2, control_party);
}

}  // namespace

Circuit synth_controlled_rotation_cross(const std::vector<int>& controls, int target, Axis axis,
                                        double angle, const PartitionSpec& p,
                                        const Tolerances& tol) {
    (void)tol;
    p.validate();
    int n = p.num_qubits();
    if (controls.empty())
        throw InvalidInput("synth_controlled_rotation_cross: need at least one control");
    if (target < 0 || target >= n)
        throw InvalidInput("synth_controlled_rotation_cross: target out of range");
    if (!std::isfinite(angle)) throw InvalidInput("synth_controlled_rotation_cross: bad angle");
    int cp = p.party_of(controls[0]);
    if (cp == p.party_of(target))
        throw InvalidInput("synth_controlled_rotation_cross: target shares the control party");
    std::vector<int> seen = {target};
    for (int c : controls) {
        if (c < 0 || c >= n)
            throw InvalidInput("synth_controlled_rotation_cross: control out of range");
        if (p.party_of(c) != cp)
            throw InvalidInput("synth_controlled_rotation_cross: controls span parties");
        if (std::find(seen.begin(), seen.end(), c) != seen.end())
            throw InvalidInput("synth_controlled_rotation_cross: repeated wire");
        seen.push_back(c);
    }

    Circuit out;
    out.n = n;
    emit_controlled_rotation(out.gates, controls, target, axis, angle, cp);
    return out;
}

}  // namespace straddle
