#include "sagnac/loop.hpp"

#include <algorithm>
#include <cmath>

#include "sagnac/errors.hpp"

namespace sagnac {

void validate(const LoopLayout& layout) {
    validate(layout.crystal);
    validate(OpticalElement{layout.pbs});
    const auto& path = layout.cw_path;
    std::size_t eom_count = 0, eom_index = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        validate(path[i]);
        if (std::holds_alternative<Pbs>(path[i])) throw DomainError("a PBS cannot sit inside the loop path");
        if (std::holds_alternative<Eom>(path[i])) {
            ++eom_count;
            eom_index = i;
        }
    }
    if (eom_count != 1) throw DomainError("the loop must contain exactly one modulator");
    if (path.size() % 2 != 1 || eom_index != path.size() / 2)
        throw DomainError("the modulator must sit at the symmetric midpoint of the loop");
}

LoopLayout build_loop(const CrystalSpec& crystal, const LoopOptions& o) {
    validate(crystal);
    const double sense = o.rotated_beam == RotatedBeam::kClockwise ? -1.0 : 1.0;
    const Axis axis = o.rotated_beam == RotatedBeam::kClockwise ? Axis::kV : Axis::kH;

    LoopLayout layout;
    layout.pbs = o.pbs;
    layout.crystal = crystal;
    layout.output = o.output;
    auto& p = layout.cw_path;
    p.emplace_back(FaradayRotator{sense * (o.fr_angle + o.fr_error[0])});
    p.emplace_back(HalfWavePlate{o.hwp_angle + o.hwp_error[0]});
    if (o.mirror_phase) p.emplace_back(Mirror{*o.mirror_phase});
    p.emplace_back(Eom{crystal, axis, o.eom_residual_phase});
    if (o.mirror_phase) p.emplace_back(Mirror{*o.mirror_phase});
    p.emplace_back(HalfWavePlate{o.hwp_angle + o.hwp_error[1]});
    p.emplace_back(FaradayRotator{-sense * (o.fr_angle + o.fr_error[1])});
    validate(layout);
    return layout;
}

LoopLayout build_default_loop(const CrystalSpec& crystal, double fr_angle, double hwp_angle) {
    LoopOptions o;
    o.fr_angle = fr_angle;
    o.hwp_angle = hwp_angle;
    return build_loop(crystal, o);
}

TraceResult trace_ports(const LoopLayout& layout, const PolarizationState& input, double drive_voltage) {
    auto [cw, ccw] = pbs_split(layout.pbs, input);
    for (const auto& e : layout.cw_path) cw = apply(element_matrix(e, Direction::kForward, drive_voltage), cw);
    for (auto it = layout.cw_path.rbegin(); it != layout.cw_path.rend(); ++it)
        ccw = apply(element_matrix(*it, Direction::kBackward, drive_voltage), ccw);
    const auto ports = pbs_recombine(layout.pbs, cw, ccw);
    if (layout.output == OutputPort::kB) return {ports.port_b, ports.port_a};
    return {ports.port_a, ports.port_b};
}

PolarizationState trace(const LoopLayout& layout, const PolarizationState& input, double drive_voltage) {
    return trace_ports(layout, input, drive_voltage).output;
}

namespace {

struct PortMatrices {
    PolarizationTransform output;
    PolarizationTransform other;
};

PortMatrices port_matrices(const LoopLayout& layout, double v) {
    const auto h = trace_ports(layout, PolarizationState::horizontal(), v);
    const auto vv = trace_ports(layout, PolarizationState::vertical(), v);
    PortMatrices pm;
    pm.output.m = {{{h.output.alpha, vv.output.alpha}, {h.output.beta, vv.output.beta}}};
    pm.other.m = {{{h.other.alpha, vv.other.alpha}, {h.other.beta, vv.other.beta}}};
    return pm;
}

}  // namespace

PolarizationTransform device_matrix(const LoopLayout& layout, double drive_voltage) {
    return port_matrices(layout, drive_voltage).output;
}

PolarizationTransform leak_matrix(const LoopLayout& layout, double drive_voltage) {
    return port_matrices(layout, drive_voltage).other;
}

std::vector<ScanPoint> independence_scan(const LoopLayout& layout, std::span<const double> voltages) {
    if (voltages.empty()) throw DomainError("independence scan needs at least one voltage");
    std::vector<ScanPoint> out;
    out.reserve(voltages.size());
    for (double v : voltages) {
        const auto pm = port_matrices(layout, v);
        ScanPoint p;
        p.voltage = v;
        p.global_phase = global_phase_decompose(pm.output).global_phase;
        p.unwrapped_phase =
            out.empty() ? p.global_phase
                        : out.back().unwrapped_phase + wrap_phase(p.global_phase - out.back().global_phase);
        p.infidelity = normalized_identity_infidelity(pm.output);
        double leak = 0.0;
        for (const auto& row : pm.other.m)
            for (const auto& x : row) leak += std::norm(x);
        p.port_a_power = leak / 2.0;
        out.push_back(p);
    }
    return out;
}

}  // namespace sagnac
