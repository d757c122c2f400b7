#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sagnac/elements.hpp"

namespace sagnac {

/// Which counter-propagating beam gets its polarization turned by 90 degrees
/// on the way to the modulator (and back on the way out).
enum class RotatedBeam { kClockwise, kCounterClockwise };

/// Which recombined splitter exit is reported as the device output.
enum class OutputPort { kB, kA };

/// The loop as seen from the splitter. The clockwise beam is the transmitted
/// (H) component and walks `cw_path` front to back with forward matrices; the
/// counter-clockwise (V) beam walks the same list back to front with backward
/// matrices.
struct LoopLayout {
    Pbs pbs;
    std::vector<OpticalElement> cw_path;
    CrystalSpec crystal;
    OutputPort output = OutputPort::kB;

    friend bool operator==(const LoopLayout&, const LoopLayout&) = default;
};

/// Throws DomainError if an element is invalid, a Pbs sits inside the path,
/// or the modulator is not present exactly once at the midpoint index.
void validate(const LoopLayout& layout);

/// Static per-element imperfections and topology switches for build_loop.
struct LoopOptions {
    double fr_angle = kPi / 4.0;
    double hwp_angle = kPi / 8.0;
    RotatedBeam rotated_beam = RotatedBeam::kClockwise;
    OutputPort output = OutputPort::kB;
    std::array<double, 2> fr_error{};   // rad, added to each rotator's magnitude
    std::array<double, 2> hwp_error{};  // rad, added to each plate's axis
    double eom_residual_phase = 0.0;    // rad/V
    Pbs pbs{};
    /// When set, a mirror with this phase is placed on each side of the modulator.
    std::optional<double> mirror_phase;

    friend bool operator==(const LoopOptions&, const LoopOptions&) = default;
};

/// In the shared lab frame the two rotators must turn in opposite senses for
/// one beam to be rotated twice while the other is untouched, so the path is
///   clockwise rotated:          [FR(-f), HWP(h), EOM(V), HWP(h), FR(+f)]
///   counter-clockwise rotated:  [FR(+f), HWP(h), EOM(H), HWP(h), FR(-f)]
/// The modulator axis follows the common polarization at the crystal.
LoopLayout build_loop(const CrystalSpec& crystal, const LoopOptions& options);

LoopLayout build_default_loop(const CrystalSpec& crystal, double fr_angle = kPi / 4.0,
                              double hwp_angle = kPi / 8.0);

struct TraceResult {
    PolarizationState output;  // selected exit
    PolarizationState other;   // the remaining exit, kept as a diagnostic
};

TraceResult trace_ports(const LoopLayout& layout, const PolarizationState& input, double drive_voltage);

/// Selected-port output state for a normalized input.
PolarizationState trace(const LoopLayout& layout, const PolarizationState& input, double drive_voltage);

/// Columns are the traced H and V inputs.
PolarizationTransform device_matrix(const LoopLayout& layout, double drive_voltage);

/// Transfer matrix into the non-selected exit, same column convention.
PolarizationTransform leak_matrix(const LoopLayout& layout, double drive_voltage);

struct ScanPoint {
    double voltage = 0.0;
    double global_phase = 0.0;     // wrapped, from the canonical decomposition
    double unwrapped_phase = 0.0;  // continuous along the scan
    double infidelity = 0.0;       // scale-free identity distance
    double port_a_power = 0.0;     // mean over H and V inputs
};

/// Throws DomainError for an empty voltage list.
std::vector<ScanPoint> independence_scan(const LoopLayout& layout, std::span<const double> voltages);

}  // namespace sagnac
