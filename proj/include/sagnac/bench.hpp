#pragma once

// Mach-Zehnder test rig around the phase shifter: fringe sweeps, visibility
// and contrast figures, insertion loss and the time-domain switching trace.

#include <span>
#include <vector>

#include "sagnac/drive.hpp"
#include "sagnac/loop.hpp"

namespace sagnac {

struct MzSetup {
    LoopLayout loop;
    /// Reference-arm transfer; diagonal phases model imperfect polarization
    /// compensation of the rig's splitter and retro-reflectors.
    PolarizationTransform ref_arm = PolarizationTransform::identity();
    double mode_overlap = 1.0;   // gamma in [0, 1]
    double background = 0.0;     // additive dark level
    double arm_imbalance = 1.0;  // reference/device power ratio
};

void validate(const MzSetup& s);

struct MeasurementRecord {
    double i_on = 0.0;
    double i_off = 0.0;
    double visibility = 0.0;
    double contrast_ratio = 0.0;  // +inf when i_off is zero
    double contrast_db = 0.0;
    double v_half_fit = 0.0;
};

/// Interferometer output for a normalized input at the given drive voltage:
///   background + 1/4 (|d|^2 + a |r|^2 + 2 gamma sqrt(a) Re<r, d>)
/// with d the device-arm state, r the reference-arm state and a the arm
/// imbalance. The non-interfering fraction of the overlap adds incoherently.
double mz_intensity(const MzSetup& setup, const PolarizationState& input, double drive_voltage);

/// Linear voltage ramp 0..v_max over n samples. Extrema are refined by a
/// parabola through the neighbouring samples; the background is subtracted
/// before the visibility is formed.
/// Throws PreconditionError for v_max < 1.5 V_1/2 or n < 64, DomainError when
/// the sweep holds no interior minimum or no fringe at all.
MeasurementRecord sawtooth_sweep(const MzSetup& setup, const PolarizationState& input, double v_max, int n);

struct SweepSample {
    double voltage = 0.0;
    double intensity = 0.0;
};

std::vector<SweepSample> intensity_sweep(const MzSetup& setup, const PolarizationState& input, double v_max, int n);

struct Contrast {
    double ratio = 0.0;
    double db = 0.0;
};

/// (1 + v) / (1 - v). Throws InfiniteContrast for v == 1 and DomainError
/// outside [0, 1].
Contrast contrast_from_visibility(double visibility);
double visibility_from_contrast(double ratio);

/// -10 log10 of the product of power transmissions, each in (0, 1].
double insertion_loss(std::span<const double> transmissions);

struct SwitchingTrace {
    VoltageWaveform voltage;
    VoltageWaveform intensity;
    double optical_10_90 = 0.0;
    bool optical_edge_falling = false;
};

SwitchingTrace switching_trace(const MzSetup& setup, const PolarizationState& input, const DriveCircuit& circuit,
                               const GateSchedule& gates, double t_end, double dt);

/// Finds the MOSFET on-resistance whose optical 10-90 edge equals
/// `target_edge` (1-D bracketed root find on [r_lo, r_hi]).
double fit_on_resistance(const MzSetup& setup, const PolarizationState& input, DriveCircuit circuit,
                         const GateSchedule& gates, double t_end, double dt, double target_edge, double r_lo,
                         double r_hi);

struct Table1Row {
    double pol_deg = 0.0;
    MeasurementRecord record;
};

/// One sawtooth sweep per linear input polarization (degrees).
std::vector<Table1Row> table1_report(const MzSetup& setup, std::span<const double> pol_deg, double v_max, int n);

/// Mode overlap and reference-arm phase that reproduce measured 0/45/90
/// degree visibilities under the diagonal-phase model, where 0 and 90 give
/// gamma and 45 gives gamma |cos(delta / 2)|. gamma is the error-weighted mean
/// of the 0 and 90 degree rows; delta then matches the 45 degree row exactly
/// (or is zero when that row is not below gamma).
struct ImperfectionFit {
    double mode_overlap = 1.0;
    double ref_phase = 0.0;  // rad
};

struct VisibilityTarget {
    double visibility = 0.0;
    double sigma = 1.0;
};

ImperfectionFit fit_table1_imperfections(const VisibilityTarget& v0, const VisibilityTarget& v45,
                                         const VisibilityTarget& v90);

}  // namespace sagnac
