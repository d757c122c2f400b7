#pragma once

// Optical element catalogue for the phase-shifter loop.
//
// Direction convention: every matrix is expressed in one lab frame shared by
// both propagation directions (x horizontal, y vertical, fixed axes). A
// reciprocal element traversed backward acts with the transpose of its
// forward matrix; all reciprocal elements here are symmetric, so their
// backward and forward matrices coincide. A Faraday rotator keeps its lab
// sense in both directions, rot(theta) forward and backward, so a
// back-and-forth pass accumulates rot(2 theta) instead of cancelling.

#include <utility>
#include <variant>

#include "sagnac/polarization.hpp"

namespace sagnac {

/// Lithium-niobate style transverse modulator geometry (SI units).
struct CrystalSpec {
    double length_L = 0.0;     // m
    double thickness_d = 0.0;  // m
    double wavelength = 0.0;   // m
    double n_e = 0.0;          // extraordinary index
    double r33 = 0.0;          // m/V

    friend bool operator==(const CrystalSpec&, const CrystalSpec&) = default;
};

/// Throws DomainError unless every field is positive and length exceeds
/// thickness.
void validate(const CrystalSpec& c);

/// lambda * d / (L * r33 * n_e^3).
double half_wave_voltage(const CrystalSpec& c);

enum class Direction { kForward, kBackward };
enum class Axis { kH, kV };

struct HalfWavePlate {
    double axis_angle = 0.0;  // rad
    friend bool operator==(const HalfWavePlate&, const HalfWavePlate&) = default;
};

struct FaradayRotator {
    double rotation = 0.0;  // rad, lab sense
    friend bool operator==(const FaradayRotator&, const FaradayRotator&) = default;
};

struct Eom {
    CrystalSpec crystal;
    Axis axis = Axis::kV;
    double residual_orthogonal_phase = 0.0;  // rad/V on the other axis
    friend bool operator==(const Eom&, const Eom&) = default;
};

/// Polarizing beam splitter as a reciprocal, lossless four-port. The
/// extinctions are leakage amplitudes: V into the transmitted port and H into
/// the reflected port.
struct Pbs {
    double extinction_t = 0.0;
    double extinction_r = 0.0;
    friend bool operator==(const Pbs&, const Pbs&) = default;
};

struct Mirror {
    double phase_offset = 0.0;  // rad
    friend bool operator==(const Mirror&, const Mirror&) = default;
};

struct LossElement {
    double transmission = 1.0;  // power fraction
    friend bool operator==(const LossElement&, const LossElement&) = default;
};

using OpticalElement = std::variant<HalfWavePlate, FaradayRotator, Eom, Pbs, Mirror, LossElement>;

/// Checks the per-kind parameter invariants; throws DomainError.
void validate(const OpticalElement& e);

/// Transfer matrix of a two-port element for the given direction. The drive
/// voltage only matters for an Eom. A Pbs is a four-port and is rejected here;
/// use pbs_split/pbs_combine.
PolarizationTransform element_matrix(const OpticalElement& e, Direction dir, double drive_voltage = 0.0);

struct PbsOutputs {
    PolarizationState transmitted;
    PolarizationState reflected;
};

PbsOutputs pbs_split(const Pbs& pbs, const PolarizationState& s);

/// Both recombined outputs for beams returning to the splitter. `port_b` is
/// the exit opposite the input port, `port_a` is the input port itself.
struct PbsRecombined {
    PolarizationState port_b;
    PolarizationState port_a;
};

/// `from_transmit_arm` is the beam that left through the transmitted port
/// and now returns through the reflecting face; conversely for the other.
PbsRecombined pbs_recombine(const Pbs& pbs, const PolarizationState& from_transmit_arm,
                            const PolarizationState& from_reflect_arm);

/// Port-B output only; inverts pbs_split exactly for an ideal splitter.
PolarizationState pbs_combine(const Pbs& pbs, const PolarizationState& from_transmit_arm,
                              const PolarizationState& from_reflect_arm);

}  // namespace sagnac
