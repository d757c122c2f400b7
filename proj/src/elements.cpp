#include "sagnac/elements.hpp"

#include <cmath>
#include <string>

#include "sagnac/errors.hpp"

namespace sagnac {

namespace {

constexpr double kMaxExtinction = 0.3;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("crystal ") + name + " must be positive");
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

void validate(const CrystalSpec& c) {
    require_positive(c.length_L, "length_L");
    require_positive(c.thickness_d, "thickness_d");
    require_positive(c.wavelength, "wavelength");
    require_positive(c.n_e, "n_e");
    require_positive(c.r33, "r33");
    if (!(c.length_L > c.thickness_d)) throw DomainError("crystal length_L must exceed thickness_d");
}

double half_wave_voltage(const CrystalSpec& c) {
    validate(c);
    return c.wavelength * c.thickness_d / (c.length_L * c.r33 * c.n_e * c.n_e * c.n_e);
}

void validate(const OpticalElement& e) {
    std::visit(Overloaded{
                   [](const HalfWavePlate& h) { require_finite(h.axis_angle, "half-wave plate angle"); },
                   [](const FaradayRotator& f) { require_finite(f.rotation, "Faraday rotation"); },
                   [](const Eom& m) {
                       validate(m.crystal);
                       require_finite(m.residual_orthogonal_phase, "modulator residual phase");
                   },
                   [](const Pbs& p) {
                       for (double x : {p.extinction_t, p.extinction_r})
                           if (!(x >= 0.0 && x < kMaxExtinction))
                               throw DomainError("PBS extinction amplitude must lie in [0, 0.3)");
                   },
                   [](const Mirror& m) { require_finite(m.phase_offset, "mirror phase"); },
                   [](const LossElement& l) {
                       if (!(l.transmission > 0.0 && l.transmission <= 1.0))
                           throw DomainError("loss transmission must lie in (0, 1]");
                   },
               },
               e);
}

PolarizationTransform element_matrix(const OpticalElement& e, Direction dir, double drive_voltage) {
    return std::visit(
        Overloaded{
            [&](const HalfWavePlate& h) {
                // Symmetric, so the reciprocal (transposed) backward matrix is the same.
                const auto fwd = PolarizationTransform::half_wave(h.axis_angle);
                return dir == Direction::kForward ? fwd : fwd.transpose();
            },
            [](const FaradayRotator& f) { return PolarizationTransform::rotation(f.rotation); },
            [&](const Eom& m) {
                const double on_axis = kPi * drive_voltage / half_wave_voltage(m.crystal);
                const double off_axis = m.residual_orthogonal_phase * drive_voltage;
                const Complex a = std::polar(1.0, on_axis);
                const Complex b = std::polar(1.0, off_axis);
                return m.axis == Axis::kV ? PolarizationTransform::diagonal(b, a)
                                          : PolarizationTransform::diagonal(a, b);
            },
            [](const Pbs&) -> PolarizationTransform {
                throw DomainError("a PBS is a four-port; use pbs_split/pbs_combine");
            },
            [](const Mirror& m) { return std::polar(1.0, m.phase_offset) * PolarizationTransform::identity(); },
            [](const LossElement& l) {
                return Complex(std::sqrt(l.transmission), 0.0) * PolarizationTransform::identity();
            },
        },
        e);
}

// Scattering amplitudes from input port A (H, V):
//   A->T: H c_r,  V e_t        A->R: H e_r,  V c_t
// The orthogonal input port B carries the complementary unitary columns:
//   B->T: H -e_r, V c_t        B->R: H c_r,  V -e_t
// Reciprocity (S = S^T) gives the amplitudes for beams coming back in.
PbsOutputs pbs_split(const Pbs& pbs, const PolarizationState& s) {
    validate(OpticalElement{pbs});
    const double et = pbs.extinction_t, er = pbs.extinction_r;
    const double ct = std::sqrt(1.0 - et * et), cr = std::sqrt(1.0 - er * er);
    return {{cr * s.alpha, et * s.beta}, {er * s.alpha, ct * s.beta}};
}

PbsRecombined pbs_recombine(const Pbs& pbs, const PolarizationState& from_transmit_arm,
                            const PolarizationState& from_reflect_arm) {
    validate(OpticalElement{pbs});
    const double et = pbs.extinction_t, er = pbs.extinction_r;
    const double ct = std::sqrt(1.0 - et * et), cr = std::sqrt(1.0 - er * er);
    const auto& cw = from_transmit_arm;  // arrives at the reflecting face
    const auto& ccw = from_reflect_arm;  // arrives at the transmitting face
    PbsRecombined out;
    out.port_b = {cr * cw.alpha - er * ccw.alpha, -et * cw.beta + ct * ccw.beta};
    out.port_a = {er * cw.alpha + cr * ccw.alpha, ct * cw.beta + et * ccw.beta};
    return out;
}

PolarizationState pbs_combine(const Pbs& pbs, const PolarizationState& from_transmit_arm,
                              const PolarizationState& from_reflect_arm) {
    return pbs_recombine(pbs, from_transmit_arm, from_reflect_arm).port_b;
}

}  // namespace sagnac
