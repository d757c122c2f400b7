#include "sagnac/polarization.hpp"

#include <algorithm>
#include <cmath>

#include "sagnac/errors.hpp"

namespace sagnac {

namespace {

// Entries whose magnitude is within this relative margin of the largest are
// treated as tied, so that rounding noise cannot flip the canonical choice.
constexpr double kTieMargin = 1e-12;

}  // namespace

PolarizationState PolarizationState::linear(double angle) noexcept {
    return {std::cos(angle), std::sin(angle)};
}

PolarizationTransform PolarizationTransform::rotation(double angle) noexcept {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {{{{c, -s}, {s, c}}}};
}

PolarizationTransform PolarizationTransform::half_wave(double axis_angle) noexcept {
    const double c = std::cos(2.0 * axis_angle);
    const double s = std::sin(2.0 * axis_angle);
    return {{{{c, s}, {s, -c}}}};
}

PolarizationTransform PolarizationTransform::retarder(double axis_angle, double retardance) noexcept {
    return compose(rotation(axis_angle),
                   compose(diagonal(1.0, std::polar(1.0, retardance)), rotation(-axis_angle)));
}

PolarizationTransform PolarizationTransform::adjoint() const noexcept {
    PolarizationTransform out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) out.m[r][c] = std::conj(m[c][r]);
    return out;
}

PolarizationTransform PolarizationTransform::transpose() const noexcept {
    PolarizationTransform out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) out.m[r][c] = m[c][r];
    return out;
}

PolarizationTransform operator*(Complex k, const PolarizationTransform& t) noexcept {
    PolarizationTransform out = t;
    for (auto& row : out.m)
        for (auto& v : row) v *= k;
    return out;
}

PolarizationState normalize(const PolarizationState& s) {
    const double n2 = s.norm2();
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw DomainError("unnormalizable");
    const double inv = 1.0 / std::sqrt(n2);
    return {s.alpha * inv, s.beta * inv};
}

PolarizationState apply(const PolarizationTransform& t, const PolarizationState& s) noexcept {
    return {t.m[0][0] * s.alpha + t.m[0][1] * s.beta, t.m[1][0] * s.alpha + t.m[1][1] * s.beta};
}

PolarizationTransform compose(const PolarizationTransform& a, const PolarizationTransform& b) noexcept {
    PolarizationTransform out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) out.m[r][c] = a.m[r][0] * b.m[0][c] + a.m[r][1] * b.m[1][c];
    return out;
}

double wrap_phase(double phase) noexcept {
    double w = std::remainder(phase, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

PhaseDecomposition global_phase_decompose(const PolarizationTransform& t) {
    double max_mag = 0.0;
    for (const auto& row : t.m)
        for (const auto& v : row) max_mag = std::max(max_mag, std::abs(v));
    if (!(max_mag > 0.0)) throw DomainError("cannot decompose the zero matrix");

    int pr = 0, pc = 0;
    for (int k = 0; k < 4; ++k) {
        if (std::abs(t.m[k / 2][k % 2]) >= max_mag * (1.0 - kTieMargin)) {
            pr = k / 2;
            pc = k % 2;
            break;
        }
    }

    PhaseDecomposition d;
    d.global_phase = wrap_phase(std::arg(t.m[pr][pc]));
    d.residual = std::polar(1.0, -d.global_phase) * t;
    // Real-positive up to rounding; pin it exactly.
    d.residual.m[pr][pc] = Complex(std::abs(t.m[pr][pc]), 0.0);
    return d;
}

double unitarity_defect(const PolarizationTransform& t) noexcept {
    const auto g = compose(t.adjoint(), t);
    return max_abs_diff(g, PolarizationTransform::identity());
}

bool is_unitary(const PolarizationTransform& t, double tol) noexcept { return unitarity_defect(t) < tol; }

double max_abs_diff(const PolarizationTransform& a, const PolarizationTransform& b) noexcept {
    double d = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) d = std::max(d, std::abs(a.m[r][c] - b.m[r][c]));
    return d;
}

double identity_infidelity(const PolarizationTransform& t) {
    if (!is_unitary(t, kChainTol)) throw DomainError("identity_infidelity requires a lossless transform");
    return std::clamp(1.0 - std::abs(t.trace()) / 2.0, 0.0, 1.0);
}

double normalized_identity_infidelity(const PolarizationTransform& t) {
    double fro2 = 0.0;
    for (const auto& row : t.m)
        for (const auto& v : row) fro2 += std::norm(v);
    if (!(fro2 > 0.0)) throw DomainError("infidelity of the zero matrix is undefined");
    return std::clamp(1.0 - std::abs(t.trace()) / std::sqrt(2.0 * fro2), 0.0, 1.0);
}

Stokes stokes(const PolarizationState& s) noexcept {
    const Complex cross = std::conj(s.alpha) * s.beta;
    return {std::norm(s.alpha) + std::norm(s.beta), std::norm(s.alpha) - std::norm(s.beta), 2.0 * cross.real(),
            2.0 * cross.imag()};
}

}  // namespace sagnac
