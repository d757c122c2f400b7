#pragma once

// Jones-calculus primitives. Component 0 is always H, component 1 is V.

#include <array>
#include <complex>

namespace sagnac {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kExactTol = 1e-12;
inline constexpr double kChainTol = 1e-9;

/// Fully polarized light as a complex amplitude pair over the H/V basis.
struct PolarizationState {
    Complex alpha{};  // H
    Complex beta{};   // V

    [[nodiscard]] double norm2() const noexcept { return std::norm(alpha) + std::norm(beta); }

    static PolarizationState horizontal() noexcept { return {1.0, 0.0}; }
    static PolarizationState vertical() noexcept { return {0.0, 1.0}; }
    /// Linear polarization at `angle` radians from H.
    static PolarizationState linear(double angle) noexcept;

    friend bool operator==(const PolarizationState&, const PolarizationState&) = default;
};

/// 2x2 complex transfer matrix, row-major: m[row][col].
struct PolarizationTransform {
    std::array<std::array<Complex, 2>, 2> m{};

    static PolarizationTransform identity() noexcept { return {{{{1.0, 0.0}, {0.0, 1.0}}}}; }
    static PolarizationTransform diagonal(Complex h, Complex v) noexcept {
        return {{{{h, 0.0}, {0.0, v}}}};
    }
    /// Counter-clockwise rotation of the polarization by `angle` (lab frame).
    static PolarizationTransform rotation(double angle) noexcept;
    /// Half-wave retarder with fast axis at `axis_angle`:
    /// [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
    static PolarizationTransform half_wave(double axis_angle) noexcept;
    /// Linear retarder: rot(axis) * diag(1, e^{i retardance}) * rot(-axis).
    static PolarizationTransform retarder(double axis_angle, double retardance) noexcept;

    [[nodiscard]] const Complex& operator()(int r, int c) const noexcept { return m[r][c]; }
    Complex& operator()(int r, int c) noexcept { return m[r][c]; }

    [[nodiscard]] PolarizationTransform adjoint() const noexcept;
    [[nodiscard]] PolarizationTransform transpose() const noexcept;
    [[nodiscard]] Complex trace() const noexcept { return m[0][0] + m[1][1]; }

    friend bool operator==(const PolarizationTransform&, const PolarizationTransform&) = default;
};

PolarizationTransform operator*(Complex k, const PolarizationTransform& t) noexcept;

/// Split of a matrix into e^{i global_phase} * residual. The residual's
/// largest-magnitude entry (first in row-major order on ties) is real and
/// positive; the phase lies in (-pi, pi].
struct PhaseDecomposition {
    double global_phase = 0.0;
    PolarizationTransform residual;
};

struct Stokes {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
};

// Throws DomainError("unnormalizable") for the zero state.
PolarizationState normalize(const PolarizationState& s);

PolarizationState apply(const PolarizationTransform& t, const PolarizationState& s) noexcept;

/// a * b; `b` acts first.
PolarizationTransform compose(const PolarizationTransform& a, const PolarizationTransform& b) noexcept;

PhaseDecomposition global_phase_decompose(const PolarizationTransform& t);

/// 1 - |tr t| / 2 for a lossless t. Zero exactly when t is a pure phase
/// times the identity. Throws DomainError when t is not unitary to 1e-9.
double identity_infidelity(const PolarizationTransform& t);

/// Scale-free variant for lossy matrices: 1 - |tr t| / (sqrt(2) * ||t||_F).
/// Coincides with identity_infidelity on unitaries.
double normalized_identity_infidelity(const PolarizationTransform& t);

Stokes stokes(const PolarizationState& s) noexcept;

/// max_ij |(t^dagger t - I)_ij|
double unitarity_defect(const PolarizationTransform& t) noexcept;
bool is_unitary(const PolarizationTransform& t, double tol = kExactTol) noexcept;

/// max_ij |a_ij - b_ij|
double max_abs_diff(const PolarizationTransform& a, const PolarizationTransform& b) noexcept;

/// Wrap to (-pi, pi], with -pi mapped to +pi.
double wrap_phase(double phase) noexcept;

}  // namespace sagnac
