#pragma once

// Shared helpers for the test suites: seeded random generators and a
// reference Jones-calculus implementation written independently of the
// library (plain arrays, its own element formulas, 4-port brute force).

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "sagnac/bench.hpp"

namespace testing_support {

using C = std::complex<double>;
using M2 = std::array<std::array<C, 2>, 2>;
using sagnac::kPi;
constexpr double kDeg = kPi / 180.0;

inline sagnac::CrystalSpec lithium_niobate() {
    // 20 mm x 1 mm y-cut LiNbO3 at the HeNe line.
    return {20e-3, 1e-3, 632.8e-9, 2.203, 30.8e-12};
}

// Eq. for the transverse Pockels cell, evaluated without the library.
inline double v_half_oracle(const sagnac::CrystalSpec& c) {
    return c.wavelength * c.thickness_d / (c.length_L * c.r33 * c.n_e * c.n_e * c.n_e);
}

inline M2 mul(const M2& a, const M2& b) {
    M2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline M2 ident() { return {{{C{1}, C{0}}, {C{0}, C{1}}}}; }
inline M2 rot(double t) { return {{{C{std::cos(t)}, C{-std::sin(t)}}, {C{std::sin(t)}, C{std::cos(t)}}}}; }
inline M2 hwp(double t) {
    return {{{C{std::cos(2 * t)}, C{std::sin(2 * t)}}, {C{std::sin(2 * t)}, C{-std::cos(2 * t)}}}};
}
inline M2 diag(C a, C b) { return {{{a, C{0}}, {C{0}, b}}}; }
inline M2 scalar(C k) { return diag(k, k); }

inline M2 from_lib(const sagnac::PolarizationTransform& t) {
    M2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = t.m[i][j];
    return r;
}

inline double max_diff(const M2& a, const M2& b) {
    double d = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
    return d;
}

inline double max_diff(const sagnac::PolarizationTransform& a, const M2& b) { return max_diff(from_lib(a), b); }

// Parameters for a randomized loop, in the library's option vocabulary.
struct LoopParams {
    double fr = kPi / 4, hwp_angle = kPi / 8;
    double fr_err[2]{}, hwp_err[2]{};
    double residual = 0;
    double ext_t = 0, ext_r = 0;
    bool has_mirror = false;
    double mirror = 0;
    bool ccw = false;
    bool port_a = false;
};

inline sagnac::LoopOptions to_options(const LoopParams& p) {
    sagnac::LoopOptions o;
    o.fr_angle = p.fr;
    o.hwp_angle = p.hwp_angle;
    o.fr_error = {p.fr_err[0], p.fr_err[1]};
    o.hwp_error = {p.hwp_err[0], p.hwp_err[1]};
    o.eom_residual_phase = p.residual;
    o.pbs = {p.ext_t, p.ext_r};
    if (p.has_mirror) o.mirror_phase = p.mirror;
    o.rotated_beam = p.ccw ? sagnac::RotatedBeam::kCounterClockwise : sagnac::RotatedBeam::kClockwise;
    o.output = p.port_a ? sagnac::OutputPort::kA : sagnac::OutputPort::kB;
    return o;
}

// Brute-force device matrix: build the 4x2 split, the 4x4 block-diagonal
// loop propagator and the 2x4 recombination, then multiply them out.
inline M2 device_oracle(const LoopParams& p, double v_half, double volts) {
    const double sense = p.ccw ? 1.0 : -1.0;
    const C phi = std::polar(1.0, kPi * volts / v_half);
    const C res = std::polar(1.0, p.residual * volts);
    const M2 eom = p.ccw ? diag(phi, res) : diag(res, phi);

    // Element list as met by the transmitted (clockwise) beam.
    std::vector<M2> path = {rot(sense * (p.fr + p.fr_err[0])), hwp(p.hwp_angle + p.hwp_err[0])};
    if (p.has_mirror) path.push_back(scalar(std::polar(1.0, p.mirror)));
    path.push_back(eom);
    if (p.has_mirror) path.push_back(scalar(std::polar(1.0, p.mirror)));
    path.push_back(hwp(p.hwp_angle + p.hwp_err[1]));
    path.push_back(rot(-sense * (p.fr + p.fr_err[1])));

    M2 cw = ident(), ccw = ident();
    for (const auto& m : path) cw = mul(m, cw);
    for (auto it = path.rbegin(); it != path.rend(); ++it) ccw = mul(*it, ccw);

    const double ct = std::sqrt(1 - p.ext_t * p.ext_t), cr = std::sqrt(1 - p.ext_r * p.ext_r);
    // Split: rows (T_H, T_V, R_H, R_V), columns (in_H, in_V).
    const double split[4][2] = {{cr, 0}, {0, p.ext_t}, {p.ext_r, 0}, {0, ct}};
    // Recombine: rows (out_H, out_V) for the chosen port; columns as above.
    const double comb_b[2][4] = {{cr, 0, -p.ext_r, 0}, {0, -p.ext_t, 0, ct}};
    const double comb_a[2][4] = {{p.ext_r, 0, cr, 0}, {0, ct, 0, p.ext_t}};
    const auto& comb = p.port_a ? comb_a : comb_b;

    C loop4[4][4] = {};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            loop4[i][j] = cw[i][j];
            loop4[2 + i][2 + j] = ccw[i][j];
        }
    C mid[4][2] = {};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 4; ++k) mid[i][j] += loop4[i][k] * split[k][j];
    M2 out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 4; ++k) out[i][j] += comb[i][k] * mid[k][j];
    return out;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>()(gen_); }
    bool coin() { return uniform(0, 1) < 0.5; }

    sagnac::PolarizationState state() {
        sagnac::PolarizationState s{{normal(), normal()}, {normal(), normal()}};
        return sagnac::normalize(s);
    }

    // Haar-ish random U(2): e^{i a} [[u, v], [-v*, u*]].
    sagnac::PolarizationTransform unitary() {
        const auto s = state();
        const C g = std::polar(1.0, uniform(-kPi, kPi));
        sagnac::PolarizationTransform t;
        t.m[0][0] = g * s.alpha;
        t.m[0][1] = g * s.beta;
        t.m[1][0] = -g * std::conj(s.beta);
        t.m[1][1] = g * std::conj(s.alpha);
        return t;
    }

    LoopParams loop(bool imperfect) {
        LoopParams p;
        p.ccw = coin();
        p.port_a = imperfect && uniform(0, 1) < 0.2;
        if (!imperfect) return p;
        p.fr = uniform(30, 60) * kDeg;
        p.hwp_angle = uniform(10, 35) * kDeg;
        for (int k = 0; k < 2; ++k) {
            p.fr_err[k] = uniform(-5, 5) * kDeg;
            p.hwp_err[k] = uniform(-5, 5) * kDeg;
        }
        p.residual = uniform(-0.01, 0.01);
        p.ext_t = uniform(0, 0.25);
        p.ext_r = uniform(0, 0.25);
        p.has_mirror = coin();
        p.mirror = uniform(-kPi, kPi);
        return p;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace testing_support
