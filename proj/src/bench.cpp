#include "sagnac/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "sagnac/errors.hpp"

namespace sagnac {

namespace {

struct Extremum {
    double position = 0.0;  // fractional sample index
    double value = 0.0;
};

// Vertex of the parabola through samples k-1, k, k+1.
Extremum refine(const std::vector<double>& y, std::size_t k) {
    if (k == 0 || k + 1 >= y.size()) return {static_cast<double>(k), y[k]};
    const double ym = y[k - 1], y0 = y[k], yp = y[k + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom == 0.0) return {static_cast<double>(k), y0};
    const double off = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    return {static_cast<double>(k) + off, y0 - 0.25 * (ym - yp) * off};
}

Complex inner(const PolarizationState& a, const PolarizationState& b) {
    return std::conj(a.alpha) * b.alpha + std::conj(a.beta) * b.beta;
}

}  // namespace

void validate(const MzSetup& s) {
    validate(s.loop);
    if (!(s.mode_overlap >= 0.0 && s.mode_overlap <= 1.0)) throw DomainError("mode_overlap must lie in [0, 1]");
    if (!(s.background >= 0.0) || !std::isfinite(s.background)) throw DomainError("background must be >= 0");
    if (!(s.arm_imbalance > 0.0) || !std::isfinite(s.arm_imbalance))
        throw DomainError("arm_imbalance must be positive");
}

double mz_intensity(const MzSetup& setup, const PolarizationState& input, double drive_voltage) {
    const auto d = trace(setup.loop, input, drive_voltage);
    const auto r = apply(setup.ref_arm, input);
    const double a = setup.arm_imbalance;
    const double cross = inner(r, d).real();
    return setup.background +
           0.25 * (d.norm2() + a * r.norm2() + 2.0 * setup.mode_overlap * std::sqrt(a) * cross);
}

std::vector<SweepSample> intensity_sweep(const MzSetup& setup, const PolarizationState& input, double v_max, int n) {
    if (n < 2) throw PreconditionError("a sweep needs at least two samples");
    std::vector<SweepSample> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double v = v_max * static_cast<double>(k) / static_cast<double>(n - 1);
        out[static_cast<std::size_t>(k)] = {v, mz_intensity(setup, input, v)};
    }
    return out;
}

MeasurementRecord sawtooth_sweep(const MzSetup& setup, const PolarizationState& input, double v_max, int n) {
    validate(setup);
    if (n < 64) throw PreconditionError("sawtooth sweep needs at least 64 samples");
    const double v_half = half_wave_voltage(setup.loop.crystal);
    if (!(v_max >= 1.5 * v_half)) throw PreconditionError("sweep must reach 1.5 times the half-wave voltage");

    const auto raw = intensity_sweep(setup, input, v_max, n);
    std::vector<double> y(raw.size());
    std::transform(raw.begin(), raw.end(), y.begin(),
                   [&](const SweepSample& s) { return s.intensity - setup.background; });
    const double step = v_max / static_cast<double>(n - 1);

    const auto kmax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const auto kmin = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
    const double top = y[kmax];
    if (!(top - y[kmin] > 1e-12 * std::max(1.0, std::abs(top)))) throw DomainError("no fringe in the sweep");
    if (kmin == 0 || kmin + 1 == y.size()) throw DomainError("sweep too short to contain both extrema");

    const Extremum lo = refine(y, kmin);
    const Extremum hi = refine(y, kmax);

    // Nearest bright fringe to the dark one. A sweep end only counts as a
    // maximum when it is as bright as the brightest sample.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < y.size(); ++k) {
        const bool left_ok = k == 0 || y[k] >= y[k - 1];
        const bool right_ok = k + 1 == y.size() || y[k] >= y[k + 1];
        if (!left_ok || !right_ok) continue;
        if ((k == 0 || k + 1 == y.size()) && y[k] < top - 1e-9 * std::max(1.0, std::abs(top))) continue;
        const double dist = std::abs(refine(y, k).position - lo.position);
        best = std::min(best, dist);
    }
    if (!std::isfinite(best)) throw DomainError("sweep too short to contain both extrema");

    MeasurementRecord rec;
    rec.i_off = std::max(0.0, lo.value);
    rec.i_on = std::max(rec.i_off, hi.value);
    rec.visibility = (rec.i_on - rec.i_off) / (rec.i_on + rec.i_off);
    if (rec.i_off > 0.0) {
        rec.contrast_ratio = rec.i_on / rec.i_off;
        rec.contrast_db = 10.0 * std::log10(rec.contrast_ratio);
    } else {
        rec.contrast_ratio = std::numeric_limits<double>::infinity();
        rec.contrast_db = std::numeric_limits<double>::infinity();
    }
    rec.v_half_fit = best * step;
    return rec;
}

Contrast contrast_from_visibility(double v) {
    if (v == 1.0) throw InfiniteContrast();
    if (!(v >= 0.0 && v < 1.0)) throw DomainError("visibility must lie in [0, 1)");
    const double ratio = (1.0 + v) / (1.0 - v);
    return {ratio, 10.0 * std::log10(ratio)};
}

double visibility_from_contrast(double ratio) {
    if (!(ratio >= 1.0)) throw DomainError("contrast ratio must be >= 1");
    if (std::isinf(ratio)) return 1.0;
    return (ratio - 1.0) / (ratio + 1.0);
}

double insertion_loss(std::span<const double> transmissions) {
    double db = 0.0;
    for (double t : transmissions) {
        if (!(t > 0.0 && t <= 1.0)) throw DomainError("transmissions must lie in (0, 1]");
        db -= 10.0 * std::log10(t);
    }
    return db;
}

SwitchingTrace switching_trace(const MzSetup& setup, const PolarizationState& input, const DriveCircuit& circuit,
                               const GateSchedule& gates, double t_end, double dt) {
    validate(setup);
    SwitchingTrace out;
    out.voltage = simulate(circuit, gates, t_end, dt);
    out.intensity.t0 = out.voltage.t0;
    out.intensity.dt = out.voltage.dt;
    out.intensity.samples.reserve(out.voltage.samples.size());
    for (double v : out.voltage.samples) out.intensity.samples.push_back(mz_intensity(setup, input, v));

    const auto& vs = out.voltage.samples;
    const auto kmin = static_cast<std::size_t>(std::min_element(vs.begin(), vs.end()) - vs.begin());
    out.optical_edge_falling = out.intensity.samples.front() > out.intensity.samples[kmin];
    out.optical_10_90 = edge_time_10_90(out.intensity, out.optical_edge_falling);
    return out;
}

double fit_on_resistance(const MzSetup& setup, const PolarizationState& input, DriveCircuit circuit,
                         const GateSchedule& gates, double t_end, double dt, double target_edge, double r_lo,
                         double r_hi) {
    auto residual = [&](double r_on) {
        circuit.mosfet_on_R = r_on;
        return switching_trace(setup, input, circuit, gates, t_end, dt).optical_10_90 - target_edge;
    };
    const double f_lo = residual(r_lo);
    const double f_hi = residual(r_hi);
    if (f_lo * f_hi > 0.0) throw DomainError("target edge time is not bracketed by the on-resistance range");
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(residual, r_lo, r_hi, f_lo, f_hi,
                                                          boost::math::tools::eps_tolerance<double>(40), iters);
    return 0.5 * (a + b);
}

std::vector<Table1Row> table1_report(const MzSetup& setup, std::span<const double> pol_deg, double v_max, int n) {
    std::vector<Table1Row> rows;
    rows.reserve(pol_deg.size());
    for (double deg : pol_deg)
        rows.push_back({deg, sawtooth_sweep(setup, PolarizationState::linear(deg * kPi / 180.0), v_max, n)});
    return rows;
}

ImperfectionFit fit_table1_imperfections(const VisibilityTarget& v0, const VisibilityTarget& v45,
                                         const VisibilityTarget& v90) {
    for (const auto* t : {&v0, &v45, &v90})
        if (!(t->sigma > 0.0) || !(t->visibility >= 0.0 && t->visibility <= 1.0))
            throw DomainError("visibility targets need values in [0, 1] and positive sigmas");
    const double w0 = 1.0 / (v0.sigma * v0.sigma), w90 = 1.0 / (v90.sigma * v90.sigma);
    ImperfectionFit fit;
    fit.mode_overlap = std::clamp((w0 * v0.visibility + w90 * v90.visibility) / (w0 + w90), 0.0, 1.0);
    if (fit.mode_overlap > 0.0 && v45.visibility < fit.mode_overlap)
        fit.ref_phase = 2.0 * std::acos(v45.visibility / fit.mode_overlap);
    return fit;
}

}  // namespace sagnac
