#include "sagnac/drive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sagnac/errors.hpp"

namespace sagnac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class SegmentKind { kOff, kRamp, kOn };

struct Segment {
    double start = 0.0;
    double end = kInf;
    SegmentKind kind = SegmentKind::kOff;
    double ramp_origin = 0.0;  // time at which g would be zero on the ramp line
};

// Conductance profile from `from` onward, as consecutive segments ending in an
// unbounded off segment.
std::vector<Segment> build_segments(const DriveCircuit& c, const GateSchedule& g, double from) {
    std::vector<Segment> segs;
    double cursor = from;
    for (double on : g.on_times) {
        const double s = on + c.gate_delay;
        const double f = s + g.hold_duration;
        const double ramp_end = std::min(s + c.gate_rise_time, f);
        if (f <= cursor) continue;
        if (s > cursor) segs.push_back({cursor, s, SegmentKind::kOff, 0.0});
        const double r0 = std::max(cursor, s);
        if (ramp_end > r0) segs.push_back({r0, ramp_end, SegmentKind::kRamp, s});
        const double o0 = std::max(cursor, ramp_end);
        if (f > o0) segs.push_back({o0, f, SegmentKind::kOn, 0.0});
        cursor = f;
    }
    segs.push_back({cursor, kInf, SegmentKind::kOff, 0.0});
    return segs;
}

// Closed-form solution inside one segment, from (seg.start, v0) to t.
double evolve(const DriveCircuit& c, const Segment& seg, double v0, double t) {
    const double u = t - seg.start;
    if (u <= 0.0) return v0;
    const double vs = c.supply_voltage, r = c.recharge_R, cap = c.total_C;
    switch (seg.kind) {
        case SegmentKind::kOff:
            return vs + (v0 - vs) * std::exp(-u / (r * cap));
        case SegmentKind::kOn: {
            const double gsum = 1.0 / r + 1.0 / c.mosfet_on_R;
            const double v_inf = (vs / r) / gsum;
            return v_inf + (v0 - v_inf) * std::exp(-u * gsum / cap);
        }
        case SegmentKind::kRamp: {
            // dV/dw = a - (b + k w) V with w measured from seg.start.
            const double slope = 1.0 / (c.mosfet_on_R * c.gate_rise_time);  // S/s
            const double a = vs / (r * cap);
            const double b = (1.0 / r + slope * (seg.start - seg.ramp_origin)) / cap;
            const double k = slope / cap;
            const double e_u = b * u + 0.5 * k * u * u;
            // Integrating factor, written in the look-back variable x = u - w so
            // that the integrand exp(-(b + k u) x + k x^2 / 2) stays <= 1.
            const double beta = b + k * u;
            auto kernel = [&](double x) { return std::exp(-beta * x + 0.5 * k * x * x); };
            const double integral =
                boost::math::quadrature::gauss_kronrod<double, 31>::integrate(kernel, 0.0, u, 5, 1e-13);
            return v0 * std::exp(-e_u) + a * integral;
        }
    }
    return v0;
}

void check_simulation_inputs(const DriveCircuit& c, const GateSchedule& g, double v0) {
    validate(c);
    validate(g);
    if (!(v0 >= 0.0 && v0 <= c.supply_voltage)) throw DomainError("initial voltage must lie in [0, supply_voltage]");
}

}  // namespace

void validate(const DriveCircuit& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("circuit ") + name + " must be positive");
    };
    positive(c.supply_voltage, "supply_voltage");
    positive(c.recharge_R, "recharge_R");
    positive(c.total_C, "total_C");
    positive(c.mosfet_on_R, "mosfet_on_R");
    if (!(c.gate_rise_time >= 0.0) || !std::isfinite(c.gate_rise_time))
        throw DomainError("circuit gate_rise_time must be non-negative");
    if (!(c.gate_delay >= 0.0) || !std::isfinite(c.gate_delay))
        throw DomainError("circuit gate_delay must be non-negative");
    if (!(c.mosfet_on_R / c.recharge_R < kMaxOnResistanceRatio))
        throw DomainError("mosfet_on_R must be below 1% of recharge_R");
}

double discharge_tau(const DriveCircuit& c) {
    return c.total_C / (1.0 / c.recharge_R + 1.0 / c.mosfet_on_R);
}

double on_state_voltage(const DriveCircuit& c) {
    return c.supply_voltage * c.mosfet_on_R / (c.mosfet_on_R + c.recharge_R);
}

GateSchedule GateSchedule::periodic(double first_on, double repetition_rate, int count, double hold_duration) {
    if (!(repetition_rate > 0.0)) throw DomainError("repetition rate must be positive");
    GateSchedule g;
    g.hold_duration = hold_duration;
    for (int i = 0; i < count; ++i) g.on_times.push_back(first_on + i / repetition_rate);
    return g;
}

void validate(const GateSchedule& g) {
    if (!(g.hold_duration > 0.0) || !std::isfinite(g.hold_duration))
        throw DomainError("gate hold_duration must be positive");
    for (std::size_t i = 0; i < g.on_times.size(); ++i) {
        if (!std::isfinite(g.on_times[i])) throw DomainError("gate on-times must be finite");
        if (i > 0 && !(g.on_times[i - 1] + g.hold_duration <= g.on_times[i]))
            throw DomainError("gate pulses must be increasing and non-overlapping");
    }
}

double mosfet_conductance(const DriveCircuit& c, const GateSchedule& g, double t) {
    for (double on : g.on_times) {
        const double s = on + c.gate_delay;
        if (t < s || t >= s + g.hold_duration) continue;
        if (c.gate_rise_time > 0.0 && t < s + c.gate_rise_time) return (t - s) / (c.gate_rise_time * c.mosfet_on_R);
        return 1.0 / c.mosfet_on_R;
    }
    return 0.0;
}

VoltageWaveform simulate(const DriveCircuit& c, const GateSchedule& g, double t_end, double dt,
                         std::optional<double> v_initial) {
    const double v0 = v_initial.value_or(c.supply_voltage);
    check_simulation_inputs(c, g, v0);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("dt must be positive");
    if (!(dt < c.mosfet_on_R * c.total_C / 10.0))
        throw PreconditionError("dt must be below R_on*C/10 to resolve the discharge edge");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("t_end must be non-negative");

    const auto n = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12))) + 1;
    const auto segs = build_segments(c, g, 0.0);

    VoltageWaveform w;
    w.t0 = 0.0;
    w.dt = dt;
    w.samples.reserve(n);
    std::size_t si = 0;
    double seg_v0 = v0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = w.time(i);
        while (t >= segs[si].end) {
            seg_v0 = evolve(c, segs[si], seg_v0, segs[si].end);
            ++si;
        }
        w.samples.push_back(evolve(c, segs[si], seg_v0, t));
    }
    return w;
}

double voltage_at(const DriveCircuit& c, const GateSchedule& g, double t, std::optional<double> v_initial) {
    const double v0 = v_initial.value_or(c.supply_voltage);
    check_simulation_inputs(c, g, v0);
    double v = v0;
    for (const auto& seg : build_segments(c, g, 0.0)) {
        if (t < seg.end) return evolve(c, seg, v, t);
        v = evolve(c, seg, v, seg.end);
    }
    return v;
}

double recovery_fraction(const DriveCircuit& c, double repetition_rate, double hold_duration) {
    validate(c);
    if (!(repetition_rate >= 0.0)) throw DomainError("repetition rate must be non-negative");
    if (repetition_rate == 0.0) return 1.0;
    const double period = 1.0 / repetition_rate;
    if (!(period > hold_duration)) throw DomainError("repetition period must exceed the hold duration");
    return -std::expm1(-(period - hold_duration) / recharge_tau(c));
}

double simulated_recovery_fraction(const DriveCircuit& c, double repetition_rate, double hold_duration, int periods) {
    if (!(repetition_rate > 0.0)) throw DomainError("repetition rate must be positive");
    if (!(1.0 / repetition_rate > hold_duration)) throw DomainError("repetition period must exceed the hold duration");
    if (periods < 2) throw DomainError("need at least two periods to reach steady state");
    const auto g = GateSchedule::periodic(0.0, repetition_rate, periods, hold_duration);
    const double last_start = g.on_times.back() + c.gate_delay;
    return voltage_at(c, g, last_start) / c.supply_voltage;
}

double max_repetition_rate(const DriveCircuit& c, double fraction, double hold_duration) {
    validate(c);
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("recovery fraction must lie in (0, 1)");
    return 1.0 / (hold_duration - recharge_tau(c) * std::log1p(-fraction));
}

double edge_time_10_90(const VoltageWaveform& w, bool falling) {
    const auto& s = w.samples;
    if (s.size() < 2) throw NoEdgeError();
    const auto [lo_it, hi_it] = std::minmax_element(s.begin(), s.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo) || !std::isfinite(hi - lo)) throw NoEdgeError();

    // Work on a falling edge; flip the sign for a rising one.
    const double sign = falling ? 1.0 : -1.0;
    const double upper = sign * (falling ? lo + 0.9 * (hi - lo) : lo + 0.1 * (hi - lo));
    const double lower = sign * (falling ? lo + 0.1 * (hi - lo) : lo + 0.9 * (hi - lo));
    auto crossing = [&](std::size_t i, double level) {
        const double a = sign * s[i - 1], b = sign * s[i];
        return w.time(i - 1) + w.dt * (a - level) / (a - b);
    };

    bool armed = false;
    double t_upper = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double a = sign * s[i - 1], b = sign * s[i];
        if (a > upper && b <= upper) {
            armed = true;
            t_upper = crossing(i, upper);
        }
        if (armed && a > lower && b <= lower) {
            const double t_lower = crossing(i, lower);
            if (t_lower > t_upper) return t_lower - t_upper;
        }
        if (armed && b > upper) armed = false;
    }
    throw NoEdgeError();
}

}  // namespace sagnac
