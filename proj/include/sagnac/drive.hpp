#pragma once

// Transient model of the MOSFET discharge / resistive recharge driver.
//
// One capacitive node (modulator plus parasitics) is fed from the supply
// through the recharge resistor and shunted by the MOSFET channel:
//
//   C dV/dt = (V_s - V) / R - g(t) V
//
// g(t) is zero while the gate is off, ramps linearly up to 1/R_on over the
// gate rise time once the gate delay has elapsed, then stays at 1/R_on until
// the pulse ends, when it drops back to zero. Constant-g segments are exact
// exponentials; the ramp is integrated through its integrating factor.

#include <optional>
#include <vector>

namespace sagnac {

struct DriveCircuit {
    double supply_voltage = 0.0;  // V
    double recharge_R = 0.0;      // ohm
    double total_C = 0.0;         // F
    double mosfet_on_R = 0.0;     // ohm
    double gate_rise_time = 0.0;  // s, 0 means an ideal step
    double gate_delay = 0.0;      // s

    friend bool operator==(const DriveCircuit&, const DriveCircuit&) = default;
};

/// Ratio mosfet_on_R / recharge_R must stay below this for the on state to
/// pull the node close to ground.
inline constexpr double kMaxOnResistanceRatio = 0.01;

void validate(const DriveCircuit& c);

[[nodiscard]] inline double recharge_tau(const DriveCircuit& c) { return c.recharge_R * c.total_C; }
/// (R_on || R) * C
[[nodiscard]] double discharge_tau(const DriveCircuit& c);
/// Divider value the node settles to with the gate fully on.
[[nodiscard]] double on_state_voltage(const DriveCircuit& c);

struct GateSchedule {
    std::vector<double> on_times;  // s, strictly increasing
    double hold_duration = 0.0;    // s

    /// `count` pulses starting at `first_on`, one every 1/repetition_rate.
    static GateSchedule periodic(double first_on, double repetition_rate, int count, double hold_duration);
};

void validate(const GateSchedule& g);

struct VoltageWaveform {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> samples;

    [[nodiscard]] double time(std::size_t i) const noexcept { return t0 + dt * static_cast<double>(i); }
};

/// MOSFET channel conductance at time t (siemens).
double mosfet_conductance(const DriveCircuit& c, const GateSchedule& g, double t);

/// Samples V(t) on [0, t_end] with step dt. The node starts at `v_initial`
/// (default: fully charged to the supply). Throws PreconditionError when
/// dt >= R_on * C / 10.
VoltageWaveform simulate(const DriveCircuit& c, const GateSchedule& g, double t_end, double dt,
                         std::optional<double> v_initial = std::nullopt);

/// Node voltage at a single instant, same model as simulate().
double voltage_at(const DriveCircuit& c, const GateSchedule& g, double t, std::optional<double> v_initial = std::nullopt);

/// Steady-state pre-pulse voltage over the supply, closed form
/// 1 - exp(-(1/rate - hold) / (R C)). Throws DomainError if 1/rate <= hold.
double recovery_fraction(const DriveCircuit& c, double repetition_rate, double hold_duration);

/// Same quantity obtained by propagating `periods` pulses through the
/// transient model and reading the voltage just before the last one.
double simulated_recovery_fraction(const DriveCircuit& c, double repetition_rate, double hold_duration,
                                   int periods = 30);

/// Highest repetition rate whose closed-form recovery still reaches `fraction`.
double max_repetition_rate(const DriveCircuit& c, double fraction, double hold_duration);

/// 10 %-90 % transition time of the first falling (or rising) edge, with
/// levels taken from the waveform's global minimum and maximum and crossings
/// located by linear interpolation. Throws NoEdgeError.
double edge_time_10_90(const VoltageWaveform& w, bool falling);

}  // namespace sagnac
