#pragma once

// Scene configuration (INI-style text) and the command runner behind the
// command-line tool.
//
//   # comment
//   [crystal]
//   length_L = 20m        # SI suffixes p n u m k M
//
// Unknown sections or keys, duplicates, malformed numbers and violated
// invariants are rejected with the offending line and key.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sagnac/bench.hpp"

namespace sagnac {

struct LoopSection {
    double fr_angle_deg = 45.0;
    double hwp_angle_deg = 22.5;
    RotatedBeam rotated_beam = RotatedBeam::kClockwise;
    OutputPort output_port = OutputPort::kB;
    double fr1_error_deg = 0.0;
    double fr2_error_deg = 0.0;
    double hwp1_error_deg = 0.0;
    double hwp2_error_deg = 0.0;
    double eom_residual_phase = 0.0;  // rad/V
    double pbs_extinction_t = 0.0;
    double pbs_extinction_r = 0.0;
    std::optional<double> mirror_phase;  // rad

    friend bool operator==(const LoopSection&, const LoopSection&) = default;
};

struct CircuitSection {
    std::optional<double> supply_voltage;  // defaults to the crystal's V_1/2
    double R = 0.0;
    double C = 0.0;
    double R_on = 0.0;
    double gate_rise_time = 400e-12;
    double gate_delay = 0.0;

    friend bool operator==(const CircuitSection&, const CircuitSection&) = default;
};

struct GateSection {
    std::optional<double> repetition_rate;
    double hold_duration = 1e-6;
    double first_on = 5e-9;
    std::optional<int> count;

    friend bool operator==(const GateSection&, const GateSection&) = default;
};

struct MzSection {
    double mode_overlap = 1.0;
    double background = 0.0;
    double arm_imbalance = 1.0;
    double ref_phase_deg = 0.0;
    double ref_retarder_axis_deg = 0.0;
    double input_pol_deg = 0.0;

    friend bool operator==(const MzSection&, const MzSection&) = default;
};

struct SweepSection {
    std::optional<double> v_max;
    int samples = 1025;
    std::optional<double> device_voltage;
    int scan_points = 101;

    friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct TraceSection {
    double t_end = 50e-9;
    double dt = 10e-12;
    std::optional<double> fit_edge_target;
    double fit_r_min = 2.5;
    double fit_r_max = 150.0;

    friend bool operator==(const TraceSection&, const TraceSection&) = default;
};

struct LossSection {
    std::vector<double> transmissions;

    friend bool operator==(const LossSection&, const LossSection&) = default;
};

struct SceneConfig {
    std::optional<CrystalSpec> crystal;
    std::optional<LoopSection> loop;
    std::optional<CircuitSection> circuit;
    std::optional<GateSection> gate;
    std::optional<MzSection> mz;
    std::optional<SweepSection> sweep;
    std::optional<TraceSection> trace;
    std::optional<LossSection> loss;

    friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Number with an optional trailing SI prefix. Throws DomainError.
double parse_number(std::string_view text);

SceneConfig parse_config(std::string_view text);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(const SceneConfig& config);

LoopOptions loop_options(const LoopSection& section);
LoopLayout make_loop(const SceneConfig& config);
MzSetup make_mz_setup(const SceneConfig& config);
DriveCircuit make_circuit(const SceneConfig& config);

/// Fixed CSV number format: 12 significant digits.
std::string format_number(double v);

enum class ExitCode : int { kOk = 0, kUsage = 1, kConfig = 2, kRuntime = 3 };

struct RunOverrides {
    std::optional<double> sweep_max;
    std::optional<double> dt;
    std::optional<double> t_end;
};

const std::vector<std::string>& command_names();

/// Executes one command, writing CSV to `csv` and returning the one-line
/// summary. Throws ConfigError / Error subclasses.
std::string run_command(std::string_view command, const SceneConfig& config, const RunOverrides& overrides,
                        std::ostream& csv);

/// File-level entry point: reads the config, writes the CSV and prints the
/// summary to `out` or a diagnostic to `err`.
ExitCode run(std::string_view command, const std::string& config_path, const std::string& output_path,
             const RunOverrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace sagnac
