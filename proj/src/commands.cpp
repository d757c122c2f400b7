#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sagnac/errors.hpp"
#include "sagnac/scene.hpp"

namespace sagnac {

namespace {

constexpr double kDeg = kPi / 180.0;

std::string summary_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.5g", v);
    return buf;
}

const CrystalSpec& need_crystal(const SceneConfig& c) {
    if (!c.crystal) throw ConfigError(0, "crystal", "section [crystal] is required for this command");
    return *c.crystal;
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(std::initializer_list<const char*> cols) {
        bool first = true;
        for (const char* c : cols) {
            os_ << (first ? "" : ",") << c;
            first = false;
        }
        os_ << '\n';
    }
    CsvWriter& cell(double v) {
        sep();
        os_ << format_number(v);
        return *this;
    }
    CsvWriter& cell(const std::string& s) {
        sep();
        os_ << s;
        return *this;
    }
    void end() {
        os_ << '\n';
        fresh_ = true;
    }

private:
    void sep() {
        if (!fresh_) os_ << ',';
        fresh_ = false;
    }

    std::ostream& os_;
    bool fresh_ = true;
};

std::vector<double> voltage_grid(double v_max, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = n == 1 ? 0.0 : v_max * k / (n - 1);
    return v;
}

double sweep_limit(const SceneConfig& c, const RunOverrides& o, double v_half, double default_factor) {
    if (o.sweep_max) return *o.sweep_max;
    if (c.sweep && c.sweep->v_max) return *c.sweep->v_max;
    return default_factor * v_half;
}

PolarizationState input_state(const SceneConfig& c) {
    return PolarizationState::linear(c.mz.value_or(MzSection{}).input_pol_deg * kDeg);
}

std::string cmd_device_matrix(const SceneConfig& c, const RunOverrides& o, std::ostream& os) {
    const auto layout = make_loop(c);
    const double v_half = half_wave_voltage(need_crystal(c));
    const auto sweep = c.sweep.value_or(SweepSection{});
    const auto volts = sweep.device_voltage ? std::vector<double>{*sweep.device_voltage}
                                            : voltage_grid(sweep_limit(c, o, v_half, 2.0), sweep.scan_points);
    CsvWriter csv(os);
    csv.header({"voltage_V", "m00_re", "m00_im", "m01_re", "m01_im", "m10_re", "m10_im", "m11_re", "m11_im",
                "global_phase_rad", "infidelity"});
    double worst = 0.0;
    for (double v : volts) {
        const auto m = device_matrix(layout, v);
        const auto pd = global_phase_decompose(m);
        const double inf = normalized_identity_infidelity(m);
        worst = std::max(worst, inf);
        csv.cell(v);
        for (const auto& row : m.m)
            for (const auto& z : row) csv.cell(z.real()).cell(z.imag());
        csv.cell(pd.global_phase).cell(inf).end();
    }
    return "v_half=" + summary_number(v_half) + " points=" + std::to_string(volts.size()) +
           " max_infidelity=" + summary_number(worst);
}

std::string cmd_independence_scan(const SceneConfig& c, const RunOverrides& o, std::ostream& os) {
    const auto layout = make_loop(c);
    const double v_half = half_wave_voltage(need_crystal(c));
    const auto sweep = c.sweep.value_or(SweepSection{});
    const auto volts = voltage_grid(sweep_limit(c, o, v_half, 2.0), sweep.scan_points);
    const auto scan = independence_scan(layout, volts);
    CsvWriter csv(os);
    csv.header({"voltage_V", "phase_rad_unwrapped", "infidelity", "portA_power"});
    double worst = 0.0;
    double worst_leak = 0.0;
    for (const auto& p : scan) {
        csv.cell(p.voltage).cell(p.unwrapped_phase).cell(p.infidelity).cell(p.port_a_power).end();
        worst = std::max(worst, p.infidelity);
        worst_leak = std::max(worst_leak, p.port_a_power);
    }
    return "points=" + std::to_string(scan.size()) + " max_infidelity=" + summary_number(worst) +
           " max_portA_power=" + summary_number(worst_leak);
}

std::string cmd_table1(const SceneConfig& c, const RunOverrides& o, std::ostream& os) {
    const auto setup = make_mz_setup(c);
    const double v_half = half_wave_voltage(need_crystal(c));
    const auto sweep = c.sweep.value_or(SweepSection{});
    const double pols[] = {0.0, 45.0, 90.0};
    const auto rows = table1_report(setup, pols, sweep_limit(c, o, v_half, 2.2), sweep.samples);
    CsvWriter csv(os);
    csv.header({"pol_deg", "v_half_V", "visibility", "contrast_ratio", "contrast_db"});
    std::string vis;
    for (const auto& r : rows) {
        csv.cell(r.pol_deg)
            .cell(r.record.v_half_fit)
            .cell(r.record.visibility)
            .cell(r.record.contrast_ratio)
            .cell(r.record.contrast_db)
            .end();
        vis += " visibility_" + summary_number(r.pol_deg) + "=" + summary_number(r.record.visibility);
    }
    return "rows=" + std::to_string(rows.size()) + vis;
}

GateSchedule transient_gates(const SceneConfig& c, double t_end) {
    const auto g = c.gate.value_or(GateSection{});
    if (!g.repetition_rate) {
        GateSchedule s;
        s.hold_duration = g.hold_duration;
        s.on_times.push_back(g.first_on);
        return s;
    }
    const int fill = static_cast<int>(std::floor((t_end - g.first_on) * *g.repetition_rate)) + 1;
    return GateSchedule::periodic(g.first_on, *g.repetition_rate, g.count.value_or(std::max(1, fill)),
                                  g.hold_duration);
}

std::string cmd_transient(const SceneConfig& c, const RunOverrides& o, std::ostream& os) {
    const auto setup = make_mz_setup(c);
    auto circuit = make_circuit(c);
    auto t = c.trace.value_or(TraceSection{});
    if (o.dt) t.dt = *o.dt;
    if (o.t_end) t.t_end = *o.t_end;
    const auto gates = transient_gates(c, t.t_end);
    const auto input = input_state(c);

    std::string fitted;
    if (t.fit_edge_target) {
        circuit.mosfet_on_R = fit_on_resistance(setup, input, circuit, gates, t.t_end, t.dt, *t.fit_edge_target,
                                                t.fit_r_min, t.fit_r_max);
        fitted = " fitted_R_on=" + summary_number(circuit.mosfet_on_R);
    }
    const auto tr = switching_trace(setup, input, circuit, gates, t.t_end, t.dt);
    CsvWriter csv(os);
    csv.header({"t_s", "v_V", "intensity"});
    for (std::size_t i = 0; i < tr.voltage.samples.size(); ++i)
        csv.cell(tr.voltage.time(i)).cell(tr.voltage.samples[i]).cell(tr.intensity.samples[i]).end();
    return "optical_10_90=" + summary_number(tr.optical_10_90) +
           " tau_d=" + summary_number(discharge_tau(circuit)) + fitted;
}

std::string cmd_recovery(const SceneConfig& c, const RunOverrides&, std::ostream& os) {
    const auto circuit = make_circuit(c);
    const auto g = c.gate.value_or(GateSection{});
    const double rate = g.repetition_rate.value_or(100e3);
    const double frac = recovery_fraction(circuit, rate, g.hold_duration);
    const double sim = simulated_recovery_fraction(circuit, rate, g.hold_duration);
    const double limit = max_repetition_rate(circuit, 0.99, g.hold_duration);
    CsvWriter csv(os);
    csv.header({"repetition_rate_Hz", "hold_s", "tau_r_s", "recovery_fraction", "simulated_fraction",
                "rate_at_99pct_Hz"});
    csv.cell(rate).cell(g.hold_duration).cell(recharge_tau(circuit)).cell(frac).cell(sim).cell(limit).end();
    return "recovery_fraction=" + summary_number(frac) + " rate_at_99pct_Hz=" + summary_number(limit);
}

std::string cmd_loss(const SceneConfig& c, const RunOverrides&, std::ostream& os) {
    if (!c.loss) throw ConfigError(0, "loss", "section [loss] is required for this command");
    const auto& ts = c.loss->transmissions;
    CsvWriter csv(os);
    csv.header({"element", "transmission", "loss_db", "cumulative_db"});
    double total = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double db = insertion_loss(std::span<const double>(&ts[i], 1));
        total += db;
        csv.cell(static_cast<double>(i)).cell(ts[i]).cell(db).cell(total).end();
    }
    return "insertion_loss_db=" + summary_number(insertion_loss(ts));
}

std::string cmd_sweep(const SceneConfig& c, const RunOverrides& o, std::ostream& os) {
    const auto setup = make_mz_setup(c);
    const double v_half = half_wave_voltage(need_crystal(c));
    const auto sweep = c.sweep.value_or(SweepSection{});
    const double v_max = sweep_limit(c, o, v_half, 2.2);
    const auto input = input_state(c);
    CsvWriter csv(os);
    csv.header({"voltage_V", "intensity"});
    for (const auto& s : intensity_sweep(setup, input, v_max, sweep.samples)) csv.cell(s.voltage).cell(s.intensity).end();
    const auto rec = sawtooth_sweep(setup, input, v_max, sweep.samples);
    return "visibility=" + summary_number(rec.visibility) + " v_half_fit=" + summary_number(rec.v_half_fit);
}

using Handler = std::string (*)(const SceneConfig&, const RunOverrides&, std::ostream&);

struct Command {
    std::string name;
    Handler handler;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> table = {
        {"device-matrix", cmd_device_matrix}, {"independence-scan", cmd_independence_scan},
        {"table1", cmd_table1},               {"transient", cmd_transient},
        {"recovery", cmd_recovery},           {"loss", cmd_loss},
        {"sweep", cmd_sweep},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& c : commands()) n.push_back(c.name);
        return n;
    }();
    return names;
}

std::string run_command(std::string_view command, const SceneConfig& config, const RunOverrides& overrides,
                        std::ostream& csv) {
    for (const auto& c : commands())
        if (c.name == command) return c.handler(config, overrides, csv);
    throw DomainError("unknown command '" + std::string(command) + "'");
}

ExitCode run(std::string_view command, const std::string& config_path, const std::string& output_path,
             const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
        err << "error: unknown command '" << command << "'\n";
        return ExitCode::kUsage;
    }
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        err << "error: cannot read config '" << config_path << "'\n";
        return ExitCode::kRuntime;
    }
    std::stringstream text;
    text << in.rdbuf();

    std::ostringstream csv;
    std::string summary;
    try {
        const auto cfg = parse_config(text.str());
        summary = run_command(command, cfg, overrides, csv);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::kConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::kRuntime;
    }

    if (output_path == "-") {
        out << csv.str();
    } else {
        std::ofstream f(output_path, std::ios::binary | std::ios::trunc);
        f << csv.str();
        f.close();
        if (!f) {
            err << "error: cannot write '" << output_path << "'\n";
            return ExitCode::kRuntime;
        }
    }
    out << summary << '\n';
    return ExitCode::kOk;
}

}  // namespace sagnac
