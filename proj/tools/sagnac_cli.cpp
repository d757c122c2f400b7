// Command-line front end. Talks to the simulator only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sagnac/sagnac.h"

namespace {

std::vector<std::string> command_list() {
    std::istringstream in(sagnac_command_list());
    std::vector<std::string> out;
    for (std::string s; in >> s;) out.push_back(s);
    return out;
}

// Validator so that numeric flags accept the same SI suffixes as the config.
struct SiNumber : CLI::Validator {
    SiNumber() {
        name_ = "SI_NUMBER";
        func_ = [](std::string& s) -> std::string {
            double v = 0.0;
            if (sagnac_parse_number(s.c_str(), &v) != SAGNAC_OK) return "'" + s + "' is not a number";
            return {};
        };
    }
};

double to_double(const std::string& s) {
    double v = 0.0;
    sagnac_parse_number(s.c_str(), &v);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sagnac-loop polarization-independent phase shifter simulator"};
    app.set_version_flag("--version", sagnac_version());

    std::string command, config, out, sweep_max, dt, t_end;
    app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(command_list()));
    app.add_option("--config", config, "Scene configuration file")->required();
    app.add_option("--out", out, "CSV output path ('-' for stdout)")->required();
    app.add_option("--sweep-max", sweep_max, "Override the sweep's maximum voltage")->check(SiNumber());
    app.add_option("--dt", dt, "Override the transient time step")->check(SiNumber());
    app.add_option("--t-end", t_end, "Override the transient duration")->check(SiNumber());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    sagnac_run_overrides o{};
    if (!sweep_max.empty()) {
        o.has_sweep_max = 1;
        o.sweep_max = to_double(sweep_max);
    }
    if (!dt.empty()) {
        o.has_dt = 1;
        o.dt = to_double(dt);
    }
    if (!t_end.empty()) {
        o.has_t_end = 1;
        o.t_end = to_double(t_end);
    }
    return sagnac_run(command.c_str(), config.c_str(), out.c_str(), &o);
}
