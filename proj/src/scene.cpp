#include "sagnac/scene.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <utility>

#include "sagnac/errors.hpp"

namespace sagnac {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct RawSection {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
};

std::vector<RawSection> tokenize(std::string_view text) {
    std::vector<RawSection> sections;
    int line_no = 0;
    while (!text.empty() || line_no == 0) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (text.empty()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "", "malformed section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw ConfigError(line_no, "", "empty section name");
            for (const auto& s : sections)
                if (s.name == name) throw ConfigError(line_no, std::string(name), "duplicate section");
            sections.push_back({std::string(name), line_no, {}});
        } else {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(line_no, "", "missing key");
            if (sections.empty()) throw ConfigError(line_no, std::string(key), "key outside of any section");
            if (value.empty()) throw ConfigError(line_no, std::string(key), "missing value");
            for (const auto& e : sections.back().entries)
                if (e.key == key) throw ConfigError(line_no, std::string(key), "duplicate key");
            sections.back().entries.push_back({std::string(key), std::string(value), line_no});
        }
        if (text.empty()) break;
    }
    return sections;
}

using Check = std::function<void(double)>;

Check positive() {
    return [](double v) {
        if (!(v > 0.0)) throw DomainError("must be positive");
    };
}
Check non_negative() {
    return [](double v) {
        if (!(v >= 0.0)) throw DomainError("must be non-negative");
    };
}
Check closed_range(double lo, double hi) {
    return [=](double v) {
        if (!(v >= lo && v <= hi)) throw DomainError("must lie in [" + format_number(lo) + ", " + format_number(hi) + "]");
    };
}
Check half_open(double lo, double hi) {
    return [=](double v) {
        if (!(v >= lo && v < hi)) throw DomainError("must lie in [" + format_number(lo) + ", " + format_number(hi) + ")");
    };
}

// Binds the entries of one section to typed fields, then rejects leftovers.
class SectionReader {
public:
    explicit SectionReader(const RawSection& s) : section_(s) {}

    void number(const char* key, double& out, const Check& check = {}) {
        if (const Entry* e = take(key)) out = convert(*e, check);
    }
    void required(const char* key, double& out, const Check& check = {}) {
        const Entry* e = take(key);
        if (!e) throw ConfigError(section_.line, key, "required key missing from [" + section_.name + "]");
        out = convert(*e, check);
    }
    void optional(const char* key, std::optional<double>& out, const Check& check = {}) {
        if (const Entry* e = take(key)) out = convert(*e, check);
    }
    void integer(const char* key, int& out, int min_value) {
        if (const Entry* e = take(key)) out = to_int(*e, min_value);
    }
    void optional_integer(const char* key, std::optional<int>& out, int min_value) {
        if (const Entry* e = take(key)) out = to_int(*e, min_value);
    }
    template <class E>
    void choice(const char* key, E& out, std::initializer_list<std::pair<std::string_view, E>> options) {
        const Entry* e = take(key);
        if (!e) return;
        for (const auto& [name, value] : options) {
            if (e->value == name) {
                out = value;
                return;
            }
        }
        std::string allowed;
        for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + std::string(name);
        throw ConfigError(e->line, key, "expected one of " + allowed);
    }
    void list(const char* key, std::vector<double>& out, bool is_required, const Check& check = {}) {
        const Entry* e = take(key);
        if (!e) {
            if (is_required) throw ConfigError(section_.line, key, "required key missing from [" + section_.name + "]");
            return;
        }
        out.clear();
        std::string_view rest = e->value;
        while (true) {
            const auto comma = rest.find(',');
            Entry item = *e;
            item.value = std::string(trim(rest.substr(0, comma)));
            out.push_back(convert(item, check));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    void finish() const {
        for (const auto& e : section_.entries)
            if (!used_.count(e.key)) throw ConfigError(e.line, e.key, "unknown key in [" + section_.name + "]");
    }
    [[nodiscard]] int line_of(const std::string& key) const {
        for (const auto& e : section_.entries)
            if (e.key == key) return e.line;
        return section_.line;
    }

private:
    const Entry* take(const char* key) {
        for (const auto& e : section_.entries) {
            if (e.key == key) {
                used_[e.key] = true;
                return &e;
            }
        }
        return nullptr;
    }
    static double convert(const Entry& e, const Check& check) {
        double v = 0.0;
        try {
            v = parse_number(e.value);
        } catch (const DomainError&) {
            throw ConfigError(e.line, e.key, "malformed number '" + e.value + "'");
        }
        if (check) {
            try {
                check(v);
            } catch (const DomainError& ex) {
                throw ConfigError(e.line, e.key, ex.what());
            }
        }
        return v;
    }
    static int to_int(const Entry& e, int min_value) {
        const double v = convert(e, {});
        if (v != std::floor(v) || v < min_value || v > 1e9)
            throw ConfigError(e.line, e.key, "expected an integer >= " + std::to_string(min_value));
        return static_cast<int>(v);
    }

    const RawSection& section_;
    std::map<std::string, bool> used_;
};

// Re-raises a cross-field DomainError against a specific key.
template <class F>
void check_invariant(const SectionReader& r, const char* key, F&& f) {
    try {
        f();
    } catch (const DomainError& ex) {
        throw ConfigError(r.line_of(key), key, ex.what());
    }
}

CrystalSpec read_crystal(SectionReader& r) {
    CrystalSpec c;
    r.required("length_L", c.length_L, positive());
    r.required("thickness_d", c.thickness_d, positive());
    r.required("wavelength", c.wavelength, positive());
    r.required("n_e", c.n_e, positive());
    r.required("r33", c.r33, positive());
    check_invariant(r, "length_L", [&] { validate(c); });
    return c;
}

LoopSection read_loop(SectionReader& r) {
    LoopSection l;
    r.number("fr_angle_deg", l.fr_angle_deg);
    r.number("hwp_angle_deg", l.hwp_angle_deg);
    r.choice("rotated_beam", l.rotated_beam,
             {{"cw", RotatedBeam::kClockwise}, {"ccw", RotatedBeam::kCounterClockwise}});
    r.choice("output_port", l.output_port, {{"B", OutputPort::kB}, {"A", OutputPort::kA}});
    r.number("fr1_error_deg", l.fr1_error_deg);
    r.number("fr2_error_deg", l.fr2_error_deg);
    r.number("hwp1_error_deg", l.hwp1_error_deg);
    r.number("hwp2_error_deg", l.hwp2_error_deg);
    r.number("eom_residual_phase", l.eom_residual_phase);
    r.number("pbs_extinction_t", l.pbs_extinction_t, half_open(0.0, 0.3));
    r.number("pbs_extinction_r", l.pbs_extinction_r, half_open(0.0, 0.3));
    r.optional("mirror_phase", l.mirror_phase);
    return l;
}

CircuitSection read_circuit(SectionReader& r) {
    CircuitSection c;
    r.optional("supply_voltage", c.supply_voltage, positive());
    r.required("R", c.R, positive());
    r.required("C", c.C, positive());
    r.required("R_on", c.R_on, positive());
    r.number("gate_rise_time", c.gate_rise_time, non_negative());
    r.number("gate_delay", c.gate_delay, non_negative());
    check_invariant(r, "R_on", [&] {
        if (!(c.R_on / c.R < kMaxOnResistanceRatio)) throw DomainError("R_on must be below 1% of R");
    });
    return c;
}

GateSection read_gate(SectionReader& r) {
    GateSection g;
    r.optional("repetition_rate", g.repetition_rate, positive());
    r.number("hold_duration", g.hold_duration, positive());
    r.number("first_on", g.first_on, non_negative());
    r.optional_integer("count", g.count, 1);
    if (g.repetition_rate)
        check_invariant(r, "hold_duration", [&] {
            if (!(1.0 / *g.repetition_rate > g.hold_duration))
                throw DomainError("hold_duration must be shorter than the repetition period");
        });
    return g;
}

MzSection read_mz(SectionReader& r) {
    MzSection m;
    r.number("mode_overlap", m.mode_overlap, closed_range(0.0, 1.0));
    r.number("background", m.background, non_negative());
    r.number("arm_imbalance", m.arm_imbalance, positive());
    r.number("ref_phase_deg", m.ref_phase_deg);
    r.number("ref_retarder_axis_deg", m.ref_retarder_axis_deg);
    r.number("input_pol_deg", m.input_pol_deg);
    return m;
}

SweepSection read_sweep(SectionReader& r) {
    SweepSection s;
    r.optional("v_max", s.v_max, positive());
    r.integer("samples", s.samples, 64);
    r.optional("device_voltage", s.device_voltage);
    r.integer("scan_points", s.scan_points, 1);
    return s;
}

TraceSection read_trace(SectionReader& r) {
    TraceSection t;
    r.number("t_end", t.t_end, positive());
    r.number("dt", t.dt, positive());
    r.optional("fit_edge_target", t.fit_edge_target, positive());
    r.number("fit_r_min", t.fit_r_min, positive());
    r.number("fit_r_max", t.fit_r_max, positive());
    check_invariant(r, "fit_r_max", [&] {
        if (!(t.fit_r_max > t.fit_r_min)) throw DomainError("fit_r_max must exceed fit_r_min");
    });
    return t;
}

LossSection read_loss(SectionReader& r) {
    LossSection l;
    r.list("transmissions", l.transmissions, true, [](double v) {
        if (!(v > 0.0 && v <= 1.0)) throw DomainError("transmissions must lie in (0, 1]");
    });
    return l;
}

template <class T, class F>
void read_section(const RawSection& raw, std::optional<T>& slot, F&& reader) {
    SectionReader r(raw);
    slot = reader(r);
    r.finish();
}

// Full precision so that render -> parse reproduces every double exactly.
std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw DomainError("empty number");
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) throw DomainError("malformed number");
    double scale = 1.0;
    if (ptr != last) {
        if (last - ptr != 1) throw DomainError("malformed number");
        switch (*ptr) {
            case 'p': scale = 1e-12; break;
            case 'n': scale = 1e-9; break;
            case 'u': scale = 1e-6; break;
            case 'm': scale = 1e-3; break;
            case 'k': scale = 1e3; break;
            case 'M': scale = 1e6; break;
            default: throw DomainError("unknown SI suffix");
        }
    }
    v *= scale;
    if (!std::isfinite(v)) throw DomainError("number must be finite");
    return v;
}

SceneConfig parse_config(std::string_view text) {
    SceneConfig cfg;
    for (const auto& raw : tokenize(text)) {
        if (raw.name == "crystal") read_section(raw, cfg.crystal, read_crystal);
        else if (raw.name == "loop") read_section(raw, cfg.loop, read_loop);
        else if (raw.name == "circuit") read_section(raw, cfg.circuit, read_circuit);
        else if (raw.name == "gate") read_section(raw, cfg.gate, read_gate);
        else if (raw.name == "mz") read_section(raw, cfg.mz, read_mz);
        else if (raw.name == "sweep") read_section(raw, cfg.sweep, read_sweep);
        else if (raw.name == "trace") read_section(raw, cfg.trace, read_trace);
        else if (raw.name == "loss") read_section(raw, cfg.loss, read_loss);
        else throw ConfigError(raw.line, raw.name, "unknown section");
    }
    return cfg;
}

std::string render_config(const SceneConfig& c) {
    std::string out;
    auto header = [&](const char* name) {
        if (!out.empty()) out += '\n';
        out += '[';
        out += name;
        out += "]\n";
    };
    auto kv = [&](const char* key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) kv(key, exact(*v));
    };

    if (c.crystal) {
        header("crystal");
        kv("length_L", exact(c.crystal->length_L));
        kv("thickness_d", exact(c.crystal->thickness_d));
        kv("wavelength", exact(c.crystal->wavelength));
        kv("n_e", exact(c.crystal->n_e));
        kv("r33", exact(c.crystal->r33));
    }
    if (c.loop) {
        const auto& l = *c.loop;
        header("loop");
        kv("fr_angle_deg", exact(l.fr_angle_deg));
        kv("hwp_angle_deg", exact(l.hwp_angle_deg));
        kv("rotated_beam", l.rotated_beam == RotatedBeam::kClockwise ? "cw" : "ccw");
        kv("output_port", l.output_port == OutputPort::kB ? "B" : "A");
        kv("fr1_error_deg", exact(l.fr1_error_deg));
        kv("fr2_error_deg", exact(l.fr2_error_deg));
        kv("hwp1_error_deg", exact(l.hwp1_error_deg));
        kv("hwp2_error_deg", exact(l.hwp2_error_deg));
        kv("eom_residual_phase", exact(l.eom_residual_phase));
        kv("pbs_extinction_t", exact(l.pbs_extinction_t));
        kv("pbs_extinction_r", exact(l.pbs_extinction_r));
        opt("mirror_phase", l.mirror_phase);
    }
    if (c.circuit) {
        const auto& k = *c.circuit;
        header("circuit");
        opt("supply_voltage", k.supply_voltage);
        kv("R", exact(k.R));
        kv("C", exact(k.C));
        kv("R_on", exact(k.R_on));
        kv("gate_rise_time", exact(k.gate_rise_time));
        kv("gate_delay", exact(k.gate_delay));
    }
    if (c.gate) {
        const auto& g = *c.gate;
        header("gate");
        opt("repetition_rate", g.repetition_rate);
        kv("hold_duration", exact(g.hold_duration));
        kv("first_on", exact(g.first_on));
        if (g.count) kv("count", std::to_string(*g.count));
    }
    if (c.mz) {
        const auto& m = *c.mz;
        header("mz");
        kv("mode_overlap", exact(m.mode_overlap));
        kv("background", exact(m.background));
        kv("arm_imbalance", exact(m.arm_imbalance));
        kv("ref_phase_deg", exact(m.ref_phase_deg));
        kv("ref_retarder_axis_deg", exact(m.ref_retarder_axis_deg));
        kv("input_pol_deg", exact(m.input_pol_deg));
    }
    if (c.sweep) {
        const auto& s = *c.sweep;
        header("sweep");
        opt("v_max", s.v_max);
        kv("samples", std::to_string(s.samples));
        opt("device_voltage", s.device_voltage);
        kv("scan_points", std::to_string(s.scan_points));
    }
    if (c.trace) {
        const auto& t = *c.trace;
        header("trace");
        kv("t_end", exact(t.t_end));
        kv("dt", exact(t.dt));
        opt("fit_edge_target", t.fit_edge_target);
        kv("fit_r_min", exact(t.fit_r_min));
        kv("fit_r_max", exact(t.fit_r_max));
    }
    if (c.loss) {
        header("loss");
        std::string joined;
        for (double t : c.loss->transmissions) joined += (joined.empty() ? "" : ", ") + exact(t);
        kv("transmissions", joined);
    }
    return out;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

LoopOptions loop_options(const LoopSection& s) {
    constexpr double deg = kPi / 180.0;
    LoopOptions o;
    o.fr_angle = s.fr_angle_deg * deg;
    o.hwp_angle = s.hwp_angle_deg * deg;
    o.rotated_beam = s.rotated_beam;
    o.output = s.output_port;
    o.fr_error = {s.fr1_error_deg * deg, s.fr2_error_deg * deg};
    o.hwp_error = {s.hwp1_error_deg * deg, s.hwp2_error_deg * deg};
    o.eom_residual_phase = s.eom_residual_phase;
    o.pbs = {s.pbs_extinction_t, s.pbs_extinction_r};
    o.mirror_phase = s.mirror_phase;
    return o;
}

LoopLayout make_loop(const SceneConfig& c) {
    if (!c.crystal) throw ConfigError(0, "crystal", "section [crystal] is required");
    return build_loop(*c.crystal, loop_options(c.loop.value_or(LoopSection{})));
}

MzSetup make_mz_setup(const SceneConfig& c) {
    const auto m = c.mz.value_or(MzSection{});
    constexpr double deg = kPi / 180.0;
    MzSetup s;
    s.loop = make_loop(c);
    s.ref_arm = PolarizationTransform::retarder(m.ref_retarder_axis_deg * deg, m.ref_phase_deg * deg);
    s.mode_overlap = m.mode_overlap;
    s.background = m.background;
    s.arm_imbalance = m.arm_imbalance;
    return s;
}

DriveCircuit make_circuit(const SceneConfig& c) {
    if (!c.circuit) throw ConfigError(0, "circuit", "section [circuit] is required");
    const auto& k = *c.circuit;
    DriveCircuit d;
    if (k.supply_voltage) {
        d.supply_voltage = *k.supply_voltage;
    } else {
        if (!c.crystal) throw ConfigError(0, "supply_voltage", "needs [crystal] to default to the half-wave voltage");
        d.supply_voltage = half_wave_voltage(*c.crystal);
    }
    d.recharge_R = k.R;
    d.total_C = k.C;
    d.mosfet_on_R = k.R_on;
    d.gate_rise_time = k.gate_rise_time;
    d.gate_delay = k.gate_delay;
    return d;
}

}  // namespace sagnac
