#include "sagnac/sagnac.h"

#include <iostream>
#include <new>
#include <string>

#include "sagnac/errors.hpp"
#include "sagnac/scene.hpp"

struct sagnac_loop {
    sagnac::LoopLayout layout;
};

struct sagnac_waveform {
    sagnac::VoltageWaveform waveform;
};

namespace {

thread_local std::string g_last_error;

sagnac_status fail(sagnac_status s, const char* msg) {
    g_last_error = msg;
    return s;
}

// Maps exceptions from the core onto status codes.
template <class F>
sagnac_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return SAGNAC_OK;
    } catch (const sagnac::NoEdgeError& e) {
        return fail(SAGNAC_ERR_NO_EDGE, e.what());
    } catch (const sagnac::InfiniteContrast& e) {
        return fail(SAGNAC_ERR_INFINITE_CONTRAST, e.what());
    } catch (const sagnac::ConfigError& e) {
        return fail(SAGNAC_ERR_CONFIG, e.what());
    } catch (const sagnac::PreconditionError& e) {
        return fail(SAGNAC_ERR_PRECONDITION, e.what());
    } catch (const sagnac::DomainError& e) {
        return fail(SAGNAC_ERR_DOMAIN, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SAGNAC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SAGNAC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SAGNAC_ERR_INTERNAL, "unknown error");
    }
}

#define SAGNAC_REQUIRE(cond) \
    if (!(cond)) return fail(SAGNAC_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond)

sagnac::CrystalSpec to_crystal(const sagnac_crystal& c) {
    return {c.length_L, c.thickness_d, c.wavelength, c.n_e, c.r33};
}

sagnac::DriveCircuit to_circuit(const sagnac_circuit& c) {
    return {c.supply_voltage, c.recharge_R, c.total_C, c.mosfet_on_R, c.gate_rise_time, c.gate_delay};
}

sagnac::MzSetup to_setup(const sagnac_loop& loop, const sagnac_mz_params* mz) {
    sagnac::MzSetup s;
    s.loop = loop.layout;
    if (mz) {
        s.mode_overlap = mz->mode_overlap;
        s.background = mz->background;
        s.arm_imbalance = mz->arm_imbalance;
        s.ref_arm = sagnac::PolarizationTransform::retarder(mz->ref_axis, mz->ref_phase);
    }
    return s;
}

sagnac_complex to_c(sagnac::Complex z) { return {z.real(), z.imag()}; }

}  // namespace

extern "C" {

const char* sagnac_version(void) { return "1.0.0"; }

const char* sagnac_last_error(void) { return g_last_error.c_str(); }

const char* sagnac_status_name(sagnac_status status) {
    switch (status) {
        case SAGNAC_OK: return "ok";
        case SAGNAC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SAGNAC_ERR_DOMAIN: return "domain error";
        case SAGNAC_ERR_PRECONDITION: return "precondition violated";
        case SAGNAC_ERR_NO_EDGE: return "no edge found";
        case SAGNAC_ERR_INFINITE_CONTRAST: return "infinite contrast";
        case SAGNAC_ERR_CONFIG: return "config error";
        case SAGNAC_ERR_IO: return "i/o error";
        case SAGNAC_ERR_UNKNOWN_COMMAND: return "unknown command";
        case SAGNAC_ERR_INTERNAL: return "internal error";
    }
    return "unrecognized status";
}

sagnac_status sagnac_parse_number(const char* text, double* out) {
    SAGNAC_REQUIRE(text && out);
    return guarded([&] { *out = sagnac::parse_number(text); });
}

sagnac_status sagnac_half_wave_voltage(const sagnac_crystal* crystal, double* out) {
    SAGNAC_REQUIRE(crystal && out);
    return guarded([&] { *out = sagnac::half_wave_voltage(to_crystal(*crystal)); });
}

void sagnac_loop_options_default(sagnac_loop_options* o) {
    if (!o) return;
    const sagnac::LoopOptions d;
    *o = sagnac_loop_options{};
    o->fr_angle = d.fr_angle;
    o->hwp_angle = d.hwp_angle;
}

sagnac_status sagnac_loop_create(const sagnac_crystal* crystal, const sagnac_loop_options* options,
                                 sagnac_loop** out) {
    SAGNAC_REQUIRE(crystal && out);
    *out = nullptr;
    return guarded([&] {
        sagnac::LoopOptions o;
        if (options) {
            o.fr_angle = options->fr_angle;
            o.hwp_angle = options->hwp_angle;
            o.rotated_beam = options->rotated_ccw ? sagnac::RotatedBeam::kCounterClockwise
                                                  : sagnac::RotatedBeam::kClockwise;
            o.output = options->output_port_a ? sagnac::OutputPort::kA : sagnac::OutputPort::kB;
            o.fr_error = {options->fr_error[0], options->fr_error[1]};
            o.hwp_error = {options->hwp_error[0], options->hwp_error[1]};
            o.eom_residual_phase = options->eom_residual_phase;
            o.pbs = {options->pbs_extinction_t, options->pbs_extinction_r};
            if (options->has_mirror_phase) o.mirror_phase = options->mirror_phase;
        }
        *out = new sagnac_loop{sagnac::build_loop(to_crystal(*crystal), o)};
    });
}

void sagnac_loop_destroy(sagnac_loop* loop) { delete loop; }

sagnac_status sagnac_loop_device_matrix(const sagnac_loop* loop, double voltage, sagnac_complex out[4]) {
    SAGNAC_REQUIRE(loop && out);
    return guarded([&] {
        const auto m = sagnac::device_matrix(loop->layout, voltage);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) out[2 * r + c] = to_c(m.m[r][c]);
    });
}

sagnac_status sagnac_loop_trace(const sagnac_loop* loop, const sagnac_complex input[2], double voltage,
                                sagnac_complex out[2]) {
    SAGNAC_REQUIRE(loop && input && out);
    return guarded([&] {
        const sagnac::PolarizationState in{{input[0].re, input[0].im}, {input[1].re, input[1].im}};
        const auto s = sagnac::trace(loop->layout, in, voltage);
        out[0] = to_c(s.alpha);
        out[1] = to_c(s.beta);
    });
}

sagnac_status sagnac_loop_scan(const sagnac_loop* loop, const double* voltages, size_t n, double* unwrapped_phase,
                               double* infidelity, double* port_a_power) {
    SAGNAC_REQUIRE(loop && voltages && n > 0);
    return guarded([&] {
        const auto scan = sagnac::independence_scan(loop->layout, std::span<const double>(voltages, n));
        for (size_t i = 0; i < n; ++i) {
            if (unwrapped_phase) unwrapped_phase[i] = scan[i].unwrapped_phase;
            if (infidelity) infidelity[i] = scan[i].infidelity;
            if (port_a_power) port_a_power[i] = scan[i].port_a_power;
        }
    });
}

sagnac_status sagnac_mz_intensity(const sagnac_loop* loop, const sagnac_mz_params* mz, double pol_angle,
                                  double voltage, double* out) {
    SAGNAC_REQUIRE(loop && out);
    return guarded([&] {
        const auto setup = to_setup(*loop, mz);
        sagnac::validate(setup);
        *out = sagnac::mz_intensity(setup, sagnac::PolarizationState::linear(pol_angle), voltage);
    });
}

sagnac_status sagnac_sawtooth_sweep(const sagnac_loop* loop, const sagnac_mz_params* mz, double pol_angle,
                                    double v_max, int samples, sagnac_measurement* out) {
    SAGNAC_REQUIRE(loop && out);
    return guarded([&] {
        const auto r = sagnac::sawtooth_sweep(to_setup(*loop, mz), sagnac::PolarizationState::linear(pol_angle),
                                              v_max, samples);
        *out = {r.i_on, r.i_off, r.visibility, r.contrast_ratio, r.contrast_db, r.v_half_fit};
    });
}

sagnac_status sagnac_contrast_from_visibility(double visibility, double* ratio, double* db) {
    SAGNAC_REQUIRE(ratio || db);
    return guarded([&] {
        const auto c = sagnac::contrast_from_visibility(visibility);
        if (ratio) *ratio = c.ratio;
        if (db) *db = c.db;
    });
}

sagnac_status sagnac_insertion_loss(const double* transmissions, size_t n, double* db) {
    SAGNAC_REQUIRE((transmissions || n == 0) && db);
    return guarded([&] { *db = sagnac::insertion_loss(std::span<const double>(transmissions, n)); });
}

sagnac_status sagnac_simulate(const sagnac_circuit* circuit, const double* on_times, size_t n_on,
                              double hold_duration, double t_end, double dt, sagnac_waveform** out) {
    SAGNAC_REQUIRE(circuit && (on_times || n_on == 0) && out);
    *out = nullptr;
    return guarded([&] {
        sagnac::GateSchedule g;
        g.on_times.assign(on_times, on_times + n_on);
        g.hold_duration = hold_duration;
        *out = new sagnac_waveform{sagnac::simulate(to_circuit(*circuit), g, t_end, dt)};
    });
}

void sagnac_waveform_destroy(sagnac_waveform* w) { delete w; }

size_t sagnac_waveform_size(const sagnac_waveform* w) { return w ? w->waveform.samples.size() : 0; }

double sagnac_waveform_dt(const sagnac_waveform* w) { return w ? w->waveform.dt : 0.0; }

const double* sagnac_waveform_samples(const sagnac_waveform* w) { return w ? w->waveform.samples.data() : nullptr; }

sagnac_status sagnac_edge_time_10_90(const sagnac_waveform* w, int falling, double* out) {
    SAGNAC_REQUIRE(w && out);
    return guarded([&] { *out = sagnac::edge_time_10_90(w->waveform, falling != 0); });
}

sagnac_status sagnac_recovery_fraction(const sagnac_circuit* circuit, double repetition_rate, double hold_duration,
                                       double* out) {
    SAGNAC_REQUIRE(circuit && out);
    return guarded([&] { *out = sagnac::recovery_fraction(to_circuit(*circuit), repetition_rate, hold_duration); });
}

sagnac_status sagnac_max_repetition_rate(const sagnac_circuit* circuit, double fraction, double hold_duration,
                                         double* out) {
    SAGNAC_REQUIRE(circuit && out);
    return guarded([&] { *out = sagnac::max_repetition_rate(to_circuit(*circuit), fraction, hold_duration); });
}

const char* sagnac_command_list(void) {
    static const std::string list = [] {
        std::string s;
        for (const auto& n : sagnac::command_names()) s += (s.empty() ? "" : " ") + n;
        return s;
    }();
    return list.c_str();
}

int sagnac_is_command(const char* name) {
    if (!name) return 0;
    for (const auto& n : sagnac::command_names())
        if (n == name) return 1;
    return 0;
}

int sagnac_run(const char* command, const char* config_path, const char* output_path,
               const sagnac_run_overrides* overrides) {
    if (!command || !config_path || !output_path) {
        fail(SAGNAC_ERR_INVALID_ARGUMENT, "command, config and output are required");
        return static_cast<int>(sagnac::ExitCode::kUsage);
    }
    sagnac::RunOverrides o;
    if (overrides) {
        if (overrides->has_sweep_max) o.sweep_max = overrides->sweep_max;
        if (overrides->has_dt) o.dt = overrides->dt;
        if (overrides->has_t_end) o.t_end = overrides->t_end;
    }
    try {
        return static_cast<int>(sagnac::run(command, config_path, output_path, o, std::cout, std::cerr));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(sagnac::ExitCode::kRuntime);
    }
}

}  // extern "C"
