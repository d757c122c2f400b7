#ifndef SAGNAC_SAGNAC_H
#define SAGNAC_SAGNAC_H

/* C interface to the Sagnac-loop phase shifter simulator.
 *
 * Every fallible call returns a sagnac_status; on failure the message is
 * available from sagnac_last_error() (thread-local, valid until the next call
 * on the same thread). Objects are opaque handles released by their
 * *_destroy function, which accepts NULL. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SAGNAC_BUILDING)
#    define SAGNAC_API __declspec(dllexport)
#  else
#    define SAGNAC_API __declspec(dllimport)
#  endif
#else
#  define SAGNAC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sagnac_status {
    SAGNAC_OK = 0,
    SAGNAC_ERR_INVALID_ARGUMENT = 1,
    SAGNAC_ERR_DOMAIN = 2,
    SAGNAC_ERR_PRECONDITION = 3,
    SAGNAC_ERR_NO_EDGE = 4,
    SAGNAC_ERR_INFINITE_CONTRAST = 5,
    SAGNAC_ERR_CONFIG = 6,
    SAGNAC_ERR_IO = 7,
    SAGNAC_ERR_UNKNOWN_COMMAND = 8,
    SAGNAC_ERR_INTERNAL = 9
} sagnac_status;

typedef struct sagnac_complex {
    double re;
    double im;
} sagnac_complex;

/* SI units throughout: metres, volts per metre. */
typedef struct sagnac_crystal {
    double length_L;
    double thickness_d;
    double wavelength;
    double n_e;
    double r33;
} sagnac_crystal;

/* Angles in radians. */
typedef struct sagnac_loop_options {
    double fr_angle;
    double hwp_angle;
    int rotated_ccw;    /* 0: clockwise beam is rotated */
    int output_port_a;  /* 0: port B */
    double fr_error[2];
    double hwp_error[2];
    double eom_residual_phase; /* rad/V on the unmodulated axis */
    double pbs_extinction_t;
    double pbs_extinction_r;
    int has_mirror_phase;
    double mirror_phase;
} sagnac_loop_options;

typedef struct sagnac_circuit {
    double supply_voltage;
    double recharge_R;
    double total_C;
    double mosfet_on_R;
    double gate_rise_time;
    double gate_delay;
} sagnac_circuit;

/* Interferometer rig around a loop; ref_phase is a diagonal retardance of
 * the reference arm about ref_axis. */
typedef struct sagnac_mz_params {
    double mode_overlap;
    double background;
    double arm_imbalance;
    double ref_axis;
    double ref_phase;
} sagnac_mz_params;

typedef struct sagnac_measurement {
    double i_on;
    double i_off;
    double visibility;
    double contrast_ratio;
    double contrast_db;
    double v_half_fit;
} sagnac_measurement;

typedef struct sagnac_run_overrides {
    int has_sweep_max;
    double sweep_max;
    int has_dt;
    double dt;
    int has_t_end;
    double t_end;
} sagnac_run_overrides;

typedef struct sagnac_loop sagnac_loop;
typedef struct sagnac_waveform sagnac_waveform;

SAGNAC_API const char* sagnac_version(void);
SAGNAC_API const char* sagnac_last_error(void);
SAGNAC_API const char* sagnac_status_name(sagnac_status status);

SAGNAC_API sagnac_status sagnac_parse_number(const char* text, double* out);
SAGNAC_API sagnac_status sagnac_half_wave_voltage(const sagnac_crystal* crystal, double* out);

SAGNAC_API void sagnac_loop_options_default(sagnac_loop_options* options);
/* options may be NULL for the ideal default loop. */
SAGNAC_API sagnac_status sagnac_loop_create(const sagnac_crystal* crystal, const sagnac_loop_options* options,
                                            sagnac_loop** out);
SAGNAC_API void sagnac_loop_destroy(sagnac_loop* loop);
/* Row-major m00, m01, m10, m11. */
SAGNAC_API sagnac_status sagnac_loop_device_matrix(const sagnac_loop* loop, double voltage, sagnac_complex out[4]);
SAGNAC_API sagnac_status sagnac_loop_trace(const sagnac_loop* loop, const sagnac_complex input[2], double voltage,
                                           sagnac_complex out[2]);
/* Any of the output arrays may be NULL; non-NULL ones hold n entries. */
SAGNAC_API sagnac_status sagnac_loop_scan(const sagnac_loop* loop, const double* voltages, size_t n,
                                          double* unwrapped_phase, double* infidelity, double* port_a_power);

SAGNAC_API sagnac_status sagnac_mz_intensity(const sagnac_loop* loop, const sagnac_mz_params* mz, double pol_angle,
                                             double voltage, double* out);
SAGNAC_API sagnac_status sagnac_sawtooth_sweep(const sagnac_loop* loop, const sagnac_mz_params* mz,
                                               double pol_angle, double v_max, int samples,
                                               sagnac_measurement* out);
SAGNAC_API sagnac_status sagnac_contrast_from_visibility(double visibility, double* ratio, double* db);
SAGNAC_API sagnac_status sagnac_insertion_loss(const double* transmissions, size_t n, double* db);

SAGNAC_API sagnac_status sagnac_simulate(const sagnac_circuit* circuit, const double* on_times, size_t n_on,
                                         double hold_duration, double t_end, double dt, sagnac_waveform** out);
SAGNAC_API void sagnac_waveform_destroy(sagnac_waveform* w);
SAGNAC_API size_t sagnac_waveform_size(const sagnac_waveform* w);
SAGNAC_API double sagnac_waveform_dt(const sagnac_waveform* w);
SAGNAC_API const double* sagnac_waveform_samples(const sagnac_waveform* w);
SAGNAC_API sagnac_status sagnac_edge_time_10_90(const sagnac_waveform* w, int falling, double* out);

SAGNAC_API sagnac_status sagnac_recovery_fraction(const sagnac_circuit* circuit, double repetition_rate,
                                                  double hold_duration, double* out);
SAGNAC_API sagnac_status sagnac_max_repetition_rate(const sagnac_circuit* circuit, double fraction,
                                                    double hold_duration, double* out);

/* Space-separated list of command names accepted by sagnac_run. */
SAGNAC_API const char* sagnac_command_list(void);
SAGNAC_API int sagnac_is_command(const char* name);
/* Runs one command end to end; prints the summary on stdout and diagnostics
 * on stderr. Returns the process exit code (0 ok, 1 usage, 2 config,
 * 3 runtime). overrides may be NULL. */
SAGNAC_API int sagnac_run(const char* command, const char* config_path, const char* output_path,
                          const sagnac_run_overrides* overrides);

#ifdef __cplusplus
}
#endif

#endif
