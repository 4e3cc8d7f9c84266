#ifndef KITWPA_KITWPA_H
#define KITWPA_KITWPA_H

/* C interface to the kitwpa toolkit. Every call returns a kitwpa_status; on
 * failure kitwpa_last_error() holds a message for the calling thread. Handles
 * are opaque and owned by the caller (release with the matching _destroy). */

#include <stddef.h>
#include <stdint.h>

#if defined(KITWPA_BUILDING_LIBRARY)
#define KITWPA_API __attribute__((visibility("default")))
#else
#define KITWPA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kitwpa_status {
    KITWPA_OK = 0,
    KITWPA_ERR_INVALID_ARGUMENT = 1,
    KITWPA_ERR_CONFIG = 2,
    KITWPA_ERR_DOMAIN = 3,
    KITWPA_ERR_IO = 4,
    KITWPA_ERR_OUT_OF_RANGE = 5,
    KITWPA_ERR_STEP_SIZE = 6,
    KITWPA_ERR_DATA = 7,
    KITWPA_ERR_INTERNAL = 8
} kitwpa_status;

KITWPA_API const char* kitwpa_version(void);
KITWPA_API const char* kitwpa_last_error(void);
KITWPA_API const char* kitwpa_status_name(kitwpa_status status);

/* kinetics */

typedef struct kitwpa_film {
    double sheet_inductance_ph; /* pH/sq */
    double istar_ma;
    double ic_ma;
    double thickness_nm;
    double linewidth_um;
} kitwpa_film;

KITWPA_API kitwpa_status kitwpa_total_inductance(const kitwpa_film* film, double idc_ma,
                                                 double irf_ma, double* out_ph);
KITWPA_API kitwpa_status kitwpa_mixing_coefficients(double idc_ma, double istar_ma,
                                                    double* out_epsilon, double* out_xi);
KITWPA_API kitwpa_status kitwpa_scale_film(const kitwpa_film* reference, double thickness_nm,
                                           double linewidth_um, kitwpa_film* out);

/* line */

typedef struct kitwpa_cell {
    double line_width_um;
    double finger_spacing_um;
    double dielectric_thickness_nm;
    double permittivity;
    double finger_length_um;
    int fingers_per_cell;
} kitwpa_cell;

typedef struct kitwpa_line_spec {
    kitwpa_cell unloaded;
    kitwpa_cell loaded;
    int n_unloaded;
    int n_loaded;
    int n_supercells;
    int lumped_stubs; /* 0: distributed open stubs, 1: lumped capacitors */
    double fringing_factor;
} kitwpa_line_spec;

/* Fills a spec with the library defaults (30 + 6 cells, 1200 supercells). */
KITWPA_API void kitwpa_line_spec_default(kitwpa_line_spec* spec);

KITWPA_API kitwpa_status kitwpa_cell_impedance(const kitwpa_cell* cell, const kitwpa_film* film,
                                               double idc_ma, double fringing_factor,
                                               double* out_ohm);
KITWPA_API kitwpa_status kitwpa_solve_finger_length(const kitwpa_cell* cell,
                                                    const kitwpa_film* film, double idc_ma,
                                                    double target_ohm, double fringing_factor,
                                                    double* out_um);
KITWPA_API kitwpa_status kitwpa_line_length(const kitwpa_line_spec* spec, double* out_m);

typedef struct kitwpa_dispersion kitwpa_dispersion;

KITWPA_API kitwpa_status kitwpa_dispersion_compute(const kitwpa_line_spec* spec,
                                                   const kitwpa_film* film, double idc_ma,
                                                   const double* grid_hz, size_t n,
                                                   kitwpa_dispersion** out);
KITWPA_API void kitwpa_dispersion_destroy(kitwpa_dispersion* d);
KITWPA_API size_t kitwpa_dispersion_size(const kitwpa_dispersion* d);
KITWPA_API kitwpa_status kitwpa_dispersion_point(const kitwpa_dispersion* d, size_t index,
                                                 double* frequency_hz, double* bloch_phase_rad,
                                                 double* half_trace, int* propagating);
KITWPA_API size_t kitwpa_dispersion_stopband_count(const kitwpa_dispersion* d);
KITWPA_API kitwpa_status kitwpa_dispersion_stopband(const kitwpa_dispersion* d, size_t index,
                                                    double* f_low_hz, double* f_high_hz);
KITWPA_API kitwpa_status kitwpa_dispersion_beta(const kitwpa_dispersion* d, double frequency_hz,
                                                double* out_rad_per_m);

/* gain */

typedef struct kitwpa_pump {
    double frequency_hz;
    double current_ma;
    double idc_ma;
} kitwpa_pump;

typedef struct kitwpa_gain_profile kitwpa_gain_profile;

KITWPA_API kitwpa_status kitwpa_gain_profile_compute(const kitwpa_dispersion* d,
                                                     const kitwpa_film* film,
                                                     const kitwpa_pump* pump,
                                                     const double* grid_hz, size_t n,
                                                     double length_m, int steps_per_supercell,
                                                     kitwpa_gain_profile** out);
KITWPA_API void kitwpa_gain_profile_destroy(kitwpa_gain_profile* g);
KITWPA_API size_t kitwpa_gain_profile_size(const kitwpa_gain_profile* g);
/* gain_db is NaN where the signal or idler sits in a stop band. */
KITWPA_API kitwpa_status kitwpa_gain_profile_point(const kitwpa_gain_profile* g, size_t index,
                                                   double* frequency_hz, double* gain_db);
KITWPA_API kitwpa_status kitwpa_ripple_estimate(double gain_db, double gamma_in,
                                                double gamma_out, double* out_ripple_db);
KITWPA_API kitwpa_status kitwpa_pump_power_dbm(double current_ma, double z0_ohm, double* out);

/* noise */

KITWPA_API kitwpa_status kitwpa_occupancy(double frequency_hz, double temperature_k, double* out);
KITWPA_API kitwpa_status kitwpa_band_averaged_occupancy(double lo_hz, double hi_hz,
                                                        double temperature_k, double* out);
KITWPA_API kitwpa_status kitwpa_temperature_from_quanta(double quanta, double frequency_hz,
                                                        double* out_k);

typedef struct kitwpa_noise_chain kitwpa_noise_chain;

KITWPA_API kitwpa_status kitwpa_noise_chain_create(double source_temperature_k,
                                                   kitwpa_noise_chain** out);
KITWPA_API void kitwpa_noise_chain_destroy(kitwpa_noise_chain* chain);
KITWPA_API kitwpa_status kitwpa_noise_chain_add_stage(kitwpa_noise_chain* chain,
                                                      double temperature_k, double attenuation_db,
                                                      double extra_loss_db);
KITWPA_API kitwpa_status kitwpa_noise_chain_input(const kitwpa_noise_chain* chain,
                                                  double frequency_hz, double* out_quanta);

/* Least-squares y-factor fit over n switch positions. */
KITWPA_API kitwpa_status kitwpa_yfactor_fit(const double* signal_quanta,
                                            const double* idler_quanta,
                                            const double* output_power, size_t n,
                                            double* out_chain_gain, double* out_added_noise);

/* tdr */

typedef struct kitwpa_tdr_profile kitwpa_tdr_profile;
typedef struct kitwpa_tdr_trace kitwpa_tdr_trace;

KITWPA_API kitwpa_status kitwpa_step_reflection(double z_ohm, double z_ref_ohm, double* out);

KITWPA_API kitwpa_status kitwpa_tdr_profile_create(double reference_ohm,
                                                   kitwpa_tdr_profile** out);
KITWPA_API void kitwpa_tdr_profile_destroy(kitwpa_tdr_profile* p);
KITWPA_API kitwpa_status kitwpa_tdr_profile_add_segment(kitwpa_tdr_profile* p, double z0_ohm,
                                                        double delay_s);
KITWPA_API size_t kitwpa_tdr_profile_size(const kitwpa_tdr_profile* p);
KITWPA_API kitwpa_status kitwpa_tdr_profile_segment(const kitwpa_tdr_profile* p, size_t index,
                                                    double* z0_ohm, double* delay_s);

KITWPA_API kitwpa_status kitwpa_tdr_trace_create(const double* time_s, const double* rho,
                                                 size_t n, kitwpa_tdr_trace** out);
KITWPA_API void kitwpa_tdr_trace_destroy(kitwpa_tdr_trace* t);
KITWPA_API size_t kitwpa_tdr_trace_size(const kitwpa_tdr_trace* t);
KITWPA_API kitwpa_status kitwpa_tdr_trace_sample(const kitwpa_tdr_trace* t, size_t index,
                                                 double* time_s, double* rho);

KITWPA_API kitwpa_status kitwpa_tdr_synthesize(const kitwpa_tdr_profile* p, double dt_s,
                                               double t_max_s, kitwpa_tdr_trace** out);
KITWPA_API kitwpa_status kitwpa_tdr_extract(const kitwpa_tdr_trace* t, double reference_ohm,
                                            double threshold, int sustain_samples,
                                            kitwpa_tdr_profile** out);

/* command runner */

typedef struct kitwpa_run_options {
    const char* command; /* design | dispersion | gain | noise | tdr */
    const char* config_path;
    const char* out_dir;     /* NULL: [output] directory, else "." */
    const char* grid;        /* NULL or "f_lo:f_hi:step" */
    int has_seed;
    uint64_t seed;
    const char* scan_csv;    /* noise */
    const char* trace_csv;   /* tdr extraction */
    const char* profile_csv; /* tdr synthesis */
} kitwpa_run_options;

/* Runs one subcommand. Returns KITWPA_OK when the run itself was carried out
 * (successfully or not); *exit_code receives the process exit code (0 success,
 * 2 config, 3 physics domain, 4 I/O). Report, warnings and the error message
 * are readable through kitwpa_last_report / kitwpa_last_warnings /
 * kitwpa_last_error until the next run on this thread. */
KITWPA_API kitwpa_status kitwpa_run(const kitwpa_run_options* options, int* exit_code);
KITWPA_API const char* kitwpa_last_report(void);
KITWPA_API const char* kitwpa_last_warnings(void);

#ifdef __cplusplus
}
#endif

#endif
