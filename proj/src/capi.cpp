#include "kitwpa/kitwpa.h"

#include <cmath>
#include <new>
#include <string>
#include <vector>

#include "kitwpa/commands.hpp"
#include "kitwpa/errors.hpp"
#include "kitwpa/gain.hpp"
#include "kitwpa/kinetics.hpp"
#include "kitwpa/line.hpp"
#include "kitwpa/noise.hpp"
#include "kitwpa/tdr.hpp"

struct kitwpa_dispersion {
    kitwpa::Dispersion value;
};
struct kitwpa_gain_profile {
    kitwpa::GainProfile value;
};
struct kitwpa_noise_chain {
    kitwpa::NoiseChain value;
};
struct kitwpa_tdr_profile {
    kitwpa::ImpedanceProfile value;
};
struct kitwpa_tdr_trace {
    kitwpa::TDRTrace value;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_report;
thread_local std::string g_warnings;

kitwpa_status status_of(kitwpa::ErrorKind kind) {
    using kitwpa::ErrorKind;
    switch (kind) {
        case ErrorKind::InvalidParameter: return KITWPA_ERR_INVALID_ARGUMENT;
        case ErrorKind::OutOfRange: return KITWPA_ERR_OUT_OF_RANGE;
        case ErrorKind::Domain: return KITWPA_ERR_DOMAIN;
        case ErrorKind::StepSize: return KITWPA_ERR_STEP_SIZE;
        case ErrorKind::Data: return KITWPA_ERR_DATA;
        case ErrorKind::Config: return KITWPA_ERR_CONFIG;
        case ErrorKind::Io: return KITWPA_ERR_IO;
    }
    return KITWPA_ERR_INTERNAL;
}

template <class Fn>
kitwpa_status guarded(Fn&& fn) {
    try {
        fn();
        g_error.clear();
        return KITWPA_OK;
    } catch (const kitwpa::Error& e) {
        g_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
    } catch (const std::exception& e) {
        g_error = e.what();
    } catch (...) {
        g_error = "unknown error";
    }
    return KITWPA_ERR_INTERNAL;
}

void need(const void* p, const char* name) {
    if (!p) kitwpa::fail(kitwpa::ErrorKind::InvalidParameter, std::string(name) + " is NULL");
}

kitwpa::FilmProperties film_of(const kitwpa_film* f) {
    need(f, "film");
    return {f->sheet_inductance_ph, f->istar_ma, f->ic_ma, f->thickness_nm, f->linewidth_um};
}

kitwpa::CellGeometry cell_of(const kitwpa_cell* c) {
    need(c, "cell");
    kitwpa::CellGeometry g;
    g.line_width_um = c->line_width_um;
    g.finger_spacing_um = c->finger_spacing_um;
    g.dielectric_thickness_nm = c->dielectric_thickness_nm;
    g.permittivity = c->permittivity;
    g.finger_length_um = c->finger_length_um;
    g.fingers_per_cell = c->fingers_per_cell;
    return g;
}

kitwpa_cell cell_to_c(const kitwpa::CellGeometry& g) {
    return {g.line_width_um, g.finger_spacing_um, g.dielectric_thickness_nm, g.permittivity,
            g.finger_length_um, g.fingers_per_cell};
}

kitwpa::SupercellSpec spec_of(const kitwpa_line_spec* s) {
    need(s, "line spec");
    kitwpa::SupercellSpec spec;
    spec.unloaded = cell_of(&s->unloaded);
    spec.loaded = cell_of(&s->loaded);
    spec.n_unloaded = s->n_unloaded;
    spec.n_loaded = s->n_loaded;
    spec.n_supercells = s->n_supercells;
    return spec;
}

kitwpa::LineOptions options_of(const kitwpa_line_spec* s) {
    kitwpa::LineOptions o;
    o.stub_model = s->lumped_stubs ? kitwpa::StubModel::Lumped : kitwpa::StubModel::Distributed;
    o.fringing_factor = s->fringing_factor;
    return o;
}

void check_index(size_t index, size_t size) {
    if (index >= size)
        kitwpa::fail(kitwpa::ErrorKind::OutOfRange,
                     "index " + std::to_string(index) + " out of range (size " + std::to_string(size) + ")");
}

}  // namespace

extern "C" {

const char* kitwpa_version(void) { return KITWPA_VERSION_STRING; }
const char* kitwpa_last_error(void) { return g_error.c_str(); }

const char* kitwpa_status_name(kitwpa_status status) {
    switch (status) {
        case KITWPA_OK: return "ok";
        case KITWPA_ERR_INVALID_ARGUMENT: return "invalid argument";
        case KITWPA_ERR_CONFIG: return "config";
        case KITWPA_ERR_DOMAIN: return "domain";
        case KITWPA_ERR_IO: return "io";
        case KITWPA_ERR_OUT_OF_RANGE: return "out of range";
        case KITWPA_ERR_STEP_SIZE: return "step size";
        case KITWPA_ERR_DATA: return "data";
        case KITWPA_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

kitwpa_status kitwpa_total_inductance(const kitwpa_film* film, double idc_ma, double irf_ma,
                                      double* out_ph) {
    return guarded([&] {
        need(out_ph, "out_ph");
        const auto f = film_of(film);
        f.validate();
        *out_ph = kitwpa::total_inductance(f, {idc_ma, irf_ma});
    });
}

kitwpa_status kitwpa_mixing_coefficients(double idc_ma, double istar_ma, double* out_epsilon,
                                         double* out_xi) {
    return guarded([&] {
        need(out_epsilon, "out_epsilon");
        need(out_xi, "out_xi");
        *out_epsilon = kitwpa::epsilon_3wm(idc_ma, istar_ma);
        *out_xi = kitwpa::xi_4wm(idc_ma, istar_ma);
    });
}

kitwpa_status kitwpa_scale_film(const kitwpa_film* reference, double thickness_nm,
                                double linewidth_um, kitwpa_film* out) {
    return guarded([&] {
        need(out, "out");
        const auto s = kitwpa::scale_with_geometry(film_of(reference), thickness_nm, linewidth_um);
        *out = {s.sheet_inductance_ph, s.istar_ma, s.ic_ma, s.thickness_nm, s.linewidth_um};
    });
}

void kitwpa_line_spec_default(kitwpa_line_spec* spec) {
    if (!spec) return;
    const kitwpa::SupercellSpec s;
    spec->unloaded = cell_to_c(s.unloaded);
    spec->loaded = cell_to_c(s.loaded);
    spec->n_unloaded = s.n_unloaded;
    spec->n_loaded = s.n_loaded;
    spec->n_supercells = s.n_supercells;
    spec->lumped_stubs = 0;
    spec->fringing_factor = 1.0;
}

kitwpa_status kitwpa_cell_impedance(const kitwpa_cell* cell, const kitwpa_film* film,
                                    double idc_ma, double fringing_factor, double* out_ohm) {
    return guarded([&] {
        need(out_ohm, "out_ohm");
        const auto f = film_of(film);
        f.validate();
        *out_ohm = kitwpa::characteristic_impedance(
            kitwpa::cell_section(cell_of(cell), f, {idc_ma, 0.0}, fringing_factor));
    });
}

kitwpa_status kitwpa_solve_finger_length(const kitwpa_cell* cell, const kitwpa_film* film,
                                         double idc_ma, double target_ohm, double fringing_factor,
                                         double* out_um) {
    return guarded([&] {
        need(out_um, "out_um");
        *out_um = kitwpa::solve_finger_length(cell_of(cell), film_of(film), {idc_ma, 0.0},
                                              target_ohm, fringing_factor);
    });
}

kitwpa_status kitwpa_line_length(const kitwpa_line_spec* spec, double* out_m) {
    return guarded([&] {
        need(out_m, "out_m");
        const auto s = spec_of(spec);
        s.validate();
        *out_m = s.total_length_m();
    });
}

kitwpa_status kitwpa_dispersion_compute(const kitwpa_line_spec* spec, const kitwpa_film* film,
                                        double idc_ma, const double* grid_hz, size_t n,
                                        kitwpa_dispersion** out) {
    return guarded([&] {
        need(out, "out");
        need(grid_hz, "grid_hz");
        *out = nullptr;
        auto d = kitwpa::Dispersion::compute(spec_of(spec), film_of(film), {idc_ma, 0.0},
                                             std::span<const double>(grid_hz, n), options_of(spec));
        *out = new kitwpa_dispersion{std::move(d)};
    });
}

void kitwpa_dispersion_destroy(kitwpa_dispersion* d) { delete d; }

size_t kitwpa_dispersion_size(const kitwpa_dispersion* d) { return d ? d->value.points().size() : 0; }

kitwpa_status kitwpa_dispersion_point(const kitwpa_dispersion* d, size_t index,
                                      double* frequency_hz, double* bloch_phase_rad,
                                      double* half_trace, int* propagating) {
    return guarded([&] {
        need(d, "dispersion");
        check_index(index, d->value.points().size());
        const auto& p = d->value.points()[index];
        if (frequency_hz) *frequency_hz = p.frequency_hz;
        if (bloch_phase_rad) *bloch_phase_rad = p.bloch_phase_rad;
        if (half_trace) *half_trace = p.half_trace;
        if (propagating) *propagating = p.propagating ? 1 : 0;
    });
}

size_t kitwpa_dispersion_stopband_count(const kitwpa_dispersion* d) {
    return d ? d->value.stopbands().size() : 0;
}

kitwpa_status kitwpa_dispersion_stopband(const kitwpa_dispersion* d, size_t index,
                                         double* f_low_hz, double* f_high_hz) {
    return guarded([&] {
        need(d, "dispersion");
        check_index(index, d->value.stopbands().size());
        const auto& b = d->value.stopbands()[index];
        if (f_low_hz) *f_low_hz = b.f_low_hz;
        if (f_high_hz) *f_high_hz = b.f_high_hz;
    });
}

kitwpa_status kitwpa_dispersion_beta(const kitwpa_dispersion* d, double frequency_hz,
                                     double* out_rad_per_m) {
    return guarded([&] {
        need(d, "dispersion");
        need(out_rad_per_m, "out_rad_per_m");
        *out_rad_per_m = d->value.beta(frequency_hz);
    });
}

kitwpa_status kitwpa_gain_profile_compute(const kitwpa_dispersion* d, const kitwpa_film* film,
                                          const kitwpa_pump* pump, const double* grid_hz, size_t n,
                                          double length_m, int steps_per_supercell,
                                          kitwpa_gain_profile** out) {
    return guarded([&] {
        need(d, "dispersion");
        need(pump, "pump");
        need(grid_hz, "grid_hz");
        need(out, "out");
        *out = nullptr;
        kitwpa::CMEOptions opts;
        opts.steps_per_supercell = steps_per_supercell;
        auto g = kitwpa::gain_profile(d->value, film_of(film),
                                      {pump->frequency_hz, pump->current_ma, pump->idc_ma},
                                      std::span<const double>(grid_hz, n), length_m, opts);
        *out = new kitwpa_gain_profile{std::move(g)};
    });
}

void kitwpa_gain_profile_destroy(kitwpa_gain_profile* g) { delete g; }

size_t kitwpa_gain_profile_size(const kitwpa_gain_profile* g) {
    return g ? g->value.frequency_hz.size() : 0;
}

kitwpa_status kitwpa_gain_profile_point(const kitwpa_gain_profile* g, size_t index,
                                        double* frequency_hz, double* gain_db) {
    return guarded([&] {
        need(g, "gain profile");
        check_index(index, g->value.frequency_hz.size());
        if (frequency_hz) *frequency_hz = g->value.frequency_hz[index];
        if (gain_db) *gain_db = g->value.gain_db[index];
    });
}

kitwpa_status kitwpa_ripple_estimate(double gain_db, double gamma_in, double gamma_out,
                                     double* out_ripple_db) {
    return guarded([&] {
        need(out_ripple_db, "out_ripple_db");
        *out_ripple_db = kitwpa::ripple_estimate(gain_db, gamma_in, gamma_out).ripple_db;
    });
}

kitwpa_status kitwpa_pump_power_dbm(double current_ma, double z0_ohm, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = kitwpa::pump_power_dbm(current_ma, z0_ohm);
    });
}

kitwpa_status kitwpa_occupancy(double frequency_hz, double temperature_k, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = kitwpa::occupancy(frequency_hz, temperature_k);
    });
}

kitwpa_status kitwpa_band_averaged_occupancy(double lo_hz, double hi_hz, double temperature_k,
                                             double* out) {
    return guarded([&] {
        need(out, "out");
        *out = kitwpa::band_averaged_occupancy(lo_hz, hi_hz, temperature_k);
    });
}

kitwpa_status kitwpa_temperature_from_quanta(double quanta, double frequency_hz, double* out_k) {
    return guarded([&] {
        need(out_k, "out_k");
        *out_k = kitwpa::temperature_from_quanta(quanta, frequency_hz);
    });
}

kitwpa_status kitwpa_noise_chain_create(double source_temperature_k, kitwpa_noise_chain** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        if (!(source_temperature_k > 0.0))
            kitwpa::fail(kitwpa::ErrorKind::InvalidParameter, "source temperature must be positive");
        auto* c = new kitwpa_noise_chain{};
        c->value.source_temperature_k = source_temperature_k;
        *out = c;
    });
}

void kitwpa_noise_chain_destroy(kitwpa_noise_chain* chain) { delete chain; }

kitwpa_status kitwpa_noise_chain_add_stage(kitwpa_noise_chain* chain, double temperature_k,
                                           double attenuation_db, double extra_loss_db) {
    return guarded([&] {
        need(chain, "chain");
        kitwpa::ThermalStage s{temperature_k, attenuation_db, extra_loss_db,
                               "stage" + std::to_string(chain->value.stages.size() + 1)};
        kitwpa::NoiseChain probe{chain->value.source_temperature_k, {s}};
        probe.validate();
        chain->value.stages.push_back(std::move(s));
    });
}

kitwpa_status kitwpa_noise_chain_input(const kitwpa_noise_chain* chain, double frequency_hz,
                                       double* out_quanta) {
    return guarded([&] {
        need(chain, "chain");
        need(out_quanta, "out_quanta");
        *out_quanta = kitwpa::chain_input_noise(chain->value, frequency_hz);
    });
}

kitwpa_status kitwpa_yfactor_fit(const double* signal_quanta, const double* idler_quanta,
                                 const double* output_power, size_t n, double* out_chain_gain,
                                 double* out_added_noise) {
    return guarded([&] {
        need(signal_quanta, "signal_quanta");
        need(idler_quanta, "idler_quanta");
        need(output_power, "output_power");
        need(out_chain_gain, "out_chain_gain");
        need(out_added_noise, "out_added_noise");
        std::vector<kitwpa::SwitchPositionData> pts;
        for (size_t k = 0; k < n; ++k) pts.push_back({signal_quanta[k], idler_quanta[k], output_power[k]});
        const auto fit = kitwpa::yfactor_fit(pts);
        *out_chain_gain = fit.chain_gain;
        *out_added_noise = fit.added_noise_quanta;
    });
}

kitwpa_status kitwpa_step_reflection(double z_ohm, double z_ref_ohm, double* out) {
    return guarded([&] {
        need(out, "out");
        *out = kitwpa::step_reflection(z_ohm, z_ref_ohm);
    });
}

kitwpa_status kitwpa_tdr_profile_create(double reference_ohm, kitwpa_tdr_profile** out) {
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        if (!(reference_ohm > 0.0))
            kitwpa::fail(kitwpa::ErrorKind::InvalidParameter, "reference impedance must be positive");
        auto* p = new kitwpa_tdr_profile{};
        p->value.reference_ohm = reference_ohm;
        *out = p;
    });
}

void kitwpa_tdr_profile_destroy(kitwpa_tdr_profile* p) { delete p; }

kitwpa_status kitwpa_tdr_profile_add_segment(kitwpa_tdr_profile* p, double z0_ohm, double delay_s) {
    return guarded([&] {
        need(p, "profile");
        kitwpa::ImpedanceProfile probe{{{z0_ohm, delay_s}}, p->value.reference_ohm};
        probe.validate();
        p->value.segments.push_back({z0_ohm, delay_s});
    });
}

size_t kitwpa_tdr_profile_size(const kitwpa_tdr_profile* p) { return p ? p->value.segments.size() : 0; }

kitwpa_status kitwpa_tdr_profile_segment(const kitwpa_tdr_profile* p, size_t index, double* z0_ohm,
                                         double* delay_s) {
    return guarded([&] {
        need(p, "profile");
        check_index(index, p->value.segments.size());
        if (z0_ohm) *z0_ohm = p->value.segments[index].z0_ohm;
        if (delay_s) *delay_s = p->value.segments[index].delay_s;
    });
}

kitwpa_status kitwpa_tdr_trace_create(const double* time_s, const double* rho, size_t n,
                                      kitwpa_tdr_trace** out) {
    return guarded([&] {
        need(time_s, "time_s");
        need(rho, "rho");
        need(out, "out");
        auto* t = new kitwpa_tdr_trace{};
        t->value.time_s.assign(time_s, time_s + n);
        t->value.rho.assign(rho, rho + n);
        *out = t;
    });
}

void kitwpa_tdr_trace_destroy(kitwpa_tdr_trace* t) { delete t; }

size_t kitwpa_tdr_trace_size(const kitwpa_tdr_trace* t) { return t ? t->value.rho.size() : 0; }

kitwpa_status kitwpa_tdr_trace_sample(const kitwpa_tdr_trace* t, size_t index, double* time_s,
                                      double* rho) {
    return guarded([&] {
        need(t, "trace");
        check_index(index, t->value.rho.size());
        if (time_s) *time_s = t->value.time_s[index];
        if (rho) *rho = t->value.rho[index];
    });
}

kitwpa_status kitwpa_tdr_synthesize(const kitwpa_tdr_profile* p, double dt_s, double t_max_s,
                                    kitwpa_tdr_trace** out) {
    return guarded([&] {
        need(p, "profile");
        need(out, "out");
        *out = nullptr;
        auto trace = kitwpa::synthesize_trace(p->value, dt_s, t_max_s);
        *out = new kitwpa_tdr_trace{std::move(trace)};
    });
}

kitwpa_status kitwpa_tdr_extract(const kitwpa_tdr_trace* t, double reference_ohm, double threshold,
                                 int sustain_samples, kitwpa_tdr_profile** out) {
    return guarded([&] {
        need(t, "trace");
        need(out, "out");
        *out = nullptr;
        auto profile = kitwpa::extract_impedance(t->value, reference_ohm, {threshold, sustain_samples});
        *out = new kitwpa_tdr_profile{std::move(profile)};
    });
}

kitwpa_status kitwpa_run(const kitwpa_run_options* options, int* exit_code) {
    g_report.clear();
    g_warnings.clear();
    std::string run_error;
    const kitwpa_status st = guarded([&] {
        need(options, "options");
        need(exit_code, "exit_code");
        need(options->command, "command");
        need(options->config_path, "config_path");
        kitwpa::CommandOptions o;
        o.command = options->command;
        o.config_path = options->config_path;
        if (options->out_dir) o.out_dir = options->out_dir;
        if (options->grid) o.grid = options->grid;
        if (options->has_seed) o.seed = options->seed;
        if (options->scan_csv) o.scan_csv = options->scan_csv;
        if (options->trace_csv) o.trace_csv = options->trace_csv;
        if (options->profile_csv) o.profile_csv = options->profile_csv;
        const auto r = kitwpa::run_command(o);
        for (const auto& line : r.report) g_report += line + "\n";
        for (const auto& line : r.warnings) g_warnings += line + "\n";
        *exit_code = r.exit_code;
        run_error = r.error;
    });
    if (st == KITWPA_OK) g_error = run_error;
    return st;
}

const char* kitwpa_last_report(void) { return g_report.c_str(); }
const char* kitwpa_last_warnings(void) { return g_warnings.c_str(); }

}  // extern "C"
