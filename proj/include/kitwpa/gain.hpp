#pragma once

// Three-wave-mixing parametric gain along the line.
//
// Amplitudes are carried in photon-flux normalization referenced to the pump:
// a_j = A_j sqrt(beta_p / beta_j), with A_j the rf current amplitude in mA. In
// these variables the three coupled-mode equations
//
//   da_s/dx = i kappa a_p conj(a_i) exp(+i dbeta x)
//   da_i/dx = i kappa a_p conj(a_s) exp(+i dbeta x)
//   da_p/dx = i kappa a_s a_i       exp(-i dbeta x)
//
// share one coupling kappa = (eps / 8) sqrt(beta_s beta_i), so
// |a_s|^2 - |a_i|^2 and |a_p|^2 + |a_s|^2 are exact invariants. In current
// units the per-tone couplings are g_j = eps beta_j / 8.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kitwpa/kinetics.hpp"
#include "kitwpa/line.hpp"

namespace kitwpa {

struct PumpConfig {
    double frequency_hz = 0.0;
    double current_ma = 0.0;  // rf pump amplitude at the line input
    double idc_ma = 0.0;      // dc bias
};

struct CMEState {
    double position_m = 0.0;
    complex pump{0.0, 0.0};
    complex signal{0.0, 0.0};
    complex idler{0.0, 0.0};
};

// Manley-Rowe invariants of a state.
inline double signal_idler_difference(const CMEState& s) {
    return std::norm(s.signal) - std::norm(s.idler);
}
inline double pump_signal_sum(const CMEState& s) {
    return std::norm(s.pump) + std::norm(s.signal);
}

// Pure ODE problem in flux-normalized variables.
struct CoupledModeProblem {
    double kappa = 0.0;            // 1/(mA m)
    double delta_beta = 0.0;       // rad/m
    double length_m = 0.0;
    int steps = 1200;
    bool undepleted = false;       // freeze a_p
    CMEState initial;
};

using CMEObserver = std::function<void(const CMEState&)>;

// Fixed-step classical RK4. Throws StepSize when sqrt(|a_s|^2 + |a_i|^2)
// grows by more than 10% in one step.
CMEState integrate(const CoupledModeProblem& problem, const CMEObserver& observer = {});

struct CouplingCoefficients {
    double epsilon = 0.0;     // 1/mA
    double beta_signal = 0.0;  // rad/m
    double beta_idler = 0.0;
    double beta_pump = 0.0;
    double g_signal = 0.0;    // eps beta_s / 8, 1/(mA m)
    double g_idler = 0.0;
    double g_pump = 0.0;
    double kappa = 0.0;       // flux-normalized common coupling
    double delta_beta = 0.0;  // beta_p - beta_s - beta_i
};

// Throws Domain when any of the three tones sits in a stop band.
CouplingCoefficients coupling_coefficients(const Dispersion& dispersion,
                                           const FilmProperties& film, const PumpConfig& pump,
                                           double signal_hz);

struct CMEOptions {
    int steps_per_supercell = 1;
    bool undepleted = false;
    double signal_current_ma = 1e-6;  // input signal amplitude
};

// Integrates the three-wave-mixing equations for one signal frequency over
// `length_m` (use SupercellSpec::total_length_m()). Steps = steps_per_supercell
// times the number of supercells in `length_m`.
CMEState integrate_cmes(const Dispersion& dispersion, const FilmProperties& film,
                        const PumpConfig& pump, double signal_hz, double length_m,
                        const CMEOptions& options = {}, const CMEObserver& observer = {});

// Undepleted-pump power gain 1 + (K/g)^2 sinh^2(g L), g = sqrt(K^2 - (dbeta/2)^2),
// K = kappa |a_p|, for an idler-free input. Reduces to cosh^2(K L) when dbeta = 0.
double undepleted_gain(double kappa_times_pump, double delta_beta, double length_m);

struct GainProfile {
    std::vector<double> frequency_hz;
    std::vector<double> gain_db;       // NaN where the signal or idler sits in a stop band
    std::vector<complex> transmission;  // a_s(L) / a_s(0); NaN alongside gain gaps
    PumpConfig pump;
    std::string line_id;
    std::vector<std::string> warnings;
};

// Order-independent parallel map over the grid.
GainProfile gain_profile(const Dispersion& dispersion, const FilmProperties& film,
                         const PumpConfig& pump, std::span<const double> frequency_grid_hz,
                         double length_m, const CMEOptions& options = {});

// 20 log10(|s21_on| / |s21_off|) per point. Throws Data on a zero |s21_off|.
GainProfile pump_on_off_gain(std::span<const double> frequency_hz,
                             std::span<const complex> s21_on, std::span<const complex> s21_off);

struct RippleEstimate {
    double round_trip = 0.0;  // |Gamma_in Gamma_out| sqrt(G)
    double ripple_db = 0.0;   // peak to peak; +inf when regenerative
    bool regenerative = false;
    std::optional<std::string> warning;
};

// Backward wave unamplified: r = |Gamma_in Gamma_out| sqrt(G),
// ripple = 20 log10((1 + r) / (1 - r)).
RippleEstimate ripple_estimate(double gain_db, complex gamma_in, complex gamma_out);

// P = Ip^2 Z0 / 2, in dBm.
double pump_power_dbm(double current_ma, double z0_ohm);
double pump_current_from_dbm(double power_dbm, double z0_ohm);

// Smallest pump current (found by doubling, then bisection to 1e-6 mA) whose
// gain at `signal_hz` reaches `target_gain_db`. Throws OutOfRange when no
// current up to `max_current_ma` does.
double tune_pump_current(const Dispersion& dispersion, const FilmProperties& film,
                         const PumpConfig& pump, double signal_hz, double target_gain_db,
                         double length_m, const CMEOptions& options = {},
                         double max_current_ma = 10.0);

// Pump frequency in [lo, hi] (scanned on `step_hz`) minimising |dbeta| at the
// degenerate point f_p / 2, skipping pumps in a stop band.
double phase_matched_pump(const Dispersion& dispersion, double lo_hz, double hi_hz,
                          double step_hz);

}  // namespace kitwpa
