#include "kitwpa/gain.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kitwpa/errors.hpp"
#include "kitwpa/parallel.hpp"

namespace kitwpa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const complex kI{0.0, 1.0};

struct Amplitudes {
    complex p, s, i;

    Amplitudes operator+(const Amplitudes& o) const { return {p + o.p, s + o.s, i + o.i}; }
    Amplitudes operator*(double h) const { return {p * h, s * h, i * h}; }
};

Amplitudes rhs(const CoupledModeProblem& pr, double x, const Amplitudes& y) {
    const complex phase = std::polar(1.0, pr.delta_beta * x);
    Amplitudes d;
    d.s = kI * pr.kappa * y.p * std::conj(y.i) * phase;
    d.i = kI * pr.kappa * y.p * std::conj(y.s) * phase;
    d.p = pr.undepleted ? complex{0.0, 0.0} : kI * pr.kappa * y.s * y.i * std::conj(phase);
    return d;
}

double signal_idler_norm(const Amplitudes& y) {
    return std::sqrt(std::norm(y.s) + std::norm(y.i));
}

}  // namespace

CMEState integrate(const CoupledModeProblem& problem, const CMEObserver& observer) {
    require(problem.length_m >= 0.0 && std::isfinite(problem.length_m),
            ErrorKind::InvalidParameter, "integration length must be non-negative");
    require(problem.steps > 0, ErrorKind::InvalidParameter, "need at least one integration step");
    require(std::isfinite(problem.kappa) && std::isfinite(problem.delta_beta),
            ErrorKind::InvalidParameter, "coupling and phase mismatch must be finite");

    const double h = problem.length_m / problem.steps;
    const double x0 = problem.initial.position_m;
    Amplitudes y{problem.initial.pump, problem.initial.signal, problem.initial.idler};

    CMEState state = problem.initial;
    if (observer) observer(state);
    for (int n = 0; n < problem.steps; ++n) {
        const double x = x0 + n * h;
        const Amplitudes k1 = rhs(problem, x, y);
        const Amplitudes k2 = rhs(problem, x + 0.5 * h, y + k1 * (0.5 * h));
        const Amplitudes k3 = rhs(problem, x + 0.5 * h, y + k2 * (0.5 * h));
        const Amplitudes k4 = rhs(problem, x + h, y + k3 * h);
        const Amplitudes next = y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);

        const double before = signal_idler_norm(y);
        const double after = signal_idler_norm(next);
        if (before > 0.0 && after > 1.1 * before) {
            std::ostringstream os;
            os << "signal/idler amplitude grew by " << (after / before - 1.0) * 100.0
               << "% in one step at x=" << x << " m; increase the number of integration steps";
            fail(ErrorKind::StepSize, os.str());
        }
        y = next;
        state = {x0 + (n + 1) * h, y.p, y.s, y.i};
        if (observer) observer(state);
    }
    return state;
}

CouplingCoefficients coupling_coefficients(const Dispersion& dispersion,
                                           const FilmProperties& film, const PumpConfig& pump,
                                           double signal_hz) {
    require(pump.frequency_hz > 0.0, ErrorKind::InvalidParameter, "pump frequency must be positive");
    require(signal_hz > 0.0 && signal_hz < pump.frequency_hz, ErrorKind::InvalidParameter,
            "signal frequency must lie in (0, f_p)");
    CouplingCoefficients c;
    c.epsilon = epsilon_3wm(pump.idc_ma, film.istar_ma);
    c.beta_pump = dispersion.beta(pump.frequency_hz);
    c.beta_signal = dispersion.beta(signal_hz);
    c.beta_idler = dispersion.beta(pump.frequency_hz - signal_hz);
    c.g_signal = c.epsilon * c.beta_signal / 8.0;
    c.g_idler = c.epsilon * c.beta_idler / 8.0;
    c.g_pump = c.epsilon * c.beta_pump / 8.0;
    c.kappa = c.epsilon / 8.0 * std::sqrt(c.beta_signal * c.beta_idler);
    c.delta_beta = c.beta_pump - c.beta_signal - c.beta_idler;
    return c;
}

CMEState integrate_cmes(const Dispersion& dispersion, const FilmProperties& film,
                        const PumpConfig& pump, double signal_hz, double length_m,
                        const CMEOptions& options, const CMEObserver& observer) {
    require(length_m > 0.0, ErrorKind::InvalidParameter, "line length must be positive");
    require(pump.current_ma >= 0.0, ErrorKind::InvalidParameter, "pump current must be >= 0");
    require(options.steps_per_supercell > 0, ErrorKind::InvalidParameter,
            "steps per supercell must be positive");

    const CouplingCoefficients c = coupling_coefficients(dispersion, film, pump, signal_hz);

    CoupledModeProblem problem;
    problem.kappa = c.kappa;
    problem.delta_beta = c.delta_beta;
    problem.length_m = length_m;
    const double supercells = std::ceil(length_m / dispersion.period_m() - 1e-9);
    problem.steps = static_cast<int>(supercells) * options.steps_per_supercell;
    problem.undepleted = options.undepleted;
    problem.initial.pump = complex(pump.current_ma, 0.0);
    problem.initial.signal =
        complex(options.signal_current_ma * std::sqrt(c.beta_pump / c.beta_signal), 0.0);
    problem.initial.idler = complex(0.0, 0.0);
    return integrate(problem, observer);
}

double undepleted_gain(double kappa_times_pump, double delta_beta, double length_m) {
    const double k = kappa_times_pump;
    const double g2 = k * k - 0.25 * delta_beta * delta_beta;
    if (g2 > 0.0) {
        const double g = std::sqrt(g2);
        const double s = std::sinh(g * length_m);
        return 1.0 + (k * k / g2) * s * s;
    }
    if (g2 < 0.0) {
        const double q = std::sqrt(-g2);
        const double s = std::sin(q * length_m);
        return 1.0 + (k * k / -g2) * s * s;
    }
    return 1.0 + k * k * length_m * length_m;
}

GainProfile gain_profile(const Dispersion& dispersion, const FilmProperties& film,
                         const PumpConfig& pump, std::span<const double> frequency_grid_hz,
                         double length_m, const CMEOptions& options) {
    if (auto band = dispersion.stopband_at(pump.frequency_hz)) {
        std::ostringstream os;
        os.precision(9);
        os << "pump frequency " << pump.frequency_hz << " Hz lies inside the stop band ["
           << band->f_low_hz << ", " << band->f_high_hz << "] Hz";
        fail(ErrorKind::Domain, os.str());
    }

    GainProfile profile;
    profile.pump = pump;
    profile.frequency_hz.assign(frequency_grid_hz.begin(), frequency_grid_hz.end());
    if (auto w = bias_warning(film, {pump.idc_ma, pump.current_ma})) profile.warnings.push_back(*w);

    struct Point {
        double gain_db = kNaN;
        complex transmission{kNaN, kNaN};
        bool out_of_grid = false;
    };
    auto points = parallel_map<Point>(frequency_grid_hz.size(), [&](std::size_t k) {
        Point pt;
        const double fs = frequency_grid_hz[k];
        const double fi = pump.frequency_hz - fs;
        if (!(fs > 0.0) || !(fi > 0.0)) return pt;
        if (fs < dispersion.min_frequency_hz() || fi < dispersion.min_frequency_hz() ||
            fs > dispersion.max_frequency_hz() || fi > dispersion.max_frequency_hz()) {
            pt.out_of_grid = true;
            return pt;
        }
        if (dispersion.stopband_at(fs) || dispersion.stopband_at(fi)) return pt;
        const CMEState end = integrate_cmes(dispersion, film, pump, fs, length_m, options);
        const double beta_ratio =
            std::sqrt(dispersion.beta(pump.frequency_hz) / dispersion.beta(fs));
        const complex s0(options.signal_current_ma * beta_ratio, 0.0);
        pt.transmission = end.signal / s0;
        pt.gain_db = 10.0 * std::log10(std::norm(end.signal) / std::norm(s0));
        return pt;
    });

    bool any_out_of_grid = false;
    profile.gain_db.reserve(points.size());
    profile.transmission.reserve(points.size());
    for (const auto& p : points) {
        profile.gain_db.push_back(p.gain_db);
        profile.transmission.push_back(p.transmission);
        any_out_of_grid = any_out_of_grid || p.out_of_grid;
    }
    if (any_out_of_grid)
        profile.warnings.emplace_back(
            "some signal or idler frequencies fall outside the dispersion grid; emitted as gaps");
    return profile;
}

GainProfile pump_on_off_gain(std::span<const double> frequency_hz,
                             std::span<const complex> s21_on, std::span<const complex> s21_off) {
    require(s21_on.size() == frequency_hz.size() && s21_off.size() == frequency_hz.size(),
            ErrorKind::Data, "pump-on and pump-off traces must share the frequency grid");
    GainProfile profile;
    profile.frequency_hz.assign(frequency_hz.begin(), frequency_hz.end());
    for (std::size_t k = 0; k < frequency_hz.size(); ++k) {
        const double off = std::abs(s21_off[k]);
        if (!(off > 0.0)) {
            std::ostringstream os;
            os.precision(9);
            os << "pump-off |S21| is zero at " << frequency_hz[k] << " Hz";
            fail(ErrorKind::Data, os.str());
        }
        profile.transmission.push_back(s21_on[k] / s21_off[k]);
        profile.gain_db.push_back(20.0 * std::log10(std::abs(s21_on[k]) / off));
    }
    return profile;
}

RippleEstimate ripple_estimate(double gain_db, complex gamma_in, complex gamma_out) {
    require(std::isfinite(gain_db), ErrorKind::InvalidParameter, "gain must be finite");
    require(std::abs(gamma_in) < 1.0 && std::abs(gamma_out) < 1.0, ErrorKind::InvalidParameter,
            "reflection coefficients must satisfy |Gamma| < 1");
    RippleEstimate out;
    out.round_trip = std::abs(gamma_in * gamma_out) * std::pow(10.0, gain_db / 20.0);
    if (out.round_trip >= 1.0) {
        out.regenerative = true;
        out.ripple_db = std::numeric_limits<double>::infinity();
        std::ostringstream os;
        os << "round-trip amplitude " << out.round_trip
           << " >= 1: regenerative, the amplifier would oscillate";
        out.warning = os.str();
        return out;
    }
    out.ripple_db = 20.0 * std::log10((1.0 + out.round_trip) / (1.0 - out.round_trip));
    return out;
}

double pump_power_dbm(double current_ma, double z0_ohm) {
    require(z0_ohm > 0.0, ErrorKind::InvalidParameter, "impedance must be positive");
    const double amps = current_ma * 1e-3;
    const double watts = 0.5 * amps * amps * z0_ohm;
    return 10.0 * std::log10(watts / 1e-3);
}

double pump_current_from_dbm(double power_dbm, double z0_ohm) {
    require(z0_ohm > 0.0, ErrorKind::InvalidParameter, "impedance must be positive");
    const double watts = 1e-3 * std::pow(10.0, power_dbm / 10.0);
    return std::sqrt(2.0 * watts / z0_ohm) * 1e3;
}

double tune_pump_current(const Dispersion& dispersion, const FilmProperties& film,
                         const PumpConfig& pump, double signal_hz, double target_gain_db,
                         double length_m, const CMEOptions& options, double max_current_ma) {
    auto gain_at = [&](double current) {
        PumpConfig p = pump;
        p.current_ma = current;
        const CMEState end = integrate_cmes(dispersion, film, p, signal_hz, length_m, options);
        const double s0 =
            options.signal_current_ma *
            std::sqrt(dispersion.beta(pump.frequency_hz) / dispersion.beta(signal_hz));
        return 10.0 * std::log10(std::norm(end.signal) / (s0 * s0));
    };
    double lo = 0.0;
    double hi = 1e-3;
    while (gain_at(hi) < target_gain_db) {
        lo = hi;
        hi *= 2.0;
        if (hi > max_current_ma) {
            std::ostringstream os;
            os << "no pump current up to " << max_current_ma << " mA reaches " << target_gain_db
               << " dB at " << signal_hz << " Hz";
            fail(ErrorKind::OutOfRange, os.str());
        }
    }
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (gain_at(mid) < target_gain_db)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

double phase_matched_pump(const Dispersion& dispersion, double lo_hz, double hi_hz,
                          double step_hz) {
    double best_f = kNaN;
    double best = std::numeric_limits<double>::infinity();
    for (double fp : make_frequency_grid(lo_hz, hi_hz, step_hz)) {
        const double half = 0.5 * fp;
        if (fp > dispersion.max_frequency_hz() || half < dispersion.min_frequency_hz()) continue;
        if (dispersion.stopband_at(fp) || dispersion.stopband_at(half)) continue;
        const double mismatch = std::abs(phase_mismatch(dispersion, half, fp));
        if (mismatch < best) {
            best = mismatch;
            best_f = fp;
        }
    }
    require(std::isfinite(best_f), ErrorKind::OutOfRange,
            "no pump frequency in range has signal, idler and pump in pass bands");
    return best_f;
}

}  // namespace kitwpa
