#include "kitwpa/line.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kitwpa/constants.hpp"
#include "kitwpa/errors.hpp"
#include "kitwpa/parallel.hpp"

namespace kitwpa {

namespace {

constexpr double kUm = 1e-6;
constexpr double kNm = 1e-9;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be positive and finite (got " << value << ")";
        fail(ErrorKind::InvalidParameter, os.str());
    }
}

// Parallel-plate capacitance per unit length per unit permittivity, F/m.
double plate_capacitance(const CellGeometry& cell, double width_um, double fringing_factor) {
    return cell.permittivity * constants::vacuum_permittivity * width_um * kUm /
           (cell.dielectric_thickness_nm * kNm) * fringing_factor;
}

// Effective plate width seen per unit length of line: center strip plus the
// fingers spread over one pitch.
double effective_width_um(const CellGeometry& cell) {
    return cell.line_width_um +
           cell.fingers_per_cell * cell.finger_length_um * cell.line_width_um / cell.pitch_um();
}

TwoPortABCD line_abcd(double inductance_h_per_m, double capacitance_f_per_m, double length_m,
                      double frequency_hz) {
    const double z0 = std::sqrt(inductance_h_per_m / capacitance_f_per_m);
    const double beta =
        constants::two_pi * frequency_hz * std::sqrt(inductance_h_per_m * capacitance_f_per_m);
    const double phase = beta * length_m;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    return {complex(c, 0.0), complex(0.0, z0 * s), complex(0.0, s / z0), complex(c, 0.0),
            frequency_hz};
}

}  // namespace

void CellGeometry::validate() const {
    require_positive(line_width_um, "line width");
    require_positive(finger_spacing_um, "finger spacing");
    require_positive(dielectric_thickness_nm, "dielectric thickness");
    if (!(finger_length_um >= 0.0) || !std::isfinite(finger_length_um)) {
        std::ostringstream os;
        os << "finger length must be non-negative (got " << finger_length_um << ")";
        fail(ErrorKind::InvalidParameter, os.str());
    }
    if (!(permittivity >= 1.0)) {
        std::ostringstream os;
        os << "relative permittivity must be >= 1 (got " << permittivity << ")";
        fail(ErrorKind::InvalidParameter, os.str());
    }
    require(fingers_per_cell >= 0, ErrorKind::InvalidParameter,
            "fingers per cell must be non-negative");
}

// Summed in um and converted once, so whole-micron layouts give correctly
// rounded lengths.
double SupercellSpec::supercell_length_m() const {
    return (n_unloaded * unloaded.pitch_um() + n_loaded * loaded.pitch_um()) / 1e6;
}

double SupercellSpec::total_length_m() const {
    return n_supercells * (n_unloaded * unloaded.pitch_um() + n_loaded * loaded.pitch_um()) / 1e6;
}

void SupercellSpec::validate() const {
    unloaded.validate();
    loaded.validate();
    require(n_unloaded >= 0 && n_loaded >= 0 && n_unloaded + n_loaded > 0,
            ErrorKind::InvalidParameter, "supercell needs at least one cell");
    require(n_supercells > 0, ErrorKind::InvalidParameter, "need at least one supercell");
}

TwoPortABCD operator*(const TwoPortABCD& lhs, const TwoPortABCD& rhs) {
    if (lhs.frequency_hz != rhs.frequency_hz) {
        std::ostringstream os;
        os << "cannot cascade blocks at different frequencies (" << lhs.frequency_hz << " Hz vs "
           << rhs.frequency_hz << " Hz)";
        fail(ErrorKind::Domain, os.str());
    }
    return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
            lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d, lhs.frequency_hz};
}

TwoPortABCD power(const TwoPortABCD& block, int exponent) {
    require(exponent >= 0, ErrorKind::InvalidParameter, "matrix power must be non-negative");
    TwoPortABCD result = TwoPortABCD::identity(block.frequency_hz);
    TwoPortABCD base = block;
    while (exponent > 0) {
        if (exponent & 1) result = result * base;
        exponent >>= 1;
        if (exponent > 0) base = base * base;
    }
    return result;
}

double inductance_per_length(const FilmProperties& film, const BiasPoint& bias, double width_um) {
    require_positive(width_um, "strip width");
    return total_inductance(film, bias) / width_um;
}

double capacitance_per_length(const CellGeometry& cell, double fringing_factor) {
    cell.validate();
    require_positive(fringing_factor, "fringing factor");
    return plate_capacitance(cell, effective_width_um(cell), fringing_factor) * 1e9;
}

double characteristic_impedance(const LineSection& section) {
    require_positive(section.inductance_uh_per_m, "inductance per length");
    require_positive(section.capacitance_nf_per_m, "capacitance per length");
    return std::sqrt(section.inductance_uh_per_m * 1e-6 / (section.capacitance_nf_per_m * 1e-9));
}

LineSection cell_section(const CellGeometry& cell, const FilmProperties& film,
                         const BiasPoint& bias, double fringing_factor) {
    return {inductance_per_length(film, bias, cell.line_width_um),
            capacitance_per_length(cell, fringing_factor), cell.pitch_um() * kUm};
}

TwoPortABCD abcd_of_section(const LineSection& section, double frequency_hz) {
    require_positive(section.inductance_uh_per_m, "inductance per length");
    require_positive(section.capacitance_nf_per_m, "capacitance per length");
    require(section.length_m >= 0.0, ErrorKind::InvalidParameter,
            "section length must be non-negative");
    require_positive(frequency_hz, "frequency");
    return line_abcd(section.inductance_uh_per_m * 1e-6, section.capacitance_nf_per_m * 1e-9,
                     section.length_m, frequency_hz);
}

TwoPortABCD cascade(std::span<const TwoPortABCD> blocks) {
    require(!blocks.empty(), ErrorKind::InvalidParameter, "cascade of zero blocks");
    TwoPortABCD out = blocks.front();
    for (std::size_t i = 1; i < blocks.size(); ++i) out = out * blocks[i];
    return out;
}

TwoPortABCD cell_abcd(const CellGeometry& cell, const FilmProperties& film, const BiasPoint& bias,
                      double frequency_hz, const LineOptions& options) {
    require_positive(frequency_hz, "frequency");
    const double l_line = inductance_per_length(film, bias, cell.line_width_um) * 1e-6;
    const double c_line = plate_capacitance(cell, cell.line_width_um, options.fringing_factor);
    const TwoPortABCD half =
        line_abcd(l_line, c_line, 0.5 * cell.pitch_um() * kUm, frequency_hz);

    const double omega = constants::two_pi * frequency_hz;
    const double finger_m = cell.finger_length_um * kUm;
    // Finger capacitance per unit finger length; fingers share the strip width.
    const double c_finger = plate_capacitance(cell, cell.line_width_um, options.fringing_factor);
    complex shunt{0.0, 0.0};
    if (cell.fingers_per_cell > 0 && finger_m > 0.0) {
        if (options.stub_model == StubModel::Lumped) {
            shunt = complex(0.0, omega * c_finger * finger_m);
        } else {
            const double l_finger = film.sheet_inductance_ph / cell.line_width_um * 1e-6;
            const double y_finger = std::sqrt(c_finger / l_finger);
            const double beta_finger = omega * std::sqrt(l_finger * c_finger);
            shunt = complex(0.0, y_finger * std::tan(beta_finger * finger_m));
        }
        shunt *= static_cast<double>(cell.fingers_per_cell);
    }
    const TwoPortABCD load{1.0, 0.0, shunt, 1.0, frequency_hz};
    return half * load * half;
}

TwoPortABCD supercell_abcd(const SupercellSpec& spec, const FilmProperties& film,
                           const BiasPoint& bias, double frequency_hz,
                           const LineOptions& options) {
    const TwoPortABCD u = cell_abcd(spec.unloaded, film, bias, frequency_hz, options);
    const TwoPortABCD l = cell_abcd(spec.loaded, film, bias, frequency_hz, options);
    return power(u, spec.n_unloaded) * power(l, spec.n_loaded);
}

std::vector<DispersionPoint> floquet_dispersion(const SupercellSpec& spec,
                                                const FilmProperties& film,
                                                const BiasPoint& bias,
                                                std::span<const double> frequency_grid_hz,
                                                const LineOptions& options) {
    spec.validate();
    require(!frequency_grid_hz.empty(), ErrorKind::InvalidParameter, "empty frequency grid");
    for (std::size_t i = 0; i < frequency_grid_hz.size(); ++i) {
        require_positive(frequency_grid_hz[i], "grid frequency");
        if (i > 0)
            require(frequency_grid_hz[i] > frequency_grid_hz[i - 1], ErrorKind::InvalidParameter,
                    "frequency grid must be strictly ascending");
    }

    std::vector<double> traces = parallel_map<double>(frequency_grid_hz.size(), [&](std::size_t i) {
        return supercell_abcd(spec, film, bias, frequency_grid_hz[i], options).half_trace();
    });

    std::vector<DispersionPoint> out;
    out.reserve(traces.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const double x = traces[i];
        DispersionPoint p;
        p.frequency_hz = frequency_grid_hz[i];
        p.half_trace = x;
        p.propagating = std::abs(x) <= 1.0;
        if (p.propagating) {
            const double a = std::acos(x);
            const double k0 = std::floor(previous / constants::two_pi);
            double best = std::numeric_limits<double>::infinity();
            for (double k = k0 - 1.0; k <= k0 + 1.0; k += 1.0) {
                for (double candidate : {constants::two_pi * k + a, constants::two_pi * k - a}) {
                    if (candidate >= previous - 1e-12 && candidate < best) best = candidate;
                }
            }
            previous = best;
        } else {
            // Inside a gap the real part of the phase is pinned to a multiple of
            // pi: even when (A+D)/2 > 1, odd when < -1.
            const bool want_odd = x < 0.0;
            double m = std::ceil((previous - 0.5 * constants::pi) / constants::pi);
            if ((std::fmod(std::abs(m), 2.0) == 1.0) != want_odd) m += 1.0;
            previous = std::max(previous, m * constants::pi);
        }
        p.bloch_phase_rad = previous;
        out.push_back(p);
    }
    return out;
}

namespace {

double refine_edge(const HalfTraceFn& half_trace, double f_pass, double f_stop) {
    auto excess = [&](double f) { return std::abs(half_trace(f)) - 1.0; };
    double pass = f_pass;
    double stop = f_stop;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (pass + stop);
        const double g = excess(mid);
        if (std::abs(g) <= 1e-10) return mid;
        if (g > 0.0)
            stop = mid;
        else
            pass = mid;
        if (std::abs(stop - pass) < 1e-3) break;
    }
    // Return whichever bracket end sits closer to the band edge.
    return std::abs(excess(pass)) <= std::abs(excess(stop)) ? pass : stop;
}

double interpolate_edge(const DispersionPoint& pass, const DispersionPoint& stop) {
    const double target = stop.half_trace > 0.0 ? 1.0 : -1.0;
    const double dx = stop.half_trace - pass.half_trace;
    if (dx == 0.0) return 0.5 * (pass.frequency_hz + stop.frequency_hz);
    const double u = (target - pass.half_trace) / dx;
    return pass.frequency_hz + std::clamp(u, 0.0, 1.0) * (stop.frequency_hz - pass.frequency_hz);
}

}  // namespace

std::vector<Stopband> find_stopbands(std::span<const DispersionPoint> dispersion,
                                     const HalfTraceFn& half_trace) {
    std::vector<Stopband> bands;
    const std::size_t n = dispersion.size();
    std::size_t i = 0;
    while (i < n) {
        if (dispersion[i].propagating) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && !dispersion[j + 1].propagating) ++j;

        Stopband band;
        if (i == 0) {
            band.f_low_hz = dispersion[0].frequency_hz;
        } else if (half_trace) {
            band.f_low_hz =
                refine_edge(half_trace, dispersion[i - 1].frequency_hz, dispersion[i].frequency_hz);
        } else {
            band.f_low_hz = interpolate_edge(dispersion[i - 1], dispersion[i]);
        }
        if (j + 1 >= n) {
            band.f_high_hz = dispersion[j].frequency_hz;
        } else if (half_trace) {
            band.f_high_hz =
                refine_edge(half_trace, dispersion[j + 1].frequency_hz, dispersion[j].frequency_hz);
        } else {
            band.f_high_hz = interpolate_edge(dispersion[j + 1], dispersion[j]);
        }
        bands.push_back(band);
        i = j + 1;
    }
    return bands;
}

std::optional<Stopband> nearest_stopband(std::span<const Stopband> bands, double target_hz) {
    std::optional<Stopband> best;
    for (const auto& b : bands) {
        if (!best || std::abs(b.center_hz() - target_hz) < std::abs(best->center_hz() - target_hz))
            best = b;
    }
    return best;
}

Dispersion::Dispersion(std::vector<DispersionPoint> points, std::vector<Stopband> stopbands,
                       double period_m)
    : points_(std::move(points)), stopbands_(std::move(stopbands)), period_m_(period_m) {
    require(!points_.empty(), ErrorKind::InvalidParameter, "empty dispersion");
    require_positive(period_m_, "dispersion period");
}

Dispersion Dispersion::compute(const SupercellSpec& spec, const FilmProperties& film,
                               const BiasPoint& bias, std::span<const double> frequency_grid_hz,
                               const LineOptions& options) {
    auto points = floquet_dispersion(spec, film, bias, frequency_grid_hz, options);
    auto bands = find_stopbands(points, [&](double f) {
        return supercell_abcd(spec, film, bias, f, options).half_trace();
    });
    return Dispersion(std::move(points), std::move(bands), spec.supercell_length_m());
}

std::optional<Stopband> Dispersion::stopband_at(double frequency_hz) const {
    for (const auto& b : stopbands_) {
        if (frequency_hz > b.f_low_hz && frequency_hz < b.f_high_hz) return b;
    }
    return std::nullopt;
}

double Dispersion::beta(double frequency_hz) const {
    if (!(frequency_hz >= min_frequency_hz() && frequency_hz <= max_frequency_hz())) {
        std::ostringstream os;
        os << "frequency " << frequency_hz << " Hz outside the dispersion grid ["
           << min_frequency_hz() << ", " << max_frequency_hz() << "] Hz";
        fail(ErrorKind::OutOfRange, os.str());
    }
    if (auto band = stopband_at(frequency_hz)) {
        std::ostringstream os;
        os.precision(9);
        os << "frequency " << frequency_hz << " Hz lies in the stop band [" << band->f_low_hz
           << ", " << band->f_high_hz << "] Hz";
        fail(ErrorKind::Domain, os.str());
    }
    auto upper = std::lower_bound(
        points_.begin(), points_.end(), frequency_hz,
        [](const DispersionPoint& p, double f) { return p.frequency_hz < f; });
    if (upper == points_.end()) upper = points_.end() - 1;
    if (upper->frequency_hz == frequency_hz) return upper->bloch_phase_rad / period_m_;
    auto lower = upper - 1;

    double f0 = lower->frequency_hz, p0 = lower->bloch_phase_rad;
    double f1 = upper->frequency_hz, p1 = upper->bloch_phase_rad;
    // A bracketing point inside a gap is replaced by the refined band edge,
    // where the phase equals the pinned multiple of pi.
    for (const auto& b : stopbands_) {
        if (!lower->propagating && b.f_high_hz <= frequency_hz && b.f_high_hz >= f0) f0 = b.f_high_hz;
        if (!upper->propagating && b.f_low_hz >= frequency_hz && b.f_low_hz <= f1) f1 = b.f_low_hz;
    }
    const double u = (f1 > f0) ? (frequency_hz - f0) / (f1 - f0) : 0.0;
    return (p0 + u * (p1 - p0)) / period_m_;
}

double phase_mismatch(const Dispersion& dispersion, double signal_hz, double pump_hz) {
    require_positive(signal_hz, "signal frequency");
    if (!(signal_hz < pump_hz)) {
        std::ostringstream os;
        os << "signal frequency " << signal_hz << " Hz must lie below the pump " << pump_hz << " Hz";
        fail(ErrorKind::InvalidParameter, os.str());
    }
    const double idler_hz = pump_hz - signal_hz;
    auto beta_of = [&](double f, const char* tone) {
        try {
            return dispersion.beta(f);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(tone) + ": " + e.what());
        }
    };
    return beta_of(pump_hz, "pump") - beta_of(signal_hz, "signal") - beta_of(idler_hz, "idler");
}

double calibrate_permittivity(const CellGeometry& cell, const FilmProperties& film,
                              const BiasPoint& bias, double target_z0_ohm,
                              double fringing_factor) {
    require_positive(target_z0_ohm, "target impedance");
    require_positive(fringing_factor, "fringing factor");
    CellGeometry unit = cell;
    unit.permittivity = 1.0;
    unit.validate();
    const double l = inductance_per_length(film, bias, cell.line_width_um) * 1e-6;
    const double c_needed = l / (target_z0_ohm * target_z0_ohm);
    const double c_unit = capacitance_per_length(unit, fringing_factor) * 1e-9;
    const double er = c_needed / c_unit;
    if (er < 1.0) {
        std::ostringstream os;
        os << "target " << target_z0_ohm << " Ohm needs permittivity " << er << " < 1";
        fail(ErrorKind::OutOfRange, os.str());
    }
    return er;
}

double solve_finger_length(const CellGeometry& cell, const FilmProperties& film,
                           const BiasPoint& bias, double target_z0_ohm, double fringing_factor) {
    require_positive(target_z0_ohm, "target impedance");
    auto z_at = [&](double finger_um) {
        CellGeometry g = cell;
        g.finger_length_um = finger_um;
        return characteristic_impedance(cell_section(g, film, bias, fringing_factor));
    };
    const double z_bare = z_at(0.0);
    const double z_full = z_at(kMaxFingerLengthUm);
    if (std::abs(target_z0_ohm - z_bare) <= 1e-12 * z_bare) return 0.0;
    if (target_z0_ohm > z_bare || target_z0_ohm < z_full) {
        std::ostringstream os;
        os << "target Z0 " << target_z0_ohm << " Ohm unreachable: finger lengths [0, "
           << kMaxFingerLengthUm << "] um give Z0 from " << z_bare << " Ohm down to " << z_full
           << " Ohm";
        fail(ErrorKind::OutOfRange, os.str());
    }
    double lo = 0.0, hi = kMaxFingerLengthUm;
    while (hi - lo > 1e-12 * kMaxFingerLengthUm) {
        const double mid = 0.5 * (lo + hi);
        if (z_at(mid) > target_z0_ohm)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> make_frequency_grid(double lo_hz, double hi_hz, double step_hz) {
    require_positive(step_hz, "grid step");
    require(std::isfinite(lo_hz) && std::isfinite(hi_hz) && hi_hz >= lo_hz,
            ErrorKind::InvalidParameter, "grid upper bound must not be below the lower bound");
    const auto n = static_cast<std::size_t>(std::floor((hi_hz - lo_hz) / step_hz + 1e-6)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = lo_hz + static_cast<double>(i) * step_hz;
    return grid;
}

}  // namespace kitwpa
