#pragma once

// Stub-loaded inverted-microstrip artificial line: per-unit-length parameters,
// lossless two-port ABCD blocks, and Floquet-Bloch dispersion of the supercell.
//
// Lengths in the geometry are in um / nm as quoted by designers; per-unit-length
// inductance is in uH/m (numerically pH/sq divided by width in um) and
// capacitance in nF/m. Frequencies are in Hz.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kitwpa/kinetics.hpp"

namespace kitwpa {

using complex = std::complex<double>;

struct CellGeometry {
    double line_width_um = 1.0;            // center line (and finger) width w
    double finger_spacing_um = 1.0;        // gap s between adjacent fingers
    double dielectric_thickness_nm = 100.0;
    double permittivity = 9.6;             // relative permittivity of the dielectric
    double finger_length_um = 0.0;
    int fingers_per_cell = 2;              // one per side of the center line

    double pitch_um() const { return line_width_um + finger_spacing_um; }
    void validate() const;
};

enum class StubModel { Distributed, Lumped };

struct LineOptions {
    StubModel stub_model = StubModel::Distributed;
    double fringing_factor = 1.0;  // multiplies every parallel-plate capacitance
};

struct SupercellSpec {
    CellGeometry unloaded;
    CellGeometry loaded;
    int n_unloaded = 30;
    int n_loaded = 6;
    int n_supercells = 1200;

    int cells_per_supercell() const { return n_unloaded + n_loaded; }
    double supercell_length_m() const;
    double total_length_m() const;
    void validate() const;
};

struct LineSection {
    double inductance_uh_per_m = 0.0;
    double capacitance_nf_per_m = 0.0;
    double length_m = 0.0;
};

struct TwoPortABCD {
    complex a{1.0, 0.0};
    complex b{0.0, 0.0};
    complex c{0.0, 0.0};
    complex d{1.0, 0.0};
    double frequency_hz = 0.0;

    static TwoPortABCD identity(double frequency_hz) { return {1.0, 0.0, 0.0, 1.0, frequency_hz}; }
    complex determinant() const { return a * d - b * c; }
    double half_trace() const { return 0.5 * (a + d).real(); }
};

// Plain 2x2 product this*rhs. Throws Domain on a frequency mismatch.
TwoPortABCD operator*(const TwoPortABCD& lhs, const TwoPortABCD& rhs);
TwoPortABCD power(const TwoPortABCD& block, int exponent);

// Sheet inductance (including any rf current in `bias`) over the strip width.
double inductance_per_length(const FilmProperties& film, const BiasPoint& bias, double width_um);

// Parallel-plate estimate: er e0 (w + n_f l_f w / pitch) / d, times fringing.
double capacitance_per_length(const CellGeometry& cell, double fringing_factor = 1.0);

double characteristic_impedance(const LineSection& section);

// Low-frequency section for one cell type: biased center-line inductance plus
// the total (line + finger) capacitance, over one cell pitch.
LineSection cell_section(const CellGeometry& cell, const FilmProperties& film,
                         const BiasPoint& bias, double fringing_factor = 1.0);

TwoPortABCD abcd_of_section(const LineSection& section, double frequency_hz);

// Ordered product blocks[0] * blocks[1] * ...; empty input is an error.
TwoPortABCD cascade(std::span<const TwoPortABCD> blocks);

// One unit cell: half center-line section, shunt finger loading, half section.
// Fingers are open-circuit stubs of unbiased film (dc bias flows only along the
// center line).
TwoPortABCD cell_abcd(const CellGeometry& cell, const FilmProperties& film, const BiasPoint& bias,
                      double frequency_hz, const LineOptions& options = {});

TwoPortABCD supercell_abcd(const SupercellSpec& spec, const FilmProperties& film,
                           const BiasPoint& bias, double frequency_hz,
                           const LineOptions& options = {});

struct DispersionPoint {
    double frequency_hz = 0.0;
    double bloch_phase_rad = 0.0;  // unwrapped (extended-zone) phase per supercell
    double half_trace = 0.0;       // (A + D) / 2 of the supercell block
    bool propagating = false;      // |half_trace| <= 1
};

struct Stopband {
    double f_low_hz = 0.0;
    double f_high_hz = 0.0;
    double center_hz() const { return 0.5 * (f_low_hz + f_high_hz); }
    double width_hz() const { return f_high_hz - f_low_hz; }
};

using HalfTraceFn = std::function<double(double)>;

// Evaluates the supercell block across an ascending grid (parallel map), then
// unwraps the Bloch phase sequentially so it is continuous and non-decreasing.
std::vector<DispersionPoint> floquet_dispersion(const SupercellSpec& spec,
                                                const FilmProperties& film,
                                                const BiasPoint& bias,
                                                std::span<const double> frequency_grid_hz,
                                                const LineOptions& options = {});

// Contiguous non-propagating runs. With `half_trace` the edges are bisected on
// |(A+D)/2| - 1 until the bracket is below 1 mHz or the residual below 1e-10;
// without it the crossing is interpolated linearly between grid points.
std::vector<Stopband> find_stopbands(std::span<const DispersionPoint> dispersion,
                                     const HalfTraceFn& half_trace = {});

// The stop band whose center is closest to `target_hz`, if any.
std::optional<Stopband> nearest_stopband(std::span<const Stopband> bands, double target_hz);

// Dispersion of a concrete line, with propagation constant lookup.
class Dispersion {
public:
    Dispersion(std::vector<DispersionPoint> points, std::vector<Stopband> stopbands,
               double period_m);

    // Builds the dispersion of `spec` and refines the stop-band edges against
    // the supercell model.
    static Dispersion compute(const SupercellSpec& spec, const FilmProperties& film,
                              const BiasPoint& bias, std::span<const double> frequency_grid_hz,
                              const LineOptions& options = {});

    const std::vector<DispersionPoint>& points() const { return points_; }
    const std::vector<Stopband>& stopbands() const { return stopbands_; }
    double period_m() const { return period_m_; }
    double min_frequency_hz() const { return points_.front().frequency_hz; }
    double max_frequency_hz() const { return points_.back().frequency_hz; }

    // Stop band containing f (edges excluded), if any.
    std::optional<Stopband> stopband_at(double frequency_hz) const;

    // Propagation constant in rad/m, linearly interpolated. Throws Domain inside
    // a stop band and OutOfRange outside the grid.
    double beta(double frequency_hz) const;

private:
    std::vector<DispersionPoint> points_;
    std::vector<Stopband> stopbands_;
    double period_m_;
};

// beta(fp) - beta(fs) - beta(fp - fs), rad/m.
double phase_mismatch(const Dispersion& dispersion, double signal_hz, double pump_hz);

// Relative permittivity that gives `target_z0_ohm` for this cell at low
// frequency, other geometry held fixed.
double calibrate_permittivity(const CellGeometry& cell, const FilmProperties& film,
                              const BiasPoint& bias, double target_z0_ohm,
                              double fringing_factor = 1.0);

// Finger length in um that gives `target_z0_ohm`, by bisection over
// [0, 100] um down to 1 nm. Throws OutOfRange with the bracketing impedances when
// the target is unreachable.
double solve_finger_length(const CellGeometry& cell, const FilmProperties& film,
                           const BiasPoint& bias, double target_z0_ohm,
                           double fringing_factor = 1.0);

inline constexpr double kMaxFingerLengthUm = 100.0;

// Ascending grid lo, lo+step, ... up to hi inclusive (within step/1e6).
std::vector<double> make_frequency_grid(double lo_hz, double hi_hz, double step_hz);

}  // namespace kitwpa
