#pragma once

// Current-dependent kinetic inductance of a thin superconducting film and the
// three-/four-wave-mixing coefficients derived from it.
//
// Units: currents in mA, sheet inductance in pH/sq, thickness in nm, width in
// um. The mixing coefficients therefore come out in 1/mA and 1/mA^2.

#include <optional>
#include <string>
#include <vector>

namespace kitwpa {

struct FilmProperties {
    double sheet_inductance_ph = 0.0;  // L0, zero-bias kinetic inductance per square
    double istar_ma = 0.0;             // scaling current I*
    double ic_ma = 0.0;                // critical current
    double thickness_nm = 0.0;
    double linewidth_um = 0.0;

    // Throws InvalidParameter unless L0, I*, Ic, t, w > 0 and Ic < I*.
    void validate() const;
};

struct BiasPoint {
    double idc_ma = 0.0;  // dc bias current
    double irf_ma = 0.0;  // rf current amplitude
};

// L_d = L0 (1 + Idc^2 / I*^2)
double biased_inductance(const FilmProperties& film, double idc_ma);

// L_k = L_d (1 + I^2 / I*^2)
double total_inductance(const FilmProperties& film, const BiasPoint& bias);

// Three-wave-mixing coefficient 2 Idc / (I*^2 + Idc^2), in 1/mA.
double epsilon_3wm(double idc_ma, double istar_ma);

// Four-wave-mixing coefficient 1 / (I*^2 + Idc^2), in 1/mA^2.
double xi_4wm(double idc_ma, double istar_ma);

// The formulas stay defined past the critical current, but a real film would
// switch to the normal state. Returns a human-readable note when |Idc| + |I|
// reaches Ic.
std::optional<std::string> bias_warning(const FilmProperties& film, const BiasPoint& bias);

// Piecewise log-log interpolation of sheet inductance versus film thickness.
class ThicknessTable {
public:
    struct Anchor {
        double thickness_nm;
        double sheet_inductance_ph;
    };

    explicit ThicknessTable(std::vector<Anchor> anchors);

    // NbTiN anchors: 5 nm -> 100 pH/sq, 10 nm -> 30 pH/sq.
    static ThicknessTable nbtin();

    double sheet_inductance(double thickness_nm) const;
    double min_thickness_nm() const { return anchors_.front().thickness_nm; }
    double max_thickness_nm() const { return anchors_.back().thickness_nm; }
    const std::vector<Anchor>& anchors() const { return anchors_; }

private:
    std::vector<Anchor> anchors_;
};

// Re-dimension a reference film. I* scales with the cross-section t*w; L0 is
// rescaled by the table ratio L0(t_new)/L0(t_ref), so a reference film that
// sits on the table lands exactly on it. Ic scales with I*.
FilmProperties scale_with_geometry(const FilmProperties& reference,
                                   double new_thickness_nm,
                                   double new_linewidth_um,
                                   const ThicknessTable& table = ThicknessTable::nbtin());

// Pump power needed by the scaled film relative to the reference, (I*'/I*)^2.
// Only a relative figure; absolute pump power is not predicted.
double relative_pump_power(const FilmProperties& reference, const FilmProperties& scaled);

// Dc bias needed by the scaled film relative to the reference, I*'/I*.
double relative_dc_bias(const FilmProperties& reference, const FilmProperties& scaled);

}  // namespace kitwpa
