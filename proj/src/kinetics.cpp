#include "kitwpa/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kitwpa/errors.hpp"

namespace kitwpa {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be positive and finite (got " << value << ")";
        fail(ErrorKind::InvalidParameter, os.str());
    }
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be finite (got " << value << ")";
        fail(ErrorKind::InvalidParameter, os.str());
    }
}

}  // namespace

void FilmProperties::validate() const {
    require_positive(sheet_inductance_ph, "sheet inductance L0");
    require_positive(istar_ma, "scaling current I*");
    require_positive(ic_ma, "critical current Ic");
    require_positive(thickness_nm, "film thickness");
    require_positive(linewidth_um, "line width");
    if (!(ic_ma < istar_ma)) {
        std::ostringstream os;
        os << "critical current Ic=" << ic_ma << " mA must be below the scaling current I*="
           << istar_ma << " mA";
        fail(ErrorKind::InvalidParameter, os.str());
    }
}

double biased_inductance(const FilmProperties& film, double idc_ma) {
    require_positive(film.sheet_inductance_ph, "sheet inductance L0");
    require_positive(film.istar_ma, "scaling current I*");
    require_finite(idc_ma, "dc bias");
    const double r = idc_ma / film.istar_ma;
    return film.sheet_inductance_ph * (1.0 + r * r);
}

double total_inductance(const FilmProperties& film, const BiasPoint& bias) {
    require_finite(bias.irf_ma, "rf current");
    const double ld = biased_inductance(film, bias.idc_ma);
    const double r = bias.irf_ma / film.istar_ma;
    return ld * (1.0 + r * r);
}

double epsilon_3wm(double idc_ma, double istar_ma) {
    require_positive(istar_ma, "scaling current I*");
    require_finite(idc_ma, "dc bias");
    return 2.0 * idc_ma / (istar_ma * istar_ma + idc_ma * idc_ma);
}

double xi_4wm(double idc_ma, double istar_ma) {
    require_positive(istar_ma, "scaling current I*");
    require_finite(idc_ma, "dc bias");
    return 1.0 / (istar_ma * istar_ma + idc_ma * idc_ma);
}

std::optional<std::string> bias_warning(const FilmProperties& film, const BiasPoint& bias) {
    const double peak = std::abs(bias.idc_ma) + std::abs(bias.irf_ma);
    if (film.ic_ma > 0.0 && peak >= film.ic_ma) {
        std::ostringstream os;
        os << "peak current |Idc|+|I| = " << peak << " mA reaches the critical current "
           << film.ic_ma << " mA; the film would be driven normal";
        return os.str();
    }
    return std::nullopt;
}

ThicknessTable::ThicknessTable(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
    require(anchors_.size() >= 2, ErrorKind::InvalidParameter,
            "thickness table needs at least two anchors");
    std::sort(anchors_.begin(), anchors_.end(),
              [](const Anchor& a, const Anchor& b) { return a.thickness_nm < b.thickness_nm; });
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
        require_positive(anchors_[i].thickness_nm, "table thickness");
        require_positive(anchors_[i].sheet_inductance_ph, "table sheet inductance");
        if (i > 0)
            require(anchors_[i].thickness_nm > anchors_[i - 1].thickness_nm,
                    ErrorKind::InvalidParameter, "thickness table has duplicate thickness");
    }
}

ThicknessTable ThicknessTable::nbtin() {
    return ThicknessTable({{5.0, 100.0}, {10.0, 30.0}});
}

double ThicknessTable::sheet_inductance(double thickness_nm) const {
    const double lo = min_thickness_nm();
    const double hi = max_thickness_nm();
    if (!(thickness_nm >= lo && thickness_nm <= hi)) {
        std::ostringstream os;
        os << "thickness " << thickness_nm << " nm outside the tabulated range [" << lo << ", "
           << hi << "] nm";
        fail(ErrorKind::OutOfRange, os.str());
    }
    auto upper = std::lower_bound(
        anchors_.begin(), anchors_.end(), thickness_nm,
        [](const Anchor& a, double t) { return a.thickness_nm < t; });
    if (upper->thickness_nm == thickness_nm) return upper->sheet_inductance_ph;
    auto lower = upper - 1;
    const double u = (std::log(thickness_nm) - std::log(lower->thickness_nm)) /
                     (std::log(upper->thickness_nm) - std::log(lower->thickness_nm));
    return std::exp(std::log(lower->sheet_inductance_ph) +
                    u * (std::log(upper->sheet_inductance_ph) -
                         std::log(lower->sheet_inductance_ph)));
}

FilmProperties scale_with_geometry(const FilmProperties& reference, double new_thickness_nm,
                                   double new_linewidth_um, const ThicknessTable& table) {
    reference.validate();
    require_positive(new_thickness_nm, "new thickness");
    require_positive(new_linewidth_um, "new line width");

    FilmProperties out = reference;
    const double area_ratio = (new_thickness_nm * new_linewidth_um) /
                              (reference.thickness_nm * reference.linewidth_um);
    out.istar_ma = reference.istar_ma * area_ratio;
    out.ic_ma = reference.ic_ma * area_ratio;
    out.thickness_nm = new_thickness_nm;
    out.linewidth_um = new_linewidth_um;
    if (new_thickness_nm != reference.thickness_nm) {
        out.sheet_inductance_ph = reference.sheet_inductance_ph *
                                  table.sheet_inductance(new_thickness_nm) /
                                  table.sheet_inductance(reference.thickness_nm);
    }
    return out;
}

double relative_pump_power(const FilmProperties& reference, const FilmProperties& scaled) {
    const double r = relative_dc_bias(reference, scaled);
    return r * r;
}

double relative_dc_bias(const FilmProperties& reference, const FilmProperties& scaled) {
    require_positive(reference.istar_ma, "reference I*");
    require_positive(scaled.istar_ma, "scaled I*");
    return scaled.istar_ma / reference.istar_ma;
}

}  // namespace kitwpa
