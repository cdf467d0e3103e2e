#pragma once

// Level sweeps: per-level component counts beta(c), Sasaki lengths L(c),
// Leray lengths l(c), and the c-integrals built from them (generalized
// Banach indicatrix, the beta^2 / l form).
//
// Levels are Chebyshev-spaced by default; each level stands for the
// c-interval between the midpoints to its neighbors. Irregular levels (a
// near-critical segment, or a component below lattice resolution) are
// excluded from every integral and their total c-measure is reported.

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "nodal/csv.hpp"
#include "nodal/errors.hpp"
#include "nodal/grid.hpp"
#include "nodal/levelsets.hpp"
#include "nodal/sasaki.hpp"

namespace nodal {

enum class Spacing { Chebyshev, Uniform };

struct SweepSpec {
    std::optional<double> c_min; ///< defaults to min f over the sample lattice
    std::optional<double> c_max; ///< defaults to max f
    int n_levels = 512;
    Spacing spacing = Spacing::Chebyshev;
};

struct LevelRecord {
    double c = 0.0;
    double dc = 0.0; ///< quadrature width
    int beta = 0;
    bool regular = true;
    bool under_resolved = false; ///< a component is below lattice resolution
    double min_grad = std::numeric_limits<double>::infinity();
    std::vector<double> sasaki_L; ///< one per Sasaki parameter; NaN on irregular levels
    double leray = std::numeric_limits<double>::quiet_NaN();
    std::optional<LevelContours> contours;
};

struct LevelSweep {
    double c_min = 0.0;
    double c_max = 0.0;
    std::vector<double> rs;
    std::vector<LevelRecord> levels;

    double irregular_measure() const {
        double m = 0.0;
        for (const auto& l : levels)
            if (!l.regular) m += l.dc;
        return m;
    }
};

/// Level values and quadrature widths on [c_min, c_max].
inline std::vector<std::pair<double, double>> sweep_levels(double c_min, double c_max, int n, Spacing spacing) {
    std::vector<double> c(static_cast<std::size_t>(n));
    const double mid = 0.5 * (c_min + c_max);
    const double half = 0.5 * (c_max - c_min);
    for (int k = 0; k < n; ++k) {
        c[static_cast<std::size_t>(k)] = spacing == Spacing::Chebyshev
                                             ? mid - half * std::cos((2.0 * k + 1.0) * pi / (2.0 * n))
                                             : c_min + (k + 0.5) * (c_max - c_min) / n;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double lo = k == 0 ? c_min : 0.5 * (c[k - 1] + c[k]);
        const double hi = k + 1 == c.size() ? c_max : 0.5 * (c[k] + c[k + 1]);
        out.emplace_back(c[k], hi - lo);
    }
    return out;
}

inline LevelSweep run_sweep(const GridField& gf, const SweepSpec& spec = {}, std::vector<double> rs = {1.0},
                            bool keep_contours = false) {
    if (spec.n_levels < 64) throw ConfigError("a level sweep needs at least 64 levels");
    const ContourLattice lattice(gf);
    LevelSweep sweep;
    sweep.c_min = spec.c_min.value_or(lattice.min_value());
    sweep.c_max = spec.c_max.value_or(lattice.max_value());
    if (sweep.c_max < sweep.c_min) throw ConfigError("sweep range is empty (c_max < c_min)");
    sweep.rs = std::move(rs);
    const auto levels = sweep_levels(sweep.c_min, sweep.c_max, spec.n_levels, spec.spacing);
    sweep.levels.resize(levels.size());
    const double floor = grad_floor(gf);

    parallel_for(levels.size(), [&](std::size_t k) {
        LevelRecord& rec = sweep.levels[k];
        rec.c = levels[k].first;
        rec.dc = levels[k].second;
        LevelContours contours = lattice.extract(rec.c);
        rec.beta = contours.beta();
        rec.min_grad = min_gradient(gf, contours);
        rec.under_resolved = !resolved(contours, gf);
        rec.regular = rec.min_grad >= floor && !rec.under_resolved;
        rec.sasaki_L.assign(sweep.rs.size(), std::numeric_limits<double>::quiet_NaN());
        if (rec.regular) {
            for (std::size_t q = 0; q < sweep.rs.size(); ++q) rec.sasaki_L[q] = level_L(gf, contours, sweep.rs[q]);
            rec.leray = leray_length(gf, contours);
        }
        if (keep_contours) rec.contours = std::move(contours);
    });
    return sweep;
}

struct BanachResult {
    double value = 0.0;
    double irregular_measure = 0.0;
};

/// B(u, f) = integral u(c) beta(c) dc over the regular levels of a sweep.
inline BanachResult banach_indicatrix(const LevelSweep& sweep, const Weight& u) {
    std::vector<double> terms;
    bool any_regular = false;
    for (const auto& l : sweep.levels) {
        if (!l.regular) continue;
        any_regular = true;
        terms.push_back(u(l.c) * l.beta * l.dc);
    }
    if (!any_regular && !sweep.levels.empty()) throw DegenerateField("field too degenerate: every sweep level is irregular");
    return {pairwise_sum(terms), sweep.irregular_measure()};
}

inline BanachResult banach_indicatrix(const GridField& gf, const Weight& u, const SweepSpec& spec = {}) {
    return banach_indicatrix(run_sweep(gf, spec, {}), u);
}

struct LerayForm {
    double integral = 0.0;   ///< integral beta^2 / l dc over regular nonempty levels
    double comparison = 0.0; ///< ||f|| + ||Delta f||
};

inline LerayForm leray_form_check(const GridField& gf, const LevelSweep& sweep) {
    std::vector<double> terms;
    bool any_regular = false;
    for (const auto& l : sweep.levels) {
        if (!l.regular) continue;
        any_regular = true;
        if (l.beta == 0) continue;
        terms.push_back(double(l.beta) * l.beta / l.leray * l.dc);
    }
    if (!any_regular && !sweep.levels.empty()) throw DegenerateField("field too degenerate: every sweep level is irregular");
    return {pairwise_sum(terms), l2_norm(gf) + laplacian_l2(gf)};
}

inline LerayForm leray_form_check(const GridField& gf, const SweepSpec& spec = {}) {
    return leray_form_check(gf, run_sweep(gf, spec, {}));
}

/// Smallest L(c) - kappa(r) beta(c) over regular levels, per Sasaki parameter (flat models).
inline std::vector<double> systole_margins(const GridField& gf, const LevelSweep& sweep) {
    std::vector<double> margins;
    for (std::size_t q = 0; q < sweep.rs.size(); ++q) {
        const double kappa = systole(gf.model(), sweep.rs[q]);
        double m = std::numeric_limits<double>::infinity();
        for (const auto& l : sweep.levels)
            if (l.regular) m = std::min(m, l.sasaki_L[q] - kappa * l.beta);
        margins.push_back(m);
    }
    return margins;
}

/// Columns: c, beta, L_sasaki(r=...) per parameter, leray, regular.
inline void write_sweep_csv(std::ostream& os, const LevelSweep& sweep) {
    os << "c,beta";
    for (double r : sweep.rs) os << ",L_sasaki(r=" << format_real(r) << ")";
    os << ",leray,regular\n";
    for (const auto& l : sweep.levels) {
        os << format_real(l.c) << ',' << l.beta;
        for (double L : l.sasaki_L) os << ',' << format_real(L);
        os << ',' << format_real(l.leray) << ',' << (l.regular ? 1 : 0) << '\n';
    }
}

} // namespace nodal
