#pragma once

// Inequality harness. Every check pairs a left-hand side with the lambda
// power or norm combination it is compared against (no unknown constant),
// and judges the ratio against a cap frozen from the canonical families.
//
// lambda is ||Delta f|| throughout: the smallest admissible value for a
// normalized field, and the eigenvalue itself for eigenmodes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nodal/caps.hpp"
#include "nodal/errors.hpp"
#include "nodal/grid.hpp"
#include "nodal/nodal.hpp"
#include "nodal/sasaki.hpp"
#include "nodal/sweep.hpp"

namespace nodal {

enum class Verdict { BoundedInFamily, EqualityCase, ViolatedScaling };

inline std::string verdict_name(Verdict v) {
    switch (v) {
    case Verdict::BoundedInFamily: return "bounded-in-family";
    case Verdict::EqualityCase: return "equality-case";
    case Verdict::ViolatedScaling: return "violated-scaling";
    }
    return "?";
}

inline Verdict parse_verdict(std::string_view s) {
    if (s == "bounded-in-family") return Verdict::BoundedInFamily;
    if (s == "equality-case") return Verdict::EqualityCase;
    if (s == "violated-scaling") return Verdict::ViolatedScaling;
    throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

struct InequalityReport {
    std::string name;
    std::string model;
    std::string mode;
    double lambda = 0.0;
    double lhs = 0.0;
    double rhs_scale = 0.0;
    double ratio = 0.0;
    Verdict verdict = Verdict::BoundedInFamily;
};

/// A hard inequality: passes iff value >= bound.
struct InvariantCheck {
    std::string name;
    std::string model;
    std::string mode;
    double value = 0.0;
    double bound = 0.0;
    bool passed = false;
};

namespace detail {

inline InequalityReport make_report(std::string name, const GridField& gf, double lambda, double lhs,
                                    double rhs_scale) {
    InequalityReport r;
    r.name = std::move(name);
    r.model = gf.model().name();
    r.mode = gf.source().label();
    r.lambda = lambda;
    r.lhs = lhs;
    r.rhs_scale = rhs_scale;
    r.ratio = rhs_scale > 0.0 ? lhs / rhs_scale : std::numeric_limits<double>::quiet_NaN();
    return r;
}

/// Cap verdict: ratios above the frozen cap (or not finite) violate.
inline InequalityReport capped(InequalityReport r, const SurfaceModel& model) {
    const auto cap = family_cap(r.name, model);
    if (!cap) throw UnsupportedModel("no frozen cap for check '" + r.name + "' on " + model.name() + " geometry");
    r.verdict = std::isfinite(r.ratio) && r.ratio <= *cap ? Verdict::BoundedInFamily : Verdict::ViolatedScaling;
    return r;
}

inline InvariantCheck make_invariant(std::string name, const GridField& gf, double value, double bound) {
    return {std::move(name), gf.model().name(), gf.source().label(), value, bound, value >= bound};
}

} // namespace detail

/// Quantities shared by the checks on one field: the sample, its nodal
/// domains and (when requested) a level sweep.
struct Analysis {
    GridField gf;
    NodalDomainSet domains;
    std::optional<LevelSweep> sweep;
    double norm = 0.0;     ///< ||f||
    double lambda = 0.0;   ///< ||Delta f||
    double grad_sq = 0.0;  ///< ||grad f||^2
    double mean = 0.0;     ///< integral f / area
};

struct AnalysisOptions {
    std::optional<Resolution> resolution;
    bool with_sweep = true;
    SweepSpec sweep;
    std::vector<double> rs{1.0};
    bool keep_contours = false;
};

inline Analysis analyze(GridField gf, const AnalysisOptions& opt = {}) {
    Analysis a{std::move(gf), {}, std::nullopt, 0.0, 0.0, 0.0, 0.0};
    a.domains = extract_domains(a.gf);
    a.norm = l2_norm(a.gf);
    a.lambda = laplacian_l2(a.gf);
    const double g = gradient_l2(a.gf);
    a.grad_sq = g * g;
    a.mean = mean_integral(a.gf) / a.gf.model().total_area();
    if (opt.with_sweep && !a.gf.source().is_zero()) a.sweep = run_sweep(a.gf, opt.sweep, opt.rs, opt.keep_contours);
    return a;
}

inline Analysis analyze(const FieldExpr& expr, const AnalysisOptions& opt = {}) {
    return analyze(sample(expr, opt.resolution), opt);
}

/// Membership in F_lambda: unit norm and, on closed models, zero mean.
inline void require_f_lambda(const Analysis& a) {
    if (std::abs(a.norm - 1.0) > 1e-6)
        throw MembershipError("field is not normalized: ||f|| = " + format_real(a.norm));
    if (a.gf.model().closed() && std::abs(a.mean) > 1e-6)
        throw MembershipError("field does not have zero mean on a closed surface: mean = " + format_real(a.mean));
}

inline void require_eigenmode(const Analysis& a, bool closed_only) {
    if (!a.gf.source().eigenvalue())
        throw MembershipError("check is stated for eigenfunctions; '" + a.gf.source().label() + "' mixes eigenvalues");
    if (closed_only && !a.gf.model().closed())
        throw UnsupportedModel("check is stated for closed surfaces");
}

inline const LevelSweep& require_sweep(const Analysis& a) {
    if (!a.sweep) throw ConfigError("analysis was built without a level sweep");
    return *a.sweep;
}

/// (sum m_A) / lambda and (sum m_A^2) / lambda.
inline std::pair<InequalityReport, InequalityReport> check_thm_crit(const Analysis& a) {
    require_f_lambda(a);
    const auto& model = a.gf.model();
    return {detail::capped(detail::make_report("thm_crit_sum", a.gf, a.lambda, extrema_moments(a.domains, 1), a.lambda), model),
            detail::capped(detail::make_report("thm_crit_sq", a.gf, a.lambda, extrema_moments(a.domains, 2), a.lambda), model)};
}

inline std::string thm_main_name(const Weight& u) { return "thm_main_" + u.name(); }

/// B(u, f) / (||u o f|| (||f|| + ||Delta f||)).
inline InequalityReport check_thm_main(const Analysis& a, const Weight& u) {
    const double b = banach_indicatrix(require_sweep(a), u).value;
    auto r = detail::make_report(thm_main_name(u), a.gf, a.lambda, b, composed_l2(a.gf, u) * (a.norm + a.lambda));
    // custom weights share the cap of the constant weight
    const auto& model = a.gf.model();
    if (!family_cap(r.name, model) && calibrated_geometry(model)) {
        const auto cap = family_cap("thm_main_one", model);
        if (!cap) throw UnsupportedModel("no frozen cap for " + r.name);
        r.verdict = std::isfinite(r.ratio) && r.ratio <= *cap ? Verdict::BoundedInFamily : Verdict::ViolatedScaling;
        return r;
    }
    return detail::capped(std::move(r), model);
}

/// (sum m_A^6) / lambda^(3/2) for eigenmodes of closed surfaces.
inline InequalityReport check_thm_eigen(const Analysis& a) {
    require_f_lambda(a);
    require_eigenmode(a, true);
    return detail::capped(
        detail::make_report("thm_eigen", a.gf, a.lambda, extrema_moments(a.domains, 6), std::pow(a.lambda, 1.5)),
        a.gf.model());
}

/// #{A : m_A >= a lambda^(1/4)} against a^-6.
inline InequalityReport check_cor_courant1(const Analysis& a, double level) {
    require_f_lambda(a);
    require_eigenmode(a, false);
    if (!(level > 0.0)) throw std::invalid_argument("threshold a must be positive");
    const double count = static_cast<double>(count_above(a.domains, level * std::pow(a.lambda, 0.25)));
    return detail::capped(detail::make_report("cor_courant1", a.gf, a.lambda, count, std::pow(level, -6.0)),
                          a.gf.model());
}

/// #{A : m_A >= a} against min(1/a, 1/a^2) lambda.
inline InequalityReport check_cor_courant2(const Analysis& a, double level) {
    require_f_lambda(a);
    if (!(level > 0.0)) throw std::invalid_argument("threshold a must be positive");
    const double count = static_cast<double>(count_above(a.domains, level));
    const double scale = std::min(1.0 / level, 1.0 / (level * level)) * a.lambda;
    return detail::capped(detail::make_report("cor_courant2", a.gf, a.lambda, count, scale), a.gf.model());
}

/// max |f| / lambda^(1/4) for eigenmodes.
inline InequalityReport check_supnorm(const Analysis& a) {
    require_f_lambda(a);
    require_eigenmode(a, false);
    const ContourLattice lattice(a.gf);
    const double sup = std::max(std::abs(lattice.min_value()), std::abs(lattice.max_value()));
    return detail::capped(detail::make_report("supnorm", a.gf, a.lambda, sup, std::pow(a.lambda, 0.25)),
                          a.gf.model());
}

/// (sum m_A^8) / lambda^2 for Dirichlet modes of the rectangle.
inline InequalityReport check_rem_sogge(const Analysis& a) {
    if (a.gf.model().kind() != SurfaceKind::EuclideanRectangle)
        throw UnsupportedModel("the m_A^8 bound is checked on Dirichlet rectangle modes only");
    require_f_lambda(a);
    require_eigenmode(a, false);
    return detail::capped(
        detail::make_report("rem_sogge", a.gf, a.lambda, extrema_moments(a.domains, 8), a.lambda * a.lambda),
        a.gf.model());
}

/// Domain count against lambda (Courant-type growth).
inline InequalityReport check_domain_count(const Analysis& a) {
    require_eigenmode(a, false);
    return detail::capped(
        detail::make_report("domain_count", a.gf, a.lambda, static_cast<double>(a.domains.size()), a.lambda),
        a.gf.model());
}

/// (integral beta^2 / l dc)^(1/2) against ||f|| + ||Delta f||. The square
/// root is the supremum of B(u, f) / ||u o f|| over weights u.
inline InequalityReport check_leray_form(const Analysis& a) {
    const auto form = leray_form_check(a.gf, require_sweep(a));
    return detail::capped(detail::make_report("leray_form", a.gf, a.lambda, std::sqrt(form.integral), form.comparison),
                          a.gf.model());
}

struct BochnerSides {
    double lhs = 0.0; ///< integral tr(H^2)
    double rhs = 0.0; ///< ||Delta f||^2 - (1/2) integral K |grad f|^2, K scalar curvature
    double residual = 0.0;
};

/// Both sides of the integrated Bochner identity on a closed surface.
inline BochnerSides bochner_sides(const GridField& gf) {
    if (!gf.model().closed()) throw UnsupportedModel("the integrated Bochner identity needs a closed surface");
    BochnerSides s;
    s.lhs = integrate(gf, [](const NodeRecord& n) { return n.hess.frobenius_sq(); });
    // K in (1/2) K |grad f|^2 is the scalar curvature, twice the Gaussian curvature
    const double curv = 2.0 * gf.model().curvature({});
    const double lap = laplacian_l2(gf);
    s.rhs = lap * lap - 0.5 * integrate(gf, [curv](const NodeRecord& n) { return curv * n.grad_norm * n.grad_norm; });
    const double diff = std::abs(s.lhs - s.rhs);
    s.residual = s.rhs == 0.0 ? diff : diff / std::abs(s.rhs);
    return s;
}

/// Relative residual of the Bochner identity.
inline double check_bochner(const GridField& gf) { return bochner_sides(gf).residual; }

inline InequalityReport bochner_report(const Analysis& a, double tolerance = 1e-3) {
    const auto s = bochner_sides(a.gf);
    auto r = detail::make_report("bochner", a.gf, a.lambda, s.lhs, s.rhs);
    r.verdict = s.residual <= tolerance ? Verdict::EqualityCase : Verdict::ViolatedScaling;
    return r;
}

/// max|f| against (1/2pi) integral |H_f|: bounded by one, equal for the paraboloid.
inline InequalityReport gr_report(const Analysis& a, double equality_tolerance = 1e-4) {
    const auto b = gr_bound(a.gf);
    auto r = detail::make_report("gr_bound", a.gf, a.lambda, b.lhs, b.rhs);
    if (std::abs(r.ratio - 1.0) <= equality_tolerance) r.verdict = Verdict::EqualityCase;
    else r.verdict = r.ratio < 1.0 ? Verdict::BoundedInFamily : Verdict::ViolatedScaling;
    return r;
}

/// B(u, f) against the co-area right-hand side at Sasaki parameter r (flat models).
inline InequalityReport co_area_report(const Analysis& a, const Weight& u, double r) {
    const double b = banach_indicatrix(require_sweep(a), u).value;
    auto rep = detail::make_report("co_area_" + u.name(), a.gf, a.lambda, b, co_area_bound(a.gf, u, r));
    rep.verdict = std::isfinite(rep.ratio) && rep.ratio <= 1.0 + 1e-3 ? Verdict::BoundedInFamily
                                                                      : Verdict::ViolatedScaling;
    return rep;
}

// ---------------------------------------------------------------- invariants

inline std::vector<InvariantCheck> f_lambda_gate(const Analysis& a) {
    std::vector<InvariantCheck> out;
    out.push_back(detail::make_invariant("f_lambda_norm", a.gf, -std::abs(a.norm - 1.0), -1e-6));
    if (a.gf.model().closed()) out.push_back(detail::make_invariant("f_lambda_mean", a.gf, -std::abs(a.mean), -1e-6));
    return out;
}

/// B(1, f) >= 0.99 sum m_A.
inline InvariantCheck banach_lower_bound(const Analysis& a) {
    const double b = banach_indicatrix(require_sweep(a), Weight::one()).value;
    const double s = extrema_moments(a.domains, 1);
    return detail::make_invariant("banach_lower_bound", a.gf, s > 0.0 ? b / s : 1.0, 0.99);
}

/// L(c) - kappa(r) beta(c) >= 0 at every regular level, every r of the sweep.
inline InvariantCheck systole_invariant(const Analysis& a) {
    const auto margins = systole_margins(a.gf, require_sweep(a));
    double m = std::numeric_limits<double>::infinity();
    for (double v : margins) m = std::min(m, v);
    return detail::make_invariant("systole", a.gf, m, 0.0);
}

/// ||Delta f|| >= ||grad f||^2 for a normalized field.
inline InvariantCheck variational_chain(const Analysis& a) {
    return detail::make_invariant("variational_chain", a.gf, a.lambda - a.grad_sq, -1e-6 * std::max(1.0, a.lambda));
}

// ---------------------------------------------------------------- full verification

struct VerifyOptions {
    std::vector<Weight> weights{Weight::one(), Weight::abs()};
    std::vector<double> courant1_levels{0.3};
    std::vector<double> courant2_levels{0.1, 0.5, 1.0};
    double co_area_r = 1.0;
};

struct FieldVerification {
    std::vector<InequalityReport> reports;
    std::vector<InvariantCheck> invariants;
};

/// Every check whose hypotheses the field satisfies.
inline FieldVerification verify_field(const Analysis& a, const VerifyOptions& opt = {}) {
    FieldVerification out;
    const auto& model = a.gf.model();
    const auto& src = a.gf.source();
    out.invariants = f_lambda_gate(a);
    for (const auto& inv : out.invariants)
        if (!inv.passed) return out; // outside F_lambda: no theorem applies

    const bool eigen = src.eigenvalue().has_value() && src.builtin() == Builtin::None;
    // capped checks need a calibrated geometry; the rest run everywhere
    if (calibrated_geometry(model)) {
        const auto [crit_sum, crit_sq] = check_thm_crit(a);
        out.reports.push_back(crit_sum);
        out.reports.push_back(crit_sq);
        if (a.sweep)
            for (const auto& u : opt.weights) out.reports.push_back(check_thm_main(a, u));
        for (double lv : opt.courant2_levels) out.reports.push_back(check_cor_courant2(a, lv));
        if (eigen) {
            if (model.closed()) out.reports.push_back(check_thm_eigen(a));
            for (double lv : opt.courant1_levels) out.reports.push_back(check_cor_courant1(a, lv));
            out.reports.push_back(check_supnorm(a));
            out.reports.push_back(check_domain_count(a));
            if (model.kind() == SurfaceKind::EuclideanRectangle) out.reports.push_back(check_rem_sogge(a));
        }
        if (a.sweep) out.reports.push_back(check_leray_form(a));
    }
    if (model.closed()) out.reports.push_back(bochner_report(a));
    if (model.simply_connected_flat()) out.reports.push_back(gr_report(a));
    if (a.sweep) {
        if (model.flat()) out.reports.push_back(co_area_report(a, Weight::one(), opt.co_area_r));
        out.invariants.push_back(banach_lower_bound(a));
        if (model.flat()) out.invariants.push_back(systole_invariant(a));
    }
    out.invariants.push_back(variational_chain(a));
    return out;
}

inline bool any_violated(const std::vector<InequalityReport>& reports) {
    return std::any_of(reports.begin(), reports.end(),
                       [](const InequalityReport& r) { return r.verdict == Verdict::ViolatedScaling; });
}

inline bool all_passed(const std::vector<InvariantCheck>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

/// Stable order: lambda ascending, then mode label, then check name.
inline void sort_reports(std::vector<InequalityReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const InequalityReport& x, const InequalityReport& y) {
        if (x.lambda != y.lambda) return x.lambda < y.lambda;
        return x.mode < y.mode;
    });
}

// ---------------------------------------------------------------- families and scaling fits

enum class FamilyKind { Diagonal, Zonal, Grid, Paraboloid };

struct FamilySpec {
    FamilyKind kind = FamilyKind::Diagonal;
    int lo = 1;
    int hi = 6;

    std::string label() const {
        std::string k;
        switch (kind) {
        case FamilyKind::Diagonal: k = "nn"; break;
        case FamilyKind::Zonal: k = "zonal"; break;
        case FamilyKind::Grid: k = "mn"; break;
        case FamilyKind::Paraboloid: return "paraboloid";
        }
        return k + ":" + std::to_string(lo) + ".." + std::to_string(hi);
    }
};

/// Parses "nn:1..6", "zonal:4..30", "mn:1..8" or "paraboloid".
inline FamilySpec parse_family(const std::string& text) {
    if (text == "paraboloid") return {FamilyKind::Paraboloid, 0, 0};
    const auto colon = text.find(':');
    const auto dots = text.find("..");
    if (colon == std::string::npos || dots == std::string::npos || dots < colon)
        throw ConfigError("family spec '" + text + "' is not of the form kind:lo..hi");
    const std::string kind = text.substr(0, colon);
    FamilySpec f;
    if (kind == "nn") f.kind = FamilyKind::Diagonal;
    else if (kind == "zonal") f.kind = FamilyKind::Zonal;
    else if (kind == "mn") f.kind = FamilyKind::Grid;
    else throw ConfigError("unknown family kind '" + kind + "' (expected nn, zonal, mn or paraboloid)");
    try {
        std::size_t used = 0;
        const std::string lo = text.substr(colon + 1, dots - colon - 1);
        const std::string hi = text.substr(dots + 2);
        f.lo = std::stoi(lo, &used);
        if (used != lo.size()) throw std::invalid_argument(lo);
        f.hi = std::stoi(hi, &used);
        if (used != hi.size()) throw std::invalid_argument(hi);
    } catch (const std::logic_error&) {
        throw ConfigError("family spec '" + text + "' has a malformed index range");
    }
    if (f.lo > f.hi) throw ConfigError("family spec '" + text + "' has an empty index range");
    return f;
}

/// Members of a family on a model (normalized unless asked otherwise).
inline std::vector<FieldExpr> make_family(const SurfaceModel& model, const FamilySpec& spec, bool normalize = true) {
    std::vector<FieldExpr> out;
    const auto need = [&](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("family '") + spec.label() + "' " + what);
    };
    switch (spec.kind) {
    case FamilyKind::Paraboloid:
        need(model.kind() == SurfaceKind::UnitDisc, "needs the unit disc");
        out.push_back(FieldExpr::disc_paraboloid(normalize));
        break;
    case FamilyKind::Zonal:
        need(model.kind() == SurfaceKind::RoundSphere, "needs the round sphere");
        need(spec.lo >= 1, "needs l >= 1");
        for (int l = spec.lo; l <= spec.hi; ++l) out.push_back(FieldExpr::single(ModeSpec::zonal(l), normalize));
        break;
    case FamilyKind::Diagonal:
    case FamilyKind::Grid:
        need(model.kind() == SurfaceKind::FlatTorus || model.kind() == SurfaceKind::EuclideanRectangle,
             "needs the torus or a rectangle");
        need(spec.lo >= 1, "needs indices >= 1");
        for (int m = spec.lo; m <= spec.hi; ++m) {
            const int n_lo = spec.kind == FamilyKind::Diagonal ? m : spec.lo;
            const int n_hi = spec.kind == FamilyKind::Diagonal ? m : spec.hi;
            for (int n = n_lo; n <= n_hi; ++n) {
                const auto mode = model.kind() == SurfaceKind::FlatTorus ? ModeSpec::torus(m, n)
                                                                          : ModeSpec::rectangle(model, m, n);
                out.push_back(FieldExpr::single(mode, normalize));
            }
        }
        break;
    }
    return out;
}

/// Normalized combination of `terms` distinct torus modes with indices
/// 0..max_index and coefficients uniform in [-1, 1), drawn from mt19937_64.
inline FieldExpr random_torus_combo(std::uint64_t seed, int terms = 3, int max_index = 4) {
    std::mt19937_64 rng(seed);
    // top 53 bits as a uniform double in [0, 1); fixed across standard libraries
    const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const auto pick = [&](int n) { return static_cast<int>(uniform() * n); };
    const TorusBranch branches[] = {TorusBranch::SinSin, TorusBranch::SinCos, TorusBranch::CosSin,
                                    TorusBranch::CosCos};
    std::vector<ModeSpec> chosen;
    std::vector<Term> out;
    while (static_cast<int>(out.size()) < terms) {
        const int m = pick(max_index + 1);
        const int n = pick(max_index + 1);
        const TorusBranch b = branches[pick(4)];
        const bool sin0 = b == TorusBranch::SinSin || b == TorusBranch::SinCos;
        const bool sin1 = b == TorusBranch::SinSin || b == TorusBranch::CosSin;
        if ((m == 0 && sin0) || (n == 0 && sin1) || (m == 0 && n == 0)) continue;
        const auto mode = ModeSpec::torus(m, n, b);
        if (std::find(chosen.begin(), chosen.end(), mode) != chosen.end()) continue;
        double coef = 0.0;
        while (std::abs(coef) < 0.05) coef = 2.0 * uniform() - 1.0;
        chosen.push_back(mode);
        out.push_back({coef, mode});
    }
    return FieldExpr::modes(SurfaceModel::flat_torus(), std::move(out), true);
}

enum class Quantity { SumM1, SumM2, SumM6, SumM8, SupNorm, L6Norm, Inradius, DomainCount, BanachOne };

inline std::string quantity_name(Quantity q) {
    switch (q) {
    case Quantity::SumM1: return "sum_m1";
    case Quantity::SumM2: return "sum_m2";
    case Quantity::SumM6: return "sum_m6";
    case Quantity::SumM8: return "sum_m8";
    case Quantity::SupNorm: return "sup_norm";
    case Quantity::L6Norm: return "l6_norm";
    case Quantity::Inradius: return "inradius";
    case Quantity::DomainCount: return "domain_count";
    case Quantity::BanachOne: return "banach_one";
    }
    return "?";
}

inline Quantity parse_quantity(const std::string& s) {
    for (Quantity q : {Quantity::SumM1, Quantity::SumM2, Quantity::SumM6, Quantity::SumM8, Quantity::SupNorm,
                       Quantity::L6Norm, Quantity::Inradius, Quantity::DomainCount, Quantity::BanachOne})
        if (quantity_name(q) == s) return q;
    throw ConfigError("unknown scaling quantity '" + s + "'");
}

/// Expected lambda exponent and tolerance of a quantity along a family.
/// Saturating families follow the bound exponents; the torus diagonal
/// family has constant maxima.
inline std::pair<double, double> expected_exponent(Quantity q, FamilyKind family) {
    const bool flat_family = family == FamilyKind::Diagonal || family == FamilyKind::Grid;
    switch (q) {
    case Quantity::SumM1:
    case Quantity::SumM2: return {1.0, 0.05};
    case Quantity::SumM6: return {flat_family ? 1.0 : 1.5, 0.1};
    case Quantity::SumM8: return {flat_family ? 1.0 : 2.0, 0.1};
    case Quantity::SupNorm: return {flat_family ? 0.0 : 0.25, 0.03};
    case Quantity::L6Norm: return {flat_family ? 0.0 : 1.0 / 12.0, 0.1};
    case Quantity::Inradius: return {-0.5, 0.05};
    case Quantity::DomainCount: return {family == FamilyKind::Zonal ? 0.5 : 1.0, 0.05};
    case Quantity::BanachOne: return {1.0, 0.05};
    }
    return {0.0, 0.0};
}

inline double measure_quantity(const Analysis& a, Quantity q) {
    switch (q) {
    case Quantity::SumM1: return extrema_moments(a.domains, 1);
    case Quantity::SumM2: return extrema_moments(a.domains, 2);
    case Quantity::SumM6: return extrema_moments(a.domains, 6);
    case Quantity::SumM8: return extrema_moments(a.domains, 8);
    case Quantity::SupNorm: {
        const ContourLattice lattice(a.gf);
        return std::max(std::abs(lattice.min_value()), std::abs(lattice.max_value()));
    }
    case Quantity::L6Norm: return lp_norm(a.gf, 6);
    case Quantity::Inradius: {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& d : a.domains.domains) r = std::min(r, d.inradius);
        return r;
    }
    case Quantity::DomainCount: return static_cast<double>(a.domains.size());
    case Quantity::BanachOne: return banach_indicatrix(require_sweep(a), Weight::one()).value;
    }
    return 0.0;
}

struct ScalingFit {
    std::string quantity;
    std::vector<std::pair<double, double>> family; ///< (lambda, value), lambda ascending
    std::size_t excluded = 0;                      ///< smallest-lambda members left out of the fit
    double fitted_exponent = 0.0;
    double intercept = 0.0; ///< log value at log lambda = 0
    double expected_exponent = 0.0;
    double tolerance = 0.0;
    double residual = 0.0; ///< rms of log residuals over fitted members

    bool within_tolerance() const { return std::abs(fitted_exponent - expected_exponent) <= tolerance; }
    double predict_log(double log_lambda) const { return intercept + fitted_exponent * log_lambda; }
};

/// Least-squares line through (log lambda, log value), skipping the
/// `exclude` smallest-lambda members. Needs at least five members.
inline ScalingFit fit_scaling(std::vector<std::pair<double, double>> family, std::string quantity,
                              double expected, double tolerance, std::size_t exclude = 2) {
    if (family.size() < 5) throw ConfigError("a scaling fit needs at least 5 family members");
    std::stable_sort(family.begin(), family.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    ScalingFit fit;
    fit.quantity = std::move(quantity);
    fit.expected_exponent = expected;
    fit.tolerance = tolerance;
    fit.excluded = std::min(exclude, family.size() - 2);
    std::vector<double> lx, ly;
    for (std::size_t k = fit.excluded; k < family.size(); ++k) {
        const auto [lam, v] = family[k];
        if (!(lam > 0.0) || !(v > 0.0)) throw DegenerateField("scaling fit needs positive lambda and values");
        lx.push_back(std::log(lam));
        ly.push_back(std::log(v));
    }
    const double n = static_cast<double>(lx.size());
    const double mx = pairwise_sum(lx) / n;
    const double my = pairwise_sum(ly) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (sxx == 0.0) throw DegenerateField("scaling fit needs at least two distinct lambda values");
    fit.fitted_exponent = sxy / sxx;
    fit.intercept = my - fit.fitted_exponent * mx;
    double ss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double e = ly[k] - fit.predict_log(lx[k]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.family = std::move(family);
    return fit;
}

/// Samples every member of a family, measures the quantity and fits its exponent.
inline ScalingFit scaling_study(const SurfaceModel& model, const FamilySpec& spec, Quantity q,
                                std::optional<Resolution> resolution = std::nullopt) {
    const auto members = make_family(model, spec);
    if (members.size() < 5) throw ConfigError("a scaling study needs at least 5 family members");
    AnalysisOptions opt;
    opt.resolution = resolution;
    opt.with_sweep = q == Quantity::BanachOne;
    std::vector<std::pair<double, double>> family(members.size());
    parallel_for(members.size(), [&](std::size_t k) {
        const Analysis a = analyze(members[k], opt);
        family[k] = {a.lambda, measure_quantity(a, q)};
    });
    const auto [expected, tol] = expected_exponent(q, spec.kind);
    return fit_scaling(std::move(family), quantity_name(q), expected, tol);
}

} // namespace nodal
