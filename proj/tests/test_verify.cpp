#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nodal/report.hpp"
#include "nodal/verify.hpp"

using namespace nodal;

namespace {

AnalysisOptions no_sweep() {
    AnalysisOptions o;
    o.with_sweep = false;
    return o;
}

double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

} // namespace

TEST(ThmCrit, TorusSharpnessFamily) {
    for (int n = 1; n <= 6; ++n) {
        const auto a = analyze(FieldExpr::single(ModeSpec::torus(n, n), true), no_sweep());
        const auto [sum, sq] = check_thm_crit(a);
        EXPECT_NEAR(sum.ratio, 2 / pi, 0.02 * 2 / pi) << "n=" << n;
        EXPECT_NEAR(sq.ratio, 2 / (pi * pi), 0.03 * 2 / (pi * pi)) << "n=" << n;
        EXPECT_EQ(sum.verdict, Verdict::BoundedInFamily);
        EXPECT_EQ(sq.verdict, Verdict::BoundedInFamily);
        EXPECT_EQ(sum.name, "thm_crit_sum");
        EXPECT_DOUBLE_EQ(sum.lambda, a.lambda);
    }
}

TEST(ThmCrit, SingleAxisMode) {
    const auto a = analyze(FieldExpr::single(ModeSpec::torus(1, 0, TorusBranch::SinCos), true), no_sweep());
    const auto [sum, sq] = check_thm_crit(a);
    EXPECT_GT(sum.ratio, 0.0);
    EXPECT_NEAR(sum.ratio, 0.449616, 1e-4);
    EXPECT_EQ(sum.verdict, Verdict::BoundedInFamily);
    EXPECT_EQ(sq.verdict, Verdict::BoundedInFamily);
}

TEST(ThmCrit, RejectsUnnormalized) {
    const auto a = analyze(FieldExpr::single(ModeSpec::torus(1, 1)), no_sweep());
    EXPECT_THROW(check_thm_crit(a), MembershipError);
    EXPECT_THROW(check_supnorm(a), MembershipError);
}

TEST(ThmMain, TorusFamilyStable) {
    std::vector<double> one, abs;
    for (int n = 2; n <= 6; ++n) {
        const auto a = analyze(FieldExpr::single(ModeSpec::torus(n, n), true));
        const auto r1 = check_thm_main(a, Weight::one());
        const auto r2 = check_thm_main(a, Weight::abs());
        EXPECT_EQ(r1.name, "thm_main_one");
        EXPECT_EQ(r2.name, "thm_main_abs");
        EXPECT_EQ(r1.verdict, Verdict::BoundedInFamily);
        EXPECT_EQ(r2.verdict, Verdict::BoundedInFamily);
        one.push_back(r1.ratio);
        abs.push_back(r2.ratio);
    }
    EXPECT_LE(spread(one), 1.15);
    EXPECT_LE(spread(abs), 1.15);
}

TEST(ThmMain, DiscBelowExampleConstant) {
    const auto a = analyze(FieldExpr::disc_paraboloid(true));
    const auto r = check_thm_main(a, Weight::one());
    EXPECT_LE(r.ratio, std::sqrt(pi) / (2 * pi) * (1 + 1e-3));
    EXPECT_GT(r.ratio, 0.0);
}

TEST(ThmMain, TableWeightUsesConstantCap) {
    const auto a = analyze(FieldExpr::single(ModeSpec::torus(2, 1), true));
    const auto r = check_thm_main(a, Weight::table({{-1.0, 2.0}, {1.0, 0.5}}));
    EXPECT_EQ(r.name, "thm_main_table");
    EXPECT_EQ(r.verdict, Verdict::BoundedInFamily);
}

TEST(ThmEigen, ZonalExponent) {
    const auto fit = scaling_study(SurfaceModel::round_sphere(), parse_family("zonal:4..30"), Quantity::SumM6);
    EXPECT_NEAR(fit.fitted_exponent, 1.5, 0.1);
    EXPECT_TRUE(fit.within_tolerance());
    EXPECT_EQ(fit.family.size(), 27u);
}

TEST(ThmEigen, TorusNonSaturating) {
    const auto fit = scaling_study(SurfaceModel::flat_torus(), parse_family("nn:1..6"), Quantity::SumM6);
    EXPECT_NEAR(fit.fitted_exponent, 1.0, 0.1);
    double prev = INFINITY;
    for (int n = 1; n <= 6; ++n) {
        const auto r = check_thm_eigen(analyze(FieldExpr::single(ModeSpec::torus(n, n), true), no_sweep()));
        EXPECT_LT(r.ratio, prev);
        prev = r.ratio;
    }
}

TEST(ThmEigen, SmokeAndRejections) {
    const auto r = check_thm_eigen(analyze(FieldExpr::single(ModeSpec::zonal(2), true), no_sweep()));
    EXPECT_GT(r.ratio, 0.0);
    EXPECT_TRUE(std::isfinite(r.ratio));
    const auto s = SurfaceModel::round_sphere();
    const auto combo = analyze(FieldExpr::modes(s, {{1.0, ModeSpec::zonal(2)}, {1.0, ModeSpec::zonal(3)}}, true), no_sweep());
    EXPECT_THROW(check_thm_eigen(combo), MembershipError);
    const auto rect = analyze(FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(pi, pi), 2, 2), true), no_sweep());
    EXPECT_THROW(check_thm_eigen(rect), UnsupportedModel);
}

TEST(CorCourant1, ZonalPolarCaps) {
    for (int l = 4; l <= 30; l += 2) {
        const auto r = check_cor_courant1(analyze(FieldExpr::single(ModeSpec::zonal(l), true), no_sweep()), 0.3);
        EXPECT_LE(r.lhs, 2.0) << "l=" << l;
        EXPECT_EQ(r.verdict, Verdict::BoundedInFamily);
    }
}

TEST(CorCourant1, HugeThresholdAndTorus) {
    const auto z = analyze(FieldExpr::single(ModeSpec::zonal(8), true), no_sweep());
    EXPECT_EQ(check_cor_courant1(z, 100.0).lhs, 0.0);
    for (int n = 3; n <= 6; ++n) {
        const auto a = analyze(FieldExpr::single(ModeSpec::torus(n, n), true), no_sweep());
        EXPECT_EQ(check_cor_courant1(a, 0.3).lhs, 0.0) << "n=" << n;
    }
}

TEST(Supnorm, Exponents) {
    EXPECT_NEAR(scaling_study(SurfaceModel::round_sphere(), parse_family("zonal:4..30"), Quantity::SupNorm).fitted_exponent, 0.25, 0.03);
    EXPECT_NEAR(scaling_study(SurfaceModel::flat_torus(), parse_family("nn:1..6"), Quantity::SupNorm).fitted_exponent, 0.0, 0.03);
}

TEST(Supnorm, ZonalClosedForm) {
    for (int l : {5, 12}) {
        const auto a = analyze(FieldExpr::single(ModeSpec::zonal(l), true), no_sweep());
        const double exact = std::sqrt((2 * l + 1) / (4 * pi));
        EXPECT_NEAR(check_supnorm(a).lhs, exact, 0.01 * exact);
    }
}

TEST(Supnorm, ConstantRejected) {
    // constants are outside the mean-zero class and cannot be built
    EXPECT_THROW(ModeSpec::torus(0, 0, TorusBranch::CosCos), std::invalid_argument);
    EXPECT_THROW(ModeSpec::zonal(0), std::invalid_argument);
}

TEST(Caps, CalibratedGeometryOnly) {
    EXPECT_TRUE(calibrated_geometry(SurfaceModel::rectangle(pi, pi)));
    EXPECT_FALSE(calibrated_geometry(SurfaceModel::rectangle(2.0, 1.0)));
    const auto a = analyze(FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(2.0, 1.0), 2, 1), true));
    EXPECT_THROW(check_thm_crit(a), UnsupportedModel);
    const auto v = verify_field(a);
    EXPECT_TRUE(all_passed(v.invariants));
    for (const auto& r : v.reports) EXPECT_TRUE(r.name == "gr_bound" || r.name == "co_area_one") << r.name;
}

TEST(Bochner, Identity) {
    EXPECT_LE(check_bochner(sample(FieldExpr::single(ModeSpec::torus(3, 3), true))), 1e-3);
    EXPECT_LE(check_bochner(sample(FieldExpr::single(ModeSpec::zonal(10), true))), 1e-3);
    const auto s = SurfaceModel::round_sphere();
    EXPECT_LE(check_bochner(sample(FieldExpr::modes(s, {{0.3, ModeSpec::sphere(6, -2)}, {1.0, ModeSpec::zonal(3)}}, true))), 1e-3);
    const auto zero = bochner_sides(sample(FieldExpr::modes(SurfaceModel::flat_torus(), {})));
    EXPECT_EQ(zero.lhs, 0.0);
    EXPECT_EQ(zero.rhs, 0.0);
    EXPECT_THROW(check_bochner(sample(FieldExpr::disc_paraboloid())), UnsupportedModel);
}

TEST(RemSogge, RectangleFamily) {
    const auto sq = SurfaceModel::rectangle(pi, pi);
    for (int m = 1; m <= 8; ++m)
        for (int n = 1; n <= 8; ++n) {
            const auto a = analyze(FieldExpr::single(ModeSpec::rectangle(sq, m, n), true), no_sweep());
            ASSERT_EQ(a.domains.size(), std::size_t(m * n));
            for (const auto& d : a.domains.domains) EXPECT_NEAR(d.m_A, 2 / pi, 0.02 * 2 / pi);
            EXPECT_EQ(check_rem_sogge(a).verdict, Verdict::BoundedInFamily) << m << "," << n;
        }
}

TEST(RemSogge, ElongatedAgainstSquare) {
    const auto sq = SurfaceModel::rectangle(pi, pi);
    const auto a = check_rem_sogge(analyze(FieldExpr::single(ModeSpec::rectangle(sq, 8, 1), true), no_sweep()));
    const auto b = check_rem_sogge(analyze(FieldExpr::single(ModeSpec::rectangle(sq, 3, 3), true), no_sweep()));
    EXPECT_NEAR(a.ratio, 4.91216e-05, 1e-3 * 4.91216e-05);
    EXPECT_NEAR(b.ratio, 7.36367e-04, 1e-3 * 7.36367e-04);
    EXPECT_EQ(a.verdict, Verdict::BoundedInFamily);
    EXPECT_EQ(b.verdict, Verdict::BoundedInFamily);
    EXPECT_THROW(check_rem_sogge(analyze(FieldExpr::single(ModeSpec::zonal(3), true), no_sweep())), UnsupportedModel);
}

TEST(ScalingStudy, Examples) {
    EXPECT_NEAR(scaling_study(SurfaceModel::flat_torus(), parse_family("nn:1..6"), Quantity::SumM1).fitted_exponent, 1.0, 0.05);
    EXPECT_NEAR(scaling_study(SurfaceModel::flat_torus(), parse_family("nn:1..6"), Quantity::Inradius).fitted_exponent, -0.5, 0.05);
    const double l6 = scaling_study(SurfaceModel::round_sphere(), parse_family("zonal:4..40"), Quantity::L6Norm).fitted_exponent;
    EXPECT_GE(l6, 0.08);
    EXPECT_LE(l6, 0.18);
    EXPECT_LE(l6, 1.0 / 12 + 0.1);
}

TEST(ScalingStudy, NeedsFiveMembers) {
    EXPECT_THROW(scaling_study(SurfaceModel::flat_torus(), parse_family("nn:1..4"), Quantity::SumM1), ConfigError);
    EXPECT_THROW(fit_scaling({{1, 1}, {2, 2}}, "x", 1, 0.1), ConfigError);
}

TEST(ScalingStudy, FitOnExactPowerLaw) {
    std::vector<std::pair<double, double>> fam;
    for (int k = 1; k <= 8; ++k) fam.emplace_back(k * 3.0, 2.0 * std::pow(k * 3.0, 0.7));
    const auto fit = fit_scaling(fam, "q", 0.7, 0.01);
    EXPECT_NEAR(fit.fitted_exponent, 0.7, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(2.0), 1e-12);
    EXPECT_LT(fit.residual, 1e-12);
    EXPECT_EQ(fit.excluded, 2u);
}

TEST(Families, Parse) {
    EXPECT_EQ(parse_family("nn:1..6").label(), "nn:1..6");
    EXPECT_EQ(parse_family("zonal:4..30").kind, FamilyKind::Zonal);
    EXPECT_EQ(parse_family("paraboloid").kind, FamilyKind::Paraboloid);
    EXPECT_THROW(parse_family("nn:6..1"), ConfigError);
    EXPECT_THROW(parse_family("xx:1..2"), ConfigError);
    EXPECT_THROW(parse_family("nn:1-6"), ConfigError);
    EXPECT_EQ(make_family(SurfaceModel::rectangle(pi, pi), parse_family("mn:1..8")).size(), 64u);
    EXPECT_THROW(make_family(SurfaceModel::flat_torus(), parse_family("zonal:2..5")), ConfigError);
}

TEST(RandomCombo, DeterministicAndNormalized) {
    const auto a = random_torus_combo(42);
    const auto b = random_torus_combo(42);
    EXPECT_EQ(a.label(), b.label());
    EXPECT_NE(a.label(), random_torus_combo(43).label());
    EXPECT_EQ(a.terms().size(), 3u);
    EXPECT_NEAR(l2_norm(sample(a)), 1.0, 1e-9);
}

// Property: seeded combinations pass the gate, every verdict is bounded, and every hard invariant holds
TEST(Property, RandomCombinations) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto f = random_torus_combo(seed);
        const auto a = analyze(f);
        const auto v = verify_field(a);
        EXPECT_TRUE(all_passed(v.invariants)) << f.label();
        EXPECT_FALSE(any_violated(v.reports)) << f.label();
        const auto [sum, sq] = check_thm_crit(a);
        EXPECT_LE(sum.ratio, 5 * *family_cap("thm_crit_sum", SurfaceKind::FlatTorus));
        EXPECT_LE(sq.ratio, 5 * *family_cap("thm_crit_sq", SurfaceKind::FlatTorus));
    }
}

// Property: ratios survive a grid refinement
TEST(Property, RatiosRefinementInvariant) {
    const auto f = FieldExpr::single(ModeSpec::torus(2, 3, TorusBranch::CosSin), true);
    AnalysisOptions coarse = no_sweep(), fine = no_sweep();
    coarse.resolution = Resolution{96, 96};
    fine.resolution = Resolution{192, 192};
    const auto a = check_thm_crit(analyze(f, coarse)).first;
    const auto b = check_thm_crit(analyze(f, fine)).first;
    EXPECT_NEAR(a.ratio, b.ratio, 0.02 * b.ratio);
}

// Property: gate, positivity and the variational chain on every verified field
TEST(Property, GateAndChain) {
    const auto s = SurfaceModel::round_sphere();
    for (const auto& f : {FieldExpr::single(ModeSpec::zonal(6), true), FieldExpr::modes(s, {{1.0, ModeSpec::sphere(3, 1)}, {0.5, ModeSpec::sphere(5, -4)}}, true),
                          FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(2.0, 1.0), 2, 1), true),
                          FieldExpr::disc_paraboloid(true)}) {
        const auto a = analyze(f);
        const auto v = verify_field(a);
        EXPECT_TRUE(all_passed(v.invariants)) << f.label();
        EXPECT_FALSE(any_violated(v.reports)) << f.label();
        EXPECT_GE(a.lambda, a.grad_sq * (1 - 1e-6));
        for (const auto& r : v.reports) {
            EXPECT_GE(r.lhs, 0.0) << r.name;
            EXPECT_GT(r.rhs_scale, 0.0) << r.name;
        }
    }
}

TEST(Verify, UnnormalizedFieldStopsAtGate) {
    const auto v = verify_field(analyze(FieldExpr::single(ModeSpec::torus(1, 1))));
    EXPECT_TRUE(v.reports.empty());
    EXPECT_FALSE(all_passed(v.invariants));
}

TEST(Verify, DiscEqualityCases) {
    const auto v = verify_field(analyze(FieldExpr::disc_paraboloid(true)));
    const auto gr = std::find_if(v.reports.begin(), v.reports.end(), [](const auto& r) { return r.name == "gr_bound"; });
    ASSERT_NE(gr, v.reports.end());
    EXPECT_EQ(gr->verdict, Verdict::EqualityCase);
    EXPECT_NEAR(gr->ratio, 1.0, 1e-4);
}

TEST(Report, JsonRoundTrip) {
    auto v = verify_field(analyze(FieldExpr::single(ModeSpec::torus(2, 2), true)));
    sort_reports(v.reports);
    std::ostringstream os;
    write_report_json(os, v.reports);
    const auto doc = nlohmann::json::parse(os.str());
    ASSERT_EQ(doc.size(), v.reports.size());
    for (std::size_t k = 0; k < v.reports.size(); ++k) {
        const auto back = report_from_json(doc[k]);
        EXPECT_EQ(back.name, v.reports[k].name);
        EXPECT_EQ(back.verdict, v.reports[k].verdict);
        EXPECT_NEAR(back.ratio, v.reports[k].ratio, 1e-11 * std::abs(v.reports[k].ratio));
        EXPECT_EQ(doc[k].size(), 8u);
    }
}

TEST(Report, VerdictNames) {
    for (Verdict v : {Verdict::BoundedInFamily, Verdict::EqualityCase, Verdict::ViolatedScaling})
        EXPECT_EQ(parse_verdict(verdict_name(v)), v);
    EXPECT_THROW(parse_verdict("maybe"), std::invalid_argument);
}
