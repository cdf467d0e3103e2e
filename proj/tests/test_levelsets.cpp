#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nodal/nodal.hpp"
#include "nodal/sweep.hpp"

using namespace nodal;

namespace {

// sigma{|f - c| < eps} / (2 eps) for f = sin x sin y / pi, by direct cell counting on a fine lattice
double band_leray_oracle(double c, double eps, int n = 4096) {
    const double h = two_pi / n;
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = std::sin((i + 0.5) * h);
    long count = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] / pi - c) < eps) ++count;
    return count * h * h / (2 * eps);
}

int zonal_root_count(int l, double c, int samples = 200000) {
    const double k = std::sqrt((2 * l + 1) / (4 * pi));
    int roots = 0;
    double prev = k * std::legendre(l, 1.0) - c;
    for (int i = 1; i <= samples; ++i) {
        const double v = k * std::legendre(l, std::cos(pi * i / samples)) - c;
        if ((v > 0) != (prev > 0)) ++roots;
        prev = v;
    }
    return roots;
}

SweepSpec levels(int n) {
    SweepSpec s;
    s.n_levels = n;
    return s;
}

} // namespace

TEST(ExtractLevel, TorusPositiveCells) {
    for (int n = 1; n <= 4; ++n) {
        const auto gf = sample(FieldExpr::single(ModeSpec::torus(n, n), true));
        EXPECT_EQ(extract_level(gf, 0.5 / pi).beta(), 2 * n * n);
        EXPECT_EQ(extract_level(gf, -0.5 / pi).beta(), 2 * n * n);
    }
}

TEST(ExtractLevel, DiscCircle) {
    const auto gf = sample(FieldExpr::disc_paraboloid());
    const auto level = extract_level(gf, 0.75);
    ASSERT_EQ(level.beta(), 1);
    const double len = riemannian_length(gf, level.loops[0]);
    EXPECT_NEAR(len, pi, 0.005 * pi);
    for (const auto& p : level.loops[0].points) EXPECT_NEAR(p.x, 0.5, 1e-6);
}

TEST(ExtractLevel, ZonalLatitudeCircles) {
    const int l = 6;
    const auto gf = sample(FieldExpr::single(ModeSpec::zonal(l), true));
    const double c = 0.1 * gf.max_abs();
    EXPECT_EQ(extract_level(gf, c).beta(), zonal_root_count(l, c));
    EXPECT_EQ(extract_level(gf, -c).beta(), zonal_root_count(l, -c));
}

TEST(ExtractLevel, OutsideRangeIsEmpty) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(1, 1), true));
    EXPECT_EQ(extract_level(gf, 1.0).beta(), 0);
    EXPECT_EQ(extract_level(gf, -1.0).beta(), 0);
}

TEST(Banach, TorusDiagonal) {
    for (int n = 1; n <= 4; ++n) {
        const auto gf = sample(FieldExpr::single(ModeSpec::torus(n, n), true));
        const double b = banach_indicatrix(gf, Weight::one()).value;
        EXPECT_NEAR(b, 4 * n * n / pi, 0.03 * 4 * n * n / pi) << "n=" << n;
        const double m = extrema_moments(extract_domains(gf), 1);
        EXPECT_NEAR(b, m, 0.03 * m);
    }
}

TEST(Banach, ZeroWeight) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(2, 1), true));
    EXPECT_EQ(banach_indicatrix(gf, Weight::zero()).value, 0.0);
}

TEST(Banach, Disc) {
    const auto gf = sample(FieldExpr::disc_paraboloid());
    EXPECT_NEAR(banach_indicatrix(gf, Weight::one()).value, 1.0, 0.02);
}

TEST(Banach, NeedsEnoughLevels) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(1, 1), true));
    EXPECT_THROW(banach_indicatrix(gf, Weight::one(), levels(63)), ConfigError);
    EXPECT_NO_THROW(banach_indicatrix(gf, Weight::one(), levels(64)));
}

TEST(Banach, DegenerateWhenEveryLevelIsIrregular) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(1, 1), true));
    auto sweep = run_sweep(gf, levels(64), {});
    for (auto& l : sweep.levels) l.regular = false;
    EXPECT_THROW(banach_indicatrix(sweep, Weight::one()), DegenerateField);
    EXPECT_THROW(leray_form_check(gf, sweep), DegenerateField);
}

TEST(Leray, DiscIsPi) {
    const auto gf = sample(FieldExpr::disc_paraboloid());
    for (double c : {0.1, 0.3, 0.5, 0.75, 0.9}) EXPECT_NEAR(leray_length(gf, c), pi, 0.005 * pi) << "c=" << c;
}

TEST(Leray, TorusBandOracle) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(1, 1), true), Resolution{128, 128});
    for (double c : {0.1, 0.2}) {
        const double oracle = band_leray_oracle(c, 1e-3);
        EXPECT_NEAR(leray_length(gf, c), oracle, 0.05 * oracle) << "c=" << c;
        EXPECT_EQ(extract_level(gf, c).beta(), 2);
    }
}

TEST(Leray, OutsideRangeThrows) {
    const auto gf = sample(FieldExpr::disc_paraboloid());
    EXPECT_THROW(leray_length(gf, 1.5), std::domain_error);
    EXPECT_THROW(leray_length(gf, -0.5), std::domain_error);
}

TEST(LerayForm, Disc) {
    const auto r = leray_form_check(sample(FieldExpr::disc_paraboloid()));
    EXPECT_NEAR(r.integral, 1 / pi, 0.03 / pi);
    EXPECT_NEAR(r.comparison, std::sqrt(pi / 3) + 4 * std::sqrt(pi), 1e-3);
}

TEST(LerayForm, TorusRatioStable) {
    // (integral beta^2 / l)^(1/2) / (||f|| + ||Delta f||); n = 1 carries the extra ||f|| term
    std::vector<double> ratio;
    for (int n = 2; n <= 5; ++n) {
        const auto r = leray_form_check(sample(FieldExpr::single(ModeSpec::torus(n, n), true)));
        ratio.push_back(std::sqrt(r.integral) / r.comparison);
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    EXPECT_LE(*hi / *lo, 1.15);
    EXPECT_NEAR(ratio[0], 0.09388, 0.001);
}

TEST(SweepCsv, Header) {
    const auto gf = sample(FieldExpr::disc_paraboloid());
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(gf, levels(64), {0.5, 2.0}));
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "c,beta,L_sasaki(r=0.5),L_sasaki(r=2),leray,regular");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 65);
}

// Property: B(1, f) >= sum_A m_A up to quadrature error
TEST(Property, BanachDominatesExtrema) {
    const auto t = SurfaceModel::flat_torus();
    const auto s = SurfaceModel::round_sphere();
    for (const auto& f : {FieldExpr::modes(t, {{1.0, ModeSpec::torus(2, 1)}, {0.5, ModeSpec::torus(1, 2, TorusBranch::CosCos)}}, true),
                          FieldExpr::modes(s, {{1.0, ModeSpec::zonal(4)}, {0.7, ModeSpec::sphere(3, 2)}}, true),
                          FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(2.0, 1.0), 2, 3), true),
                          FieldExpr::single(ModeSpec::zonal(7), true)}) {
        const auto gf = sample(f);
        const double b = banach_indicatrix(gf, Weight::one()).value;
        EXPECT_GE(b, extrema_moments(extract_domains(gf), 1) * 0.98) << f.label();
    }
}

// Property: beta at fixed regular levels survives doubling the resolution
TEST(Property, BetaRefinementStable) {
    const auto t = SurfaceModel::flat_torus();
    const auto f = FieldExpr::modes(t, {{1.0, ModeSpec::torus(2, 1)}, {0.6, ModeSpec::torus(1, 3, TorusBranch::CosSin)}}, true);
    const auto coarse = sample(f, Resolution{96, 96});
    const auto fine = sample(f, Resolution{192, 192});
    const ContourLattice lattice(coarse);
    int checked = 0;
    for (int k = 1; k <= 16; ++k) {
        const double c = lattice.min_value() + (lattice.max_value() - lattice.min_value()) * k / 17.0;
        const auto a = extract_level(coarse, c);
        const auto b = extract_level(fine, c);
        if (!is_regular(coarse, a) || !is_regular(fine, b)) continue;
        EXPECT_EQ(a.beta(), b.beta()) << "c=" << c;
        ++checked;
    }
    EXPECT_GE(checked, 12);
}

// Property: every contour is a closed loop with identical endpoints
TEST(Property, ContoursAreClosed) {
    const auto s = SurfaceModel::round_sphere();
    for (const auto& f : {FieldExpr::single(ModeSpec::torus(3, 2), true), FieldExpr::modes(s, {{1.0, ModeSpec::sphere(5, 3)}, {0.4, ModeSpec::zonal(2)}}, true),
                          FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(pi, pi), 3, 3), true),
                          FieldExpr::disc_paraboloid()}) {
        const auto gf = sample(f);
        const ContourLattice lattice(gf);
        for (int k = 1; k < 10; ++k) {
            const double c = lattice.min_value() + (lattice.max_value() - lattice.min_value()) * k / 10.0;
            for (const auto& loop : extract_level(gf, c).loops) {
                ASSERT_TRUE(loop.closed) << f.label() << " c=" << c;
                ASSERT_GE(loop.points.size(), 3u);
                EXPECT_EQ(loop.points.front().x, loop.points.back().x);
                EXPECT_EQ(loop.points.front().y, loop.points.back().y);
            }
        }
    }
}

// Property: splitting the sweep at 0 leaves B(1, f) unchanged
TEST(Property, RangeAdditivity) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(2, 3, TorusBranch::CosSin), true));
    const ContourLattice lattice(gf);
    SweepSpec lo = levels(256), hi = levels(256);
    lo.c_min = lattice.min_value();
    lo.c_max = 0.0;
    hi.c_min = 0.0;
    hi.c_max = lattice.max_value();
    const double whole = banach_indicatrix(gf, Weight::one(), levels(512)).value;
    const double parts = banach_indicatrix(gf, Weight::one(), lo).value + banach_indicatrix(gf, Weight::one(), hi).value;
    EXPECT_NEAR(parts, whole, 0.01 * whole);
}
