#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "nodal/grid.hpp"

using namespace nodal;

TEST(Sample, NormalizedTorusPeak) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(1, 1), true), Resolution{64, 64});
    // cell centers sit at (i + 1/2) * 2pi/64; (pi/2, pi/2) is the corner shared by cells 15 and 16
    const double peak = eval(gf.source(), {pi / 2, pi / 2});
    EXPECT_NEAR(peak, 1.0 / pi, 1e-3);
    EXPECT_NEAR(gf.node(15, 15).f, 1.0 / pi, 1e-3);
}

TEST(Sample, ZeroExpression) {
    const auto gf = sample(FieldExpr::modes(SurfaceModel::flat_torus(), {}), Resolution{32, 32});
    for (const auto& n : gf.nodes()) EXPECT_EQ(n.f, 0.0);
    EXPECT_EQ(gf.max_abs(), 0.0);
    EXPECT_EQ(gradient_l2(gf), 0.0);
}

TEST(Sample, WeightsSumToArea) {
    const auto disc = sample(FieldExpr::disc_paraboloid(), Resolution{128, 128});
    EXPECT_NEAR(total_weight(disc), pi, 1e-6 * pi);
    const auto sphere = sample(FieldExpr::single(ModeSpec::zonal(3)), Resolution{40, 64});
    EXPECT_NEAR(total_weight(sphere), 4 * pi, 1e-6 * 4 * pi);
    const auto torus = sample(FieldExpr::single(ModeSpec::torus(1, 2)), Resolution{48, 80});
    EXPECT_NEAR(total_weight(torus), 4 * pi * pi, 1e-9);
    const auto rect = sample(FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(2, 3), 1, 1)), Resolution{20, 30});
    EXPECT_NEAR(total_weight(rect), 6.0, 1e-12);
}

TEST(Sample, ResolutionTooSmall) {
    EXPECT_THROW(sample(FieldExpr::single(ModeSpec::torus(1, 1)), Resolution{15, 64}), ConfigError);
    EXPECT_THROW(sample(FieldExpr::single(ModeSpec::torus(1, 1)), Resolution{64, 8}), ConfigError);
}

TEST(Sample, SphereCollapsedPoles) {
    const auto gf = sample(FieldExpr::single(ModeSpec::zonal(4), true), Resolution{64, 64});
    ASSERT_TRUE(gf.cap_lo() && gf.cap_hi());
    EXPECT_LT(gf.cap_lo()->coordinate, gf.x(0));
    EXPECT_GT(gf.cap_hi()->coordinate, gf.x(gf.nx() - 1));
    // the zonal field is even about the equator for even l
    EXPECT_NEAR(gf.cap_lo()->f, gf.cap_hi()->f, 1e-12);
}

TEST(DefaultResolution, GrowsWithIndex) {
    const auto r1 = default_resolution(FieldExpr::single(ModeSpec::torus(1, 1)));
    EXPECT_GE(r1.nx, 64);
    const auto r6 = default_resolution(FieldExpr::single(ModeSpec::torus(6, 6)));
    EXPECT_GE(r6.nx, 16 * 2 * 6); // 16 cells per nodal half-wavelength
    const auto z = default_resolution(FieldExpr::single(ModeSpec::zonal(20)));
    EXPECT_GE(z.nx, 16 * 20);
}

TEST(Norms, NormalizedFieldHasUnitNorm) {
    for (const auto& f : {FieldExpr::single(ModeSpec::torus(2, 3), true), FieldExpr::single(ModeSpec::zonal(6), true),
                          FieldExpr::single(ModeSpec::sphere(4, -3), true),
                          FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(pi, pi), 2, 5), true),
                          FieldExpr::disc_paraboloid(true)}) {
        EXPECT_NEAR(l2_norm(sample(f)), 1.0, 1e-6) << f.label();
    }
}

TEST(Norms, UnnormalizedTorusProduct) {
    EXPECT_NEAR(l2_norm(sample(FieldExpr::single(ModeSpec::torus(1, 1)))), pi, 1e-4);
}

TEST(Norms, LaplacianOfPureModes) {
    for (const auto& f : {FieldExpr::single(ModeSpec::torus(3, 3), true), FieldExpr::single(ModeSpec::zonal(9), true),
                          FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(2, 1), 3, 2), true)}) {
        const double lam = *f.eigenvalue();
        EXPECT_NEAR(laplacian_l2(sample(f)), lam, 1e-6 * lam) << f.label();
    }
}

TEST(Norms, ParaboloidLaplacian) {
    EXPECT_NEAR(laplacian_l2(sample(FieldExpr::disc_paraboloid())), 4 * std::sqrt(pi), 1e-4);
}

TEST(Norms, ParsevalForCombinations) {
    // c1 f1 + c2 f2 with orthonormal modes and c1^2 + c2^2 = 1
    const double c1 = 0.6, c2 = 0.8;
    const auto t = SurfaceModel::flat_torus();
    const auto f1 = ModeSpec::torus(1, 2);
    const auto f2 = ModeSpec::torus(3, 1, TorusBranch::CosCos);
    // unnormalized torus products have norm pi
    const auto expr = FieldExpr::modes(t, {{c1 / pi, f1}, {c2 / pi, f2}});
    const auto gf = sample(expr, Resolution{96, 96});
    EXPECT_NEAR(l2_norm(gf), 1.0, 1e-9);
    const double l1 = f1.eigenvalue(), l2 = f2.eigenvalue();
    EXPECT_NEAR(laplacian_l2(gf), std::sqrt(c1 * c1 * l1 * l1 + c2 * c2 * l2 * l2), 1e-4);
    EXPECT_NEAR(gradient_l2(gf), std::sqrt(c1 * c1 * l1 + c2 * c2 * l2), 1e-3);
}

TEST(Norms, GradientOfPureMode) {
    EXPECT_NEAR(gradient_l2(sample(FieldExpr::single(ModeSpec::torus(1, 1), true))), std::sqrt(2.0), 1e-3);
    for (int l : {3, 8, 15}) {
        const auto gf = sample(FieldExpr::single(ModeSpec::zonal(l), true));
        EXPECT_NEAR(gradient_l2(gf), std::sqrt(l * (l + 1.0)), 1e-4 * std::sqrt(l * (l + 1.0)));
    }
}

TEST(Norms, LpSupportedOrders) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(1, 1), true), Resolution{64, 64});
    EXPECT_NO_THROW(lp_norm(gf, 1));
    EXPECT_NO_THROW(lp_norm(gf, 8));
    EXPECT_THROW(lp_norm(gf, 3), std::invalid_argument);
    // closed form for (sin x sin y) / pi: integral |f|^6 = (5/16)^2 * 4 pi^2 / pi^6
    const double l6 = std::pow(25.0 / 256.0 * 4 * pi * pi / std::pow(pi, 6), 1.0 / 6.0);
    EXPECT_NEAR(lp_norm(gf, 6), l6, 1e-9);
}

// Property: ||grad f||^2 <= ||f|| ||Delta f|| (1 + 1e-3) for normalized fields
TEST(Property, VariationalInequality) {
    const auto t = SurfaceModel::flat_torus();
    const auto s = SurfaceModel::round_sphere();
    for (const auto& f :
         {FieldExpr::modes(t, {{1.0, ModeSpec::torus(1, 1)}, {0.3, ModeSpec::torus(4, 2, TorusBranch::SinCos)}}, true),
          FieldExpr::modes(s, {{1.0, ModeSpec::zonal(2)}, {-2.0, ModeSpec::sphere(7, 3)}}, true),
          FieldExpr::disc_paraboloid(true), FieldExpr::single(ModeSpec::zonal(12), true)}) {
        const auto gf = sample(f);
        const double g = gradient_l2(gf);
        EXPECT_LE(g * g, l2_norm(gf) * laplacian_l2(gf) * (1 + 1e-3)) << f.label();
    }
}

// Property: doubling the resolution moves l2_norm by less than 0.1%
TEST(Property, RefinementStability) {
    for (const auto& f : {FieldExpr::single(ModeSpec::torus(3, 2)), FieldExpr::single(ModeSpec::sphere(4, 2)),
                          FieldExpr::single(ModeSpec::rectangle(SurfaceModel::rectangle(1, 2), 2, 4)),
                          FieldExpr::disc_paraboloid()}) {
        const double a = l2_norm(sample(f, Resolution{64, 64}));
        const double b = l2_norm(sample(f, Resolution{128, 128}));
        EXPECT_LT(std::abs(a - b), 1e-3 * b) << f.label();
    }
}

// Property: Lp norms on the probability measure sigma / Area increase with p
TEST(Property, LpMonotoneOnProbabilityMeasure) {
    for (const auto& f : {FieldExpr::single(ModeSpec::zonal(5), true), FieldExpr::single(ModeSpec::torus(2, 1), true),
                          FieldExpr::disc_paraboloid(true)}) {
        const auto gf = sample(f);
        const double area = f.model().total_area();
        double prev = 0.0;
        for (int p : {1, 2, 6, 8}) {
            const double v = lp_norm(gf, p) / std::pow(area, 1.0 / p);
            EXPECT_GE(v, prev) << f.label() << " p=" << p;
            prev = v;
        }
    }
}

TEST(GridCsv, HeaderAndRows) {
    const auto gf = sample(FieldExpr::single(ModeSpec::torus(1, 1)), Resolution{16, 16});
    std::ostringstream os;
    write_grid_csv(os, gf);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "x,y,f,grad_norm,hess_norm,weight");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 256);
}
