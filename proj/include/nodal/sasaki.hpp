#pragma once

// Lengths of level-curve lifts (curve + unit normal) to the unit circle
// bundle under the Sasaki family rho_r = r^2 g (+) g, systoles of the flat
// models, and the quadrature right-hand sides built on them.
//
// Along a level curve with unit tangent w the lift has speed
//   sqrt(1 + r^2 (H_f w, w)^2 / |grad f|^2).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nodal/errors.hpp"
#include "nodal/grid.hpp"
#include "nodal/levelsets.hpp"

namespace nodal {

/// Systole of (SM, rho_r): fiber length 2 pi r on simply connected flat
/// domains; on the flat torus the shorter of the fiber and a base loop.
inline double systole(const SurfaceModel& model, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("Sasaki parameter r must be positive");
    switch (model.kind()) {
    case SurfaceKind::EuclideanRectangle:
    case SurfaceKind::UnitDisc: return two_pi * r;
    case SurfaceKind::FlatTorus: return std::min(two_pi, two_pi * r);
    case SurfaceKind::RoundSphere: break;
    }
    throw UnsupportedModel("systole of the unit tangent bundle of the round sphere is not computed");
}

/// Speed of the lifted curve for one segment sample.
inline double lift_speed(const SegmentSample& s, double r) {
    const double hww = s.jet.hess.quadratic(s.tangent);
    const double g = s.jet.grad_norm;
    return std::sqrt(1.0 + r * r * hww * hww / (g * g));
}

namespace detail {

/// Angle of grad f in the orthonormal frame at p; empty at frame
/// singularities and critical points.
inline std::optional<double> normal_angle(const GridField& gf, ChartPoint p) {
    try {
        const FieldJet j = field_jet(gf.source(), p);
        if (j.grad_norm == 0.0) return std::nullopt;
        return std::atan2(j.grad[1], j.grad[0]);
    } catch (const CoordinateSingularity&) {
        return std::nullopt;
    }
}

/// Rotation of the orthonormal frame relative to parallel transport along a
/// segment (connection form: d phi on the polar disc, cos theta d phi on the sphere).
inline double frame_rotation(const SurfaceModel& model, ChartPoint p, ChartPoint q, ChartPoint mid) {
    switch (model.kind()) {
    case SurfaceKind::UnitDisc: return wrap_difference(q.y - p.y, two_pi);
    case SurfaceKind::RoundSphere: return std::cos(mid.x) * wrap_difference(q.y - p.y, two_pi);
    default: return 0.0;
    }
}

} // namespace detail

/// rho_r-length of the lift of a contour: per segment
/// sqrt(dt^2 + r^2 dtheta^2), where dtheta is the turning of the unit normal
/// between the segment ends (exact normals, frame rotation removed). This is
/// the integrand sqrt(1 + r^2 (H w, w)^2 / |grad f|^2) dt with the turning
/// integrated exactly, so turning concentrated near saddles is not lost.
/// Segments touching a frame singularity fall back to the midpoint integrand.
/// Throws NearCriticalSegment when a segment midpoint has |grad f| below the
/// grid's regularity floor.
inline double lift_length(const Polyline& contour, const GridField& gf, double r) {
    if (r < 0.0) throw std::invalid_argument("Sasaki parameter r must be nonnegative");
    const double floor = grad_floor(gf);
    const auto& pts = contour.points;
    std::vector<std::optional<double>> angle(pts.size());
    if (r > 0.0)
        for (std::size_t k = 0; k < pts.size(); ++k) angle[k] = detail::normal_angle(gf, pts[k]);
    double total = 0.0;
    for_each_segment(gf, contour, [&](std::size_t k, const SegmentSample& s) {
        if (s.jet.grad_norm < floor) throw NearCriticalSegment(k, s.jet.grad_norm, floor);
        if (r == 0.0) {
            total += s.length;
        } else if (angle[k] && angle[k + 1]) {
            const double turn = wrap_difference(*angle[k + 1] - *angle[k], two_pi) +
                                detail::frame_rotation(gf.model(), pts[k], pts[k + 1], s.mid);
            total += std::hypot(s.length, r * turn);
        } else {
            total += s.length * lift_speed(s, r);
        }
    });
    return total;
}

/// Whether a closed contour bounds a disc: always on plane domains; on the
/// torus when its unwrapped chart displacement vanishes.
inline bool contractible(const Polyline& contour, const GridField& gf) {
    const SurfaceModel& model = gf.model();
    if (model.kind() != SurfaceKind::FlatTorus) return true;
    double du = 0.0, dv = 0.0;
    const auto& pts = contour.points;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        du += wrap_difference(pts[k + 1].x - pts[k].x, two_pi);
        dv += wrap_difference(pts[k + 1].y - pts[k].y, two_pi);
    }
    return std::abs(du) < pi && std::abs(dv) < pi;
}

/// Rotation index of the unit normal along a closed contour on a flat model;
/// empty when some vertex sits on a frame singularity.
inline std::optional<int> rotation_index(const Polyline& contour, const GridField& gf) {
    if (!gf.model().flat()) throw UnsupportedModel("rotation index is computed on flat models");
    const auto& pts = contour.points;
    if (pts.empty()) return 0;
    double total = 0.0;
    const auto first = detail::normal_angle(gf, pts.front());
    if (!first) return std::nullopt;
    double prev = *first;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const auto next = detail::normal_angle(gf, pts[k + 1]);
        if (!next) return std::nullopt;
        total += wrap_difference(*next - prev, two_pi) + detail::frame_rotation(gf.model(), pts[k], pts[k + 1], pts[k]);
        prev = *next;
    }
    return static_cast<int>(std::lround(total / two_pi));
}

/// A closed contractible contour whose normal does not turn once around is
/// smaller than the lattice can resolve (typically a loop just below an
/// extremum). Such levels are treated like irregular ones.
inline bool resolved(const LevelContours& level, const GridField& gf) {
    if (!gf.model().flat()) return true;
    for (const auto& line : level.loops) {
        if (!line.closed || !contractible(line, gf)) continue;
        const auto idx = rotation_index(line, gf);
        if (idx && std::abs(*idx) != 1) return false;
    }
    return true;
}

/// Total turning proxy: integral of |(H w, w)| / |grad f| along the contour
/// (the r -> infinity slope of lift_length).
inline double turning_integral(const Polyline& contour, const GridField& gf) {
    double total = 0.0;
    for_each_segment(gf, contour, [&](std::size_t, const SegmentSample& s) {
        total += s.length * std::abs(s.jet.hess.quadratic(s.tangent)) / s.jet.grad_norm;
    });
    return total;
}

/// L(c): sum of lift lengths over the components of a level.
inline double level_L(const GridField& gf, const LevelContours& level, double r) {
    double total = 0.0;
    for (const auto& line : level.loops) total += lift_length(line, gf, r);
    return total;
}

inline double level_L(const GridField& gf, double c, double r) { return level_L(gf, extract_level(gf, c), r); }

/// Weight function u applied to level values.
class Weight {
public:
    enum class Kind { Constant, Abs, Square, Table };

    static Weight one() { return constant(1.0); }
    static Weight zero() { return constant(0.0); }
    static Weight constant(double k) { return Weight(Kind::Constant, k, {}); }
    static Weight abs() { return Weight(Kind::Abs, 0.0, {}); }
    static Weight square() { return Weight(Kind::Square, 0.0, {}); }
    /// Piecewise-linear through (t, u) knots sorted by t; constant beyond the ends.
    static Weight table(std::vector<std::pair<double, double>> knots) {
        if (knots.empty()) throw std::invalid_argument("weight table needs at least one knot");
        for (std::size_t k = 1; k < knots.size(); ++k)
            if (!(knots[k].first > knots[k - 1].first))
                throw std::invalid_argument("weight table knots must be strictly increasing");
        return Weight(Kind::Table, 0.0, std::move(knots));
    }

    Kind kind() const { return kind_; }

    double operator()(double t) const {
        switch (kind_) {
        case Kind::Constant: return k_;
        case Kind::Abs: return std::abs(t);
        case Kind::Square: return t * t;
        case Kind::Table: {
            if (t <= knots_.front().first) return knots_.front().second;
            if (t >= knots_.back().first) return knots_.back().second;
            auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                       [](double v, const auto& kn) { return v < kn.first; });
            const auto& [t1, u1] = *it;
            const auto& [t0, u0] = *(it - 1);
            return u0 + (u1 - u0) * (t - t0) / (t1 - t0);
        }
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind_) {
        case Kind::Constant: return k_ == 1.0 ? "one" : "const(" + format_real(k_) + ")";
        case Kind::Abs: return "abs";
        case Kind::Square: return "square";
        case Kind::Table: return "table";
        }
        return "?";
    }

private:
    Weight(Kind kind, double k, std::vector<std::pair<double, double>> knots)
        : kind_(kind), k_(k), knots_(std::move(knots)) {}

    Kind kind_;
    double k_;
    std::vector<std::pair<double, double>> knots_;
};

/// ||u o f|| in L^2(sigma).
inline double composed_l2(const GridField& gf, const Weight& u) {
    return std::sqrt(integrate(gf, [&](const NodeRecord& n) {
        const double v = u(n.f);
        return v * v;
    }));
}

/// kappa(r)^-1 ||u o f|| ( integral |grad f|^2 + r^2 |H_f|^2 )^(1/2); flat models only.
inline double co_area_bound(const GridField& gf, const Weight& u, double r) {
    if (!gf.model().flat()) throw UnsupportedModel("co-area bound needs a flat model (systole known)");
    const double kappa = systole(gf.model(), r);
    const double energy = integrate(gf, [r](const NodeRecord& n) {
        return n.grad_norm * n.grad_norm + r * r * n.hess_norm * n.hess_norm;
    });
    return composed_l2(gf, u) * std::sqrt(energy) / kappa;
}

/// (1 / 2 pi) sqrt(Area) ||Delta f||: the r -> infinity limit of the
/// co-area route on a plane domain after integrating the Hessian by parts.
inline double plane_abp_bound(const GridField& gf) {
    if (!gf.model().simply_connected_flat()) throw UnsupportedModel("plane ABP bound needs a plane domain");
    return std::sqrt(gf.model().total_area()) * laplacian_l2(gf) / two_pi;
}

struct GrBound {
    double lhs = 0.0; ///< max |f|
    double rhs = 0.0; ///< (1 / 2 pi) integral |H_f| d sigma
};

/// Both sides of max|f| <= (1/2pi) integral |H_f| on a plane domain.
inline GrBound gr_bound(const GridField& gf) {
    if (!gf.model().simply_connected_flat())
        throw UnsupportedModel("the L1-Hessian sup bound needs a plane domain (rectangle or disc)");
    const ContourLattice lattice(gf);
    GrBound b;
    b.lhs = std::max(std::abs(lattice.min_value()), std::abs(lattice.max_value()));
    b.rhs = integrate(gf, [](const NodeRecord& n) { return n.hess_norm; }) / two_pi;
    return b;
}

} // namespace nodal
