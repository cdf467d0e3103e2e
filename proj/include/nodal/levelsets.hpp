#pragma once

// Level curves f = c by marching squares on the sample lattice, stitched into
// closed polylines, and the per-segment geometry used by the Leray and
// Sasaki lengths.
//
// The lattice is the grid of cell centers extended by the chart boundary:
// Dirichlet edges (rectangle sides, disc rim) carry the analytic boundary
// values, sphere poles and the disc center are rows of identical values.
// Ambiguous (saddle) squares are resolved by the analytic value at the
// square center. Interpolated crossings are then projected onto the exact
// level set of the analytic field.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nodal/csv.hpp"
#include "nodal/errors.hpp"
#include "nodal/grid.hpp"

namespace nodal {

struct Polyline {
    std::vector<ChartPoint> points; ///< closed loops repeat the first point at the end
    bool closed = false;
};

struct LevelContours {
    double c = 0.0;
    std::vector<Polyline> loops;

    int beta() const { return static_cast<int>(loops.size()); }
};

class ContourLattice {
public:
    explicit ContourLattice(const GridField& gf) : gf_(gf) {
        const SurfaceModel& model = gf.model();
        wrap_u_ = model.periodic(0);
        wrap_v_ = model.periodic(1);
        period_u_ = model.extent(0);
        period_v_ = model.extent(1);
        const FieldExpr& src = gf.source();

        const bool pad_u = !wrap_u_;
        const bool pad_v = !wrap_v_;
        if (pad_u) u_.push_back(0.0);
        for (double x : gf.xs()) u_.push_back(x);
        if (pad_u) u_.push_back(model.extent(0));
        if (pad_v) v_.push_back(0.0);
        for (double y : gf.ys()) v_.push_back(y);
        if (pad_v) v_.push_back(model.extent(1));

        rows_ = static_cast<int>(u_.size());
        cols_ = static_cast<int>(v_.size());
        values_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
        const int ou = pad_u ? 1 : 0;
        const int ov = pad_v ? 1 : 0;
        for (int r = 0; r < rows_; ++r) {
            for (int s = 0; s < cols_; ++s) {
                const int i = r - ou;
                const int j = s - ov;
                double val = 0.0;
                if (i >= 0 && i < gf.nx() && j >= 0 && j < gf.ny()) {
                    val = gf.node(i, j).f;
                } else if (i < 0 && gf.cap_lo()) {
                    val = gf.cap_lo()->f;
                } else if (i >= gf.nx() && gf.cap_hi()) {
                    val = gf.cap_hi()->f;
                } else {
                    val = eval(src, {u_[static_cast<std::size_t>(r)], v_[static_cast<std::size_t>(s)]});
                }
                values_[static_cast<std::size_t>(r) * cols_ + s] = val;
            }
        }
        min_ = *std::min_element(values_.begin(), values_.end());
        max_ = *std::max_element(values_.begin(), values_.end());
    }

    double min_value() const { return min_; }
    double max_value() const { return max_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double value(int r, int s) const { return values_[static_cast<std::size_t>(r) * cols_ + s]; }

    LevelContours extract(double c) const {
        LevelContours out;
        out.c = c;
        if (!(c > min_ && c < max_)) return out;

        std::unordered_map<std::uint64_t, int> point_of_edge;
        std::vector<ChartPoint> points;
        std::vector<std::array<int, 2>> segments;

        const auto crossing = [&](std::uint64_t edge, int r0, int s0, int r1, int s1) {
            auto it = point_of_edge.find(edge);
            if (it != point_of_edge.end()) return it->second;
            const double va = value(r0, s0);
            const double vb = value(r1, s1);
            const double t = std::clamp((c - va) / (vb - va), 0.0, 1.0);
            double ua = u_[static_cast<std::size_t>(r0)];
            double ub = u_[static_cast<std::size_t>(r1)];
            double wa = v_[static_cast<std::size_t>(s0)];
            double wb = v_[static_cast<std::size_t>(s1)];
            if (r1 < r0) ub += period_u_;
            if (s1 < s0) wb += period_v_;
            ChartPoint p{ua + t * (ub - ua), wa + t * (wb - wa)};
            if (wrap_u_ && p.x >= period_u_) p.x -= period_u_;
            if (wrap_v_ && p.y >= period_v_) p.y -= period_v_;
            p = project(p, c);
            const int id = static_cast<int>(points.size());
            points.push_back(p);
            point_of_edge.emplace(edge, id);
            return id;
        };

        const int square_rows = wrap_u_ ? rows_ : rows_ - 1;
        const int square_cols = wrap_v_ ? cols_ : cols_ - 1;
        const auto above = [c](double v) { return v > c; };
        for (int r = 0; r < square_rows; ++r) {
            const int r1 = (r + 1) % rows_;
            for (int s = 0; s < square_cols; ++s) {
                const int s1 = (s + 1) % cols_;
                const bool a = above(value(r, s));
                const bool b = above(value(r1, s));
                const bool cc = above(value(r1, s1));
                const bool d = above(value(r, s1));
                if (a == b && b == cc && cc == d) continue;

                // edges: e0 = a-b, e1 = b-c, e2 = d-c, e3 = a-d
                std::array<int, 4> e{-1, -1, -1, -1};
                if (a != b) e[0] = crossing(edge_id(r, s, 0), r, s, r1, s);
                if (b != cc) e[1] = crossing(edge_id(r1, s, 1), r1, s, r1, s1);
                if (d != cc) e[2] = crossing(edge_id(r, s1, 0), r, s1, r1, s1);
                if (a != d) e[3] = crossing(edge_id(r, s, 1), r, s, r, s1);

                const int crossings = (e[0] >= 0) + (e[1] >= 0) + (e[2] >= 0) + (e[3] >= 0);
                if (crossings == 2) {
                    std::array<int, 2> seg{};
                    int k = 0;
                    for (int q : e)
                        if (q >= 0) seg[static_cast<std::size_t>(k++)] = q;
                    segments.push_back(seg);
                } else {
                    const bool center_above = above(center_value(r, s));
                    if (center_above == a) {
                        segments.push_back({e[0], e[1]});
                        segments.push_back({e[2], e[3]});
                    } else {
                        segments.push_back({e[3], e[0]});
                        segments.push_back({e[1], e[2]});
                    }
                }
            }
        }
        out.loops = stitch(points, segments);
        return out;
    }

private:
    std::uint64_t edge_id(int r, int s, int axis) const {
        return (static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(cols_) + static_cast<std::uint64_t>(s)) * 2u +
               static_cast<std::uint64_t>(axis);
    }

    /// Moves an interpolated crossing onto f = c by Newton steps along the
    /// gradient, staying within half a lattice spacing of where it started.
    /// Points at frame singularities or boundary padding are left alone.
    ChartPoint project(ChartPoint p0, double c) const {
        const SurfaceModel& model = gf_.model();
        const double lim_u = 0.5 * period_u_ / rows_;
        const double lim_v = 0.5 * period_v_ / cols_;
        ChartPoint p = p0;
        ChartJet j = gf_.source().chart_jet(p);
        double resid = std::abs(j.f - c);
        for (int it = 0; it < 4 && resid > 1e-14 * gf_.max_abs(); ++it) {
            const auto h = model.scale_factors(p);
            if (h[0] < 1e-6 || h[1] < 1e-6) break;
            const double gx = j.fx / (h[0] * h[0]);
            const double gy = j.fy / (h[1] * h[1]);
            const double g2 = j.fx * gx + j.fy * gy;
            if (!(g2 > 0.0)) break;
            const double step = (j.f - c) / g2;
            ChartPoint q{std::clamp(p.x - step * gx, p0.x - lim_u, p0.x + lim_u),
                         std::clamp(p.y - step * gy, p0.y - lim_v, p0.y + lim_v)};
            if (!wrap_u_) q.x = std::clamp(q.x, 0.0, period_u_);
            if (!wrap_v_) q.y = std::clamp(q.y, 0.0, period_v_);
            const ChartJet jq = gf_.source().chart_jet(q);
            const double rq = std::abs(jq.f - c);
            if (!(rq < resid)) break;
            p = q;
            j = jq;
            resid = rq;
        }
        if (wrap_u_) p.x -= period_u_ * std::floor(p.x / period_u_);
        if (wrap_v_) p.y -= period_v_ * std::floor(p.y / period_v_);
        return p;
    }

    double center_value(int r, int s) const {
        const int r1 = (r + 1) % rows_;
        const int s1 = (s + 1) % cols_;
        double ub = u_[static_cast<std::size_t>(r1)];
        double vb = v_[static_cast<std::size_t>(s1)];
        if (r1 < r) ub += period_u_;
        if (s1 < s) vb += period_v_;
        const double um = 0.5 * (u_[static_cast<std::size_t>(r)] + ub);
        const double vm = 0.5 * (v_[static_cast<std::size_t>(s)] + vb);
        return eval(gf_.source(), {um, vm});
    }

    static std::vector<Polyline> stitch(const std::vector<ChartPoint>& points,
                                        const std::vector<std::array<int, 2>>& segments) {
        std::vector<std::array<int, 2>> incident(points.size(), {-1, -1});
        for (int k = 0; k < static_cast<int>(segments.size()); ++k) {
            for (int end : segments[static_cast<std::size_t>(k)]) {
                auto& slot = incident[static_cast<std::size_t>(end)];
                (slot[0] < 0 ? slot[0] : slot[1]) = k;
            }
        }
        std::vector<char> used(segments.size(), 0);
        std::vector<Polyline> loops;

        const auto walk = [&](int start_point, int start_seg) {
            Polyline line;
            int p = start_point;
            int seg = start_seg;
            line.points.push_back(points[static_cast<std::size_t>(p)]);
            while (seg >= 0 && !used[static_cast<std::size_t>(seg)]) {
                used[static_cast<std::size_t>(seg)] = 1;
                const auto& sg = segments[static_cast<std::size_t>(seg)];
                p = sg[0] == p ? sg[1] : sg[0];
                line.points.push_back(points[static_cast<std::size_t>(p)]);
                const auto& inc = incident[static_cast<std::size_t>(p)];
                seg = inc[0] == seg ? inc[1] : inc[0];
            }
            line.closed = p == start_point && line.points.size() > 2;
            if (line.closed) line.points.back() = line.points.front();
            return line;
        };

        // open chains first (only possible where a contour leaves the lattice)
        for (int p = 0; p < static_cast<int>(points.size()); ++p) {
            const auto& inc = incident[static_cast<std::size_t>(p)];
            if (inc[1] < 0 && inc[0] >= 0 && !used[static_cast<std::size_t>(inc[0])]) loops.push_back(walk(p, inc[0]));
        }
        for (int k = 0; k < static_cast<int>(segments.size()); ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            loops.push_back(walk(segments[static_cast<std::size_t>(k)][0], k));
        }
        return loops;
    }

    const GridField& gf_;
    std::vector<double> u_;
    std::vector<double> v_;
    std::vector<double> values_;
    int rows_ = 0;
    int cols_ = 0;
    bool wrap_u_ = false;
    bool wrap_v_ = false;
    double period_u_ = 0.0;
    double period_v_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
};

/// Contours of f = c. Levels outside (min f, max f) give an empty set.
inline LevelContours extract_level(const GridField& gf, double c) { return ContourLattice(gf).extract(c); }

/// Geometry of one contour segment, sampled at its chart midpoint.
struct SegmentSample {
    double length = 0.0;                ///< Riemannian length
    std::array<double, 2> tangent{};    ///< unit tangent, orthonormal frame
    ChartPoint mid;
    FieldJet jet;
};

inline SegmentSample segment_sample(const GridField& gf, ChartPoint p, ChartPoint q) {
    const SurfaceModel& model = gf.model();
    double d0 = q.x - p.x;
    double d1 = q.y - p.y;
    if (model.periodic(0)) d0 = wrap_difference(d0, model.extent(0));
    if (model.periodic(1)) d1 = wrap_difference(d1, model.extent(1));
    SegmentSample s;
    s.mid = {p.x + 0.5 * d0, p.y + 0.5 * d1};
    const auto h = model.scale_factors(s.mid);
    const double a = h[0] * d0;
    const double b = h[1] * d1;
    s.length = std::hypot(a, b);
    if (s.length > 0.0) s.tangent = {a / s.length, b / s.length};
    s.jet = field_jet(gf.source(), s.mid);
    return s;
}

template <class Fn>
void for_each_segment(const GridField& gf, const Polyline& line, Fn&& fn) {
    for (std::size_t k = 0; k + 1 < line.points.size(); ++k) fn(k, segment_sample(gf, line.points[k], line.points[k + 1]));
}

/// Threshold on |grad f| below which a level counts as critical.
inline double grad_floor(const GridField& gf) {
    if (const auto lambda = gf.lambda_hint()) return 1e-3 * gf.max_abs() * std::sqrt(*lambda);
    return 1e-6 * gf.max_abs();
}

/// min |grad f| over the segment midpoints of a level (+inf for an empty level).
inline double min_gradient(const GridField& gf, const LevelContours& level) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& line : level.loops)
        for_each_segment(gf, line, [&](std::size_t, const SegmentSample& s) { m = std::min(m, s.jet.grad_norm); });
    return m;
}

inline bool is_regular(const GridField& gf, const LevelContours& level) {
    return min_gradient(gf, level) >= grad_floor(gf);
}

/// Riemannian length of a polyline.
inline double riemannian_length(const GridField& gf, const Polyline& line) {
    double total = 0.0;
    for_each_segment(gf, line, [&](std::size_t, const SegmentSample& s) { total += s.length; });
    return total;
}

/// Leray length sum (segment length / |grad f| at the segment midpoint) of a regular level.
inline double leray_length(const GridField& gf, const LevelContours& level) {
    if (!is_regular(gf, level)) throw DegenerateField("Leray length requested on an irregular level");
    double total = 0.0;
    for (const auto& line : level.loops)
        for_each_segment(gf, line, [&](std::size_t, const SegmentSample& s) { total += s.length / s.jet.grad_norm; });
    return total;
}

inline double leray_length(const GridField& gf, double c) {
    const ContourLattice lattice(gf);
    if (!(c > lattice.min_value() && c < lattice.max_value()))
        throw std::domain_error("level " + format_real(c) + " outside the range of f");
    return leray_length(gf, lattice.extract(c));
}

/// Columns: loop, x, y (chart coordinates; closed loops repeat their first point).
inline void write_contour_csv(std::ostream& os, const LevelContours& level) {
    os << "loop,x,y\n";
    for (std::size_t k = 0; k < level.loops.size(); ++k)
        for (const auto& p : level.loops[k].points) os << k << ',' << format_real(p.x) << ',' << format_real(p.y) << '\n';
}

} // namespace nodal
