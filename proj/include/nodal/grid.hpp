#pragma once

// Structured sampling of a FieldExpr with quadrature weights and the
// topology (periodic axes, collapsed pole / center nodes) needed by the
// nodal-domain and level-set modules.
//
// Cells are centered on the sample nodes. Weights are cell areas:
//   torus, rectangle   uniform
//   sphere             Gauss-Legendre rows in cos(theta), uniform phi
//   disc               rho_i * d_rho * d_phi (exact annular-sector area)

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "nodal/csv.hpp"
#include "nodal/errors.hpp"
#include "nodal/numerics.hpp"
#include "nodal/surfaces.hpp"

namespace nodal {

struct Resolution {
    int nx = 0;
    int ny = 0;
};

struct NodeRecord {
    double f = 0.0;
    std::array<double, 2> grad{};
    double grad_norm = 0.0;
    Sym2 hess;
    double hess_norm = 0.0;
    double laplacian = 0.0;
    double weight = 0.0;
};

/// A collapsed node at one end of axis 0: a sphere pole or the disc center.
/// It carries topology (adjacent to every cell of the end row) and a value,
/// but no quadrature weight.
struct CollapsedNode {
    double coordinate = 0.0; ///< axis-0 coordinate of the point (0, pi)
    double f = 0.0;
};

/// At least 16 cells per nodal half-wavelength along each axis, never below 64.
inline Resolution default_resolution(const FieldExpr& expr) {
    int n0 = 0;
    int n1 = 0;
    for (const auto& t : expr.terms()) {
        const ModeSpec& m = t.mode;
        switch (expr.model().kind()) {
        case SurfaceKind::FlatTorus:
            n0 = std::max(n0, 32 * m.first());
            n1 = std::max(n1, 32 * m.second());
            break;
        case SurfaceKind::RoundSphere:
            n0 = std::max(n0, 16 * m.first());
            n1 = std::max(n1, 32 * std::abs(m.second()));
            break;
        case SurfaceKind::EuclideanRectangle:
            n0 = std::max(n0, 16 * m.first());
            n1 = std::max(n1, 16 * m.second());
            break;
        case SurfaceKind::UnitDisc: break;
        }
    }
    const int n = std::max({64, n0, n1});
    return {n, n};
}

class GridField {
public:
    const SurfaceModel& model() const { return model_; }
    /// The sampled expression, with normalization already folded into its coefficients.
    const FieldExpr& source() const { return source_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t cell_count() const { return nodes_.size(); }
    double x(int i) const { return xs_[static_cast<std::size_t>(i)]; }
    double y(int j) const { return ys_[static_cast<std::size_t>(j)]; }
    std::span<const double> xs() const { return xs_; }
    std::span<const double> ys() const { return ys_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(j); }
    const NodeRecord& node(int i, int j) const { return nodes_[index(i, j)]; }
    std::span<const NodeRecord> nodes() const { return nodes_; }
    ChartPoint point(int i, int j) const { return {x(i), y(j)}; }

    /// Spacing of axis-1 nodes (uniform on every model).
    double dy() const { return model_.extent(1) / ny_; }

    const std::optional<CollapsedNode>& cap_lo() const { return cap_lo_; }
    const std::optional<CollapsedNode>& cap_hi() const { return cap_hi_; }

    /// Eigenvalue when the source is a pure eigenfunction.
    std::optional<double> lambda_hint() const { return lambda_hint_; }

    /// max |f| over cells and collapsed nodes.
    double max_abs() const { return max_abs_; }

private:
    friend GridField sample(const FieldExpr&, std::optional<Resolution>);

    GridField(SurfaceModel model, FieldExpr source) : model_(model), source_(std::move(source)) {}

    SurfaceModel model_;
    FieldExpr source_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::vector<NodeRecord> nodes_;
    std::vector<double> row_weight_; // weight per row for a single cell
    std::optional<CollapsedNode> cap_lo_;
    std::optional<CollapsedNode> cap_hi_;
    std::optional<double> lambda_hint_;
    double max_abs_ = 0.0;
};

/// Weighted integral sum_i w_i g(node_i), pairwise-summed in row-major order.
template <class Fn>
double integrate(const GridField& gf, Fn&& g) {
    std::vector<double> terms;
    terms.reserve(gf.cell_count());
    for (const auto& n : gf.nodes()) terms.push_back(n.weight * g(n));
    return pairwise_sum(terms);
}

inline GridField sample(const FieldExpr& expr, std::optional<Resolution> resolution = std::nullopt) {
    const Resolution res = resolution.value_or(default_resolution(expr));
    if (res.nx < 16 || res.ny < 16)
        throw ConfigError("grid resolution must be at least 16 per axis (got " + std::to_string(res.nx) +
                          "x" + std::to_string(res.ny) + ")");
    const SurfaceModel& model = expr.model();
    GridField gf(model, expr);
    gf.nx_ = res.nx;
    gf.ny_ = res.ny;
    const auto nx = static_cast<std::size_t>(res.nx);
    const auto ny = static_cast<std::size_t>(res.ny);
    gf.xs_.resize(nx);
    gf.ys_.resize(ny);
    gf.row_weight_.resize(nx);

    const double d1 = model.extent(1) / res.ny;
    for (std::size_t j = 0; j < ny; ++j) gf.ys_[j] = (static_cast<double>(j) + 0.5) * d1;

    if (model.kind() == SurfaceKind::RoundSphere) {
        const GaussLegendre rule = gauss_legendre(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            gf.xs_[i] = std::acos(rule.nodes[i]);
            gf.row_weight_[i] = rule.weights[i] * d1;
        }
    } else {
        const double d0 = model.extent(0) / res.nx;
        for (std::size_t i = 0; i < nx; ++i) {
            gf.xs_[i] = (static_cast<double>(i) + 0.5) * d0;
            gf.row_weight_[i] = model.kind() == SurfaceKind::UnitDisc ? gf.xs_[i] * d0 * d1 : d0 * d1;
        }
    }

    gf.nodes_.resize(nx * ny);
    parallel_for(nx, [&](std::size_t i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const ChartPoint p{gf.xs_[i], gf.ys_[j]};
            const FieldJet jet = field_jet(expr, p);
            NodeRecord& n = gf.nodes_[i * ny + j];
            n.f = jet.f;
            n.grad = jet.grad;
            n.grad_norm = jet.grad_norm;
            n.hess = jet.hess;
            n.hess_norm = jet.hess_norm;
            n.laplacian = jet.laplacian;
            n.weight = gf.row_weight_[i];
        }
    });

    if (model.kind() == SurfaceKind::RoundSphere) {
        const auto ring_mean = [&](double theta) {
            std::vector<double> v(ny);
            for (std::size_t j = 0; j < ny; ++j) v[j] = eval(expr, {theta, gf.ys_[j]});
            return pairwise_sum(v) / static_cast<double>(ny);
        };
        gf.cap_lo_ = CollapsedNode{0.0, ring_mean(0.5 * gf.xs_.front())};
        gf.cap_hi_ = CollapsedNode{pi, ring_mean(pi - 0.5 * (pi - gf.xs_.back()))};
    } else if (model.kind() == SurfaceKind::UnitDisc) {
        gf.cap_lo_ = CollapsedNode{0.0, eval(expr, {0.0, 0.0})};
    }

    if (expr.normalize()) {
        const double norm = std::sqrt(integrate(gf, [](const NodeRecord& n) { return n.f * n.f; }));
        if (!(norm > 0.0)) throw ConfigError("cannot normalize an identically zero field");
        const double s = 1.0 / norm;
        for (auto& n : gf.nodes_) {
            n.f *= s;
            n.grad = {n.grad[0] * s, n.grad[1] * s};
            n.grad_norm *= s;
            n.hess = {n.hess.xx * s, n.hess.xy * s, n.hess.yy * s};
            n.hess_norm *= s;
            n.laplacian *= s;
        }
        if (gf.cap_lo_) gf.cap_lo_->f *= s;
        if (gf.cap_hi_) gf.cap_hi_->f *= s;
        gf.source_ = expr.scaled(s);
    }

    gf.lambda_hint_ = gf.source_.eigenvalue();
    double m = 0.0;
    for (const auto& n : gf.nodes_) m = std::max(m, std::abs(n.f));
    if (gf.cap_lo_) m = std::max(m, std::abs(gf.cap_lo_->f));
    if (gf.cap_hi_) m = std::max(m, std::abs(gf.cap_hi_->f));
    gf.max_abs_ = m;
    return gf;
}

inline double l2_norm(const GridField& gf) {
    return std::sqrt(integrate(gf, [](const NodeRecord& n) { return n.f * n.f; }));
}

/// (sum w |f|^p)^(1/p) for p in {1, 2, 6, 8}.
inline double lp_norm(const GridField& gf, int p) {
    if (p != 1 && p != 2 && p != 6 && p != 8)
        throw std::invalid_argument("lp_norm supports p in {1, 2, 6, 8}");
    const double s = integrate(gf, [p](const NodeRecord& n) { return std::pow(std::abs(n.f), p); });
    return std::pow(s, 1.0 / p);
}

inline double laplacian_l2(const GridField& gf) {
    return std::sqrt(integrate(gf, [](const NodeRecord& n) { return n.laplacian * n.laplacian; }));
}

inline double gradient_l2(const GridField& gf) {
    return std::sqrt(integrate(gf, [](const NodeRecord& n) { return n.grad_norm * n.grad_norm; }));
}

/// L^2 norm of the Hessian operator norm |H_f|.
inline double hessian_l2(const GridField& gf) {
    return std::sqrt(integrate(gf, [](const NodeRecord& n) { return n.hess_norm * n.hess_norm; }));
}

inline double mean_integral(const GridField& gf) {
    return integrate(gf, [](const NodeRecord& n) { return n.f; });
}

inline double total_weight(const GridField& gf) {
    return integrate(gf, [](const NodeRecord&) { return 1.0; });
}

/// Columns: x, y, f, grad_norm, hess_norm, weight (chart coordinates; one row per cell, row-major).
inline void write_grid_csv(std::ostream& os, const GridField& gf) {
    os << "x,y,f,grad_norm,hess_norm,weight\n";
    for (int i = 0; i < gf.nx(); ++i) {
        for (int j = 0; j < gf.ny(); ++j) {
            const NodeRecord& n = gf.node(i, j);
            os << format_real(gf.x(i)) << ',' << format_real(gf.y(j)) << ',' << format_real(n.f) << ','
               << format_real(n.grad_norm) << ',' << format_real(n.hess_norm) << ',' << format_real(n.weight)
               << '\n';
        }
    }
}

} // namespace nodal
