#pragma once

// Model surfaces, their closed-form eigenmodes, and pointwise evaluation of
// f, the covariant gradient and Hessian (orthonormal frame) and the
// Laplace-Beltrami operator.
//
// Chart conventions (axis 0, axis 1):
//   FlatTorus           (x, y)     in [0, 2pi) x [0, 2pi), both periodic
//   RoundSphere         (theta, phi) in [0, pi] x [0, 2pi), phi periodic
//   EuclideanRectangle  (x, y)     in [0, a] x [0, b]
//   UnitDisc            (rho, phi) in [0, 1] x [0, 2pi), phi periodic
//
// Orthonormal frames: (d_0, d_1 / h_1) with h_1 = 1, sin(theta) or rho.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nodal/csv.hpp"
#include "nodal/errors.hpp"
#include "nodal/numerics.hpp"

namespace nodal {

enum class SurfaceKind { FlatTorus, RoundSphere, EuclideanRectangle, UnitDisc };

struct ChartPoint {
    double x = 0.0;
    double y = 0.0;
};

class SurfaceModel {
public:
    static SurfaceModel flat_torus() { return SurfaceModel(SurfaceKind::FlatTorus, two_pi, two_pi); }
    static SurfaceModel round_sphere() { return SurfaceModel(SurfaceKind::RoundSphere, pi, two_pi); }
    static SurfaceModel unit_disc() { return SurfaceModel(SurfaceKind::UnitDisc, 1.0, two_pi); }
    static SurfaceModel rectangle(double a, double b) {
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("rectangle sides must be positive");
        return SurfaceModel(SurfaceKind::EuclideanRectangle, a, b);
    }

    SurfaceKind kind() const { return kind_; }

    /// Extent of the chart along an axis (2pi, pi, a, b or 1).
    double extent(int axis) const { return axis == 0 ? extent0_ : extent1_; }

    bool periodic(int axis) const {
        switch (kind_) {
        case SurfaceKind::FlatTorus: return true;
        case SurfaceKind::RoundSphere:
        case SurfaceKind::UnitDisc: return axis == 1;
        case SurfaceKind::EuclideanRectangle: return false;
        }
        return false;
    }

    bool closed() const { return kind_ == SurfaceKind::FlatTorus || kind_ == SurfaceKind::RoundSphere; }
    bool flat() const { return kind_ != SurfaceKind::RoundSphere; }
    bool simply_connected_flat() const {
        return kind_ == SurfaceKind::EuclideanRectangle || kind_ == SurfaceKind::UnitDisc;
    }

    /// Gaussian curvature (1/length^2).
    double curvature(ChartPoint) const { return kind_ == SurfaceKind::RoundSphere ? 1.0 : 0.0; }

    double total_area() const {
        switch (kind_) {
        case SurfaceKind::FlatTorus: return 4.0 * pi * pi;
        case SurfaceKind::RoundSphere: return 4.0 * pi;
        case SurfaceKind::EuclideanRectangle: return extent0_ * extent1_;
        case SurfaceKind::UnitDisc: return pi;
        }
        return 0.0;
    }

    /// Lengths of the coordinate vectors d_0, d_1 at p.
    std::array<double, 2> scale_factors(ChartPoint p) const {
        switch (kind_) {
        case SurfaceKind::RoundSphere: return {1.0, std::sin(p.x)};
        case SurfaceKind::UnitDisc: return {1.0, p.x};
        default: return {1.0, 1.0};
        }
    }

    /// Throws std::domain_error if p lies outside the chart. Periodic axes
    /// accept any real coordinate.
    void check_point(ChartPoint p) const {
        constexpr double slack = 1e-12;
        const auto inside = [&](double v, int axis) {
            return periodic(axis) || (v >= -slack && v <= extent(axis) + slack);
        };
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !inside(p.x, 0) || !inside(p.y, 1))
            throw std::domain_error("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                    ") outside the " + name() + " chart");
    }

    std::string name() const {
        switch (kind_) {
        case SurfaceKind::FlatTorus: return "torus";
        case SurfaceKind::RoundSphere: return "sphere";
        case SurfaceKind::EuclideanRectangle: return "rectangle";
        case SurfaceKind::UnitDisc: return "disc";
        }
        return "?";
    }

    bool operator==(const SurfaceModel&) const = default;

private:
    SurfaceModel(SurfaceKind kind, double e0, double e1) : kind_(kind), extent0_(e0), extent1_(e1) {}

    SurfaceKind kind_;
    double extent0_;
    double extent1_;
};

/// Value and first two derivatives of a one-variable factor.
struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Orthonormal (without Condon-Shortley phase) associated Legendre values
/// Q_l^m(cos theta) and Q_{l-1}^m(cos theta), by the forward recurrence in l.
/// The normalization makes Q_l^m(cos theta) * Phi_m(phi) unit in L^2(S^2)
/// when Phi_0 = 1 and Phi_m = sqrt(2) cos / sin.
inline std::pair<double, double> normalized_legendre(int l, int m, double x, double s) {
    double qmm = std::sqrt((2.0 * m + 1.0) / (4.0 * pi));
    for (int k = 1; k <= m; ++k) qmm *= std::sqrt((2.0 * k - 1.0) / (2.0 * k)) * s;
    if (l == m) return {qmm, 0.0};
    double prev = qmm;
    double cur = std::sqrt(2.0 * m + 3.0) * x * qmm;
    for (int n = m + 2; n <= l; ++n) {
        const double nd = n;
        const double md = m;
        const double a = std::sqrt((4.0 * nd * nd - 1.0) / (nd * nd - md * md));
        const double b = std::sqrt(((nd - 1.0) * (nd - 1.0) - md * md) / (4.0 * (nd - 1.0) * (nd - 1.0) - 1.0));
        const double next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
    }
    return {cur, prev};
}

/// theta-jet of Q_l^m(cos theta). Derivatives are NaN at the poles.
inline Jet legendre_theta_jet(int l, int m, double theta) {
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    const auto [q, q_prev] = normalized_legendre(l, m, x, s);
    Jet jet{q, 0.0, 0.0};
    if (s == 0.0) {
        jet.d1 = jet.d2 = std::nan("");
        return jet;
    }
    const double ld = l;
    const double md = m;
    const double c = std::sqrt((2.0 * ld + 1.0) * (ld * ld - md * md) / (2.0 * ld - 1.0));
    jet.d1 = (ld * x * q - c * q_prev) / s;
    jet.d2 = -(x / s) * jet.d1 - (ld * (ld + 1.0) - md * md / (s * s)) * q;
    return jet;
}

enum class TorusBranch { SinSin, SinCos, CosSin, CosCos };

inline std::string branch_name(TorusBranch b) {
    switch (b) {
    case TorusBranch::SinSin: return "ss";
    case TorusBranch::SinCos: return "sc";
    case TorusBranch::CosSin: return "cs";
    case TorusBranch::CosCos: return "cc";
    }
    return "?";
}

inline TorusBranch parse_branch(const std::string& s) {
    if (s == "ss") return TorusBranch::SinSin;
    if (s == "sc") return TorusBranch::SinCos;
    if (s == "cs") return TorusBranch::CosSin;
    if (s == "cc") return TorusBranch::CosCos;
    throw std::invalid_argument("unknown torus branch '" + s + "' (expected ss, sc, cs or cc)");
}

/// One closed-form eigenmode, separable as A(axis 0) * B(axis 1).
///   torus     (m, n, branch):  trig(m x) trig(n y), lambda = m^2 + n^2 (unnormalized)
///   sphere    (l, m):          real orthonormal Y_l^m, lambda = l(l+1)
///   rectangle (m, n):          sin(m pi x / a) sin(n pi y / b), Dirichlet (unnormalized)
class ModeSpec {
public:
    static ModeSpec torus(int m, int n, TorusBranch branch = TorusBranch::SinSin) {
        if (m < 0 || n < 0) throw std::invalid_argument("torus mode indices must be nonnegative");
        const bool sin0 = branch == TorusBranch::SinSin || branch == TorusBranch::SinCos;
        const bool sin1 = branch == TorusBranch::SinSin || branch == TorusBranch::CosSin;
        if ((sin0 && m == 0) || (sin1 && n == 0))
            throw std::invalid_argument("torus mode with a zero-index sine factor vanishes identically");
        if (m == 0 && n == 0) throw std::invalid_argument("constant torus mode is excluded (mean-zero class)");
        return ModeSpec(SurfaceModel::flat_torus(), m, n, branch, double(m) * m + double(n) * n);
    }

    static ModeSpec sphere(int l, int m) {
        if (l < 1) throw std::invalid_argument("sphere mode needs l >= 1 (constant excluded)");
        if (std::abs(m) > l) throw std::invalid_argument("sphere mode needs |m| <= l");
        return ModeSpec(SurfaceModel::round_sphere(), l, m, TorusBranch::SinSin, double(l) * (l + 1));
    }

    static ModeSpec zonal(int l) { return sphere(l, 0); }

    static ModeSpec rectangle(const SurfaceModel& model, int m, int n) {
        if (model.kind() != SurfaceKind::EuclideanRectangle)
            throw std::invalid_argument("rectangle mode needs a rectangle model");
        if (m < 1 || n < 1) throw std::invalid_argument("Dirichlet rectangle modes need m, n >= 1");
        const double a = model.extent(0);
        const double b = model.extent(1);
        return ModeSpec(model, m, n, TorusBranch::SinSin, pi * pi * (m * m / (a * a) + n * n / (b * b)));
    }

    const SurfaceModel& model() const { return model_; }
    int first() const { return i0_; }
    int second() const { return i1_; }
    TorusBranch branch() const { return branch_; }
    double eigenvalue() const { return lambda_; }

    /// Largest absolute index (drives the default grid resolution).
    int max_index() const { return std::max(std::abs(i0_), std::abs(i1_)); }

    std::string label() const {
        switch (model_.kind()) {
        case SurfaceKind::FlatTorus:
            return "(" + std::to_string(i0_) + "," + std::to_string(i1_) + ")" + branch_name(branch_);
        case SurfaceKind::RoundSphere:
            return "Y(" + std::to_string(i0_) + "," + std::to_string(i1_) + ")";
        default: return "(" + std::to_string(i0_) + "," + std::to_string(i1_) + ")";
        }
    }

    Jet axis0(double x) const {
        switch (model_.kind()) {
        case SurfaceKind::FlatTorus: {
            const bool sine = branch_ == TorusBranch::SinSin || branch_ == TorusBranch::SinCos;
            return trig_jet(sine, i0_, x);
        }
        case SurfaceKind::RoundSphere: return legendre_theta_jet(i0_, std::abs(i1_), x);
        case SurfaceKind::EuclideanRectangle: return trig_jet(true, i0_ * pi / model_.extent(0), x);
        default: break;
        }
        throw std::logic_error("mode on unsupported model");
    }

    Jet axis1(double y) const {
        switch (model_.kind()) {
        case SurfaceKind::FlatTorus: {
            const bool sine = branch_ == TorusBranch::SinSin || branch_ == TorusBranch::CosSin;
            return trig_jet(sine, i1_, y);
        }
        case SurfaceKind::RoundSphere: {
            if (i1_ == 0) return {1.0, 0.0, 0.0};
            Jet j = trig_jet(i1_ < 0, std::abs(i1_), y);
            const double r2 = std::sqrt(2.0);
            return {r2 * j.v, r2 * j.d1, r2 * j.d2};
        }
        case SurfaceKind::EuclideanRectangle: return trig_jet(true, i1_ * pi / model_.extent(1), y);
        default: break;
        }
        throw std::logic_error("mode on unsupported model");
    }

    bool operator==(const ModeSpec&) const = default;

private:
    ModeSpec(SurfaceModel model, int i0, int i1, TorusBranch branch, double lambda)
        : model_(model), i0_(i0), i1_(i1), branch_(branch), lambda_(lambda) {}

    static Jet trig_jet(bool sine, double k, double t) {
        const double s = std::sin(k * t);
        const double c = std::cos(k * t);
        if (sine) return {s, k * c, -k * k * s};
        return {c, -k * s, -k * k * c};
    }

    SurfaceModel model_;
    int i0_;
    int i1_;
    TorusBranch branch_;
    double lambda_;
};

enum class Builtin { None, DiscParaboloid };

struct Term {
    double coefficient = 1.0;
    ModeSpec mode;
};

/// Chart partial derivatives of f at a point.
struct ChartJet {
    double f = 0.0;
    double fx = 0.0;
    double fy = 0.0;
    double fxx = 0.0;
    double fxy = 0.0;
    double fyy = 0.0;
    double laplacian = 0.0; ///< exact Laplacian where known in closed form (modes)
    bool laplacian_known = false;
};

/// A function on one model surface: a linear combination of eigenmodes, or
/// a named analytic test field. The normalize flag is a request honored by
/// grid sampling (coefficients rescaled so the quadrature L^2 norm is 1).
class FieldExpr {
public:
    static FieldExpr modes(SurfaceModel model, std::vector<Term> terms, bool normalize = false) {
        if (model.kind() == SurfaceKind::UnitDisc && !terms.empty())
            throw std::invalid_argument("disc supports builtin fields only");
        for (const auto& t : terms)
            if (!(t.mode.model() == model)) throw std::invalid_argument("all modes must share one surface model");
        return FieldExpr(model, std::move(terms), Builtin::None, normalize);
    }

    static FieldExpr single(const ModeSpec& mode, bool normalize = false) {
        return modes(mode.model(), {Term{1.0, mode}}, normalize);
    }

    /// f = 1 - rho^2 on the unit disc.
    static FieldExpr disc_paraboloid(bool normalize = false) {
        return FieldExpr(SurfaceModel::unit_disc(), {}, Builtin::DiscParaboloid, normalize);
    }

    const SurfaceModel& model() const { return model_; }
    const std::vector<Term>& terms() const { return terms_; }
    Builtin builtin() const { return builtin_; }
    bool normalize() const { return normalize_; }

    FieldExpr scaled(double s) const {
        FieldExpr out = *this;
        for (auto& t : out.terms_) t.coefficient *= s;
        out.scale_ *= s;
        out.normalize_ = false;
        return out;
    }

    /// Overall factor applied to a builtin field (1 unless scaled).
    double builtin_scale() const { return scale_; }

    bool is_zero() const {
        if (builtin_ != Builtin::None) return scale_ == 0.0;
        for (const auto& t : terms_)
            if (t.coefficient != 0.0) return false;
        return true;
    }

    /// Common eigenvalue if every nonzero term shares one (pure eigenfunction).
    std::optional<double> eigenvalue() const {
        if (builtin_ != Builtin::None) return std::nullopt;
        std::optional<double> lambda;
        for (const auto& t : terms_) {
            if (t.coefficient == 0.0) continue;
            if (lambda && std::abs(*lambda - t.mode.eigenvalue()) > 1e-12 * *lambda) return std::nullopt;
            lambda = t.mode.eigenvalue();
        }
        return lambda;
    }

    /// Exactly one nonzero eigenmode term.
    bool is_single_mode() const {
        if (builtin_ != Builtin::None) return false;
        int count = 0;
        for (const auto& t : terms_) count += t.coefficient != 0.0;
        return count == 1;
    }

    int max_index() const {
        int k = 0;
        for (const auto& t : terms_) k = std::max(k, t.mode.max_index());
        return k;
    }

    std::string label() const {
        if (builtin_ == Builtin::DiscParaboloid) return "disc_paraboloid";
        if (terms_.empty()) return "zero";
        std::string s;
        for (const auto& t : terms_) {
            if (!s.empty()) s += "+";
            if (terms_.size() > 1) s += format_real(t.coefficient) + "*";
            s += t.mode.label();
        }
        return s;
    }

    ChartJet chart_jet(ChartPoint p) const {
        model_.check_point(p);
        ChartJet j;
        if (builtin_ == Builtin::DiscParaboloid) {
            j.f = scale_ * (1.0 - p.x * p.x);
            j.fx = scale_ * (-2.0 * p.x);
            j.fxx = scale_ * -2.0;
            j.laplacian = scale_ * -4.0;
            j.laplacian_known = true;
            return j;
        }
        for (const auto& t : terms_) {
            if (t.coefficient == 0.0) continue;
            const Jet a = t.mode.axis0(p.x);
            const Jet b = t.mode.axis1(p.y);
            const double c = t.coefficient;
            j.f += c * a.v * b.v;
            j.fx += c * a.d1 * b.v;
            j.fy += c * a.v * b.d1;
            j.fxx += c * a.d2 * b.v;
            j.fxy += c * a.d1 * b.d1;
            j.fyy += c * a.v * b.d2;
            j.laplacian -= c * t.mode.eigenvalue() * a.v * b.v;
        }
        j.laplacian_known = true;
        return j;
    }

private:
    FieldExpr(SurfaceModel model, std::vector<Term> terms, Builtin builtin, bool normalize)
        : model_(model), terms_(std::move(terms)), builtin_(builtin), normalize_(normalize) {}

    SurfaceModel model_;
    std::vector<Term> terms_;
    Builtin builtin_;
    bool normalize_;
    double scale_ = 1.0;
};

/// Pointwise differential data in the orthonormal frame.
struct FieldJet {
    double f = 0.0;
    std::array<double, 2> chart_grad{};
    std::array<double, 2> grad{}; ///< orthonormal-frame components
    double grad_norm = 0.0;
    Sym2 hess;                    ///< covariant Hessian, orthonormal frame
    double hess_norm = 0.0;       ///< operator norm
    double laplacian = 0.0;
};

/// Converts chart derivatives to frame quantities. Throws CoordinateSingularity
/// at sphere poles and, for non-radial fields, at the disc center.
inline FieldJet frame_jet(const SurfaceModel& model, ChartPoint p, const ChartJet& j) {
    FieldJet out;
    out.f = j.f;
    out.chart_grad = {j.fx, j.fy};
    switch (model.kind()) {
    case SurfaceKind::FlatTorus:
    case SurfaceKind::EuclideanRectangle:
        out.grad = {j.fx, j.fy};
        out.hess = {j.fxx, j.fxy, j.fyy};
        break;
    case SurfaceKind::RoundSphere: {
        const double s = std::sin(p.x);
        if (s <= 1e-12) throw CoordinateSingularity("derivatives requested at a sphere pole");
        const double cot = std::cos(p.x) / s;
        out.grad = {j.fx, j.fy / s};
        out.hess = {j.fxx, (j.fxy - cot * j.fy) / s, j.fyy / (s * s) + cot * j.fx};
        break;
    }
    case SurfaceKind::UnitDisc: {
        const double rho = p.x;
        if (rho == 0.0) {
            if (j.fy != 0.0 || j.fxy != 0.0 || j.fyy != 0.0 || j.fx != 0.0)
                throw CoordinateSingularity("derivatives of a non-radial field at the disc center");
            out.grad = {0.0, 0.0};
            out.hess = {j.fxx, 0.0, j.fxx};
        } else {
            out.grad = {j.fx, j.fy / rho};
            out.hess = {j.fxx, (j.fxy - j.fy / rho) / rho, j.fyy / (rho * rho) + j.fx / rho};
        }
        break;
    }
    }
    out.grad_norm = std::hypot(out.grad[0], out.grad[1]);
    out.hess_norm = out.hess.operator_norm();
    out.laplacian = j.laplacian_known ? j.laplacian : out.hess.trace();
    return out;
}

inline FieldJet field_jet(const FieldExpr& expr, ChartPoint p) {
    return frame_jet(expr.model(), p, expr.chart_jet(p));
}

inline double eval(const FieldExpr& expr, ChartPoint p) { return expr.chart_jet(p).f; }

struct GradientValue {
    std::array<double, 2> chart{}; ///< (df/dx0, df/dx1)
    std::array<double, 2> frame{};
    double norm = 0.0;             ///< Riemannian |grad f|_g
};

inline GradientValue eval_gradient(const FieldExpr& expr, ChartPoint p) {
    const FieldJet j = field_jet(expr, p);
    return {j.chart_grad, j.grad, j.grad_norm};
}

struct HessianValue {
    Sym2 frame;
    double operator_norm = 0.0;
};

inline HessianValue eval_hessian(const FieldExpr& expr, ChartPoint p) {
    const FieldJet j = field_jet(expr, p);
    return {j.hess, j.hess_norm};
}

inline double laplacian(const FieldExpr& expr, ChartPoint p) {
    const ChartJet j = expr.chart_jet(p);
    return j.laplacian;
}

} // namespace nodal
