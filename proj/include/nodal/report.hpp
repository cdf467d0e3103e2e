#pragma once

// JSON and CSV writers for verification reports, invariant checks and
// scaling fits. Reals are written with 12 significant digits; non-finite
// values become null in JSON.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nodal/csv.hpp"
#include "nodal/verify.hpp"

namespace nodal {

namespace detail {

inline nlohmann::json json_real(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(format_real(v));
}

inline double real_from_json(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace detail

inline nlohmann::json to_json(const InequalityReport& r) {
    return nlohmann::json{{"name", r.name},
                          {"model", r.model},
                          {"mode", r.mode},
                          {"lambda", detail::json_real(r.lambda)},
                          {"lhs", detail::json_real(r.lhs)},
                          {"rhs_scale", detail::json_real(r.rhs_scale)},
                          {"ratio", detail::json_real(r.ratio)},
                          {"verdict", verdict_name(r.verdict)}};
}

inline InequalityReport report_from_json(const nlohmann::json& j) {
    InequalityReport r;
    r.name = j.at("name").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.lambda = detail::real_from_json(j.at("lambda"));
    r.lhs = detail::real_from_json(j.at("lhs"));
    r.rhs_scale = detail::real_from_json(j.at("rhs_scale"));
    r.ratio = detail::real_from_json(j.at("ratio"));
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    return r;
}

/// One JSON array per run, one object per check.
inline void write_report_json(std::ostream& os, const std::vector<InequalityReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    os << arr.dump(2) << '\n';
}

/// Columns: name, model, mode, value, bound, passed.
inline void write_invariant_csv(std::ostream& os, const std::vector<InvariantCheck>& checks) {
    os << "name,model,mode,value,bound,passed\n";
    for (const auto& c : checks)
        os << csv_field(c.name) << ',' << csv_field(c.model) << ',' << csv_field(c.mode) << ','
           << format_real(c.value) << ',' << format_real(c.bound) << ',' << (c.passed ? 1 : 0) << '\n';
}

/// Plot data for a scaling fit: a comment line naming the quantity and the
/// exponents, then log_lambda, log_value, fit_prediction, slope per member.
inline void emit_plotdata(std::ostream& os, const ScalingFit& fit) {
    if (fit.family.size() < 5) throw ConfigError("plot data needs a fit over at least 5 family members");
    os << "# quantity=" << fit.quantity << " expected_exponent=" << format_real(fit.expected_exponent)
       << " fitted_exponent=" << format_real(fit.fitted_exponent) << " excluded=" << fit.excluded << '\n';
    os << "log_lambda,log_value,fit_prediction,slope\n";
    for (const auto& [lam, v] : fit.family) {
        const double ll = std::log(lam);
        os << format_real(ll) << ',' << format_real(std::log(v)) << ',' << format_real(fit.predict_log(ll)) << ','
           << format_real(fit.fitted_exponent) << '\n';
    }
}

/// Columns: quantity, members, excluded, fitted_exponent, expected_exponent, tolerance, residual, within_tolerance.
inline void write_scaling_csv(std::ostream& os, const std::vector<ScalingFit>& fits) {
    os << "quantity,members,excluded,fitted_exponent,expected_exponent,tolerance,residual,within_tolerance\n";
    for (const auto& f : fits)
        os << csv_field(f.quantity) << ',' << f.family.size() << ',' << f.excluded << ','
           << format_real(f.fitted_exponent) << ',' << format_real(f.expected_exponent) << ','
           << format_real(f.tolerance) << ',' << format_real(f.residual) << ',' << (f.within_tolerance() ? 1 : 0)
           << '\n';
}

} // namespace nodal
