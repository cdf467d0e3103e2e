#pragma once

// Run configurations and the pipeline behind the command-line front end.
//
// A RunConfig comes from a JSON document (unknown keys rejected, errors
// anchored to a line) and/or command-line flags. run() samples the
// requested fields, writes CSV/JSON outputs into the output directory and
// returns the process exit status: 0 when every hard invariant holds and no
// check or fit violates its scaling, 2 otherwise. Errors surface as
// exceptions; the front end maps them to status 1.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nodal/report.hpp"
#include "nodal/verify.hpp"

namespace nodal {

enum class Command { Analyze, Sweep, Scaling, Verify, All };

inline Command parse_command(const std::string& s) {
    if (s == "analyze") return Command::Analyze;
    if (s == "sweep") return Command::Sweep;
    if (s == "scaling") return Command::Scaling;
    if (s == "verify") return Command::Verify;
    if (s == "all") return Command::All;
    throw ConfigError("unknown command '" + s + "' (expected analyze, sweep, scaling, verify or all)");
}

struct TermConfig {
    double coefficient = 1.0;
    std::array<int, 2> index{};
    std::string branch = "ss";
};

struct RunConfig {
    std::optional<Command> command;
    std::string model = "torus";
    double rect_a = pi;
    double rect_b = pi;

    // field selection: a family, one mode, an explicit combination, plus
    // optional random torus combinations
    std::optional<std::string> family;
    std::optional<std::array<int, 2>> mode;
    std::string branch = "ss";
    std::vector<TermConfig> terms;
    bool normalize = true;
    int random_combos = 0;
    std::uint64_t seed = 0;

    std::optional<Resolution> resolution;
    SweepSpec sweep;
    std::vector<double> rs{1.0};
    std::string u = "one";
    std::vector<std::string> quantities;
    std::string out_dir = "out";
    bool contours = false;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

/// Line of the first occurrence of "key" used as an object key.
inline int line_of_key(const std::string& text, const std::string& key) {
    const std::string quoted = "\"" + key + "\"";
    for (std::size_t pos = text.find(quoted); pos != std::string::npos; pos = text.find(quoted, pos + 1)) {
        std::size_t k = pos + quoted.size();
        while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
        if (k < text.size() && text[k] == ':') return line_of_offset(text, pos);
    }
    return 1;
}

inline Weight parse_weight(const std::string& s) {
    if (s == "one") return Weight::one();
    if (s == "abs") return Weight::abs();
    if (s == "square") return Weight::square();
    throw ConfigError("unknown weight u '" + s + "' (expected one, abs or square)");
}

} // namespace detail

/// Parses a JSON run configuration. `source` names the document in messages.
inline RunConfig parse_config(const std::string& text, const std::string& source = "config") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(source + ":" + std::to_string(detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                          ": malformed JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(source + ":1: configuration must be a JSON object");
    if (doc.empty()) throw ConfigError(source + ":1: configuration is empty");

    RunConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        const std::string where = source + ":" + std::to_string(detail::line_of_key(text, key)) + ": ";
        try {
            if (key == "command") cfg.command = parse_command(value.get<std::string>());
            else if (key == "model") cfg.model = value.get<std::string>();
            else if (key == "rectangle") {
                for (const auto& [k2, v2] : value.items()) {
                    if (k2 == "a") cfg.rect_a = v2.get<double>();
                    else if (k2 == "b") cfg.rect_b = v2.get<double>();
                    else throw ConfigError("unknown key 'rectangle." + k2 + "'");
                }
            } else if (key == "family") cfg.family = value.get<std::string>();
            else if (key == "zonal") cfg.family = "zonal:" + std::to_string(value.get<int>()) + ".." +
                                                 std::to_string(value.get<int>());
            else if (key == "mode") cfg.mode = value.get<std::array<int, 2>>();
            else if (key == "branch") cfg.branch = value.get<std::string>();
            else if (key == "terms") {
                for (const auto& t : value) {
                    TermConfig tc;
                    for (const auto& [k2, v2] : t.items()) {
                        if (k2 == "coefficient") tc.coefficient = v2.get<double>();
                        else if (k2 == "mode") tc.index = v2.get<std::array<int, 2>>();
                        else if (k2 == "branch") tc.branch = v2.get<std::string>();
                        else throw ConfigError("unknown key 'terms[]." + k2 + "'");
                    }
                    cfg.terms.push_back(tc);
                }
            } else if (key == "normalize") cfg.normalize = value.get<bool>();
            else if (key == "random_combos") cfg.random_combos = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "resolution") {
                const auto r = value.get<std::array<int, 2>>();
                cfg.resolution = Resolution{r[0], r[1]};
            } else if (key == "levels") cfg.sweep.n_levels = value.get<int>();
            else if (key == "c_min") cfg.sweep.c_min = value.get<double>();
            else if (key == "c_max") cfg.sweep.c_max = value.get<double>();
            else if (key == "spacing") {
                const auto s = value.get<std::string>();
                if (s == "chebyshev") cfg.sweep.spacing = Spacing::Chebyshev;
                else if (s == "uniform") cfg.sweep.spacing = Spacing::Uniform;
                else throw ConfigError("unknown spacing '" + s + "' (expected chebyshev or uniform)");
            } else if (key == "r") cfg.rs = value.is_array() ? value.get<std::vector<double>>()
                                                            : std::vector<double>{value.get<double>()};
            else if (key == "u") cfg.u = value.get<std::string>();
            else if (key == "quantities") cfg.quantities = value.get<std::vector<std::string>>();
            else if (key == "out") cfg.out_dir = value.get<std::string>();
            else if (key == "contours") cfg.contours = value.get<bool>();
            else throw ConfigError("unknown key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where + "bad value for '" + key + "': " + e.what());
        } catch (const std::exception& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open configuration");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

inline SurfaceModel config_model(const RunConfig& cfg) {
    if (cfg.model == "torus") return SurfaceModel::flat_torus();
    if (cfg.model == "sphere") return SurfaceModel::round_sphere();
    if (cfg.model == "disc") return SurfaceModel::unit_disc();
    if (cfg.model == "rectangle") return SurfaceModel::rectangle(cfg.rect_a, cfg.rect_b);
    throw ConfigError("unknown model '" + cfg.model + "' (expected torus, sphere, rectangle or disc)");
}

inline ModeSpec config_mode(const SurfaceModel& model, std::array<int, 2> idx, const std::string& branch) {
    switch (model.kind()) {
    case SurfaceKind::FlatTorus: return ModeSpec::torus(idx[0], idx[1], parse_branch(branch));
    case SurfaceKind::RoundSphere: return ModeSpec::sphere(idx[0], idx[1]);
    case SurfaceKind::EuclideanRectangle: return ModeSpec::rectangle(model, idx[0], idx[1]);
    case SurfaceKind::UnitDisc: break;
    }
    throw UnsupportedModel("the disc carries only the builtin paraboloid field");
}

/// The fields a configuration asks for, in a fixed order.
inline std::vector<FieldExpr> config_fields(const RunConfig& cfg) {
    const SurfaceModel model = config_model(cfg);
    std::vector<FieldExpr> out;
    if (cfg.family) {
        for (auto& e : make_family(model, parse_family(*cfg.family), cfg.normalize)) out.push_back(std::move(e));
    }
    if (cfg.mode) out.push_back(FieldExpr::single(config_mode(model, *cfg.mode, cfg.branch), cfg.normalize));
    if (!cfg.terms.empty()) {
        std::vector<Term> terms;
        for (const auto& t : cfg.terms) terms.push_back({t.coefficient, config_mode(model, t.index, t.branch)});
        out.push_back(FieldExpr::modes(model, std::move(terms), cfg.normalize));
    }
    if (cfg.random_combos > 0) {
        if (model.kind() != SurfaceKind::FlatTorus) throw ConfigError("random combinations are drawn on the torus");
        for (int k = 0; k < cfg.random_combos; ++k)
            out.push_back(random_torus_combo(cfg.seed + static_cast<std::uint64_t>(k)));
    }
    if (out.empty() && model.kind() == SurfaceKind::UnitDisc) out.push_back(FieldExpr::disc_paraboloid(cfg.normalize));
    if (out.empty()) throw ConfigError("no field selected (give a family, zonal degree, mode, terms or random combinations)");
    return out;
}

struct RunSummary {
    int exit_status = 0;
    std::vector<std::filesystem::path> files;
    std::vector<InequalityReport> reports;
    std::vector<InvariantCheck> invariants;
    std::vector<ScalingFit> fits;
};

namespace detail {

inline std::filesystem::path output_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("NODAL_OUT_DIR"); env && *env) return env;
    return cfg.out_dir;
}

inline std::string member_suffix(std::size_t k, std::size_t count) {
    if (count == 1) return "";
    std::string s = std::to_string(k);
    while (s.size() < std::to_string(count - 1).size()) s.insert(s.begin(), '0');
    return "_" + s;
}

template <class Writer>
std::filesystem::path write_file(const std::filesystem::path& path, Writer&& write) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write(os);
    if (!os) throw std::runtime_error("write failed for " + path.string());
    return path;
}

} // namespace detail

/// Runs a configuration and writes its outputs. Throws on errors.
inline RunSummary run(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.command) throw ConfigError("configuration has no command");
    const Command cmd = *cfg.command;
    const auto fields = config_fields(cfg);
    const auto weight = detail::parse_weight(cfg.u);
    const std::filesystem::path out = detail::output_dir(cfg);
    std::filesystem::create_directories(out);

    const bool want_domains = cmd == Command::Analyze || cmd == Command::All;
    const bool want_sweep = cmd == Command::Sweep || cmd == Command::All;
    const bool want_verify = cmd == Command::Verify || cmd == Command::All;
    const bool want_scaling = cmd == Command::Scaling || (cmd == Command::All && fields.size() >= 5);

    AnalysisOptions opt;
    opt.resolution = cfg.resolution;
    opt.sweep = cfg.sweep;
    opt.rs = cfg.rs;
    opt.keep_contours = cfg.contours && want_sweep;
    opt.with_sweep = want_sweep || want_verify;
    std::vector<std::string> quantities = cfg.quantities;
    if (want_scaling && quantities.empty())
        quantities = {"sum_m1", "sum_m2", "sum_m6", "sup_norm", "l6_norm", "inradius", "domain_count"};
    for (const auto& q : quantities)
        if (parse_quantity(q) == Quantity::BanachOne) opt.with_sweep = true;

    RunSummary summary;
    std::vector<std::pair<double, std::vector<double>>> measured(fields.size());
    std::vector<FieldVerification> verified(fields.size());
    std::vector<std::string> labels(fields.size());
    std::vector<double> lambdas(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
        const Analysis a = analyze(fields[k], opt);
        labels[k] = a.gf.source().label();
        lambdas[k] = a.lambda;
        log << "field " << labels[k] << ": " << a.gf.nx() << "x" << a.gf.ny() << " cells, " << a.domains.size()
            << " nodal domains, lambda " << format_real(a.lambda) << '\n';
        const std::string suffix = detail::member_suffix(k, fields.size());
        if (want_domains)
            summary.files.push_back(detail::write_file(out / ("domains" + suffix + ".csv"),
                                                       [&](std::ostream& os) { write_domain_csv(os, a.domains); }));
        if (want_sweep) {
            summary.files.push_back(detail::write_file(out / ("sweep" + suffix + ".csv"),
                                                       [&](std::ostream& os) { write_sweep_csv(os, *a.sweep); }));
            if (cfg.contours) {
                const auto dir = out / ("contours" + suffix);
                std::filesystem::create_directories(dir);
                for (std::size_t q = 0; q < a.sweep->levels.size(); ++q) {
                    const auto& lv = a.sweep->levels[q];
                    summary.files.push_back(detail::write_file(
                        dir / ("level" + detail::member_suffix(q, a.sweep->levels.size()) + ".csv"),
                        [&](std::ostream& os) { write_contour_csv(os, *lv.contours); }));
                }
            }
        }
        if (want_verify) {
            VerifyOptions vopt;
            vopt.weights = {Weight::one()};
            if (weight.name() != "one") vopt.weights.push_back(weight);
            vopt.co_area_r = cfg.rs.empty() ? 1.0 : cfg.rs.front();
            verified[k] = verify_field(a, vopt);
            if (!calibrated_geometry(a.gf.model()))
                log << "field " << labels[k] << ": family caps are calibrated on [0,pi]^2; capped checks skipped\n";
        }
        if (want_scaling) {
            measured[k].first = a.lambda;
            for (const auto& q : quantities) measured[k].second.push_back(measure_quantity(a, parse_quantity(q)));
        }
    }

    if (fields.size() > 1)
        summary.files.push_back(detail::write_file(out / "fields.csv", [&](std::ostream& os) {
            os << "index,mode,lambda\n";
            for (std::size_t k = 0; k < fields.size(); ++k)
                os << k << ',' << csv_field(labels[k]) << ',' << format_real(lambdas[k]) << '\n';
        }));

    if (want_verify) {
        for (auto& v : verified) {
            summary.reports.insert(summary.reports.end(), v.reports.begin(), v.reports.end());
            summary.invariants.insert(summary.invariants.end(), v.invariants.begin(), v.invariants.end());
        }
        sort_reports(summary.reports);
        summary.files.push_back(detail::write_file(out / "report.json", [&](std::ostream& os) {
            write_report_json(os, summary.reports);
        }));
        summary.files.push_back(detail::write_file(out / "invariants.csv", [&](std::ostream& os) {
            write_invariant_csv(os, summary.invariants);
        }));
        const auto bad = std::count_if(summary.reports.begin(), summary.reports.end(), [](const auto& r) {
            return r.verdict == Verdict::ViolatedScaling;
        });
        const auto failed = std::count_if(summary.invariants.begin(), summary.invariants.end(),
                                          [](const auto& c) { return !c.passed; });
        log << summary.reports.size() << " reports (" << bad << " violated), " << summary.invariants.size()
            << " invariants (" << failed << " failed)\n";
        if (bad > 0 || failed > 0) summary.exit_status = 2;
    }

    if (want_scaling) {
        if (!cfg.family) throw ConfigError("scaling needs a family");
        const auto family = parse_family(*cfg.family);
        for (std::size_t q = 0; q < quantities.size(); ++q) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& m : measured) pts.emplace_back(m.first, m.second[q]);
            const Quantity quantity = parse_quantity(quantities[q]);
            const auto [expected, tol] = expected_exponent(quantity, family.kind);
            summary.fits.push_back(fit_scaling(std::move(pts), quantities[q], expected, tol));
            const auto& fit = summary.fits.back();
            summary.files.push_back(detail::write_file(out / ("plot_" + quantities[q] + ".csv"),
                                                       [&](std::ostream& os) { emit_plotdata(os, fit); }));
            log << "fit " << fit.quantity << ": exponent " << format_real(fit.fitted_exponent) << " (expected "
                << format_real(fit.expected_exponent) << " +- " << format_real(fit.tolerance) << ")\n";
            if (!fit.within_tolerance()) summary.exit_status = 2;
        }
        summary.files.push_back(detail::write_file(out / "scaling.csv", [&](std::ostream& os) {
            write_scaling_csv(os, summary.fits);
        }));
    }
    return summary;
}

} // namespace nodal
