// nodal: nodal domains, level-set sweeps and inequality checks for
// eigenfunctions on model surfaces.
//
//   nodal <analyze|sweep|scaling|verify|all> [flags]
//   nodal --config run.json [flags]
//
// Flags override the configuration file. Exit status: 0 all checks pass,
// 2 a scaling check or hard invariant failed, 1 error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nodal/cli.hpp"

namespace {

std::array<int, 2> parse_pair(const std::string& flag, const std::string& text) {
    std::array<int, 2> v{};
    char sep = 0;
    std::istringstream is(text);
    if (!(is >> v[0] >> sep >> v[1]) || (sep != ',' && sep != 'x') || !is.eof())
        throw nodal::ConfigError(flag + ": expected two integers like 3,3 (got '" + text + "')");
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nodal domains, Banach indicatrices and Sasaki lift lengths on model surfaces"};
    std::string command, config_path, model, family, mode, branch, resolution, u, out, spacing;
    std::vector<std::string> quantities;
    std::vector<double> rs;
    int zonal = -1, levels = -1, random_combos = -1;
    std::uint64_t seed = 0;
    bool contours = false, raw = false;
    double rect_a = 0.0, rect_b = 0.0;

    app.add_option("command", command, "analyze, sweep, scaling, verify or all");
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--model", model, "torus, sphere, rectangle or disc");
    app.add_option("--modes", family, "mode family: nn:LO..HI, zonal:LO..HI, mn:LO..HI or paraboloid");
    app.add_option("--zonal", zonal, "single zonal harmonic of degree l");
    app.add_option("--mode", mode, "single mode m,n (sphere: l,m)");
    app.add_option("--branch", branch, "torus branch ss, sc, cs or cc");
    app.add_option("--rect-a", rect_a, "rectangle side along x");
    app.add_option("--rect-b", rect_b, "rectangle side along y");
    app.add_option("--resolution", resolution, "grid cells NX,NY");
    app.add_option("--levels", levels, "number of sweep levels (>= 64)");
    app.add_option("--spacing", spacing, "chebyshev or uniform level spacing");
    app.add_option("--r", rs, "Sasaki parameters")->delimiter(',');
    app.add_option("--u", u, "weight u: one, abs or square");
    app.add_option("--quantity", quantities, "scaling quantities")->delimiter(',');
    app.add_option("--random", random_combos, "number of random 3-mode torus combinations");
    app.add_option("--seed", seed, "first seed of the random combinations");
    app.add_option("--out", out, "output directory (NODAL_OUT_DIR overrides)");
    app.add_flag("--contours", contours, "write contour CSVs for every sweep level");
    app.add_flag("--raw", raw, "do not normalize fields to unit L2 norm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        nodal::RunConfig cfg;
        if (!config_path.empty()) cfg = nodal::load_config(config_path);
        if (!command.empty()) cfg.command = nodal::parse_command(command);
        if (!model.empty()) cfg.model = model;
        if (!family.empty()) cfg.family = family;
        if (zonal >= 0) {
            cfg.model = "sphere";
            cfg.family = "zonal:" + std::to_string(zonal) + ".." + std::to_string(zonal);
        }
        if (!mode.empty()) cfg.mode = parse_pair("--mode", mode);
        if (!branch.empty()) cfg.branch = branch;
        if (rect_a > 0.0) cfg.rect_a = rect_a;
        if (rect_b > 0.0) cfg.rect_b = rect_b;
        if (!resolution.empty()) {
            const auto r = parse_pair("--resolution", resolution);
            cfg.resolution = nodal::Resolution{r[0], r[1]};
        }
        if (levels >= 0) cfg.sweep.n_levels = levels;
        if (spacing == "uniform") cfg.sweep.spacing = nodal::Spacing::Uniform;
        else if (spacing == "chebyshev") cfg.sweep.spacing = nodal::Spacing::Chebyshev;
        else if (!spacing.empty()) throw nodal::ConfigError("--spacing: expected chebyshev or uniform");
        if (!rs.empty()) cfg.rs = rs;
        if (!u.empty()) cfg.u = u;
        if (!quantities.empty()) cfg.quantities = quantities;
        if (random_combos >= 0) cfg.random_combos = random_combos;
        if (app.count("--seed")) cfg.seed = seed;
        if (!out.empty()) cfg.out_dir = out;
        if (contours) cfg.contours = true;
        if (raw) cfg.normalize = false;
        if (!cfg.command) throw nodal::ConfigError("no command given (analyze, sweep, scaling, verify or all)");

        const auto summary = nodal::run(cfg, std::cerr);
        for (const auto& f : summary.files) std::cout << f.string() << '\n';
        return summary.exit_status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
