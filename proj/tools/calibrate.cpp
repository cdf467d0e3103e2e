// Recomputes the frozen family caps: runs every check over the canonical
// families and prints caps.hpp with 1.25x the largest ratio seen.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nodal/verify.hpp"

namespace {

std::string kind_name(nodal::SurfaceKind k) {
    switch (k) {
    case nodal::SurfaceKind::FlatTorus: return "FlatTorus";
    case nodal::SurfaceKind::RoundSphere: return "RoundSphere";
    case nodal::SurfaceKind::EuclideanRectangle: return "EuclideanRectangle";
    case nodal::SurfaceKind::UnitDisc: return "UnitDisc";
    }
    return "?";
}

} // namespace

int main() {
    using namespace nodal;
    const std::vector<std::pair<SurfaceModel, std::string>> families = {
        {SurfaceModel::flat_torus(), "nn:1..6"},
        {SurfaceModel::round_sphere(), "zonal:2..30"},
        {SurfaceModel::rectangle(pi, pi), "mn:1..8"},
        {SurfaceModel::unit_disc(), "paraboloid"},
    };
    VerifyOptions opt;
    opt.weights = {Weight::one(), Weight::abs(), Weight::square()};
    opt.courant1_levels = {0.1, 0.2, 0.3, 0.5, 1.0};

    std::map<std::pair<std::string, SurfaceKind>, double> worst;
    for (const auto& [model, spec] : families) {
        for (const auto& expr : make_family(model, parse_family(spec))) {
            const auto a = analyze(expr);
            const auto v = verify_field(a, opt);
            for (const auto& r : v.reports) {
                auto& w = worst[{r.name, model.kind()}];
                w = std::max(w, r.ratio);
            }
            for (const auto& inv : v.invariants)
                if (!inv.passed)
                    std::cerr << "invariant " << inv.name << " failed on " << inv.mode << ": " << inv.value << "\n";
        }
    }

    std::cout << "    // check, model, cap (largest family ratio in the trailing comment)\n";
    for (const auto& [key, ratio] : worst) {
        if (key.first == "bochner" || key.first == "gr_bound" || key.first.rfind("co_area", 0) == 0) continue;
        char cap[64], seen[64];
        std::snprintf(cap, sizeof cap, "%.4g", ratio > 0.0 ? 1.25 * ratio : 0.0);
        std::snprintf(seen, sizeof seen, "%.6g", ratio);
        std::cout << "    {\"" << key.first << "\", SurfaceKind::" << kind_name(key.second) << ", " << cap
                  << "}, // " << seen << "\n";
    }
}
