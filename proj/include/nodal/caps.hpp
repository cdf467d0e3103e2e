#pragma once

// Frozen family caps: the largest ratio each check reached over the
// canonical families (torus nn:1..6, sphere zonal:2..30, rectangle
// [0,pi]^2 mn:1..8, disc paraboloid), times 1.25. Regenerate with
// tools/calibrate.

#include <cmath>
#include <optional>
#include <string_view>

#include "nodal/surfaces.hpp"

namespace nodal {

struct FrozenCap {
    std::string_view check;
    SurfaceKind model;
    double cap;
};

inline constexpr FrozenCap frozen_caps[] = {
    // check, model, cap (largest family ratio in the trailing comment)
    {"cor_courant1", SurfaceKind::FlatTorus, 0.00032}, // 0.000256
    {"cor_courant1", SurfaceKind::RoundSphere, 0.001822}, // 0.001458
    {"cor_courant1", SurfaceKind::EuclideanRectangle, 0.01953}, // 0.015625
    {"cor_courant2", SurfaceKind::FlatTorus, 0.25}, // 0.2
    {"cor_courant2", SurfaceKind::RoundSphere, 0.2083}, // 0.166667
    {"cor_courant2", SurfaceKind::EuclideanRectangle, 0.3125}, // 0.25
    {"cor_courant2", SurfaceKind::UnitDisc, 0.09021}, // 0.072171
    {"domain_count", SurfaceKind::FlatTorus, 2.5}, // 2
    {"domain_count", SurfaceKind::RoundSphere, 0.625}, // 0.5
    {"domain_count", SurfaceKind::EuclideanRectangle, 0.625}, // 0.5
    {"leray_form", SurfaceKind::FlatTorus, 0.1302}, // 0.104169
    {"leray_form", SurfaceKind::RoundSphere, 0.11}, // 0.0880341
    {"leray_form", SurfaceKind::EuclideanRectangle, 0.131}, // 0.104797
    {"leray_form", SurfaceKind::UnitDisc, 0.08692}, // 0.0695399
    {"rem_sogge", SurfaceKind::EuclideanRectangle, 0.008391}, // 0.00671255
    {"supnorm", SurfaceKind::FlatTorus, 0.3338}, // 0.267021
    {"supnorm", SurfaceKind::RoundSphere, 0.5035}, // 0.402824
    {"supnorm", SurfaceKind::EuclideanRectangle, 0.6688}, // 0.535009
    {"thm_crit_sq", SurfaceKind::FlatTorus, 0.2521}, // 0.201668
    {"thm_crit_sq", SurfaceKind::RoundSphere, 0.1863}, // 0.149011
    {"thm_crit_sq", SurfaceKind::EuclideanRectangle, 0.253}, // 0.202398
    {"thm_crit_sq", SurfaceKind::UnitDisc, 0.1723}, // 0.137828
    {"thm_crit_sum", SurfaceKind::FlatTorus, 0.7939}, // 0.635087
    {"thm_crit_sum", SurfaceKind::RoundSphere, 0.3283}, // 0.262623
    {"thm_crit_sum", SurfaceKind::EuclideanRectangle, 0.3976}, // 0.318118
    {"thm_crit_sum", SurfaceKind::UnitDisc, 0.1763}, // 0.141047
    {"thm_eigen", SurfaceKind::FlatTorus, 0.001812}, // 0.00144989
    {"thm_eigen", SurfaceKind::RoundSphere, 0.01076}, // 0.00861151
    {"thm_main_abs", SurfaceKind::FlatTorus, 0.1225}, // 0.0980232
    {"thm_main_abs", SurfaceKind::RoundSphere, 0.08868}, // 0.0709416
    {"thm_main_abs", SurfaceKind::EuclideanRectangle, 0.1233}, // 0.0986142
    {"thm_main_abs", SurfaceKind::UnitDisc, 0.07528}, // 0.0602215
    {"thm_main_one", SurfaceKind::FlatTorus, 0.1237}, // 0.0989731
    {"thm_main_one", SurfaceKind::RoundSphere, 0.09524}, // 0.0761886
    {"thm_main_one", SurfaceKind::EuclideanRectangle, 0.1245}, // 0.0995699
    {"thm_main_one", SurfaceKind::UnitDisc, 0.08692}, // 0.0695399
    {"thm_main_square", SurfaceKind::FlatTorus, 0.1079}, // 0.0862949
    {"thm_main_square", SurfaceKind::RoundSphere, 0.08124}, // 0.0649912
    {"thm_main_square", SurfaceKind::EuclideanRectangle, 0.1085}, // 0.0868152
    {"thm_main_square", SurfaceKind::UnitDisc, 0.06479}, // 0.0518295
};

inline std::optional<double> family_cap(std::string_view check, SurfaceKind model) {
    for (const auto& c : frozen_caps)
        if (c.check == check && c.model == model) return c.cap;
    return std::nullopt;
}

/// Caps depend on the metric; rectangles were calibrated on [0, pi]^2 only.
inline bool calibrated_geometry(const SurfaceModel& model) {
    if (model.kind() != SurfaceKind::EuclideanRectangle) return true;
    return std::abs(model.extent(0) - pi) <= 1e-12 && std::abs(model.extent(1) - pi) <= 1e-12;
}

inline std::optional<double> family_cap(std::string_view check, const SurfaceModel& model) {
    if (!calibrated_geometry(model)) return std::nullopt;
    return family_cap(check, model.kind());
}

} // namespace nodal
