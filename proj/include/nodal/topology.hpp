#pragma once

// Cell adjacency of a GridField: periodic wrap, collapsed end nodes (sphere
// poles, disc center) and ghost cells beyond non-periodic chart edges.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "nodal/grid.hpp"

namespace nodal {

class CellGraph {
public:
    static constexpr std::size_t ghost = std::numeric_limits<std::size_t>::max();

    explicit CellGraph(const GridField& gf) : gf_(gf), cells_(gf.cell_count()) {}

    std::size_t cell_count() const { return cells_; }
    std::size_t cap_lo_id() const { return cells_; }
    std::size_t cap_hi_id() const { return cells_ + 1; }
    std::size_t node_count() const { return cells_ + 2; }
    bool has_node(std::size_t id) const {
        if (id < cells_) return true;
        if (id == cap_lo_id()) return gf_.cap_lo().has_value();
        if (id == cap_hi_id()) return gf_.cap_hi().has_value();
        return false;
    }

    double value(std::size_t id) const {
        if (id < cells_) return gf_.nodes()[id].f;
        return id == cap_lo_id() ? gf_.cap_lo()->f : gf_.cap_hi()->f;
    }

    double weight(std::size_t id) const { return id < cells_ ? gf_.nodes()[id].weight : 0.0; }

    /// Physical length of the axis-0 step around row i.
    double row_step(int i) const {
        const int n = gf_.nx();
        if (n == 1) return gf_.model().extent(0);
        const int lo = std::max(0, i - 1);
        const int hi = std::min(n - 1, i + 1);
        return (gf_.x(hi) - gf_.x(lo)) / (hi - lo);
    }

    /// Visits neighbors of a node. With eight = false only edge-sharing
    /// neighbors are reported. fn(neighbor_id, length); neighbor_id == ghost
    /// for points beyond a non-periodic chart edge.
    template <class Fn>
    void for_each_neighbor(std::size_t id, bool eight, Fn&& fn) const {
        const int nx = gf_.nx();
        const int ny = gf_.ny();
        const SurfaceModel& model = gf_.model();
        if (id >= cells_) {
            const bool lo = id == cap_lo_id();
            const int row = lo ? 0 : nx - 1;
            const double coord = lo ? gf_.cap_lo()->coordinate : gf_.cap_hi()->coordinate;
            const double len = std::abs(gf_.x(row) - coord);
            for (int j = 0; j < ny; ++j) fn(gf_.index(row, j), len);
            return;
        }
        const int i = static_cast<int>(id / static_cast<std::size_t>(ny));
        const int j = static_cast<int>(id % static_cast<std::size_t>(ny));
        const ChartPoint p = gf_.point(i, j);
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) continue;
                if (!eight && di != 0 && dj != 0) continue;
                int ni = i + di;
                int nj = j + dj;
                double qx = 0.0;
                double qy = 0.0;
                bool is_ghost = false;
                if (ni < 0 || ni >= nx) {
                    if (model.periodic(0)) {
                        ni = (ni + nx) % nx;
                        qx = gf_.x(ni);
                    } else {
                        const auto& cap = ni < 0 ? gf_.cap_lo() : gf_.cap_hi();
                        if (cap) {
                            // a collapsed end node is reported once, through the straight neighbor
                            if (dj == 0) fn(ni < 0 ? cap_lo_id() : cap_hi_id(), std::abs(p.x - cap->coordinate));
                            continue;
                        }
                        is_ghost = true;
                        const double step = model.extent(0) / nx;
                        qx = ni < 0 ? p.x - step : p.x + step;
                    }
                } else {
                    qx = gf_.x(ni);
                }
                if (nj < 0 || nj >= ny) {
                    if (model.periodic(1)) {
                        nj = (nj + ny) % ny;
                        qy = gf_.y(nj);
                    } else {
                        is_ghost = true;
                        qy = nj < 0 ? p.y - gf_.dy() : p.y + gf_.dy();
                    }
                } else {
                    qy = gf_.y(nj);
                }
                const double len = chart_distance(p, {qx, qy});
                fn(is_ghost ? ghost : gf_.index(ni, nj), len);
            }
        }
    }

    /// Length of the straight chart segment p-q measured with the metric at its midpoint.
    double chart_distance(ChartPoint p, ChartPoint q) const {
        const SurfaceModel& model = gf_.model();
        double d0 = q.x - p.x;
        double d1 = q.y - p.y;
        if (model.periodic(0)) d0 = wrap_difference(d0, model.extent(0));
        if (model.periodic(1)) d1 = wrap_difference(d1, model.extent(1));
        const auto h = model.scale_factors({p.x + 0.5 * d0, p.y + 0.5 * d1});
        return std::hypot(h[0] * d0, h[1] * d1);
    }

private:
    const GridField& gf_;
    std::size_t cells_;
};

} // namespace nodal
