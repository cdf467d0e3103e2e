#pragma once

// Nodal domains: connected components of {f != 0} on the sampled cells.
//
// Cells carry the sign of f at their center. Two nonzero cells of equal sign
// are joined when they share an edge (with periodic wrap) or both touch the
// same collapsed node of that sign. Components whose extremum does not exceed
// ten times the zero tolerance are dropped as numerical dust.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

#include "nodal/csv.hpp"
#include "nodal/grid.hpp"
#include "nodal/topology.hpp"

namespace nodal {

struct NodalDomain {
    int label = 0;
    int sign = 0;
    std::vector<std::size_t> cells; ///< CellGraph node ids (collapsed nodes included)
    double m_A = 0.0;
    double area = 0.0;
    double inradius = 0.0;
    std::size_t cell_count = 0; ///< grid cells only
};

struct NodalDomainSet {
    std::vector<NodalDomain> domains;
    double zero_tolerance = 0.0;
    Resolution resolution;

    std::size_t size() const { return domains.size(); }
    bool empty() const { return domains.empty(); }
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    /// The smaller root label survives.
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace detail

/// Largest inscribed radius of a domain: multi-source shortest paths over the
/// 8-connected cell graph (a chamfer distance with metric edge lengths),
/// seeded from cells touching the complement, minus half a cell.
inline double inradius(const NodalDomain& domain, const GridField& gf) {
    if (domain.cells.empty()) throw std::invalid_argument("inradius of an empty domain");
    const CellGraph graph(gf);
    std::vector<char> inside(graph.node_count(), 0);
    for (std::size_t id : domain.cells) inside[id] = 1;

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(graph.node_count(), inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (std::size_t id : domain.cells) {
        double d = inf;
        graph.for_each_neighbor(id, true, [&](std::size_t nb, double len) {
            if (nb == CellGraph::ghost || !inside[nb]) d = std::min(d, len);
        });
        if (d < inf) {
            dist[id] = d;
            queue.push({d, id});
        }
    }
    while (!queue.empty()) {
        const auto [d, id] = queue.top();
        queue.pop();
        if (d > dist[id]) continue;
        graph.for_each_neighbor(id, true, [&](std::size_t nb, double len) {
            if (nb == CellGraph::ghost || !inside[nb]) return;
            if (d + len < dist[nb]) {
                dist[nb] = d + len;
                queue.push({dist[nb], nb});
            }
        });
    }

    double best = 0.0;
    double half_step = 0.0;
    for (std::size_t id : domain.cells) {
        if (dist[id] == inf || dist[id] <= best) continue;
        best = dist[id];
        if (id < graph.cell_count()) {
            const int i = static_cast<int>(id / static_cast<std::size_t>(gf.ny()));
            half_step = 0.5 * graph.row_step(i);
        } else {
            const auto& cap = id == graph.cap_lo_id() ? gf.cap_lo() : gf.cap_hi();
            const int row = id == graph.cap_lo_id() ? 0 : gf.nx() - 1;
            half_step = std::abs(gf.x(row) - cap->coordinate);
        }
    }
    // a domain with no complement (whole closed surface) has no finite inradius here
    if (best == 0.0) return 0.0;
    return std::max(0.0, best - half_step);
}

/// Labels the nodal domains of gf. A negative zero_tolerance selects the
/// default 1e-9 * max|f|.
inline NodalDomainSet extract_domains(const GridField& gf, double zero_tolerance = -1.0) {
    NodalDomainSet out;
    out.resolution = {gf.nx(), gf.ny()};
    const double tol = zero_tolerance >= 0.0 ? zero_tolerance : 1e-9 * gf.max_abs();
    out.zero_tolerance = tol;
    if (gf.max_abs() == 0.0) return out;

    const CellGraph graph(gf);
    const std::size_t n = graph.node_count();
    const auto sign_of = [&](std::size_t id) {
        if (!graph.has_node(id)) return 0;
        const double v = graph.value(id);
        if (std::abs(v) <= tol) return 0;
        return v > 0.0 ? 1 : -1;
    };
    std::vector<int> sign(n);
    for (std::size_t id = 0; id < n; ++id) sign[id] = sign_of(id);

    detail::UnionFind uf(n);
    for (std::size_t id = 0; id < n; ++id) {
        if (sign[id] == 0) continue;
        graph.for_each_neighbor(id, false, [&](std::size_t nb, double) {
            if (nb != CellGraph::ghost && sign[nb] == sign[id]) uf.unite(id, nb);
        });
    }

    std::vector<int> label_of_root(n, -1);
    std::vector<NodalDomain> found;
    for (std::size_t id = 0; id < n; ++id) {
        if (sign[id] == 0) continue;
        const std::size_t root = uf.find(id);
        if (label_of_root[root] < 0) {
            label_of_root[root] = static_cast<int>(found.size());
            found.push_back(NodalDomain{});
            found.back().sign = sign[id];
        }
        NodalDomain& d = found[static_cast<std::size_t>(label_of_root[root])];
        d.cells.push_back(id);
        d.m_A = std::max(d.m_A, std::abs(graph.value(id)));
        if (id < graph.cell_count()) ++d.cell_count;
    }

    for (auto& d : found) {
        if (d.m_A <= 10.0 * tol) continue;
        std::vector<double> w;
        w.reserve(d.cells.size());
        for (std::size_t id : d.cells) w.push_back(graph.weight(id));
        d.area = pairwise_sum(w);
        d.label = static_cast<int>(out.domains.size());
        out.domains.push_back(std::move(d));
    }
    parallel_for(out.domains.size(), [&](std::size_t k) { out.domains[k].inradius = inradius(out.domains[k], gf); });
    return out;
}

/// sum_A m_A^q for q in {1, 2, 6, 8}.
inline double extrema_moments(const NodalDomainSet& nds, double q) {
    if (q != 1.0 && q != 2.0 && q != 6.0 && q != 8.0)
        throw std::invalid_argument("extrema_moments supports q in {1, 2, 6, 8}");
    std::vector<double> v;
    v.reserve(nds.size());
    for (const auto& d : nds.domains) v.push_back(std::pow(d.m_A, q));
    return pairwise_sum(v);
}

/// #{A : m_A >= a}.
inline std::size_t count_above(const NodalDomainSet& nds, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("count_above needs a > 0");
    return static_cast<std::size_t>(
        std::count_if(nds.domains.begin(), nds.domains.end(), [a](const NodalDomain& d) { return d.m_A >= a; }));
}

inline double max_extremum(const NodalDomainSet& nds) {
    double m = 0.0;
    for (const auto& d : nds.domains) m = std::max(m, d.m_A);
    return m;
}

/// Columns: label, sign, m_A, area, inradius, cell_count.
inline void write_domain_csv(std::ostream& os, const NodalDomainSet& nds) {
    os << "label,sign,m_A,area,inradius,cell_count\n";
    for (const auto& d : nds.domains) {
        os << d.label << ',' << d.sign << ',' << format_real(d.m_A) << ',' << format_real(d.area) << ','
           << format_real(d.inradius) << ',' << d.cell_count << '\n';
    }
}

} // namespace nodal
