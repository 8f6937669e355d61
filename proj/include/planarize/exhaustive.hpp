#pragma once

#include <optional>
#include <vector>

#include "planarize/graph.hpp"
#include "planarize/planarity.hpp"

namespace planarize {

/// Exhaustive minimum planarization: smallest edge set whose removal leaves
/// a planar graph, by increasing-size subset search. The skewness lower
/// bound m - (3n - 6) prunes the small sizes. Exact when it returns.
inline std::optional<EdgeSet> exhaustive_planarization(const Graph &g, int k_max) {
    if (is_planar(g)) return EdgeSet{};
    int m = g.m();
    int lower = 0;
    if (g.n() >= 3) lower = std::max(0, m - (3 * g.n() - 6));
    const EdgeSet &es = g.edges();
    for (int k = std::max(1, lower); k <= k_max; ++k) {
        // enumerate k-subsets of edge indices
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        while (true) {
            EdgeSet removed;
            for (int i : idx) removed.push_back(es[i]);
            if (is_planar(g.without_edges(removed))) return removed;
            // next combination
            int i = k - 1;
            while (i >= 0 && idx[i] == m - k + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return std::nullopt; // budget exceeded
}

/// Skewness lower bound max(0, m - (3n - 6)); zero for planar sizes.
inline long long skewness_lower_bound(const Graph &g) {
    if (g.n() < 3) return 0;
    return std::max<long long>(0, g.m() - (3LL * g.n() - 6));
}

} // namespace planarize
