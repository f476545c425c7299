#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/geo_grid.hpp"
#include "triptrie/symbols.hpp"
#include "triptrie/trip_trie.hpp"

namespace triptrie {

// All functions here read a frozen trie. Depth k is the trie depth
// (= time step k, 1-based), not the dendrogram level.

/// Per-trip-count heat map at one time step, over the grid it was computed
/// against. counts are row-major with row 1 = i_y = 1 (southernmost) first.
struct heatmap_grid {
    grid cells;
    std::vector<std::uint64_t> counts;
    std::uint32_t depth = 0;

    std::int32_t rows() const noexcept { return cells.rows(); }
    std::int32_t cols() const noexcept { return cells.cols(); }

    std::uint64_t at(std::int32_t row, std::int32_t col) const {
        return counts[static_cast<std::size_t>(row - 1) * cells.cols() +
                      (col - 1)];
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (std::uint64_t c : counts) s += c;
        return s;
    }
};

struct branching_stats_result {
    // per_depth[k] = ordinary nodes at depth k+1 / live nodes at depth k,
    // where a node is live when it has at least one ordinary child;
    // exhausted (fully padded) branches count in neither side.
    std::vector<std::optional<double>> per_depth;
    std::optional<double> overall_avg;
    std::optional<double> first_window_avg;
    std::uint32_t window = 0;
};

struct region_count_stats {
    // node counts per region, sorted by region id
    std::vector<std::pair<symbol, std::uint32_t>> counts_all;
    std::vector<std::pair<symbol, std::uint32_t>> counts_first_window;
    std::optional<double> avg_all;
    std::optional<double> avg_first_window;
    std::uint32_t window = 0;
};

struct cluster_size_stats {
    std::optional<double> avg_all;          // depths 1..l, root excluded
    std::optional<double> avg_first_window; // depths 1..window
    std::uint32_t window = 0;
};

struct ranked_cluster {
    std::vector<symbol> prefix; // trailing padding trimmed
    std::uint32_t trip_count = 0;
};

struct region_rank {
    symbol region = 0;
    std::uint64_t trip_count = 0;
};

struct outlier_entry {
    symbol region = 0;
    std::uint32_t node_count = 0;       // trie nodes labeled with the region
    std::uint32_t path_involvement = 0; // distinct root-to-leaf paths using it
    std::uint32_t first_depth = 0;      // shallowest appearance
};

namespace detail {

inline bool has_ordinary_child(const trip_trie& t, trip_trie::node_id n) {
    for (trip_trie::node_id c : t.children(n))
        if (is_ordinary(t.node_symbol(c))) return true;
    return false;
}

inline std::optional<double> mean_of_defined(
    const std::vector<std::optional<double>>& xs, std::size_t count) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t i = 0; i < count && i < xs.size(); ++i) {
        if (xs[i]) {
            sum += *xs[i];
            ++defined;
        }
    }
    if (defined == 0) return std::nullopt;
    return sum / static_cast<double>(defined);
}

} // namespace detail

/// Branching factors per depth plus overall and first-`window` averages.
inline branching_stats_result branching_stats(const trip_trie& t,
                                              std::uint32_t window) {
    branching_stats_result r;
    r.window = window;
    const std::size_t l = t.string_length();
    for (std::size_t k = 0; k + 1 <= l && l > 0; ++k) {
        std::size_t live = 0;
        for (trip_trie::node_id n : t.nodes_at_depth(static_cast<std::uint32_t>(k)))
            if (detail::has_ordinary_child(t, n)) ++live;
        std::size_t next_ordinary = 0;
        for (trip_trie::node_id n :
             t.nodes_at_depth(static_cast<std::uint32_t>(k + 1)))
            if (is_ordinary(t.node_symbol(n))) ++next_ordinary;
        if (live == 0)
            r.per_depth.push_back(std::nullopt);
        else
            r.per_depth.push_back(static_cast<double>(next_ordinary) /
                                  static_cast<double>(live));
    }
    r.overall_avg = detail::mean_of_defined(r.per_depth, r.per_depth.size());
    r.first_window_avg = detail::mean_of_defined(r.per_depth, window);
    return r;
}

/// How many trie nodes each region labels, over all depths and over the
/// first `window` depths; averages run over regions that appear at all.
inline region_count_stats region_cluster_counts(const trip_trie& t,
                                                std::uint32_t window) {
    region_count_stats r;
    r.window = window;
    std::unordered_map<symbol, std::uint32_t> all, first;
    const std::size_t l = t.string_length();
    for (std::size_t k = 1; k <= l; ++k) {
        for (trip_trie::node_id n :
             t.nodes_at_depth(static_cast<std::uint32_t>(k))) {
            symbol s = t.node_symbol(n);
            if (!is_ordinary(s)) continue;
            ++all[s];
            if (k <= window) ++first[s];
        }
    }
    auto to_sorted = [](const std::unordered_map<symbol, std::uint32_t>& m) {
        std::vector<std::pair<symbol, std::uint32_t>> v(m.begin(), m.end());
        std::sort(v.begin(), v.end());
        return v;
    };
    auto avg = [](const std::vector<std::pair<symbol, std::uint32_t>>& v)
        -> std::optional<double> {
        if (v.empty()) return std::nullopt;
        double sum = 0;
        for (const auto& [s, c] : v) sum += c;
        return sum / static_cast<double>(v.size());
    };
    r.counts_all = to_sorted(all);
    r.counts_first_window = to_sorted(first);
    r.avg_all = avg(r.counts_all);
    r.avg_first_window = avg(r.counts_first_window);
    return r;
}

/// Mean trips per cluster, where the clusters are all non-root nodes
/// (depths 1..l and 1..window). Padded-out nodes are clusters too: they
/// hold the trips that have already ended.
inline cluster_size_stats trips_per_cluster(const trip_trie& t,
                                            std::uint32_t window) {
    cluster_size_stats r;
    r.window = window;
    std::uint64_t sum_all = 0, cnt_all = 0, sum_first = 0, cnt_first = 0;
    const std::size_t l = t.string_length();
    for (std::size_t k = 1; k <= l; ++k) {
        for (trip_trie::node_id n :
             t.nodes_at_depth(static_cast<std::uint32_t>(k))) {
            std::uint32_t c = t.node_trip_count(n);
            sum_all += c;
            ++cnt_all;
            if (k <= window) {
                sum_first += c;
                ++cnt_first;
            }
        }
    }
    if (cnt_all > 0)
        r.avg_all = static_cast<double>(sum_all) / static_cast<double>(cnt_all);
    if (cnt_first > 0)
        r.avg_first_window =
            static_cast<double>(sum_first) / static_cast<double>(cnt_first);
    return r;
}

/// Trip density per region at one time step. Ended trips (null_pad nodes)
/// drop out, so the grid total equals the number of trips still active at
/// that depth.
inline heatmap_grid heatmap(const trip_trie& t, const grid& g,
                            std::uint32_t depth) {
    if (depth < 1 || depth > t.string_length())
        throw error("parameter", "heatmap: depth out of range 1..l");
    heatmap_grid hm{g, {}, depth};
    hm.counts.assign(static_cast<std::size_t>(g.rows()) * g.cols(), 0);
    for (trip_trie::node_id n : t.nodes_at_depth(depth)) {
        symbol s = t.node_symbol(n);
        if (!is_ordinary(s)) continue;
        grid_cell c = g.symbol_to_cell(s);
        hm.counts[static_cast<std::size_t>(c.row - 1) * g.cols() +
                  (c.col - 1)] += t.node_trip_count(n);
    }
    return hm;
}

/// The k most populated clusters at one depth, each rendered as its
/// partial trajectory. Ties keep canonical (prefix-lexicographic) order.
inline std::vector<ranked_cluster> top_k_clusters(const trip_trie& t,
                                                  std::uint32_t depth,
                                                  std::size_t k) {
    if (depth > t.string_length())
        throw error("parameter", "top_k_clusters: depth out of range");
    auto nodes = t.nodes_at_depth(depth);
    std::vector<trip_trie::node_id> order(nodes.begin(), nodes.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](trip_trie::node_id a, trip_trie::node_id b) {
                         return t.node_trip_count(a) > t.node_trip_count(b);
                     });
    if (order.size() > k) order.resize(k);
    std::vector<ranked_cluster> out;
    out.reserve(order.size());
    for (trip_trie::node_id n : order) {
        ranked_cluster rc;
        rc.prefix = t.prefix_of(n);
        while (!rc.prefix.empty() && rc.prefix.back() == null_pad)
            rc.prefix.pop_back();
        rc.trip_count = t.node_trip_count(n);
        out.push_back(std::move(rc));
    }
    return out;
}

/// Shallowest depth at which each region appears in any cluster; regions
/// absent from the corpus are omitted. Sorted by region id.
inline std::vector<std::pair<symbol, std::uint32_t>>
first_occurrence_depth(const trip_trie& t) {
    std::unordered_map<symbol, std::uint32_t> first;
    const std::size_t l = t.string_length();
    for (std::size_t k = 1; k <= l; ++k) {
        for (trip_trie::node_id n :
             t.nodes_at_depth(static_cast<std::uint32_t>(k))) {
            symbol s = t.node_symbol(n);
            if (!is_ordinary(s)) continue;
            first.emplace(s, static_cast<std::uint32_t>(k));
        }
    }
    std::vector<std::pair<symbol, std::uint32_t>> out(first.begin(),
                                                      first.end());
    std::sort(out.begin(), out.end());
    return out;
}

/// Where trips that start in `start_region` are at time step `depth`:
/// the most frequent regions among the start node's descendants at that
/// depth. Ranked by trip count, ties by region id.
inline std::vector<region_rank> subtree_distribution(const trip_trie& t,
                                                     symbol start_region,
                                                     std::uint32_t depth,
                                                     std::size_t top_k) {
    if (depth < 1 || depth > t.string_length())
        throw error("parameter", "subtree_distribution: depth out of range");
    const symbol start_sym[1] = {start_region};
    std::optional<trip_trie::node_id> start = t.locate(start_sym);
    if (!start)
        throw error("not_found",
                    "subtree_distribution: start region absent at depth 1");
    std::unordered_map<symbol, std::uint64_t> acc;
    std::vector<trip_trie::node_id> stack{*start};
    while (!stack.empty()) {
        trip_trie::node_id n = stack.back();
        stack.pop_back();
        if (t.node_level(n) == depth) {
            symbol s = t.node_symbol(n);
            if (is_ordinary(s)) acc[s] += t.node_trip_count(n);
            continue;
        }
        for (trip_trie::node_id c : t.children(n)) stack.push_back(c);
    }
    std::vector<region_rank> out;
    out.reserve(acc.size());
    for (const auto& [s, c] : acc) out.push_back({s, c});
    std::sort(out.begin(), out.end(), [](const region_rank& a,
                                         const region_rank& b) {
        if (a.trip_count != b.trip_count) return a.trip_count > b.trip_count;
        return a.region < b.region;
    });
    if (out.size() > top_k) out.resize(top_k);
    return out;
}

/// Number of distinct root-to-leaf paths (unique trip types) that start at
/// `start_region` and end at `end_region` before padding.
inline std::uint64_t route_diversity(const trip_trie& t, symbol start_region,
                                     symbol end_region) {
    if (t.string_length() == 0) return 0;
    std::uint64_t count = 0;
    for (trip_trie::node_id leaf :
         t.nodes_at_depth(static_cast<std::uint32_t>(t.string_length()))) {
        // last pre-padding symbol is the first ordinary one walking upward
        trip_trie::node_id cur = leaf;
        while (cur != t.root() && !is_ordinary(t.node_symbol(cur)))
            cur = t.parent(cur);
        if (cur == t.root()) continue; // fully padded path; no route
        symbol last = t.node_symbol(cur);
        while (t.node_level(cur) > 1) cur = t.parent(cur);
        if (t.node_symbol(cur) == start_region && last == end_region) ++count;
    }
    return count;
}

/// Per-region outlier indicators: how many clusters use the region, how
/// many unique trip types involve it and how early it appears. Rare,
/// late-appearing regions rank first.
inline std::vector<outlier_entry> outlier_report(const trip_trie& t) {
    std::unordered_map<symbol, outlier_entry> acc;
    const std::size_t l = t.string_length();
    symbol max_sym = 0;
    for (std::size_t k = 1; k <= l; ++k) {
        for (trip_trie::node_id n :
             t.nodes_at_depth(static_cast<std::uint32_t>(k))) {
            symbol s = t.node_symbol(n);
            if (!is_ordinary(s)) continue;
            auto [it, fresh] = acc.try_emplace(s);
            if (fresh) {
                it->second.region = s;
                it->second.first_depth = static_cast<std::uint32_t>(k);
            }
            ++it->second.node_count;
            max_sym = std::max(max_sym, s);
        }
    }
    // unique-trip-type involvement: distinct leaves whose path uses the
    // region, deduplicated per leaf with a stamp array
    if (l > 0) {
        std::vector<std::uint32_t> stamp(static_cast<std::size_t>(max_sym) + 1,
                                         0);
        std::uint32_t leaf_no = 0;
        for (trip_trie::node_id leaf :
             t.nodes_at_depth(static_cast<std::uint32_t>(l))) {
            ++leaf_no;
            for (trip_trie::node_id cur = leaf; cur != t.root();
                 cur = t.parent(cur)) {
                symbol s = t.node_symbol(cur);
                if (!is_ordinary(s)) continue;
                if (stamp[static_cast<std::size_t>(s)] != leaf_no) {
                    stamp[static_cast<std::size_t>(s)] = leaf_no;
                    ++acc[s].path_involvement;
                }
            }
        }
    }
    std::vector<outlier_entry> out;
    out.reserve(acc.size());
    for (const auto& [s, e] : acc) out.push_back(e);
    std::sort(out.begin(), out.end(),
              [](const outlier_entry& a, const outlier_entry& b) {
                  if (a.path_involvement != b.path_involvement)
                      return a.path_involvement < b.path_involvement;
                  if (a.first_depth != b.first_depth)
                      return a.first_depth > b.first_depth;
                  if (a.node_count != b.node_count)
                      return a.node_count < b.node_count;
                  return a.region < b.region;
              });
    return out;
}

} // namespace triptrie
