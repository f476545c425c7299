#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/string_metrics.hpp"
#include "triptrie/trip_trie.hpp"

namespace triptrie {

/// One trie node at the chosen level: a unique partial route at a unique
/// pace, carrying the number of trips that follow it.
struct micro_cluster {
    trip_trie::node_id node = 0;
    std::vector<symbol> representative; // node prefix, padding trimmed
    std::uint32_t weight = 0;           // trip count
};

enum class macro_strategy {
    complete_linkage, // merge closest pair (max-linkage) while diameter <= q
    greedy            // single-pass leader assignment; cheaper on many micros
};

/// Grouping of micro-clusters with a hard Levenshtein diameter bound:
/// within every macro-cluster, all representatives are pairwise within q
/// edits. Cluster count is not guaranteed minimal (the exact problem is
/// hard); the diameter bound is guaranteed.
struct macro_clustering {
    std::vector<std::uint32_t> assignment; // per micro, labels 1..cluster_count
    std::uint32_t cluster_count = 0;
    std::uint32_t diameter_bound = 0;
    std::vector<std::uint32_t> achieved_diameters; // per macro label-1
};

/// All clusters at one trie level, as weighted representatives in
/// canonical order.
inline std::vector<micro_cluster> micro_clusters(const trip_trie& t,
                                                 std::uint32_t level) {
    if (level < 1 || level > t.string_length())
        throw error("parameter", "micro_clusters: level out of range 1..l");
    std::vector<micro_cluster> out;
    for (trip_trie::node_id n : t.nodes_at_depth(level)) {
        micro_cluster mc;
        mc.node = n;
        mc.representative = t.prefix_of(n);
        while (!mc.representative.empty() &&
               mc.representative.back() == null_pad)
            mc.representative.pop_back();
        mc.weight = t.node_trip_count(n);
        out.push_back(std::move(mc));
    }
    return out;
}

namespace detail {

inline std::vector<std::uint32_t>
representative_distances(std::span<const micro_cluster> micros) {
    const std::size_t m = micros.size();
    std::vector<std::uint32_t> d(m * m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            auto e = static_cast<std::uint32_t>(
                levenshtein(std::span<const symbol>(micros[i].representative),
                            std::span<const symbol>(micros[j].representative)));
            d[i * m + j] = e;
            d[j * m + i] = e;
        }
    }
    return d;
}

} // namespace detail

/// Group micro-clusters so that every macro-cluster's Levenshtein diameter
/// stays <= q. Weights are carried through for reporting only; clustering
/// works on the representatives.
inline macro_clustering macro_cluster(std::span<const micro_cluster> micros,
                                      std::uint32_t q,
                                      macro_strategy strategy =
                                          macro_strategy::complete_linkage) {
    const std::size_t m = micros.size();
    macro_clustering res;
    res.diameter_bound = q;
    res.assignment.assign(m, 0);
    if (m == 0) return res;

    std::vector<std::uint32_t> label(m, 0);

    if (strategy == macro_strategy::complete_linkage) {
        // agglomerative max-linkage: repeatedly merge the closest pair of
        // clusters; max-linkage distance of a merge equals the merged
        // diameter, so stopping above q keeps the bound exact
        std::vector<std::uint32_t> d = detail::representative_distances(micros);
        std::vector<bool> active(m, true);
        std::vector<std::vector<std::uint32_t>> members(m);
        for (std::size_t i = 0; i < m; ++i)
            members[i] = {static_cast<std::uint32_t>(i)};

        while (true) {
            std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
            std::size_t bi = 0, bj = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (!active[i]) continue;
                for (std::size_t j = i + 1; j < m; ++j) {
                    if (!active[j]) continue;
                    if (d[i * m + j] < best) {
                        best = d[i * m + j];
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (best == std::numeric_limits<std::uint32_t>::max() || best > q)
                break;
            // merge bj into bi; max-linkage update
            for (std::size_t k = 0; k < m; ++k) {
                if (!active[k] || k == bi || k == bj) continue;
                std::uint32_t nd = std::max(d[bi * m + k], d[bj * m + k]);
                d[bi * m + k] = d[k * m + bi] = nd;
            }
            active[bj] = false;
            members[bi].insert(members[bi].end(), members[bj].begin(),
                               members[bj].end());
            members[bj].clear();
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            for (std::uint32_t idx : members[i])
                label[idx] = static_cast<std::uint32_t>(i) + 1;
        }
    } else {
        // leader pass in canonical order: join the first cluster every
        // member of which is within q, else open a new one
        std::vector<std::vector<std::uint32_t>> clusters;
        for (std::size_t i = 0; i < m; ++i) {
            bool placed = false;
            for (std::size_t c = 0; c < clusters.size() && !placed; ++c) {
                bool fits = true;
                for (std::uint32_t idx : clusters[c]) {
                    auto e = levenshtein(
                        std::span<const symbol>(micros[i].representative),
                        std::span<const symbol>(micros[idx].representative));
                    if (e > q) {
                        fits = false;
                        break;
                    }
                }
                if (fits) {
                    clusters[c].push_back(static_cast<std::uint32_t>(i));
                    label[i] = static_cast<std::uint32_t>(c);
                    placed = true;
                }
            }
            if (!placed) {
                label[i] = static_cast<std::uint32_t>(clusters.size());
                clusters.push_back({static_cast<std::uint32_t>(i)});
            }
        }
        for (std::size_t i = 0; i < m; ++i) ++label[i]; // 1-based
    }

    // canonicalize labels by first occurrence
    partition p = make_canonical_partition(label);
    res.assignment = p.labels;
    res.cluster_count = p.block_count;

    // achieved diameters, by exhaustive pairwise check inside each cluster
    res.achieved_diameters.assign(res.cluster_count, 0);
    std::vector<std::vector<std::uint32_t>> by_label(res.cluster_count);
    for (std::size_t i = 0; i < m; ++i)
        by_label[res.assignment[i] - 1].push_back(static_cast<std::uint32_t>(i));
    for (std::size_t c = 0; c < by_label.size(); ++c) {
        std::uint32_t diam = 0;
        const auto& mem = by_label[c];
        for (std::size_t a = 0; a < mem.size(); ++a)
            for (std::size_t b = a + 1; b < mem.size(); ++b)
                diam = std::max(
                    diam, static_cast<std::uint32_t>(levenshtein(
                              std::span<const symbol>(
                                  micros[mem[a]].representative),
                              std::span<const symbol>(
                                  micros[mem[b]].representative))));
        res.achieved_diameters[c] = diam;
    }
    return res;
}

} // namespace triptrie
