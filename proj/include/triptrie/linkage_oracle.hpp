#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/partition.hpp"
#include "triptrie/string_metrics.hpp"
#include "triptrie/trip_string.hpp"
#include "triptrie/trip_trie.hpp"
#include "triptrie/wide_uint.hpp"

namespace triptrie {

/// The oracle is a verification tool, not a production path: it holds the
/// full O(n^2) distance triangle in memory, so corpus size is capped.
struct oracle_options {
    std::size_t max_instances = 20000;
    /// Evaluate components at every distinct pairwise distance instead of
    /// only at the thresholds 2^i - 1 (diagnostic mode).
    bool full_threshold_sweep = false;
};

/// Symmetric pairwise weighted-Hamming distances with a zero diagonal.
/// Stores the strict upper triangle; one machine word per pair when the
/// string length allows, exact wide integers otherwise.
class distance_matrix {
public:
    distance_matrix(std::span<const trip_string> strings,
                    const oracle_options& opts = {}) {
        n_ = strings.size();
        if (n_ > opts.max_instances)
            throw error("capacity",
                        "corpus exceeds the oracle instance cap (" +
                            std::to_string(opts.max_instances) + ")");
        l_ = n_ > 0 ? strings[0].symbols.size() : 0;
        for (const trip_string& s : strings) {
            if (s.symbols.size() != l_)
                throw error("precondition",
                            "pairwise_distances: corpus is not padded to a "
                            "common length");
        }
        narrow_ = l_ <= 64;
        const std::size_t pairs = n_ * (n_ - 1) / 2;
        if (narrow_)
            d64_.resize(pairs);
        else
            dwide_.resize(pairs);
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            std::span<const symbol> a = strings[i].symbols;
            for (std::size_t j = i + 1; j < n_; ++j, ++idx) {
                std::span<const symbol> b = strings[j].symbols;
                if (narrow_)
                    d64_[idx] = weighted_hamming_u64(a, b);
                else
                    dwide_[idx] = weighted_hamming(a, b);
            }
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t string_length() const noexcept { return l_; }

    wide_uint at(std::size_t i, std::size_t j) const {
        if (i >= n_ || j >= n_)
            throw error("parameter", "distance_matrix: index out of range");
        if (i == j) return wide_uint{};
        if (i > j) std::swap(i, j);
        std::size_t idx = pair_index(i, j);
        return narrow_ ? wide_uint(d64_[idx]) : dwide_[idx];
    }

    /// Smallest t such that d(i,j) <= 2^t - 1, i.e. the bit length of the
    /// distance. This is where the pair becomes linked in the per-level
    /// threshold schedule.
    std::size_t merge_level(std::size_t i, std::size_t j) const {
        if (i == j) return 0;
        if (i > j) std::swap(i, j);
        std::size_t idx = pair_index(i, j);
        if (narrow_) return static_cast<std::size_t>(std::bit_width(d64_[idx]));
        return dwide_[idx].bit_length();
    }

    /// Order two off-diagonal pairs by distance without materializing
    /// wide values.
    std::strong_ordering compare(std::size_t i1, std::size_t j1,
                                 std::size_t i2, std::size_t j2) const {
        if (i1 > j1) std::swap(i1, j1);
        if (i2 > j2) std::swap(i2, j2);
        std::size_t a = pair_index(i1, j1), b = pair_index(i2, j2);
        if (narrow_) return d64_[a] <=> d64_[b];
        return dwide_[a] <=> dwide_[b];
    }

private:
    std::size_t pair_index(std::size_t i, std::size_t j) const noexcept {
        // strict upper triangle, row-major
        return i * n_ - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t n_ = 0;
    std::size_t l_ = 0;
    bool narrow_ = true;
    std::vector<std::uint64_t> d64_;
    std::vector<wide_uint> dwide_;
};

inline distance_matrix pairwise_distances(std::span<const trip_string> strings,
                                          const oracle_options& opts = {}) {
    return distance_matrix(strings, opts);
}

/// Ordered merge history of single-linkage clustering: partitions indexed
/// by the threshold at which they first hold. Step 0 is the all-singletons
/// base below every realized distance; later thresholds strictly increase
/// and each partition refines the next.
class threshold_dendrogram {
public:
    struct step {
        std::optional<wide_uint> threshold; // nullopt for the base step
        partition part;
    };

    explicit threshold_dendrogram(std::vector<step> steps)
        : steps_(std::move(steps)) {}

    const std::vector<step>& steps() const noexcept { return steps_; }

    /// The partition of the components of {(i,j) : d(i,j) <= t}.
    const partition& partition_at(const wide_uint& t) const {
        std::size_t best = 0;
        for (std::size_t s = 1; s < steps_.size(); ++s) {
            if (*steps_[s].threshold <= t) best = s;
        }
        return steps_[best].part;
    }

private:
    std::vector<step> steps_;
};

namespace detail {

class union_find {
public:
    explicit union_find(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
        return true;
    }

    partition to_partition() {
        std::vector<std::uint32_t> keys(parent_.size());
        for (std::size_t i = 0; i < parent_.size(); ++i)
            keys[i] = static_cast<std::uint32_t>(find(i));
        return make_canonical_partition(keys);
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
};

} // namespace detail

/// Single-linkage agglomerative clustering under the weighted Hamming
/// metric, with every group of clusters at the same linkage distance
/// merging simultaneously: the partition at threshold t is the set of
/// connected components of the graph with edges {(i,j) : d(i,j) <= t}.
inline threshold_dendrogram
single_linkage_multi_merge(std::span<const trip_string> strings,
                           const oracle_options& opts = {}) {
    distance_matrix dm(strings, opts);
    const std::size_t n = dm.size();
    const std::size_t l = dm.string_length();

    std::vector<threshold_dendrogram::step> steps;
    detail::union_find uf(n);
    steps.push_back({std::nullopt, uf.to_partition()});
    if (n == 0) return threshold_dendrogram(std::move(steps));

    auto sweep = [&](const wide_uint& threshold, auto&& links_at_threshold) {
        bool merged = false;
        links_at_threshold([&](std::size_t i, std::size_t j) {
            merged |= uf.unite(i, j);
        });
        if (merged) steps.push_back({threshold, uf.to_partition()});
    };

    if (!opts.full_threshold_sweep) {
        // Per-level schedule: thresholds 2^t - 1 for t = 0..l. A pair first
        // qualifies at t = bit_length(d).
        for (std::size_t t = 0; t <= l; ++t) {
            sweep(wide_uint::pow2_minus_one(t), [&](auto&& link) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = i + 1; j < n; ++j)
                        if (dm.merge_level(i, j) == t) link(i, j);
            });
        }
    } else {
        // Diagnostic schedule: every distinct pairwise distance, ascending.
        // One sort over all pairs, then one pass per equal-distance group.
        struct pair_ref {
            std::uint32_t i, j;
        };
        std::vector<pair_ref> order;
        order.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                order.push_back({static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(j)});
        std::sort(order.begin(), order.end(),
                  [&](const pair_ref& a, const pair_ref& b) {
                      return dm.compare(a.i, a.j, b.i, b.j) < 0;
                  });
        std::size_t g = 0;
        while (g < order.size()) {
            std::size_t e = g;
            while (e < order.size() &&
                   dm.compare(order[g].i, order[g].j, order[e].i, order[e].j) ==
                       std::strong_ordering::equal)
                ++e;
            sweep(dm.at(order[g].i, order[g].j), [&](auto&& link) {
                for (std::size_t k = g; k < e; ++k)
                    link(order[k].i, order[k].j);
            });
            g = e;
        }
    }
    return threshold_dendrogram(std::move(steps));
}

struct level_check {
    std::uint32_t level = 0; // dendrogram level
    bool equal = false;
};

struct equivalence_report {
    std::vector<level_check> levels;
    bool all_equal = true;
};

/// Compare the trie's partition at every dendrogram level 0..l against the
/// single-linkage oracle at threshold 2^i - 1. Equality at every level is
/// the trie<->dendrogram equivalence under test; a failure indicates an
/// implementation bug.
inline equivalence_report verify_equivalence(const trip_trie& trie,
                                             std::span<const trip_string> strings,
                                             const oracle_options& opts = {}) {
    if (trie.size() != strings.size())
        throw error("precondition",
                    "verify_equivalence: trie and corpus sizes differ");
    if (!strings.empty() && trie.string_length() != strings[0].symbols.size())
        throw error("precondition",
                    "verify_equivalence: trie and corpus lengths differ");
    threshold_dendrogram oracle = single_linkage_multi_merge(strings, opts);
    const std::size_t l = trie.string_length();

    equivalence_report rep;
    for (std::size_t i = 0; i <= l; ++i) {
        partition from_trie =
            trie.level_partition(static_cast<std::uint32_t>(i));
        const partition& from_oracle =
            oracle.partition_at(wide_uint::pow2_minus_one(i));
        bool eq = partitions_equal_up_to_relabeling(from_trie, from_oracle);
        rep.levels.push_back({static_cast<std::uint32_t>(i), eq});
        rep.all_equal &= eq;
    }
    return rep;
}

} // namespace triptrie
