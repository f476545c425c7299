#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/trip_string.hpp"

namespace triptrie {

/// Seeded generator with portable bounded draws. mt19937_64 produces a
/// standard-defined sequence and the rejection sampling below avoids
/// std::uniform_int_distribution, whose output is implementation-defined;
/// together they make seeded runs byte-identical across platforms.
class det_rng {
public:
    explicit det_rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw error("parameter", "det_rng::below(0)");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    std::uint64_t in_range(std::uint64_t lo, std::uint64_t hi) { // inclusive
        return lo + below(hi - lo + 1);
    }

    /// Fisher-Yates; deterministic given the seed.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices out of [0, n), in draw order.
    std::vector<std::uint32_t> sample_indices(std::size_t n, std::size_t k) {
        if (k > n)
            throw error("parameter", "sample_indices: k exceeds population");
        std::vector<std::uint32_t> pool(n);
        for (std::size_t i = 0; i < n; ++i)
            pool[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

struct walk_corpus_params {
    std::size_t trips = 1000;
    std::int32_t grid_rows = 20;
    std::int32_t grid_cols = 20;
    std::size_t min_len = 3;
    std::size_t max_len = 25;
    std::size_t hotspots = 5;    // favored start cells
    double hotspot_share = 0.7;  // fraction of trips starting at a hotspot
    double dwell_chance = 0.25;  // probability of staying in place per step
};

/// Random-walk trips over an abstract grid: neighboring-cell moves with
/// occasional dwell, a few favored start cells and varying lengths, so the
/// corpus shares prefixes, contains duplicates and needs padding much like
/// encoded GPS trips. Strings come back padded to a common length.
inline std::vector<trip_string> make_walk_corpus(const walk_corpus_params& p,
                                                 std::uint64_t seed) {
    if (p.trips == 0) throw error("parameter", "make_walk_corpus: zero trips");
    if (p.min_len < 1 || p.max_len < p.min_len)
        throw error("parameter", "make_walk_corpus: bad length range");
    det_rng rng(seed);
    const std::int64_t rows = p.grid_rows, cols = p.grid_cols;
    std::vector<std::int64_t> hot;
    for (std::size_t i = 0; i < p.hotspots; ++i)
        hot.push_back(static_cast<std::int64_t>(rng.below(
            static_cast<std::uint64_t>(rows * cols))));

    std::vector<trip_string> corpus;
    corpus.reserve(p.trips);
    for (std::size_t t = 0; t < p.trips; ++t) {
        std::size_t len = static_cast<std::size_t>(
            rng.in_range(p.min_len, p.max_len));
        std::int64_t cell;
        bool from_hotspot =
            !hot.empty() &&
            rng.below(1000) < static_cast<std::uint64_t>(p.hotspot_share * 1000);
        if (from_hotspot)
            cell = hot[static_cast<std::size_t>(rng.below(hot.size()))];
        else
            cell = static_cast<std::int64_t>(
                rng.below(static_cast<std::uint64_t>(rows * cols)));

        trip_string s;
        s.trip_id = static_cast<std::int64_t>(t);
        s.taxi_id = "synthetic";
        s.t_r = 60;
        s.symbols.reserve(len);
        for (std::size_t i = 0; i < len; ++i) {
            s.symbols.push_back(static_cast<symbol>(cell + 1));
            if (rng.below(1000) <
                static_cast<std::uint64_t>(p.dwell_chance * 1000))
                continue; // dwell: repeat the cell
            std::int64_t r = cell / cols, c = cell % cols;
            switch (rng.below(4)) {
            case 0: r = std::min(r + 1, rows - 1); break;
            case 1: r = std::max<std::int64_t>(r - 1, 0); break;
            case 2: c = std::min(c + 1, cols - 1); break;
            default: c = std::max<std::int64_t>(c - 1, 0); break;
            }
            cell = r * cols + c;
        }
        corpus.push_back(std::move(s));
    }
    pad_strings(corpus);
    return corpus;
}

/// Uniform random equal-length strings over a small alphabet; handy for
/// metric property tests.
inline std::vector<symbol> make_random_string(det_rng& rng, std::size_t len,
                                              std::int32_t alphabet) {
    std::vector<symbol> s(len);
    for (std::size_t i = 0; i < len; ++i)
        s[i] = static_cast<symbol>(
            rng.below(static_cast<std::uint64_t>(alphabet)) + 1);
    return s;
}

} // namespace triptrie
