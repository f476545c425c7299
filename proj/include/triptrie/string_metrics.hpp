#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/symbols.hpp"
#include "triptrie/trip_string.hpp"
#include "triptrie/wide_uint.hpp"

namespace triptrie {

/// Position-weighted Hamming distance between two equal-length strings:
/// position i (1-based) contributes 2^(l-i) when the symbols differ, so
/// early positions dominate every combination of later ones. null_pad
/// compares equal only to null_pad. Exact for any l.
inline wide_uint weighted_hamming(std::span<const symbol> a,
                                  std::span<const symbol> b) {
    if (a.size() != b.size())
        throw error("precondition", "weighted_hamming: length mismatch");
    const std::size_t l = a.size();
    wide_uint d;
    for (std::size_t i = 0; i < l; ++i) {
        if (a[i] != b[i]) d.set_bit(l - 1 - i);
    }
    return d;
}

/// Same metric on one machine word; requires l <= 64. The linkage oracle
/// uses this for its distance matrix whenever the corpus length permits.
inline std::uint64_t weighted_hamming_u64(std::span<const symbol> a,
                                          std::span<const symbol> b) {
    if (a.size() != b.size())
        throw error("precondition", "weighted_hamming_u64: length mismatch");
    if (a.size() > 64)
        throw error("precondition", "weighted_hamming_u64: l > 64");
    const std::size_t l = a.size();
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < l; ++i) {
        if (a[i] != b[i]) d |= std::uint64_t{1} << (l - 1 - i);
    }
    return d;
}

inline wide_uint weighted_hamming(const trip_string& a, const trip_string& b) {
    return weighted_hamming(std::span<const symbol>(a.symbols),
                            std::span<const symbol>(b.symbols));
}

/// Largest p such that the first p symbols agree.
inline std::size_t shared_prefix_len(std::span<const symbol> a,
                                     std::span<const symbol> b) {
    if (a.size() != b.size())
        throw error("precondition", "shared_prefix_len: length mismatch");
    std::size_t p = 0;
    while (p < a.size() && a[p] == b[p]) ++p;
    return p;
}

inline std::size_t shared_prefix_len(const trip_string& a,
                                     const trip_string& b) {
    return shared_prefix_len(std::span<const symbol>(a.symbols),
                             std::span<const symbol>(b.symbols));
}

/// Levenshtein edit distance over the region alphabet. Trips are treated
/// as variable-length routes, so trailing null_pad runs are stripped
/// before comparing. Two-row dynamic program with common prefix/suffix
/// trimming.
inline std::size_t levenshtein(std::span<const symbol> a,
                               std::span<const symbol> b) {
    a = a.first(unpadded_size(a));
    b = b.first(unpadded_size(b));

    // trim common prefix and suffix; they never need edits
    std::size_t pre = 0;
    while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) ++pre;
    a = a.subspan(pre);
    b = b.subspan(pre);
    std::size_t suf = 0;
    while (suf < a.size() && suf < b.size() &&
           a[a.size() - 1 - suf] == b[b.size() - 1 - suf])
        ++suf;
    a = a.first(a.size() - suf);
    b = b.first(b.size() - suf);

    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    if (a.size() < b.size()) std::swap(a, b); // keep the row short

    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
        }
    }
    return row[b.size()];
}

inline std::size_t levenshtein(const trip_string& a, const trip_string& b) {
    return levenshtein(std::span<const symbol>(a.symbols),
                       std::span<const symbol>(b.symbols));
}

} // namespace triptrie
