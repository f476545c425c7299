#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/symbols.hpp"

namespace triptrie {

/// One trip encoded at a fixed temporal resolution: symbols[i] is the
/// region the trip occupied at time i * t_r after its start (0-based here,
/// 1-based in prose). Ordinary symbols may be followed by a contiguous
/// null_pad suffix once the corpus has been padded to a common length.
struct trip_string {
    std::int64_t trip_id = 0;
    std::string taxi_id;
    std::int64_t start_epoch = 0;
    std::int32_t t_r = 0; // seconds between consecutive symbols
    std::vector<symbol> symbols;

    std::size_t size() const noexcept { return symbols.size(); }

    /// Length without the trailing null_pad run.
    std::size_t unpadded_size() const noexcept {
        std::size_t n = symbols.size();
        while (n > 0 && symbols[n - 1] == null_pad) --n;
        return n;
    }
};

inline std::size_t unpadded_size(std::span<const symbol> s) noexcept {
    std::size_t n = s.size();
    while (n > 0 && s[n - 1] == null_pad) --n;
    return n;
}

/// Pad every string with null_pad up to the corpus maximum length, in
/// place. Returns the common length l.
inline std::size_t pad_strings(std::vector<trip_string>& strings) {
    if (strings.empty())
        throw error("parameter", "pad_strings: empty corpus");
    std::size_t l = 0;
    for (const trip_string& s : strings) l = std::max(l, s.symbols.size());
    for (trip_string& s : strings) s.symbols.resize(l, null_pad);
    return l;
}

} // namespace triptrie
