#pragma once

#include <cstdint>

namespace triptrie {

/// Region symbol id. Ordinary grid cells use 1..n_r*n_c; two sentinels
/// complete the alphabet:
///   root_symbol (0)  -- artificial common start, only at the trie root
///   null_pad   (-1)  -- trailing padding so all strings share one length;
///                       compares equal only to itself
using symbol = std::int32_t;

inline constexpr symbol root_symbol = 0;
inline constexpr symbol null_pad = -1;

inline constexpr bool is_ordinary(symbol s) noexcept { return s >= 1; }

} // namespace triptrie
