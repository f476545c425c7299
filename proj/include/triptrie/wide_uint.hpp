#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace triptrie {

/// Arbitrary-width unsigned integer, just wide enough for the weighted
/// Hamming metric: its values are sums of distinct powers of two and grow
/// as 2^l, so they must never pass through floating point. Supports set_bit,
/// addition and ordering; words are stored little-endian with no trailing
/// zero word.
class wide_uint {
public:
    wide_uint() = default;

    explicit wide_uint(std::uint64_t v) {
        if (v != 0) words_.push_back(v);
    }

    /// 2^bit
    static wide_uint pow2(std::size_t bit) {
        wide_uint r;
        r.set_bit(bit);
        return r;
    }

    /// 2^bits - 1, i.e. the lowest `bits` bits all set.
    static wide_uint pow2_minus_one(std::size_t bits) {
        wide_uint r;
        if (bits == 0) return r;
        std::size_t full = bits / 64, rest = bits % 64;
        r.words_.assign(full, ~std::uint64_t{0});
        if (rest != 0) r.words_.push_back((std::uint64_t{1} << rest) - 1);
        return r;
    }

    bool is_zero() const noexcept { return words_.empty(); }

    void set_bit(std::size_t bit) {
        std::size_t w = bit / 64;
        if (w >= words_.size()) words_.resize(w + 1, 0);
        words_[w] |= std::uint64_t{1} << (bit % 64);
    }

    bool test_bit(std::size_t bit) const noexcept {
        std::size_t w = bit / 64;
        if (w >= words_.size()) return false;
        return (words_[w] >> (bit % 64)) & 1u;
    }

    /// Number of bits needed to represent the value; 0 for zero.
    /// Equivalently the smallest i with value < 2^i.
    std::size_t bit_length() const noexcept {
        if (words_.empty()) return 0;
        return 64 * words_.size() -
               static_cast<std::size_t>(std::countl_zero(words_.back()));
    }

    /// Low 64 bits; callers check bit_length() <= 64 when they need the
    /// exact value.
    std::uint64_t low64() const noexcept {
        return words_.empty() ? 0 : words_[0];
    }

    wide_uint& operator+=(const wide_uint& o) {
        if (o.words_.size() > words_.size()) words_.resize(o.words_.size(), 0);
        unsigned char carry = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t add = i < o.words_.size() ? o.words_[i] : 0;
            std::uint64_t s = words_[i] + add;
            unsigned char c1 = s < words_[i];
            std::uint64_t s2 = s + carry;
            unsigned char c2 = s2 < s;
            words_[i] = s2;
            carry = static_cast<unsigned char>(c1 | c2);
        }
        if (carry) words_.push_back(1);
        return *this;
    }

    friend wide_uint operator+(wide_uint a, const wide_uint& b) {
        a += b;
        return a;
    }

    friend bool operator==(const wide_uint& a, const wide_uint& b) noexcept {
        return a.words_ == b.words_;
    }

    friend std::strong_ordering operator<=>(const wide_uint& a,
                                            const wide_uint& b) noexcept {
        if (a.words_.size() != b.words_.size())
            return a.words_.size() <=> b.words_.size();
        for (std::size_t i = a.words_.size(); i-- > 0;) {
            if (a.words_[i] != b.words_[i]) return a.words_[i] <=> b.words_[i];
        }
        return std::strong_ordering::equal;
    }

    /// Decimal representation.
    std::string to_string() const {
        if (words_.empty()) return "0";
        // 32-bit limbs so the repeated divide-by-10^9 fits in 64 bits
        std::vector<std::uint32_t> limbs;
        limbs.reserve(words_.size() * 2);
        for (std::uint64_t w : words_) {
            limbs.push_back(static_cast<std::uint32_t>(w));
            limbs.push_back(static_cast<std::uint32_t>(w >> 32));
        }
        while (!limbs.empty() && limbs.back() == 0) limbs.pop_back();
        std::string digits;
        while (!limbs.empty()) {
            std::uint64_t rem = 0;
            for (std::size_t i = limbs.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | limbs[i];
                limbs[i] = static_cast<std::uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!limbs.empty() && limbs.back() == 0) limbs.pop_back();
            for (int d = 0; d < 9; ++d) {
                digits.push_back(static_cast<char>('0' + rem % 10));
                rem /= 10;
            }
        }
        while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
        return {digits.rbegin(), digits.rend()};
    }

private:
    std::vector<std::uint64_t> words_;
};

} // namespace triptrie
