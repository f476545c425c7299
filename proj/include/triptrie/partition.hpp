#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "triptrie/errors.hpp"

namespace triptrie {

/// A clustering of n instances into k labeled blocks. Labels are 1..k and
/// every label occurs at least once (surjective labeling).
struct partition {
    std::vector<std::uint32_t> labels;
    std::uint32_t block_count = 0;

    std::size_t size() const noexcept { return labels.size(); }

    bool is_valid() const {
        std::vector<bool> seen(block_count, false);
        for (std::uint32_t lbl : labels) {
            if (lbl < 1 || lbl > block_count) return false;
            seen[lbl - 1] = true;
        }
        for (bool s : seen)
            if (!s) return false;
        return true;
    }
};

/// Canonicalize an arbitrary per-instance block key into labels numbered
/// by first occurrence, so equal clusterings produce equal label arrays.
inline partition make_canonical_partition(std::span<const std::uint32_t> keys) {
    partition p;
    p.labels.reserve(keys.size());
    std::unordered_map<std::uint32_t, std::uint32_t> relabel;
    relabel.reserve(keys.size());
    for (std::uint32_t key : keys) {
        auto [it, inserted] =
            relabel.emplace(key, static_cast<std::uint32_t>(relabel.size() + 1));
        p.labels.push_back(it->second);
    }
    p.block_count = static_cast<std::uint32_t>(relabel.size());
    return p;
}

/// True iff the two labelings describe the same set partition, i.e. are
/// identical up to renaming of cluster numbers. Blocks counts must match
/// and every c1-block must carry a single c2 label.
///
/// The one-directional purity scan suffices: with k1 == k2 == k and both
/// labelings surjective, purity defines a map f from c1-labels to
/// c2-labels. Every instance's c2 label is f of its c1 label, so the image
/// of f covers all k c2-labels, making f a bijection; each c2-block is then
/// the union of the c1-blocks mapped to it, which is exactly one block.
/// Hence the c1- and c2-blocks coincide and the check is symmetric.
inline bool partitions_equal_up_to_relabeling(const partition& c1,
                                              const partition& c2) {
    if (c1.size() != c2.size())
        throw error("precondition",
                    "partition comparison: instance counts differ");
    if (!c1.is_valid() || !c2.is_valid())
        throw error("invalid_partition", "labeling is not surjective onto 1..k");
    if (c1.block_count != c2.block_count) return false;
    // block_label[b] = the single c2 label seen in c1-block b, 0 if none yet
    std::vector<std::uint32_t> block_label(c1.block_count + 1, 0);
    for (std::size_t i = 0; i < c1.labels.size(); ++i) {
        std::uint32_t b = c1.labels[i];
        if (block_label[b] == 0)
            block_label[b] = c2.labels[i];
        else if (block_label[b] != c2.labels[i])
            return false;
    }
    return true;
}

/// True iff `fine` refines `coarse`: every fine block lies inside a single
/// coarse block.
inline bool partition_refines(const partition& fine, const partition& coarse) {
    if (fine.size() != coarse.size())
        throw error("precondition", "refinement check: instance counts differ");
    std::vector<std::uint32_t> image(fine.block_count + 1, 0);
    for (std::size_t i = 0; i < fine.labels.size(); ++i) {
        std::uint32_t b = fine.labels[i];
        if (image[b] == 0)
            image[b] = coarse.labels[i];
        else if (image[b] != coarse.labels[i])
            return false;
    }
    return true;
}

} // namespace triptrie
