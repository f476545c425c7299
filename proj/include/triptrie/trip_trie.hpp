#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/partition.hpp"
#include "triptrie/symbols.hpp"
#include "triptrie/trip_string.hpp"

namespace triptrie {

namespace detail {

/// Open-addressing map from (parent node, symbol) edges to child nodes.
/// Keys are packed into one u64 and key 0 never occurs (the root symbol is
/// never a child), so 0 marks an empty slot and ~0 a deleted one. Every
/// node has exactly one incoming edge, so the slot also carries the
/// child's trip count: the insert hot path then touches a single cache
/// line per symbol. Linear probing with a splitmix64 finalizer keeps trie
/// construction close to memory bandwidth.
class edge_map {
public:
    static constexpr std::uint64_t empty_key = 0;
    static constexpr std::uint64_t deleted_key = ~std::uint64_t{0};

    struct slot {
        std::uint64_t key = empty_key;
        std::uint32_t child = 0;
        std::uint32_t count = 0;
    };

    edge_map() { rehash(1024); }

    std::size_t size() const noexcept { return size_; }

    void reserve(std::size_t n) {
        std::size_t want = 16;
        while (want * 7 < n * 10) want <<= 1; // target load factor 0.7
        if (want > slots_.size()) rehash(want);
    }

    slot* find(std::uint64_t key) noexcept {
        std::size_t i = probe_start(key);
        while (true) {
            slot& s = slots_[i];
            if (s.key == key) return &s;
            if (s.key == empty_key) return nullptr;
            i = (i + 1) & mask_;
        }
    }

    const slot* find(std::uint64_t key) const noexcept {
        return const_cast<edge_map*>(this)->find(key);
    }

    /// Returns (slot, inserted-fresh flag); fresh slots start at count 0.
    std::pair<slot*, bool> try_emplace(std::uint64_t key, std::uint32_t child) {
        if ((size_ + tombstones_ + 1) * 10 >= slots_.size() * 7)
            rehash(slots_.size() * 2);
        std::size_t i = probe_start(key);
        std::size_t insert_at = SIZE_MAX;
        while (true) {
            slot& s = slots_[i];
            if (s.key == key) return {&s, false};
            if (s.key == deleted_key && insert_at == SIZE_MAX) insert_at = i;
            if (s.key == empty_key) {
                if (insert_at == SIZE_MAX) insert_at = i;
                slot& dst = slots_[insert_at];
                if (dst.key == deleted_key) --tombstones_;
                dst.key = key;
                dst.child = child;
                dst.count = 0;
                ++size_;
                return {&dst, true};
            }
            i = (i + 1) & mask_;
        }
    }

    void erase(std::uint64_t key) noexcept {
        std::size_t i = probe_start(key);
        while (true) {
            slot& s = slots_[i];
            if (s.key == key) {
                s.key = deleted_key;
                --size_;
                ++tombstones_;
                return;
            }
            if (s.key == empty_key) return;
            i = (i + 1) & mask_;
        }
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const slot& s : slots_) {
            if (s.key != empty_key && s.key != deleted_key) fn(s);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t x) noexcept {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::size_t probe_start(std::uint64_t key) const noexcept {
        return static_cast<std::size_t>(mix(key)) & mask_;
    }

    void rehash(std::size_t new_cap) {
        std::vector<slot> old = std::move(slots_);
        slots_.assign(new_cap, slot{});
        mask_ = new_cap - 1;
        tombstones_ = 0;
        size_ = 0;
        for (const slot& s : old) {
            if (s.key == empty_key || s.key == deleted_key) continue;
            std::size_t i = probe_start(s.key);
            while (slots_[i].key != empty_key) i = (i + 1) & mask_;
            slots_[i] = s;
            ++size_;
        }
    }

    std::vector<slot> slots_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
    std::size_t tombstones_ = 0;
};

} // namespace detail

/// Prefix tree over padded trip strings with an artificial common root.
/// The node set at depth k partitions the trips by their first k symbols,
/// which makes the trie a threshold dendrogram read bottom-up: dendrogram
/// level i corresponds to trie depth l-i (strings grouped by a shared
/// prefix of length l-i).
///
/// Two-phase use: build/insert/erase mutate (exclusive access), then an
/// explicit freeze() computes the level index, canonical child order and
/// per-node member lists; a frozen trie is immutable and every query may
/// run concurrently. Mutating again requires unfreeze().
///
/// Duplicate trips are kept: a node stores how many (and which) trips share
/// its prefix, so the depth-l leaves are classes of identical strings
/// (singletons when all strings are distinct).
class trip_trie {
public:
    using node_id = std::uint32_t;
    using instance_id = std::uint32_t; // position in insertion order
    static constexpr node_id npos = 0xFFFFFFFFu;

    trip_trie() { nodes_.push_back(node_data{root_symbol, 0, npos}); }

    /// Build from an equal-length corpus and freeze. O(n*l) expected.
    static trip_trie build(std::span<const trip_string> corpus) {
        trip_trie t;
        if (!corpus.empty()) {
            // node count is at most n*l; sizing the edge table up front
            // avoids every growth rehash during the build
            t.edge_.reserve(corpus.size() * corpus[0].symbols.size());
        }
        for (const trip_string& s : corpus) t.insert(s);
        t.freeze();
        return t;
    }

    // ---- mutation phase ----

    /// Insert one padded string; returns the leaf node. Walks or creates at
    /// most l nodes and bumps trip counts along the path, so the result is
    /// identical to rebuilding from the enlarged corpus.
    node_id insert(const trip_string& s) { return insert(s.symbols); }

    node_id insert(std::span<const symbol> symbols) {
        require_mutable();
        if (symbols.empty() && !l_set_)
            throw error("precondition", "insert: empty string");
        if (l_set_ && symbols.size() != l_)
            throw error("precondition",
                        "insert: string length does not match trie length");
        bool padded = false;
        for (symbol s : symbols) {
            if (!is_ordinary(s) && s != null_pad)
                throw error("precondition",
                            "insert: strings may hold only ordinary region "
                            "symbols and trailing padding");
            if (s == null_pad)
                padded = true;
            else if (padded)
                throw error("precondition",
                            "insert: padding must be a contiguous suffix");
        }
        if (!l_set_) {
            l_ = symbols.size();
            l_set_ = true;
        }
        node_id cur = root();
        ++root_count_;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            detail::edge_map::slot* s = child_or_create(
                cur, symbols[i], static_cast<std::uint32_t>(i + 1));
            ++s->count;
            cur = s->child;
        }
        trip_leaf_.push_back(cur);
        ++active_;
        return cur;
    }

    /// Inverse of insert: decrement counts along the trip's path and prune
    /// nodes that no longer carry any trip.
    void erase(instance_id instance) {
        require_mutable();
        if (instance >= trip_leaf_.size() || trip_leaf_[instance] == npos)
            throw error("parameter", "erase: unknown or already erased trip");
        node_id cur = trip_leaf_[instance];
        trip_leaf_[instance] = npos;
        --active_;
        while (cur != root()) {
            node_id parent = nodes_[cur].parent;
            std::uint64_t key = edge_key(parent, nodes_[cur].sym);
            detail::edge_map::slot* s = edge_.find(key);
            if (--s->count == 0) {
                edge_.erase(key);
                nodes_[cur].level = tombstone_level;
                free_.push_back(cur);
            }
            cur = parent;
        }
        --root_count_;
    }

    void freeze() {
        if (frozen_) return;
        build_children_index();
        build_level_index();
        build_count_index();
        build_member_index();
        frozen_ = true;
    }

    void unfreeze() {
        frozen_ = false;
        level_nodes_.clear();
        children_flat_.clear();
        child_begin_.clear();
        counts_.clear();
        dfs_members_.clear();
        dfs_begin_.clear();
        instance_pos_.clear();
    }

    bool frozen() const noexcept { return frozen_; }

    // ---- structure ----

    std::size_t string_length() const noexcept { return l_; }
    std::uint32_t size() const noexcept { return active_; } // active trips
    std::size_t total_instances() const noexcept { return trip_leaf_.size(); }
    bool instance_active(instance_id i) const {
        return i < trip_leaf_.size() && trip_leaf_[i] != npos;
    }
    node_id root() const noexcept { return 0; }

    std::size_t node_count() const noexcept {
        return nodes_.size() - free_.size();
    }

    bool valid_node(node_id n) const noexcept {
        return n < nodes_.size() && nodes_[n].level != tombstone_level;
    }

    symbol node_symbol(node_id n) const { return at(n).sym; }
    std::uint32_t node_level(node_id n) const { return at(n).level; }
    node_id parent(node_id n) const { return at(n).parent; }

    std::uint32_t node_trip_count(node_id n) const {
        const node_data& nd = at(n);
        if (frozen_) return counts_[n];
        if (n == root()) return root_count_;
        return edge_.find(edge_key(nd.parent, nd.sym))->count;
    }
    node_id leaf_of(instance_id i) const {
        if (!instance_active(i))
            throw error("parameter", "leaf_of: unknown or erased trip");
        return trip_leaf_[i];
    }

    /// Symbols along the root path (the node's prefix, ROOT excluded).
    std::vector<symbol> prefix_of(node_id n) const {
        const node_data& nd = at(n);
        std::vector<symbol> out(nd.level);
        node_id cur = n;
        for (std::size_t i = nd.level; i-- > 0;) {
            out[i] = nodes_[cur].sym;
            cur = nodes_[cur].parent;
        }
        return out;
    }

    /// Node whose root path spells the prefix, if any. Empty prefix is the
    /// root.
    std::optional<node_id> locate(std::span<const symbol> prefix) const {
        if (prefix.size() > l_) return std::nullopt;
        node_id cur = root();
        for (symbol s : prefix) {
            const detail::edge_map::slot* e = edge_.find(edge_key(cur, s));
            if (!e) return std::nullopt;
            cur = e->child;
        }
        return cur;
    }

    /// Deepest common ancestor; the bifurcation point of two trip groups.
    node_id lca(node_id a, node_id b) const {
        at(a);
        at(b);
        while (nodes_[a].level > nodes_[b].level) a = nodes_[a].parent;
        while (nodes_[b].level > nodes_[a].level) b = nodes_[b].parent;
        while (a != b) {
            a = nodes_[a].parent;
            b = nodes_[b].parent;
        }
        return a;
    }

    // ---- frozen queries ----

    std::span<const node_id> children(node_id n) const {
        require_frozen();
        at(n);
        return {children_flat_.data() + child_begin_[n],
                child_begin_[n + 1] - child_begin_[n]};
    }

    /// Nodes at one trie depth in canonical (prefix-lexicographic) order.
    std::span<const node_id> nodes_at_depth(std::uint32_t k) const {
        require_frozen();
        if (k >= level_nodes_.size()) return {};
        return level_nodes_[k];
    }

    /// Trips whose strings pass through this node. Grouped by full-string
    /// class in prefix-lexicographic order, ascending within each class.
    std::span<const instance_id> member_trips(node_id n) const {
        require_frozen();
        at(n);
        return {dfs_members_.data() + dfs_begin_[n], counts_[n]};
    }

    struct child_stat {
        symbol sym;
        std::uint32_t count;
        double probability;
    };

    /// Next-step distribution at a node: each child's trip share. A
    /// null_pad child means the trips end here. Empty for leaves.
    std::vector<child_stat> children_distribution(node_id n) const {
        require_frozen();
        at(n);
        std::vector<child_stat> out;
        for (node_id c : children(n)) {
            out.push_back({nodes_[c].sym, counts_[c],
                           static_cast<double>(counts_[c]) /
                               static_cast<double>(counts_[n])});
        }
        return out;
    }

    /// Partition of the trips at dendrogram level i, i.e. by trie depth
    /// l-i: blocks are the nodes at that depth (identical strings share a
    /// block at level 0; one block for i >= l). Labels are canonical by
    /// first trip occurrence.
    partition level_partition(std::uint32_t dendro_level) const {
        require_frozen();
        std::uint32_t depth =
            dendro_level >= l_ ? 0u
                               : static_cast<std::uint32_t>(l_) - dendro_level;
        return depth_partition(depth);
    }

    /// Same partition addressed by trie depth directly.
    partition depth_partition(std::uint32_t depth) const {
        require_frozen();
        if (depth >= level_nodes_.size())
            throw error("parameter", "depth_partition: depth out of range");
        std::vector<std::uint32_t> keys(active_);
        for (node_id n : level_nodes_[depth]) {
            for (instance_id t : member_trips(n)) keys[instance_pos_[t]] = n;
        }
        return make_canonical_partition(keys);
    }

    // ---- serialization ----

    /// Level-indexed node tables as versioned plain text; canonical, so
    /// equal tries serialize to identical bytes. Requires a frozen trie.
    void serialize(std::ostream& out) const {
        require_frozen();
        out << "triptrie v1\n";
        out << "l " << l_ << "\n";
        out << "n " << active_ << "\n";
        out << "levels " << level_nodes_.size() << "\n";
        std::vector<std::uint32_t> ordinal(nodes_.size(), 0);
        for (std::size_t k = 0; k < level_nodes_.size(); ++k) {
            const auto& lvl = level_nodes_[k];
            out << "level " << k << " " << lvl.size() << "\n";
            for (std::size_t i = 0; i < lvl.size(); ++i) {
                const node_data& nd = nodes_[lvl[i]];
                ordinal[lvl[i]] = static_cast<std::uint32_t>(i);
                if (k == 0)
                    out << "-1 " << nd.sym << " " << counts_[lvl[i]] << "\n";
                else
                    out << ordinal[nd.parent] << " " << nd.sym << " "
                        << counts_[lvl[i]] << "\n";
            }
        }
        out << "leaves " << active_ << "\n";
        for (instance_id i = 0; i < trip_leaf_.size(); ++i) {
            if (trip_leaf_[i] == npos) continue;
            out << ordinal[trip_leaf_[i]] << "\n";
        }
        out << "end\n";
    }

    /// Parse a serialized trie. Returns an unfrozen trie; freeze() before
    /// querying. Malformed or tampered payloads raise a format error.
    static trip_trie deserialize(std::istream& in) {
        auto fail = [](const std::string& why) -> error {
            return error("format", "trie snapshot: " + why);
        };
        std::string line;
        if (!std::getline(in, line)) throw fail("empty input");
        if (line != "triptrie v1") throw fail("unknown header/version: " + line);

        std::size_t l = read_kv(in, "l", fail);
        std::size_t n = read_kv(in, "n", fail);
        std::size_t levels = read_kv(in, "levels", fail);
        if (levels != (n == 0 ? 1 : l + 1))
            throw fail("level count does not match l");

        trip_trie t;
        t.l_ = l;
        t.l_set_ = l > 0;
        std::vector<node_id> prev; // ordinal -> node id at previous level
        for (std::size_t k = 0; k < levels; ++k) {
            if (!std::getline(in, line)) throw fail("missing level header");
            std::istringstream h(line);
            std::string tag;
            std::size_t kk = 0, cnt = 0;
            if (!(h >> tag >> kk >> cnt) || tag != "level" || kk != k)
                throw fail("bad level header: " + line);
            if (k == 0 && cnt != 1) throw fail("level 0 must hold one root");
            std::vector<node_id> cur;
            cur.reserve(cnt);
            for (std::size_t i = 0; i < cnt; ++i) {
                if (!std::getline(in, line)) throw fail("missing node line");
                std::istringstream ns(line);
                long long parent_ord = 0, sym = 0, cnt_trips = 0;
                if (!(ns >> parent_ord >> sym >> cnt_trips) || cnt_trips < 0)
                    throw fail("bad node line: " + line);
                if (k == 0) {
                    if (parent_ord != -1 || sym != root_symbol)
                        throw fail("bad root line");
                    t.root_count_ = static_cast<std::uint32_t>(cnt_trips);
                    cur.push_back(t.root());
                    continue;
                }
                if (parent_ord < 0 ||
                    static_cast<std::size_t>(parent_ord) >= prev.size())
                    throw fail("parent ordinal out of range");
                if (sym != null_pad && sym < 1)
                    throw fail("bad symbol id");
                node_id id = static_cast<node_id>(t.nodes_.size());
                t.nodes_.push_back(node_data{static_cast<symbol>(sym),
                                             static_cast<std::uint32_t>(k),
                                             prev[static_cast<std::size_t>(parent_ord)]});
                auto [slot, fresh] = t.edge_.try_emplace(
                    edge_key(t.nodes_.back().parent, t.nodes_.back().sym), id);
                if (!fresh) throw fail("duplicate edge");
                slot->count = static_cast<std::uint32_t>(cnt_trips);
                cur.push_back(id);
            }
            prev = std::move(cur);
        }
        // prev now holds the deepest level: the leaves
        std::size_t leaves = read_kv(in, "leaves", fail);
        if (leaves != n) throw fail("leaf count does not match n");
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::getline(in, line)) throw fail("missing leaf line");
            std::istringstream ls(line);
            long long ord = 0;
            if (!(ls >> ord) || ord < 0 ||
                static_cast<std::size_t>(ord) >= prev.size())
                throw fail("bad leaf ordinal");
            t.trip_leaf_.push_back(prev[static_cast<std::size_t>(ord)]);
        }
        t.active_ = static_cast<std::uint32_t>(n);
        if (!std::getline(in, line) || line != "end")
            throw fail("missing end marker");
        t.validate_counts(fail);
        return t;
    }

private:
    struct node_data {
        symbol sym;
        std::uint32_t level;
        node_id parent;
    };
    static constexpr std::uint32_t tombstone_level = 0xFFFFFFFFu;

    static std::uint64_t edge_key(node_id parent, symbol s) noexcept {
        return (static_cast<std::uint64_t>(parent) << 32) |
               static_cast<std::uint32_t>(s);
    }

    const node_data& at(node_id n) const {
        if (!valid_node(n)) throw error("parameter", "unknown trie node");
        return nodes_[n];
    }

    void require_mutable() const {
        if (frozen_)
            throw error("frozen", "trie is frozen; unfreeze() before mutating");
    }

    void require_frozen() const {
        if (!frozen_)
            throw error("not_frozen", "query requires a frozen trie");
    }

    detail::edge_map::slot* child_or_create(node_id parent, symbol s,
                                            std::uint32_t level) {
        auto [slot, fresh] = edge_.try_emplace(edge_key(parent, s), 0);
        if (fresh) {
            node_id id;
            if (!free_.empty()) {
                id = free_.back();
                free_.pop_back();
                nodes_[id] = node_data{s, level, parent};
            } else {
                id = static_cast<node_id>(nodes_.size());
                nodes_.push_back(node_data{s, level, parent});
            }
            slot->child = id;
        }
        return slot;
    }

    void build_children_index() {
        const std::size_t slots = nodes_.size();
        child_begin_.assign(slots + 1, 0);
        for (node_id n = 0; n < slots; ++n) {
            if (n == root() || !valid_node(n)) continue;
            ++child_begin_[nodes_[n].parent + 1];
        }
        for (std::size_t i = 1; i <= slots; ++i)
            child_begin_[i] += child_begin_[i - 1];
        children_flat_.assign(child_begin_[slots], 0);
        std::vector<std::uint32_t> cursor(child_begin_.begin(),
                                          child_begin_.end() - 1);
        for (node_id n = 0; n < slots; ++n) {
            if (n == root() || !valid_node(n)) continue;
            children_flat_[cursor[nodes_[n].parent]++] = n;
        }
        for (node_id n = 0; n < slots; ++n) {
            auto first = children_flat_.begin() + child_begin_[n];
            auto last = children_flat_.begin() + child_begin_[n + 1];
            std::sort(first, last, [&](node_id a, node_id b) {
                return nodes_[a].sym < nodes_[b].sym;
            });
        }
    }

    void build_level_index() {
        level_nodes_.assign(active_ == 0 ? 1 : l_ + 1, {});
        level_nodes_[0].push_back(root());
        for (std::size_t k = 0; k + 1 < level_nodes_.size(); ++k) {
            for (node_id n : level_nodes_[k]) {
                auto cs = std::span<const node_id>(
                    children_flat_.data() + child_begin_[n],
                    child_begin_[n + 1] - child_begin_[n]);
                level_nodes_[k + 1].insert(level_nodes_[k + 1].end(),
                                           cs.begin(), cs.end());
            }
        }
    }

    void build_count_index() {
        counts_.assign(nodes_.size(), 0);
        if (!nodes_.empty()) counts_[root()] = root_count_;
        edge_.for_each([&](const detail::edge_map::slot& s) {
            counts_[s.child] = s.count;
        });
    }

    void build_member_index() {
        // Canonical DFS gives every subtree a contiguous run of leaf
        // instances, so one array of instance ids plus a per-node offset
        // covers member lists at every level.
        dfs_begin_.assign(nodes_.size(), 0);
        dfs_members_.assign(active_, 0);
        std::uint32_t cursor = 0;
        std::vector<node_id> stack{root()};
        while (!stack.empty()) {
            node_id n = stack.back();
            stack.pop_back();
            dfs_begin_[n] = cursor;
            auto first = children_flat_.begin() + child_begin_[n];
            auto last = children_flat_.begin() + child_begin_[n + 1];
            if (first == last) {
                cursor += counts_[n];
                continue;
            }
            for (auto it = last; it != first;) stack.push_back(*--it);
        }
        instance_pos_.assign(trip_leaf_.size(), npos);
        std::vector<std::uint32_t> fill(nodes_.size(), 0);
        std::uint32_t pos = 0;
        for (instance_id i = 0; i < trip_leaf_.size(); ++i) {
            node_id leaf = trip_leaf_[i];
            if (leaf == npos) continue;
            instance_pos_[i] = pos++;
            dfs_members_[dfs_begin_[leaf] + fill[leaf]++] = i;
        }
    }

    template <typename Fail>
    static std::size_t read_kv(std::istream& in, const std::string& key,
                               Fail&& fail) {
        std::string line;
        if (!std::getline(in, line)) throw fail("missing '" + key + "' line");
        std::istringstream s(line);
        std::string k;
        long long v = 0;
        if (!(s >> k >> v) || k != key || v < 0)
            throw fail("bad '" + key + "' line: " + line);
        return static_cast<std::size_t>(v);
    }

    template <typename Fail>
    void validate_counts(Fail&& fail) const {
        std::vector<std::uint32_t> count(nodes_.size(), 0);
        count[root()] = root_count_;
        edge_.for_each([&](const detail::edge_map::slot& s) {
            count[s.child] = s.count;
        });
        std::vector<std::uint64_t> child_sum(nodes_.size(), 0);
        std::vector<std::uint64_t> leaf_refs(nodes_.size(), 0);
        for (node_id n = 0; n < nodes_.size(); ++n) {
            if (n == root() || !valid_node(n)) continue;
            child_sum[nodes_[n].parent] += count[n];
        }
        for (node_id leaf : trip_leaf_) {
            if (leaf != npos) ++leaf_refs[leaf];
        }
        for (node_id n = 0; n < nodes_.size(); ++n) {
            if (!valid_node(n)) continue;
            bool is_leaf = nodes_[n].level == l_;
            if (is_leaf && active_ > 0) {
                if (leaf_refs[n] != count[n])
                    throw fail("leaf count mismatch");
            } else if (child_sum[n] != count[n]) {
                throw fail("internal node count mismatch");
            }
        }
    }

    std::vector<node_data> nodes_;
    std::vector<node_id> free_;
    detail::edge_map edge_;
    std::vector<node_id> trip_leaf_;
    std::uint32_t active_ = 0;
    std::uint32_t root_count_ = 0;
    std::size_t l_ = 0;
    bool l_set_ = false;

    bool frozen_ = false;
    std::vector<std::vector<node_id>> level_nodes_;
    std::vector<node_id> children_flat_;
    std::vector<std::uint32_t> child_begin_;
    std::vector<std::uint32_t> counts_; // per node, valid while frozen
    std::vector<instance_id> dfs_members_;
    std::vector<std::uint32_t> dfs_begin_;
    std::vector<std::uint32_t> instance_pos_;
};

} // namespace triptrie
