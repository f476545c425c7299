#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "triptrie/macro_cluster.hpp"
#include "triptrie/string_metrics.hpp"
#include "triptrie/synthetic.hpp"

using namespace triptrie;
using tt_test::corpus;

namespace {

micro_cluster mc(std::vector<symbol> rep, std::uint32_t weight = 1) {
    micro_cluster m;
    m.node = 0;
    m.representative = std::move(rep);
    m.weight = weight;
    return m;
}

std::uint32_t cluster_diameter(std::span<const micro_cluster> micros,
                               const macro_clustering& g, std::uint32_t label) {
    std::uint32_t diam = 0;
    for (std::size_t i = 0; i < micros.size(); ++i) {
        if (g.assignment[i] != label) continue;
        for (std::size_t j = i + 1; j < micros.size(); ++j) {
            if (g.assignment[j] != label) continue;
            diam = std::max(diam,
                            static_cast<std::uint32_t>(levenshtein(
                                std::span<const symbol>(micros[i].representative),
                                std::span<const symbol>(micros[j].representative))));
        }
    }
    return diam;
}

} // namespace

TEST_CASE("micro_clusters lists the nodes at one level") {
    auto c = corpus({{1, 1}, {1, 2}, {2, 1}});
    trip_trie t = trip_trie::build(c);
    auto micros = micro_clusters(t, 1);
    REQUIRE(micros.size() == 2);
    CHECK(micros[0].representative == std::vector<symbol>{1});
    CHECK(micros[0].weight == 2);
    CHECK(micros[1].representative == std::vector<symbol>{2});
    CHECK(micros[1].weight == 1);

    auto leaves = micro_clusters(t, 2); // one per distinct full string
    CHECK(leaves.size() == 3);

    CHECK_THROWS_AS(micro_clusters(t, 0), error);
    CHECK_THROWS_AS(micro_clusters(t, 3), error);
}

TEST_CASE("micro_clusters trims padded tails") {
    auto c = corpus({{1, null_pad}, {1, 2}});
    trip_trie t = trip_trie::build(c);
    auto micros = micro_clusters(t, 2);
    REQUIRE(micros.size() == 2);
    CHECK(micros[0].representative == std::vector<symbol>{1});
    CHECK(micros[1].representative == std::vector<symbol>{1, 2});
}

TEST_CASE("one substitution groups two routes at q=1") {
    std::vector<micro_cluster> micros = {mc({1, 2, 3, 4}), mc({2, 2, 3, 4})};
    macro_clustering g = macro_cluster(micros, 1);
    CHECK(g.cluster_count == 1);
    CHECK(g.assignment == std::vector<std::uint32_t>{1, 1});
    CHECK(g.achieved_diameters == std::vector<std::uint32_t>{1});
}

TEST_CASE("q=0 keeps every micro-cluster separate") {
    std::vector<micro_cluster> micros = {mc({1, 2}), mc({1, 3}), mc({2, 2})};
    macro_clustering g = macro_cluster(micros, 0);
    CHECK(g.cluster_count == 3);
}

TEST_CASE("a far pair cannot share a cluster at q=1") {
    // pairwise distances: d(a,b) = 1, d(a,c) = 1, d(b,c) = 2
    std::vector<micro_cluster> micros = {mc({1, 2, 3}), mc({2, 2, 3}),
                                         mc({1, 2, 4})};
    for (macro_strategy s :
         {macro_strategy::complete_linkage, macro_strategy::greedy}) {
        macro_clustering g = macro_cluster(micros, 1, s);
        CHECK(g.cluster_count == 2);
        CHECK(g.assignment[1] != g.assignment[2]); // the distance-2 pair
        for (std::uint32_t lbl = 1; lbl <= g.cluster_count; ++lbl)
            CHECK(cluster_diameter(micros, g, lbl) <= 1);
    }
}

TEST_CASE("a generous q collapses everything into one cluster") {
    std::vector<micro_cluster> micros = {mc({1, 2, 3}), mc({4, 5}), mc({6})};
    macro_clustering g = macro_cluster(micros, 10);
    CHECK(g.cluster_count == 1);
}

TEST_CASE("cluster count is non-increasing in q") {
    det_rng rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<micro_cluster> micros;
        std::size_t m = 2 + rng.below(15);
        for (std::size_t i = 0; i < m; ++i)
            micros.push_back(mc(make_random_string(rng, 1 + rng.below(6), 4)));
        std::uint32_t prev = 0;
        for (std::uint32_t q = 0; q <= 6; ++q) {
            macro_clustering g = macro_cluster(micros, q);
            if (q > 0) CHECK(g.cluster_count <= prev);
            prev = g.cluster_count;
        }
    }
}

TEST_CASE("diameter bound holds post hoc for both strategies") {
    det_rng rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<micro_cluster> micros;
        std::size_t m = 2 + rng.below(20);
        for (std::size_t i = 0; i < m; ++i)
            micros.push_back(mc(make_random_string(rng, 1 + rng.below(7), 3)));
        std::uint32_t q = static_cast<std::uint32_t>(rng.below(5));
        for (macro_strategy s :
             {macro_strategy::complete_linkage, macro_strategy::greedy}) {
            macro_clustering g = macro_cluster(micros, q, s);
            REQUIRE(g.cluster_count >= 1);
            for (std::uint32_t lbl = 1; lbl <= g.cluster_count; ++lbl) {
                std::uint32_t diam = cluster_diameter(micros, g, lbl);
                CHECK(diam <= q);
                CHECK(diam == g.achieved_diameters[lbl - 1]);
            }
        }
    }
}

TEST_CASE("macro clustering on trie micro-clusters keeps weights") {
    auto c = corpus({{1, 2, 3, 4}, {2, 2, 3, 4}, {2, 2, 3, 4}, {7, 8, 9, 9}});
    trip_trie t = trip_trie::build(c);
    auto micros = micro_clusters(t, 4);
    REQUIRE(micros.size() == 3);
    macro_clustering g = macro_cluster(micros, 1);
    CHECK(g.cluster_count == 2);
    std::uint32_t merged_weight = 0;
    for (std::size_t i = 0; i < micros.size(); ++i)
        if (g.assignment[i] == g.assignment[0]) merged_weight += micros[i].weight;
    CHECK(merged_weight == 3); // 1 + 2 duplicates share the macro-cluster
}
