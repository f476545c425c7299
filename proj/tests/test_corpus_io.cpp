#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "test_helpers.hpp"
#include "triptrie/analytics.hpp"
#include "triptrie/corpus_io.hpp"
#include "triptrie/synthetic.hpp"

using namespace triptrie;
using tt_test::corpus;

namespace {

corpus_file sample_corpus() {
    corpus_file c;
    c.g = make_grid(-122.6, 37.2, -121.6, 38.2, 4, 6);
    c.t_r = 60;
    auto trips = corpus({{1, 2, null_pad}, {1, 3, 4}});
    trips[0].taxi_id = "abc";
    trips[0].start_epoch = 1213084000;
    trips[1].taxi_id = "xyz";
    trips[1].start_epoch = 1213085000;
    trips[1].trip_id = 1;
    c.trips = trips;
    c.l = 3;
    return c;
}

} // namespace

TEST_CASE("corpus files round-trip and are byte-stable") {
    corpus_file c = sample_corpus();
    std::ostringstream out1, out2;
    write_corpus(out1, c);
    write_corpus(out2, c);
    CHECK(out1.str() == out2.str());

    std::istringstream in(out1.str());
    corpus_file back = read_corpus(in);
    REQUIRE(back.trips.size() == 2);
    CHECK(back.l == 3);
    CHECK(back.t_r == 60);
    REQUIRE(back.g.has_value());
    CHECK(*back.g == *c.g);
    CHECK(back.trips[0].symbols == c.trips[0].symbols);
    CHECK(back.trips[0].taxi_id == "abc");
    CHECK(back.trips[1].start_epoch == 1213085000);

    std::ostringstream out3;
    write_corpus(out3, back);
    CHECK(out3.str() == out1.str());
}

TEST_CASE("corpus parsing rejects malformed input") {
    {
        std::istringstream in("not a corpus\n");
        CHECK_THROWS_AS(read_corpus(in), error);
    }
    {
        // trip line shorter than l
        std::istringstream in(
            "tripcorpus v1\nt_r 60\nl 3\ntrips 1\n0 t 0 60 1 2\nend\n");
        CHECK_THROWS_AS(read_corpus(in), error);
    }
    {
        // symbol id 0 is reserved for the root
        std::istringstream in(
            "tripcorpus v1\nt_r 60\nl 2\ntrips 1\n0 t 0 60 0 1\nend\n");
        CHECK_THROWS_AS(read_corpus(in), error);
    }
    {
        // missing end marker
        std::istringstream in("tripcorpus v1\nt_r 60\nl 2\ntrips 0\n");
        CHECK_THROWS_AS(read_corpus(in), error);
    }
}

TEST_CASE("snapshots carry the grid and resolution alongside the trie") {
    auto trips = corpus({{1, 1}, {1, 2}, {2, 1}});
    trip_trie t = trip_trie::build(trips);
    grid g = make_grid(0, 0, 6, 4, 4, 6);

    std::ostringstream out;
    write_snapshot(out, t, g, 60);
    std::istringstream in(out.str());
    snapshot_file sf = read_snapshot(in);
    REQUIRE(sf.g.has_value());
    CHECK(*sf.g == g);
    CHECK(sf.t_r == 60);
    sf.trie.freeze();
    CHECK(sf.trie.size() == 3);
    CHECK(sf.trie.level_partition(1).labels == t.level_partition(1).labels);

    std::ostringstream again;
    write_snapshot(again, sf.trie, sf.g, sf.t_r);
    CHECK(again.str() == out.str());
}

TEST_CASE("snapshot parsing rejects unknown headers") {
    std::istringstream in("snapshot v9\n");
    CHECK_THROWS_AS(read_snapshot(in), error);
}

TEST_CASE("heatmap CSV emits south-to-north rows") {
    grid g = make_grid(0, 0, 3, 2, 2, 3);
    auto trips = corpus({{1, 1}, {5, 5}, {5, 6}});
    trip_trie t = trip_trie::build(trips);
    heatmap_grid hm = heatmap(t, g, 1);
    std::ostringstream out;
    write_heatmap_csv(out, hm);
    CHECK(out.str() == "1,0,0\n0,2,0\n"); // cell 1 south row, cell 5 north row
}

TEST_CASE("grid sidecar lists the export metadata") {
    grid g = make_grid(0, 0, 3, 2, 2, 3);
    std::ostringstream out;
    write_grid_sidecar(out, g, 11, 60);
    std::string s = out.str();
    CHECK(s.find("n_r=2\n") != std::string::npos);
    CHECK(s.find("n_c=3\n") != std::string::npos);
    CHECK(s.find("depth=11\n") != std::string::npos);
    CHECK(s.find("t_r=60\n") != std::string::npos);
    CHECK(s.find("row_order=south_to_north\n") != std::string::npos);
}

TEST_CASE("occurrence CSV marks unvisited cells with zero") {
    grid g = make_grid(0, 0, 2, 1, 1, 2);
    auto trips = corpus({{2, 2}});
    trip_trie t = trip_trie::build(trips);
    std::ostringstream out;
    write_occurrence_csv(out, g, first_occurrence_depth(t));
    CHECK(out.str() == "0,1\n");
}

TEST_CASE("stats report follows the published row names") {
    auto trips = corpus({{1, 1}, {1, 2}, {2, 1}});
    trip_trie t = trip_trie::build(trips);
    std::ostringstream out;
    write_stats_report(out, t.size(), branching_stats(t, 11),
                       region_cluster_counts(t, 11), trips_per_cluster(t, 11),
                       11);
    std::string s = out.str();
    CHECK(s.find("Total number of trips: 3\n") != std::string::npos);
    CHECK(s.find("Level-wise Average branching factor: 1.7500\n") !=
          std::string::npos);
    CHECK(s.find("Level-wise Average branching factor (first 11 levels): ") !=
          std::string::npos);
    CHECK(s.find("Average number of clusters per region: ") !=
          std::string::npos);
    CHECK(s.find("Average number of trips per cluster: 1.2000\n") !=
          std::string::npos);
}

TEST_CASE("verify report prints one line per sample plus a summary") {
    std::vector<verify_sample_line> lines(2);
    lines[0] = {1, 42, 100, 12, true, {}, 0.5};
    lines[1] = {2, 43, 100, 12, false, {3, 4}, 0.6};
    std::ostringstream out;
    write_verify_report(out, lines);
    std::string s = out.str();
    CHECK(s.find("sample 1 seed 42 n 100 l 12 levels 13 equal true") !=
          std::string::npos);
    CHECK(s.find("failed_levels 3 4") != std::string::npos);
    CHECK(s.find("result 1/2 samples equivalent\n") != std::string::npos);
}

TEST_CASE("corrupted payloads fail cleanly or parse as valid files") {
    auto trips = corpus({{1, 1, 2}, {1, 2, null_pad}, {3, 1, 1}});
    trip_trie t = trip_trie::build(trips);
    std::ostringstream snap_out;
    write_snapshot(snap_out, t, make_grid(0, 0, 4, 4, 2, 2), 60);
    std::string snap = snap_out.str();

    corpus_file cf;
    cf.l = 3;
    cf.trips = trips;
    std::ostringstream corpus_out;
    write_corpus(corpus_out, cf);
    std::string corp = corpus_out.str();

    det_rng rng(1234);
    for (int rep = 0; rep < 300; ++rep) {
        std::string bad = snap;
        bad[rng.below(bad.size())] =
            static_cast<char>(' ' + rng.below(95)); // printable junk
        std::istringstream in(bad);
        try {
            snapshot_file sf = read_snapshot(in); // may legitimately parse
            sf.trie.freeze();
        } catch (const error&) {
            // rejected with a typed error: fine
        }
    }
    for (int rep = 0; rep < 300; ++rep) {
        std::string bad = corp;
        bad[rng.below(bad.size())] =
            static_cast<char>(' ' + rng.below(95));
        std::istringstream in(bad);
        try {
            read_corpus(in);
        } catch (const error&) {
        }
    }
    SUCCEED("no crash and no foreign exception across corruptions");
}

TEST_CASE("macro and outlier reports are well-formed") {
    auto trips = corpus({{1, 2, 3, 4}, {2, 2, 3, 4}});
    trip_trie t = trip_trie::build(trips);
    auto micros = micro_clusters(t, 4);
    macro_clustering g = macro_cluster(micros, 1);
    std::ostringstream mo;
    write_macro_report(mo, micros, g);
    CHECK(mo.str().find("clusters 1 diameter_bound 1\n") == 0);
    CHECK(mo.str().find("1,2,3,4") != std::string::npos);

    std::ostringstream oo;
    write_outlier_report(oo, outlier_report(t));
    CHECK(oo.str().find("region node_count path_involvement first_depth\n") ==
          0);
}
