#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <sstream>

#include "test_helpers.hpp"
#include "triptrie/ingest.hpp"
#include "triptrie/string_metrics.hpp"

using namespace triptrie;

namespace {

std::vector<trace_record> records_with_flags(std::initializer_list<int> flags) {
    std::vector<trace_record> recs;
    std::int64_t t = 1000;
    for (int f : flags) {
        recs.push_back({37.0, -122.0, f == 1, t});
        t += 60;
    }
    return recs;
}

} // namespace

TEST_CASE("parse_trace_stream reads the documented record layout") {
    std::istringstream in("37.75134, -122.39488, 0, 1213084687\n");
    parse_result r = parse_trace_stream(in);
    REQUIRE(r.records.size() == 1);
    CHECK(r.records[0].lat == 37.75134);
    CHECK(r.records[0].lon == -122.39488);
    CHECK(r.records[0].occupied == false);
    CHECK(r.records[0].epoch == 1213084687);
    CHECK(r.malformed_lines == 0);
}

TEST_CASE("parse_trace_stream accepts space and comma separators") {
    std::istringstream in("37.75 -122.39 1 100\n37.76,-122.40,0,200\n");
    parse_result r = parse_trace_stream(in);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].occupied);
}

TEST_CASE("parse_trace_stream sorts newest-first files ascending") {
    std::istringstream in(
        "37.1 -122.1 1 300\n37.2 -122.2 1 100\n37.3 -122.3 1 200\n");
    parse_result r = parse_trace_stream(in);
    REQUIRE(r.records.size() == 3);
    CHECK(r.records[0].epoch == 100);
    CHECK(r.records[1].epoch == 200);
    CHECK(r.records[2].epoch == 300);
}

TEST_CASE("parse_trace_stream on an empty file yields an empty list") {
    std::istringstream in("");
    parse_result r = parse_trace_stream(in);
    CHECK(r.records.empty());
    CHECK(r.total_lines == 0);
}

TEST_CASE("parse_trace_stream counts and skips malformed lines") {
    std::istringstream in(
        "37.75 -122.39 1 100\n"
        "garbage line\n"
        "37.76 -122.40 0 200\n"
        "99.99 -122.41 1 400\n" // latitude out of range
        "37.77 -122.41 1 300\n");
    parse_result r = parse_trace_stream(in);
    CHECK(r.records.size() == 3);
    CHECK(r.malformed_lines == 2);
    CHECK(r.total_lines == 5);
}

TEST_CASE("parse_trace_stream errors when most lines are malformed") {
    std::istringstream in("x\ny\nz\n37.75 -122.39 1 100\n");
    CHECK_THROWS_AS(parse_trace_stream(in), error);
}

TEST_CASE("parse_trace_file reports unreadable paths") {
    CHECK_THROWS_AS(parse_trace_file("/nonexistent/trace.txt"), error);
}

TEST_CASE("extract_trips splits on the occupancy flag") {
    // flags 0,1,1,1,0,1,1 -> one 3-record trip and one 2-record trip
    auto recs = records_with_flags({0, 1, 1, 1, 0, 1, 1});
    auto trips = extract_trips(recs, "t1");
    REQUIRE(trips.size() == 2);
    CHECK(trips[0].records.size() == 3);
    CHECK(trips[1].records.size() == 2);
    CHECK(trips[0].taxi_id == "t1");
    // the trailing run is maximal and kept
}

TEST_CASE("extract_trips discards degenerate runs") {
    CHECK(extract_trips(records_with_flags({0, 0, 0}), "t").empty());
    CHECK(extract_trips(records_with_flags({1}), "t").empty());
    CHECK(extract_trips(records_with_flags({0, 1, 0, 1, 0}), "t").empty());
}

TEST_CASE("extract_trips keeps timestamps strictly increasing") {
    std::vector<trace_record> recs = {
        {37.0, -122.0, true, 100},
        {37.1, -122.1, true, 100}, // duplicate epoch collapses
        {37.2, -122.2, true, 160},
    };
    auto trips = extract_trips(recs, "t");
    REQUIRE(trips.size() == 1);
    REQUIRE(trips[0].records.size() == 2);
    CHECK(trips[0].records[0].lat == 37.0);
    CHECK(trips[0].records[1].epoch == 160);
}

TEST_CASE("resample_trip interpolates linearly at the grid of times") {
    raw_trip t;
    t.taxi_id = "t";
    t.records = {{0.0, 0.0, true, 0}, {2.0, 2.0, true, 120}};
    auto samples = resample_trip(t, 60);
    REQUIRE(samples.size() == 3);
    CHECK(samples[0].lon == 0.0);
    CHECK(samples[0].lat == 0.0);
    CHECK(samples[1].lon == Catch::Approx(1.0));
    CHECK(samples[1].lat == Catch::Approx(1.0));
    CHECK(samples[2].lon == Catch::Approx(2.0));
}

TEST_CASE("resample_trip with duration shorter than t_r keeps one sample") {
    raw_trip t;
    t.records = {{1.0, 2.0, true, 0}, {3.0, 4.0, true, 30}};
    auto samples = resample_trip(t, 60);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].lat == 1.0);
    CHECK(samples[0].lon == 2.0);
}

TEST_CASE("resample_trip at the knots returns the recorded points") {
    raw_trip t;
    t.records = {{10.0, 20.0, true, 0},
                 {11.0, 21.0, true, 60},
                 {12.0, 22.0, true, 120}};
    auto samples = resample_trip(t, 60);
    REQUIRE(samples.size() == 3);
    CHECK(samples[0].lon == 20.0);
    CHECK(samples[1].lon == 21.0);
    CHECK(samples[2].lon == 22.0);
    CHECK(samples[2].lat == 12.0);
}

TEST_CASE("resample_trip rejects nonpositive resolution") {
    raw_trip t;
    t.records = {{0, 0, true, 0}, {1, 1, true, 60}};
    CHECK_THROWS_AS(resample_trip(t, 0), error);
}

TEST_CASE("encode_trip keeps dwell repetitions") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    std::vector<geo_point> samples = {{2.5, 3.5}, {2.5, 3.5}, {2.5, 3.5}};
    trip_string s = encode_trip(g, samples, 7);
    CHECK(s.trip_id == 7);
    CHECK(s.symbols == std::vector<symbol>{21, 21, 21});
}

TEST_CASE("encode_trip rejects the whole trip on one out-of-bounds sample") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    std::vector<geo_point> samples = {{2.5, 3.5}, {7.0, 2.0}};
    try {
        encode_trip(g, samples, 0);
        FAIL("expected trip_rejected");
    } catch (const trip_rejected& e) {
        CHECK(e.sample_index() == 1);
    }
}

TEST_CASE("encoding reproduces the 6x4 illustration string") {
    // 6x4 grid; rows in the illustration are labeled top-down while the
    // index formula counts rows from the south edge, so labels map through
    // a row flip: label = (n_r - row) * n_c + col.
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    std::vector<geo_point> path = {{2.5, 2.5}, {3.5, 2.5}, {3.5, 1.5},
                                   {2.5, 1.5}, {2.5, 0.5}, {1.5, 0.5}};
    trip_string s = encode_trip(g, path, 0);
    auto top_down = [&](symbol z) {
        grid_cell c = g.symbol_to_cell(z);
        return (g.rows() - c.row) * g.cols() + c.col;
    };
    std::vector<symbol> labels;
    for (symbol z : s.symbols) labels.push_back(top_down(z));
    CHECK(labels == std::vector<symbol>{9, 10, 16, 15, 21, 20});
}

TEST_CASE("filter_by_duration keeps trips up to the cutoff") {
    auto mk = [](std::int64_t dur) {
        raw_trip t;
        t.records = {{0, 0, true, 0}, {0, 0, true, dur}};
        return t;
    };
    std::vector<raw_trip> trips = {mk(10 * 60), mk(29 * 60), mk(31 * 60)};
    double kept = 0;
    auto filtered = filter_by_duration(trips, 30, &kept);
    CHECK(filtered.size() == 2);
    CHECK(kept == Catch::Approx(2.0 / 3.0));

    auto all = filter_by_duration(trips,
                                  std::numeric_limits<double>::infinity());
    CHECK(all.size() == 3);
}

TEST_CASE("pad_strings pads to the corpus maximum") {
    auto c = tt_test::corpus({{1, 2}, {1, 2, 3}});
    std::size_t l = pad_strings(c);
    CHECK(l == 3);
    CHECK(c[0].symbols == std::vector<symbol>{1, 2, null_pad});
    CHECK(c[1].symbols == std::vector<symbol>{1, 2, 3});

    auto equal = tt_test::corpus({{1, 2}, {3, 4}});
    CHECK(pad_strings(equal) == 2);
    CHECK(equal[0].symbols == std::vector<symbol>{1, 2});

    std::vector<trip_string> empty;
    CHECK_THROWS_AS(pad_strings(empty), error);
}

TEST_CASE("padding makes the pad position count as a difference") {
    auto c = tt_test::corpus({{1, 2}, {1, 2, 3}});
    pad_strings(c);
    // position 3: null_pad vs 3 -> weight 2^0
    CHECK(weighted_hamming(c[0], c[1]) == wide_uint(1));
}

TEST_CASE("encode_trips is deterministic and sorted by taxi and start") {
    grid g = make_grid(0, 0, 6, 4, 4, 6);
    raw_trip a;
    a.taxi_id = "zeta";
    a.records = {{2.5, 2.5, true, 100}, {2.5, 2.5, true, 160}};
    raw_trip b;
    b.taxi_id = "alpha";
    b.records = {{0.5, 0.5, true, 500}, {0.5, 0.5, true, 560}};
    raw_trip c;
    c.taxi_id = "alpha";
    c.records = {{1.5, 1.5, true, 50}, {1.5, 1.5, true, 110}};

    encode_stats st;
    auto corpus = encode_trips(g, {a, b, c}, 60, &st);
    REQUIRE(corpus.size() == 3);
    CHECK(st.encoded == 3);
    CHECK(corpus[0].taxi_id == "alpha");
    CHECK(corpus[0].start_epoch == 50);
    CHECK(corpus[1].taxi_id == "alpha");
    CHECK(corpus[1].start_epoch == 500);
    CHECK(corpus[2].taxi_id == "zeta");
    CHECK(corpus[0].trip_id == 0);
    CHECK(corpus[2].trip_id == 2);
}

TEST_CASE("encode_trips drops and counts out-of-bounds trips") {
    grid g = make_grid(0, 0, 1, 1, 1, 1);
    raw_trip in_bounds;
    in_bounds.taxi_id = "a";
    in_bounds.records = {{0.5, 0.5, true, 0}, {0.5, 0.5, true, 60}};
    raw_trip outside;
    outside.taxi_id = "b";
    outside.records = {{0.5, 0.5, true, 0}, {0.9, 5.0, true, 60}};
    encode_stats st;
    auto corpus = encode_trips(g, {in_bounds, outside}, 60, &st);
    CHECK(corpus.size() == 1);
    CHECK(st.rejected_out_of_bounds == 1);
}
