#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "triptrie/errors.hpp"
#include "triptrie/geo_grid.hpp"
#include "triptrie/trip_string.hpp"

namespace triptrie {

/// One raw GPS fix: latitude, longitude, customer-on flag, Unix epoch.
struct trace_record {
    double lat = 0.0;
    double lon = 0.0;
    bool occupied = false;
    std::int64_t epoch = 0;
};

/// A maximal run of occupied fixes from one taxi, epochs strictly
/// increasing, at least two records.
struct raw_trip {
    std::string taxi_id;
    std::vector<trace_record> records;

    std::int64_t start_epoch() const { return records.front().epoch; }
    std::int64_t duration_seconds() const {
        return records.back().epoch - records.front().epoch;
    }
};

struct geo_point {
    double lon = 0.0;
    double lat = 0.0;
};

struct parse_result {
    std::vector<trace_record> records; // sorted by epoch ascending
    std::size_t malformed_lines = 0;
    std::size_t total_lines = 0; // non-empty lines seen
};

namespace detail {

// Fields may be separated by commas, whitespace, or both.
inline bool parse_trace_line(const std::string& line, trace_record& out) {
    std::string buf = line;
    std::replace(buf.begin(), buf.end(), ',', ' ');
    std::istringstream in(buf);
    double lat, lon;
    int flag;
    long long epoch;
    if (!(in >> lat >> lon >> flag >> epoch)) return false;
    std::string rest;
    if (in >> rest) return false; // trailing junk
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0) return false;
    if (flag != 0 && flag != 1) return false;
    if (epoch < 0) return false;
    out.lat = lat;
    out.lon = lon;
    out.occupied = flag == 1;
    out.epoch = epoch;
    return true;
}

} // namespace detail

/// Parse one taxi's trace. Lines are "lat, lon, flag, epoch"; raw files may
/// be newest-first, so records are sorted by epoch before returning.
/// Malformed lines are skipped and counted; more than half malformed is a
/// format error.
inline parse_result parse_trace_stream(std::istream& in) {
    parse_result res;
    std::string line;
    while (std::getline(in, line)) {
        // tolerate CRLF
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ++res.total_lines;
        trace_record rec;
        if (detail::parse_trace_line(line, rec))
            res.records.push_back(rec);
        else
            ++res.malformed_lines;
    }
    if (res.total_lines > 0 && res.malformed_lines * 2 > res.total_lines)
        throw error("format", "more than 50% malformed trace lines");
    std::stable_sort(res.records.begin(), res.records.end(),
                     [](const trace_record& a, const trace_record& b) {
                         return a.epoch < b.epoch;
                     });
    return res;
}

inline parse_result parse_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("io", "cannot open trace file: " + path);
    return parse_trace_stream(in);
}

/// Split a sorted record stream into trips: each maximal run of
/// occupied records with at least two samples becomes one trip (a run
/// still open at end-of-stream is maximal and kept). Records sharing an
/// epoch within a run collapse to the first so timestamps stay strictly
/// increasing.
inline std::vector<raw_trip> extract_trips(std::span<const trace_record> records,
                                           const std::string& taxi_id) {
    std::vector<raw_trip> trips;
    std::vector<trace_record> run;
    auto flush = [&] {
        if (run.size() >= 2) {
            raw_trip t;
            t.taxi_id = taxi_id;
            t.records = std::move(run);
            trips.push_back(std::move(t));
        }
        run.clear();
    };
    for (const trace_record& rec : records) {
        if (!rec.occupied) {
            flush();
            continue;
        }
        if (!run.empty()) {
            if (rec.epoch < run.back().epoch)
                throw error("precondition",
                            "extract_trips: records not sorted by epoch");
            if (rec.epoch == run.back().epoch) continue;
        }
        run.push_back(rec);
    }
    flush();
    return trips;
}

/// Resample a trip at times 0, t_r, 2*t_r, ... from its start, linearly
/// interpolating lon/lat between the surrounding fixes. Yields
/// floor(duration / t_r) + 1 samples; the first equals the first fix.
inline std::vector<geo_point> resample_trip(const raw_trip& trip,
                                            std::int32_t t_r) {
    if (t_r <= 0) throw error("parameter", "resample_trip: t_r must be > 0");
    if (trip.records.size() < 2)
        throw error("precondition", "resample_trip: trip needs >= 2 records");
    const auto& recs = trip.records;
    const std::int64_t t0 = recs.front().epoch;
    const std::int64_t dur = recs.back().epoch - t0;
    const std::size_t count = static_cast<std::size_t>(dur / t_r) + 1;

    std::vector<geo_point> samples;
    samples.reserve(count);
    std::size_t seg = 0; // records[seg] .. records[seg+1] brackets t
    for (std::size_t i = 0; i < count; ++i) {
        const std::int64_t t = t0 + static_cast<std::int64_t>(i) * t_r;
        while (seg + 2 < recs.size() && recs[seg + 1].epoch <= t) ++seg;
        const trace_record& a = recs[seg];
        const trace_record& b = recs[seg + 1];
        geo_point p;
        if (t <= a.epoch) {
            p = {a.lon, a.lat};
        } else if (t >= b.epoch) {
            p = {b.lon, b.lat};
        } else {
            double u = static_cast<double>(t - a.epoch) /
                       static_cast<double>(b.epoch - a.epoch);
            p = {a.lon + u * (b.lon - a.lon), a.lat + u * (b.lat - a.lat)};
        }
        samples.push_back(p);
    }
    return samples;
}

/// Map resampled coordinates to region symbols. Consecutive identical
/// symbols are kept: repetition encodes dwell time. A single sample
/// outside the grid rejects the whole trip.
inline trip_string encode_trip(const grid& g, std::span<const geo_point> samples,
                               std::int64_t trip_id) {
    trip_string s;
    s.trip_id = trip_id;
    s.symbols.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!g.contains(samples[i].lon, samples[i].lat))
            throw trip_rejected(i, "sample outside grid bounding box");
        s.symbols.push_back(g.coord_to_symbol(samples[i].lon, samples[i].lat));
    }
    return s;
}

/// Keep trips no longer than max_minutes; pass infinity to keep all.
/// kept_fraction (if non-null) receives kept / input size.
inline std::vector<raw_trip> filter_by_duration(std::vector<raw_trip> trips,
                                                double max_minutes,
                                                double* kept_fraction = nullptr) {
    const std::size_t total = trips.size();
    std::erase_if(trips, [&](const raw_trip& t) {
        return static_cast<double>(t.duration_seconds()) > max_minutes * 60.0;
    });
    if (kept_fraction)
        *kept_fraction = total == 0 ? 1.0
                                    : static_cast<double>(trips.size()) /
                                          static_cast<double>(total);
    return trips;
}

struct encode_stats {
    std::size_t encoded = 0;
    std::size_t rejected_out_of_bounds = 0;
};

/// Resample and encode a batch of raw trips against one grid. Trips are
/// ordered by (taxi_id, start epoch) first so trip ids and downstream
/// outputs do not depend on input file order. Trips with any sample
/// outside the grid are dropped and counted. Strings are NOT padded here;
/// call pad_strings on the full corpus.
inline std::vector<trip_string> encode_trips(const grid& g,
                                             std::vector<raw_trip> trips,
                                             std::int32_t t_r,
                                             encode_stats* stats = nullptr) {
    std::sort(trips.begin(), trips.end(),
              [](const raw_trip& a, const raw_trip& b) {
                  if (a.taxi_id != b.taxi_id) return a.taxi_id < b.taxi_id;
                  return a.start_epoch() < b.start_epoch();
              });
    std::vector<trip_string> corpus;
    corpus.reserve(trips.size());
    encode_stats st;
    for (const raw_trip& t : trips) {
        std::vector<geo_point> samples = resample_trip(t, t_r);
        try {
            trip_string s =
                encode_trip(g, samples, static_cast<std::int64_t>(corpus.size()));
            s.taxi_id = t.taxi_id;
            s.start_epoch = t.start_epoch();
            s.t_r = t_r;
            corpus.push_back(std::move(s));
            ++st.encoded;
        } catch (const trip_rejected&) {
            ++st.rejected_out_of_bounds;
        }
    }
    if (stats) *stats = st;
    return corpus;
}

} // namespace triptrie
