#pragma once

#include <charconv>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "triptrie/analytics.hpp"
#include "triptrie/errors.hpp"
#include "triptrie/geo_grid.hpp"
#include "triptrie/ingest.hpp"
#include "triptrie/linkage_oracle.hpp"
#include "triptrie/macro_cluster.hpp"
#include "triptrie/trip_string.hpp"
#include "triptrie/trip_trie.hpp"

namespace triptrie {

namespace detail {

/// Shortest round-trippable decimal form, so files are byte-stable.
inline std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string fmt_stat(const std::optional<double>& v) {
    if (!v) return "n/a";
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << *v;
    return os.str();
}

} // namespace detail

/// An encoded corpus together with the grid and resolution it was encoded
/// against.
struct corpus_file {
    std::optional<grid> g;
    std::int32_t t_r = 60;
    std::size_t l = 0;
    std::vector<trip_string> trips;
};

/// Write the trip corpus. One line per trip:
///   trip_id taxi_id start_epoch t_r symbols...
/// with -1 as the padding symbol. taxi ids must be single tokens; an empty
/// id is stored as "-".
inline void write_corpus(std::ostream& out, const corpus_file& c) {
    out << "tripcorpus v1\n";
    if (c.g) {
        out << "grid " << detail::fmt_double(c.g->x_min()) << " "
            << detail::fmt_double(c.g->y_min()) << " "
            << detail::fmt_double(c.g->x_max()) << " "
            << detail::fmt_double(c.g->y_max()) << " " << c.g->rows() << " "
            << c.g->cols() << "\n";
    }
    out << "t_r " << c.t_r << "\n";
    out << "l " << c.l << "\n";
    out << "trips " << c.trips.size() << "\n";
    for (const trip_string& s : c.trips) {
        out << s.trip_id << " " << (s.taxi_id.empty() ? "-" : s.taxi_id) << " "
            << s.start_epoch << " " << s.t_r;
        for (symbol z : s.symbols) out << " " << z;
        out << "\n";
    }
    out << "end\n";
}

inline corpus_file read_corpus(std::istream& in) {
    auto fail = [](const std::string& why) {
        return error("format", "trip corpus: " + why);
    };
    std::string line;
    if (!std::getline(in, line) || line != "tripcorpus v1")
        throw fail("unknown header/version");
    corpus_file c;
    bool have_l = false, have_trips = false;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "grid") {
            double x0, y0, x1, y1;
            std::int32_t nr, nc;
            if (!(ls >> x0 >> y0 >> x1 >> y1 >> nr >> nc))
                throw fail("bad grid line");
            c.g = grid(x0, y0, x1, y1, nr, nc);
        } else if (key == "t_r") {
            if (!(ls >> c.t_r) || c.t_r <= 0) throw fail("bad t_r line");
        } else if (key == "l") {
            if (!(ls >> c.l)) throw fail("bad l line");
            have_l = true;
        } else if (key == "trips") {
            if (!(ls >> n)) throw fail("bad trips line");
            have_trips = true;
            break;
        } else {
            throw fail("unexpected line: " + line);
        }
    }
    if (!have_l || !have_trips) throw fail("missing l/trips header");
    c.trips.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw fail("missing trip line");
        std::istringstream ls(line);
        trip_string s;
        if (!(ls >> s.trip_id >> s.taxi_id >> s.start_epoch >> s.t_r))
            throw fail("bad trip line: " + line);
        if (s.taxi_id == "-") s.taxi_id.clear();
        long long z;
        while (ls >> z) {
            if (z != null_pad && z < 1) throw fail("bad symbol id");
            s.symbols.push_back(static_cast<symbol>(z));
        }
        if (s.symbols.size() != c.l)
            throw fail("trip length differs from corpus l");
        c.trips.push_back(std::move(s));
    }
    if (!std::getline(in, line) || line != "end") throw fail("missing end marker");
    return c;
}

/// Extracted trips before encoding: per trip a header line then one
/// "epoch lat lon" line per record.
inline void write_raw_trips(std::ostream& out,
                            std::span<const raw_trip> trips) {
    out << "rawtrips v1\n";
    out << "trips " << trips.size() << "\n";
    for (const raw_trip& t : trips) {
        out << "trip " << (t.taxi_id.empty() ? "-" : t.taxi_id) << " "
            << t.records.size() << "\n";
        for (const trace_record& r : t.records) {
            out << r.epoch << " " << detail::fmt_double(r.lat) << " "
                << detail::fmt_double(r.lon) << "\n";
        }
    }
    out << "end\n";
}

inline std::vector<raw_trip> read_raw_trips(std::istream& in) {
    auto fail = [](const std::string& why) {
        return error("format", "raw trips: " + why);
    };
    std::string line;
    if (!std::getline(in, line) || line != "rawtrips v1")
        throw fail("unknown header/version");
    if (!std::getline(in, line)) throw fail("missing trips line");
    std::istringstream hs(line);
    std::string tag;
    std::size_t n = 0;
    if (!(hs >> tag >> n) || tag != "trips") throw fail("bad trips line");
    std::vector<raw_trip> trips;
    trips.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw fail("missing trip header");
        std::istringstream ts(line);
        std::size_t k = 0;
        raw_trip t;
        if (!(ts >> tag >> t.taxi_id >> k) || tag != "trip" || k < 2)
            throw fail("bad trip header: " + line);
        if (t.taxi_id == "-") t.taxi_id.clear();
        t.records.reserve(k);
        for (std::size_t j = 0; j < k; ++j) {
            if (!std::getline(in, line)) throw fail("missing record line");
            std::istringstream rs(line);
            trace_record r;
            r.occupied = true;
            if (!(rs >> r.epoch >> r.lat >> r.lon))
                throw fail("bad record line: " + line);
            if (!t.records.empty() && r.epoch <= t.records.back().epoch)
                throw fail("timestamps not strictly increasing");
            t.records.push_back(r);
        }
        trips.push_back(std::move(t));
    }
    if (!std::getline(in, line) || line != "end") throw fail("missing end marker");
    return trips;
}

/// Trie snapshot: a small metadata section (the grid and resolution when
/// known) followed by the trie's own serialized form.
inline void write_snapshot(std::ostream& out, const trip_trie& t,
                           const std::optional<grid>& g, std::int32_t t_r) {
    out << "triptrie-snapshot v1\n";
    std::size_t meta = (g ? 1 : 0) + 1;
    out << "meta " << meta << "\n";
    if (g) {
        out << "grid " << detail::fmt_double(g->x_min()) << " "
            << detail::fmt_double(g->y_min()) << " "
            << detail::fmt_double(g->x_max()) << " "
            << detail::fmt_double(g->y_max()) << " " << g->rows() << " "
            << g->cols() << "\n";
    }
    out << "t_r " << t_r << "\n";
    t.serialize(out);
}

struct snapshot_file {
    trip_trie trie; // returned unfrozen
    std::optional<grid> g;
    std::int32_t t_r = 60;
};

inline snapshot_file read_snapshot(std::istream& in) {
    auto fail = [](const std::string& why) {
        return error("format", "snapshot: " + why);
    };
    std::string line;
    if (!std::getline(in, line) || line != "triptrie-snapshot v1")
        throw fail("unknown header/version");
    if (!std::getline(in, line)) throw fail("missing meta header");
    std::istringstream ms(line);
    std::string tag;
    std::size_t meta = 0;
    if (!(ms >> tag >> meta) || tag != "meta") throw fail("bad meta header");
    snapshot_file sf;
    for (std::size_t i = 0; i < meta; ++i) {
        if (!std::getline(in, line)) throw fail("missing meta line");
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "grid") {
            double x0, y0, x1, y1;
            std::int32_t nr, nc;
            if (!(ls >> x0 >> y0 >> x1 >> y1 >> nr >> nc))
                throw fail("bad grid meta");
            sf.g = grid(x0, y0, x1, y1, nr, nc);
        } else if (key == "t_r") {
            if (!(ls >> sf.t_r) || sf.t_r <= 0) throw fail("bad t_r meta");
        } else {
            throw fail("unknown meta key: " + key);
        }
    }
    sf.trie = trip_trie::deserialize(in);
    return sf;
}

/// Heat-map CSV: n_r rows by n_c comma-separated integer counts, row 1 =
/// the southernmost row of the grid.
inline void write_heatmap_csv(std::ostream& out, const heatmap_grid& hm) {
    for (std::int32_t r = 1; r <= hm.rows(); ++r) {
        for (std::int32_t c = 1; c <= hm.cols(); ++c) {
            if (c > 1) out << ",";
            out << hm.at(r, c);
        }
        out << "\n";
    }
}

/// Sidecar metadata record accompanying a CSV export.
inline void write_grid_sidecar(std::ostream& out, const grid& g,
                               std::uint32_t depth, std::int32_t t_r) {
    out << "x_min=" << detail::fmt_double(g.x_min()) << "\n";
    out << "y_min=" << detail::fmt_double(g.y_min()) << "\n";
    out << "x_max=" << detail::fmt_double(g.x_max()) << "\n";
    out << "y_max=" << detail::fmt_double(g.y_max()) << "\n";
    out << "n_r=" << g.rows() << "\n";
    out << "n_c=" << g.cols() << "\n";
    out << "depth=" << depth << "\n";
    out << "t_r=" << t_r << "\n";
    out << "row_order=south_to_north\n";
}

/// First-occurrence depths on the grid; 0 marks regions never visited.
inline void write_occurrence_csv(
    std::ostream& out, const grid& g,
    const std::vector<std::pair<symbol, std::uint32_t>>& first_depths) {
    std::vector<std::uint32_t> depth(
        static_cast<std::size_t>(g.rows()) * g.cols(), 0);
    for (const auto& [s, d] : first_depths) {
        grid_cell c = g.symbol_to_cell(s);
        depth[static_cast<std::size_t>(c.row - 1) * g.cols() + (c.col - 1)] = d;
    }
    for (std::int32_t r = 1; r <= g.rows(); ++r) {
        for (std::int32_t c = 1; c <= g.cols(); ++c) {
            if (c > 1) out << ",";
            out << depth[static_cast<std::size_t>(r - 1) * g.cols() + (c - 1)];
        }
        out << "\n";
    }
}

/// The statistics report; row names follow the published table.
inline void write_stats_report(std::ostream& out, std::uint32_t total_trips,
                               const branching_stats_result& bf,
                               const region_count_stats& rc,
                               const cluster_size_stats& cs,
                               std::uint32_t window) {
    out << "Total number of trips: " << total_trips << "\n";
    out << "Level-wise Average branching factor: "
        << detail::fmt_stat(bf.overall_avg) << "\n";
    out << "Level-wise Average branching factor (first " << window
        << " levels): " << detail::fmt_stat(bf.first_window_avg) << "\n";
    out << "Average number of clusters per region: "
        << detail::fmt_stat(rc.avg_all) << "\n";
    out << "Average number of clusters per region (first " << window
        << " levels): " << detail::fmt_stat(rc.avg_first_window) << "\n";
    out << "Average number of trips per cluster: "
        << detail::fmt_stat(cs.avg_all) << "\n";
    out << "Average number of trips per cluster (first " << window
        << " levels): " << detail::fmt_stat(cs.avg_first_window) << "\n";
}

/// One verification run over several samples, as machine-parseable text.
struct verify_sample_line {
    std::uint32_t sample = 0;
    std::uint64_t seed = 0;
    std::size_t size = 0;
    std::size_t l = 0;
    bool all_equal = false;
    std::vector<std::uint32_t> failed_levels;
    double seconds = 0.0;
};

inline void write_verify_report(std::ostream& out,
                                const std::vector<verify_sample_line>& lines) {
    std::size_t passed = 0;
    for (const verify_sample_line& s : lines) {
        out << "sample " << s.sample << " seed " << s.seed << " n " << s.size
            << " l " << s.l << " levels " << (s.l + 1) << " equal "
            << (s.all_equal ? "true" : "false");
        if (!s.failed_levels.empty()) {
            out << " failed_levels";
            for (std::uint32_t lv : s.failed_levels) out << " " << lv;
        }
        out << " seconds " << std::fixed << std::setprecision(3) << s.seconds
            << "\n";
        passed += s.all_equal ? 1 : 0;
    }
    out << "result " << passed << "/" << lines.size() << " samples equivalent\n";
}

inline void write_macro_report(std::ostream& out,
                               const std::vector<micro_cluster>& micros,
                               const macro_clustering& mc) {
    out << "clusters " << mc.cluster_count << " diameter_bound "
        << mc.diameter_bound << "\n";
    for (std::size_t i = 0; i < micros.size(); ++i) {
        out << micros[i].node << " " << mc.assignment[i] << " "
            << micros[i].weight << " ";
        for (std::size_t j = 0; j < micros[i].representative.size(); ++j) {
            if (j) out << ",";
            out << micros[i].representative[j];
        }
        out << "\n";
    }
}

inline void write_outlier_report(std::ostream& out,
                                 const std::vector<outlier_entry>& entries) {
    out << "region node_count path_involvement first_depth\n";
    for (const outlier_entry& e : entries) {
        out << e.region << " " << e.node_count << " " << e.path_involvement
            << " " << e.first_depth << "\n";
    }
}

} // namespace triptrie
