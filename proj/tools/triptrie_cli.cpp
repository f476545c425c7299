// Command-line front end for the trip-trie pipeline:
//   extract -> encode -> build -> {stats, heatmap, occurrence, subtree,
//   predict, diversity, macro, outliers}, plus insert and verify.
// Every subcommand reads/writes the plain-text formats documented in the
// README; identical inputs and seeds produce byte-identical outputs.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "triptrie/triptrie.hpp"

namespace fs = std::filesystem;
using namespace triptrie;

namespace {

struct app_config {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    bool bbox_set = false;
    std::int32_t n_r = 100;
    std::int32_t n_c = 100;
    std::int32_t t_r = 60;
    double max_trip_minutes = 30.0;
    std::uint32_t first_levels = 11;
    std::int32_t tz_offset_minutes = 0;
    std::string data_dir;
};

// Line-oriented "key = value" config file; CLI flags override its values.
void load_config_file(const std::string& path, app_config& cfg) {
    std::ifstream in(path);
    if (!in) throw error("io", "cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw error("format", "config line " + std::to_string(lineno) +
                                          ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t\r");
            std::size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{}
                                          : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "bbox_x_min") {
                cfg.x_min = std::stod(value);
                cfg.bbox_set = true;
            } else if (key == "bbox_y_min") {
                cfg.y_min = std::stod(value);
                cfg.bbox_set = true;
            } else if (key == "bbox_x_max") {
                cfg.x_max = std::stod(value);
                cfg.bbox_set = true;
            } else if (key == "bbox_y_max") {
                cfg.y_max = std::stod(value);
                cfg.bbox_set = true;
            } else if (key == "n_r") {
                cfg.n_r = std::stoi(value);
            } else if (key == "n_c") {
                cfg.n_c = std::stoi(value);
            } else if (key == "t_r") {
                cfg.t_r = std::stoi(value);
            } else if (key == "max_trip_minutes") {
                cfg.max_trip_minutes = std::stod(value);
            } else if (key == "first_levels") {
                cfg.first_levels = static_cast<std::uint32_t>(std::stoul(value));
            } else if (key == "tz_offset_minutes") {
                cfg.tz_offset_minutes = std::stoi(value);
            } else if (key == "data_dir") {
                cfg.data_dir = value;
            } else {
                throw error("format", "config: unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw error("format", "config: bad value for '" + key + "'");
        } catch (const std::out_of_range&) {
            throw error("format", "config: value out of range for '" + key + "'");
        }
    }
}

std::string resolve_path(const app_config& cfg, const std::string& p) {
    if (p.empty() || cfg.data_dir.empty() || fs::path(p).is_absolute())
        return p;
    return (fs::path(cfg.data_dir) / p).string();
}

class stage_timer {
public:
    explicit stage_timer(std::string name)
        : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
    ~stage_timer() {
        auto end = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(end - start_).count();
        std::fprintf(stderr, "[time] %s: %.3f s\n", name_.c_str(), s);
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error("io", "cannot open output file: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("io", "cannot open input file: " + path);
    return in;
}

grid make_cfg_grid(const app_config& cfg) {
    if (!cfg.bbox_set)
        throw error("parameter",
                    "no bounding box: set --bbox/config keys or --auto-bbox");
    return grid(cfg.x_min, cfg.y_min, cfg.x_max, cfg.y_max, cfg.n_r, cfg.n_c);
}

snapshot_file load_frozen_snapshot(const app_config& cfg,
                                   const std::string& path) {
    auto in = open_in(resolve_path(cfg, path));
    snapshot_file sf = read_snapshot(in);
    sf.trie.freeze();
    return sf;
}

grid require_grid(const snapshot_file& sf) {
    if (!sf.g)
        throw error("parameter", "snapshot lacks grid metadata; re-encode "
                                 "with a grid to use map exports");
    return *sf.g;
}

std::vector<symbol> parse_symbol_list(const std::string& text) {
    std::string buf = text;
    std::replace(buf.begin(), buf.end(), ',', ' ');
    std::istringstream in(buf);
    std::vector<symbol> out;
    long long z;
    while (in >> z) out.push_back(static_cast<symbol>(z));
    std::string rest;
    if (in.clear(), in >> rest)
        throw error("parameter", "bad symbol list: " + text);
    return out;
}

// local start time helpers for trip filtering (epoch + configured offset)
bool start_in_window(std::int64_t epoch, std::int32_t tz_offset_minutes,
                     int hour_from, int hour_to, const std::string& days) {
    std::int64_t local = epoch + std::int64_t{60} * tz_offset_minutes;
    int hour = static_cast<int>((local % 86400 + 86400) % 86400 / 3600);
    if (hour_from >= 0 && hour_to >= 0) {
        if (hour_from <= hour_to) {
            if (hour < hour_from || hour >= hour_to) return false;
        } else { // window wraps midnight
            if (hour < hour_from && hour >= hour_to) return false;
        }
    }
    if (days != "all") {
        // epoch day 0 (1970-01-01) was a Thursday
        int dow = static_cast<int>(((local / 86400) + 4) % 7); // 0 = Sunday
        bool weekend = dow == 0 || dow == 6;
        if (days == "weekday" && weekend) return false;
        if (days == "weekend" && !weekend) return false;
    }
    return true;
}

// ---- subcommands ----

int cmd_extract(const app_config& cfg, const std::string& traces_dir,
                const std::string& out_path, double max_minutes) {
    stage_timer timer("extract");
    fs::path dir = resolve_path(cfg, traces_dir);
    if (!fs::is_directory(dir))
        throw error("io", "trace directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<raw_trip> trips;
    std::size_t records = 0, malformed = 0;
    for (const fs::path& f : files) {
        parse_result pr = parse_trace_file(f.string());
        records += pr.records.size();
        malformed += pr.malformed_lines;
        auto file_trips = extract_trips(pr.records, f.stem().string());
        trips.insert(trips.end(), std::make_move_iterator(file_trips.begin()),
                     std::make_move_iterator(file_trips.end()));
    }
    std::size_t extracted = trips.size();
    double kept_fraction = 1.0;
    trips = filter_by_duration(std::move(trips), max_minutes, &kept_fraction);
    std::sort(trips.begin(), trips.end(),
              [](const raw_trip& a, const raw_trip& b) {
                  if (a.taxi_id != b.taxi_id) return a.taxi_id < b.taxi_id;
                  return a.start_epoch() < b.start_epoch();
              });

    auto out = open_out(resolve_path(cfg, out_path));
    write_raw_trips(out, trips);
    std::printf("files %zu records %zu malformed %zu trips_extracted %zu "
                "kept %zu kept_fraction %.4f\n",
                files.size(), records, malformed, extracted, trips.size(),
                kept_fraction);
    return 0;
}

int cmd_encode(const app_config& cfg, const std::string& trips_path,
               const std::string& out_path, bool auto_bbox) {
    stage_timer timer("encode");
    auto in = open_in(resolve_path(cfg, trips_path));
    std::vector<raw_trip> trips = read_raw_trips(in);

    std::optional<grid> g;
    if (auto_bbox) {
        if (trips.empty())
            throw error("parameter", "--auto-bbox needs at least one trip");
        double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
        for (const raw_trip& t : trips) {
            for (const trace_record& r : t.records) {
                x0 = std::min(x0, r.lon);
                x1 = std::max(x1, r.lon);
                y0 = std::min(y0, r.lat);
                y1 = std::max(y1, r.lat);
            }
        }
        g = grid(x0, y0, x1, y1, cfg.n_r, cfg.n_c);
    } else {
        g = make_cfg_grid(cfg);
    }

    encode_stats st;
    corpus_file corpus;
    corpus.g = g;
    corpus.t_r = cfg.t_r;
    corpus.trips = encode_trips(*g, std::move(trips), cfg.t_r, &st);
    corpus.l = corpus.trips.empty() ? 0 : pad_strings(corpus.trips);

    auto out = open_out(resolve_path(cfg, out_path));
    write_corpus(out, corpus);
    std::printf("encoded %zu rejected_out_of_bounds %zu l %zu\n", st.encoded,
                st.rejected_out_of_bounds, corpus.l);
    return 0;
}

int cmd_build(const app_config& cfg, const std::string& corpus_path,
              const std::string& out_path, int hour_from, int hour_to,
              const std::string& days) {
    auto in = open_in(resolve_path(cfg, corpus_path));
    corpus_file corpus = read_corpus(in);

    std::vector<trip_string> trips;
    trips.reserve(corpus.trips.size());
    for (trip_string& s : corpus.trips) {
        if (start_in_window(s.start_epoch, cfg.tz_offset_minutes, hour_from,
                            hour_to, days))
            trips.push_back(std::move(s));
    }

    trip_trie trie;
    {
        stage_timer timer("build");
        for (const trip_string& s : trips) trie.insert(s);
        trie.freeze();
    }
    auto out = open_out(resolve_path(cfg, out_path));
    write_snapshot(out, trie, corpus.g, corpus.t_r);
    std::printf("trips %u l %zu nodes %zu\n", trie.size(),
                trie.string_length(), trie.node_count());
    return 0;
}

int cmd_insert(const app_config& cfg, const std::string& snapshot_path,
               const std::string& corpus_path, const std::string& out_path) {
    auto sin = open_in(resolve_path(cfg, snapshot_path));
    snapshot_file sf = read_snapshot(sin);
    auto cin_ = open_in(resolve_path(cfg, corpus_path));
    corpus_file corpus = read_corpus(cin_);
    {
        stage_timer timer("insert");
        for (const trip_string& s : corpus.trips) sf.trie.insert(s);
        sf.trie.freeze();
    }
    auto out = open_out(resolve_path(cfg, out_path));
    write_snapshot(out, sf.trie, sf.g, sf.t_r);
    std::printf("trips %u l %zu nodes %zu\n", sf.trie.size(),
                sf.trie.string_length(), sf.trie.node_count());
    return 0;
}

int cmd_verify(const app_config& cfg, std::uint32_t samples, std::uint32_t size,
               std::uint64_t seed, const std::string& corpus_path,
               bool full_sweep, std::size_t oracle_cap,
               const std::string& out_path) {
    std::vector<trip_string> pool;
    if (!corpus_path.empty()) {
        auto in = open_in(resolve_path(cfg, corpus_path));
        pool = read_corpus(in).trips;
    } else {
        walk_corpus_params p;
        p.trips = std::max<std::size_t>(2 * size, 2000);
        pool = make_walk_corpus(p, seed);
    }
    if (pool.size() < size)
        throw error("parameter", "corpus smaller than the sample size");

    oracle_options opts;
    opts.full_threshold_sweep = full_sweep;
    opts.max_instances = oracle_cap;
    std::vector<verify_sample_line> lines;
    bool all = true;
    for (std::uint32_t s = 0; s < samples; ++s) {
        auto t0 = std::chrono::steady_clock::now();
        det_rng rng(seed + s);
        std::vector<std::uint32_t> idx = rng.sample_indices(pool.size(), size);
        std::sort(idx.begin(), idx.end());
        std::vector<trip_string> sample;
        sample.reserve(size);
        for (std::uint32_t i : idx) sample.push_back(pool[i]);

        trip_trie trie = trip_trie::build(sample);
        equivalence_report rep = verify_equivalence(trie, sample, opts);
        auto t1 = std::chrono::steady_clock::now();

        verify_sample_line line;
        line.sample = s + 1;
        line.seed = seed + s;
        line.size = size;
        line.l = trie.string_length();
        line.all_equal = rep.all_equal;
        for (const level_check& lc : rep.levels)
            if (!lc.equal) line.failed_levels.push_back(lc.level);
        line.seconds = std::chrono::duration<double>(t1 - t0).count();
        lines.push_back(std::move(line));
        all &= rep.all_equal;
    }
    auto out = open_out(resolve_path(cfg, out_path));
    write_verify_report(out, lines);
    write_verify_report(std::cout, lines);
    return all ? 0 : 4;
}

int cmd_stats(const app_config& cfg, const std::string& snapshot_path,
              std::uint32_t first_levels, const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    stage_timer timer("stats");
    auto bf = branching_stats(sf.trie, first_levels);
    auto rc = region_cluster_counts(sf.trie, first_levels);
    auto cs = trips_per_cluster(sf.trie, first_levels);
    auto out = open_out(resolve_path(cfg, out_path));
    write_stats_report(out, sf.trie.size(), bf, rc, cs, first_levels);
    write_stats_report(std::cout, sf.trie.size(), bf, rc, cs, first_levels);
    return 0;
}

int cmd_heatmap(const app_config& cfg, const std::string& snapshot_path,
                std::uint32_t level, const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    grid g = require_grid(sf);
    stage_timer timer("heatmap");
    heatmap_grid hm = heatmap(sf.trie, g, level);
    std::string resolved = resolve_path(cfg, out_path);
    auto out = open_out(resolved);
    write_heatmap_csv(out, hm);
    auto meta = open_out(resolved + ".meta");
    write_grid_sidecar(meta, g, level, sf.t_r);
    std::printf("level %u active_trips %llu\n", level,
                static_cast<unsigned long long>(hm.total()));
    return 0;
}

int cmd_occurrence(const app_config& cfg, const std::string& snapshot_path,
                   const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    grid g = require_grid(sf);
    stage_timer timer("occurrence");
    auto first = first_occurrence_depth(sf.trie);
    std::string resolved = resolve_path(cfg, out_path);
    auto out = open_out(resolved);
    write_occurrence_csv(out, g, first);
    auto meta = open_out(resolved + ".meta");
    write_grid_sidecar(meta, g, 0, sf.t_r);
    std::printf("regions_seen %zu\n", first.size());
    return 0;
}

int cmd_subtree(const app_config& cfg, const std::string& snapshot_path,
                symbol start, std::uint32_t level, std::size_t top,
                const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    auto ranked = subtree_distribution(sf.trie, start, level, top);
    auto out = open_out(resolve_path(cfg, out_path));
    out << "start_region " << start << " depth " << level << "\n";
    for (const region_rank& r : ranked)
        out << r.region << " " << r.trip_count << "\n";
    std::printf("regions %zu\n", ranked.size());
    return 0;
}

int cmd_predict(const app_config& cfg, const std::string& snapshot_path,
                const std::string& prefix_text, const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    std::vector<symbol> prefix = parse_symbol_list(prefix_text);
    auto out = open_out(resolve_path(cfg, out_path));
    std::optional<trip_trie::node_id> node = sf.trie.locate(prefix);
    if (!node) {
        out << "prefix_found false\n";
        std::printf("prefix_found false\n");
        return 0;
    }
    out << "prefix_found true trips " << sf.trie.node_trip_count(*node)
        << "\n";
    for (const auto& cs : sf.trie.children_distribution(*node)) {
        std::ostringstream os;
        os << cs.sym << " " << cs.count << " " << std::fixed
           << std::setprecision(6) << cs.probability;
        out << os.str() << "\n";
    }
    std::printf("prefix_found true children %zu\n",
                sf.trie.children_distribution(*node).size());
    return 0;
}

int cmd_diversity(const app_config& cfg, const std::string& snapshot_path,
                  symbol start, symbol end, const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    std::uint64_t n = route_diversity(sf.trie, start, end);
    if (!out_path.empty()) {
        auto out = open_out(resolve_path(cfg, out_path));
        out << "start " << start << " end " << end << " routes " << n << "\n";
    }
    std::printf("start %d end %d routes %llu\n", start, end,
                static_cast<unsigned long long>(n));
    return 0;
}

int cmd_macro(const app_config& cfg, const std::string& snapshot_path,
              std::uint32_t level, std::uint32_t q, const std::string& strategy,
              const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    stage_timer timer("macro");
    auto micros = micro_clusters(sf.trie, level);
    macro_strategy s = strategy == "greedy" ? macro_strategy::greedy
                                            : macro_strategy::complete_linkage;
    macro_clustering g = macro_cluster(micros, q, s);
    auto out = open_out(resolve_path(cfg, out_path));
    write_macro_report(out, micros, g);
    std::printf("micro_clusters %zu macro_clusters %u\n", micros.size(),
                g.cluster_count);
    return 0;
}

int cmd_outliers(const app_config& cfg, const std::string& snapshot_path,
                 const std::string& out_path) {
    snapshot_file sf = load_frozen_snapshot(cfg, snapshot_path);
    stage_timer timer("outliers");
    auto rep = outlier_report(sf.trie);
    auto out = open_out(resolve_path(cfg, out_path));
    write_outlier_report(out, rep);
    std::printf("regions %zu\n", rep.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    app_config cfg;
    if (const char* env = std::getenv("TRIPTRIE_DATA_DIR")) cfg.data_dir = env;

    // apply --config before binding flag defaults so flags override the file
    try {
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config")
                load_config_file(argv[i + 1], cfg);
        }
    } catch (const error& e) {
        nlohmann::json j{{"error", {{"code", e.code()}, {"message", e.what()}}}};
        std::cerr << j.dump() << "\n";
        return 2;
    }

    CLI::App app{"trip-trie pipeline: encode GPS trips as region strings, "
                 "build the prefix-tree hierarchy and query it"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path,
                   "key=value config file (flags override it)");

    // extract
    auto* extract = app.add_subcommand(
        "extract", "split raw trace files into occupied trips");
    std::string traces_dir, extract_out;
    double max_minutes = cfg.max_trip_minutes;
    extract->add_option("--traces", traces_dir, "directory of trace files")
        ->required();
    extract->add_option("--out", extract_out, "raw-trips output file")
        ->required();
    extract->add_option("--max-minutes", max_minutes,
                        "drop trips longer than this (inf to keep all)");

    // encode
    auto* encode = app.add_subcommand(
        "encode", "resample trips and encode them as region strings");
    std::string encode_trips_path, encode_out;
    bool auto_bbox = false;
    encode->add_option("--trips", encode_trips_path, "raw-trips file")
        ->required();
    encode->add_option("--out", encode_out, "corpus output file")->required();
    encode->add_flag("--auto-bbox", auto_bbox,
                     "derive the bounding box from the data");
    encode->add_option("--bbox", [&cfg](const std::vector<std::string>& vals) {
        if (vals.size() != 4) return false;
        cfg.x_min = std::stod(vals[0]);
        cfg.y_min = std::stod(vals[1]);
        cfg.x_max = std::stod(vals[2]);
        cfg.y_max = std::stod(vals[3]);
        cfg.bbox_set = true;
        return true;
    }, "x_min y_min x_max y_max")->expected(4);
    encode->add_option("--rows", cfg.n_r, "grid rows");
    encode->add_option("--cols", cfg.n_c, "grid columns");
    encode->add_option("--t-r", cfg.t_r, "temporal resolution in seconds");

    // build
    auto* build = app.add_subcommand("build", "build a trie from a corpus");
    std::string build_corpus, build_out, build_days = "all";
    int hour_from = -1, hour_to = -1;
    build->add_option("--corpus", build_corpus, "corpus file")->required();
    build->add_option("--out", build_out, "snapshot output file")->required();
    build->add_option("--start-hour-from", hour_from,
                      "keep trips starting at/after this local hour");
    build->add_option("--start-hour-to", hour_to,
                      "keep trips starting before this local hour");
    build->add_option("--days", build_days, "all|weekday|weekend")
        ->check(CLI::IsMember({"all", "weekday", "weekend"}));
    build->add_option("--tz-offset-minutes", cfg.tz_offset_minutes,
                      "local-time offset for the filters");

    // insert
    auto* insert = app.add_subcommand(
        "insert", "insert additional encoded trips into a snapshot");
    std::string insert_snapshot, insert_corpus, insert_out;
    insert->add_option("--snapshot", insert_snapshot, "existing snapshot")
        ->required();
    insert->add_option("--corpus", insert_corpus, "corpus of new trips")
        ->required();
    insert->add_option("--out", insert_out, "snapshot output file")->required();

    // verify
    auto* verify = app.add_subcommand(
        "verify", "check trie/single-linkage equivalence on random samples");
    std::uint32_t v_samples = 10, v_size = 1000;
    std::uint64_t v_seed = 1;
    std::size_t v_cap = oracle_options{}.max_instances;
    std::string v_corpus, v_out = "verify_report.txt";
    bool v_full = false;
    verify->add_option("--samples", v_samples, "number of random samples");
    verify->add_option("--size", v_size, "strings per sample");
    verify->add_option("--seed", v_seed, "base seed; sample i uses seed+i");
    verify->add_option("--corpus", v_corpus,
                       "sample from this corpus instead of synthetic trips");
    verify->add_flag("--full-sweep", v_full,
                     "evaluate every distinct distance, not only 2^i - 1");
    verify->add_option("--oracle-cap", v_cap,
                       "instance cap guarding the O(n^2) distance matrix");
    verify->add_option("--out", v_out, "report file");

    // stats
    auto* stats = app.add_subcommand("stats", "dendrogram statistics report");
    std::string stats_snapshot, stats_out;
    std::uint32_t stats_first = cfg.first_levels;
    stats->add_option("--snapshot", stats_snapshot, "trie snapshot")
        ->required();
    stats->add_option("--out", stats_out, "report file")->required();
    stats->add_option("--first-levels", stats_first,
                      "window for the first-K averages");

    // heatmap
    auto* heatmap_cmd = app.add_subcommand(
        "heatmap", "trip density per grid cell at one time step");
    std::string hm_snapshot, hm_out;
    std::uint32_t hm_level = 1;
    heatmap_cmd->add_option("--snapshot", hm_snapshot, "trie snapshot")
        ->required();
    heatmap_cmd->add_option("--level", hm_level, "trie depth (time step)")
        ->required();
    heatmap_cmd->add_option("--out", hm_out, "CSV output file")->required();

    // occurrence
    auto* occurrence = app.add_subcommand(
        "occurrence", "first-occurrence depth of every region");
    std::string occ_snapshot, occ_out;
    occurrence->add_option("--snapshot", occ_snapshot, "trie snapshot")
        ->required();
    occurrence->add_option("--out", occ_out, "CSV output file")->required();

    // subtree
    auto* subtree = app.add_subcommand(
        "subtree", "most frequent regions under one start region");
    std::string st_snapshot, st_out;
    symbol st_start = 0;
    std::uint32_t st_level = 1;
    std::size_t st_top = 10;
    subtree->add_option("--snapshot", st_snapshot, "trie snapshot")->required();
    subtree->add_option("--start", st_start, "start region id")->required();
    subtree->add_option("--level", st_level, "trie depth (time step)")
        ->required();
    subtree->add_option("--top", st_top, "how many regions to report");
    subtree->add_option("--out", st_out, "report file")->required();

    // predict
    auto* predict = app.add_subcommand(
        "predict", "next-step distribution for a trip prefix");
    std::string pd_snapshot, pd_prefix, pd_out;
    predict->add_option("--snapshot", pd_snapshot, "trie snapshot")->required();
    predict->add_option("--prefix", pd_prefix,
                        "comma/space separated region ids")
        ->required();
    predict->add_option("--out", pd_out, "report file")->required();

    // diversity
    auto* diversity = app.add_subcommand(
        "diversity", "count distinct routes between two regions");
    std::string dv_snapshot, dv_out;
    symbol dv_start = 0, dv_end = 0;
    diversity->add_option("--snapshot", dv_snapshot, "trie snapshot")
        ->required();
    diversity->add_option("--start", dv_start, "start region id")->required();
    diversity->add_option("--end", dv_end, "end region id")->required();
    diversity->add_option("--out", dv_out, "optional report file");

    // macro
    auto* macro = app.add_subcommand(
        "macro", "group micro-clusters under a Levenshtein diameter bound");
    std::string mc_snapshot, mc_out, mc_strategy = "complete";
    std::uint32_t mc_level = 1, mc_q = 1;
    macro->add_option("--snapshot", mc_snapshot, "trie snapshot")->required();
    macro->add_option("--level", mc_level, "micro-cluster level")->required();
    macro->add_option("--q", mc_q, "diameter bound in edit operations")
        ->required();
    macro->add_option("--strategy", mc_strategy, "complete|greedy")
        ->check(CLI::IsMember({"complete", "greedy"}));
    macro->add_option("--out", mc_out, "assignment file")->required();

    // outliers
    auto* outliers = app.add_subcommand(
        "outliers", "per-region rarity indicators");
    std::string ol_snapshot, ol_out;
    outliers->add_option("--snapshot", ol_snapshot, "trie snapshot")
        ->required();
    outliers->add_option("--out", ol_out, "report file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed())
            return cmd_extract(cfg, traces_dir, extract_out, max_minutes);
        if (encode->parsed())
            return cmd_encode(cfg, encode_trips_path, encode_out, auto_bbox);
        if (build->parsed())
            return cmd_build(cfg, build_corpus, build_out, hour_from, hour_to,
                             build_days);
        if (insert->parsed())
            return cmd_insert(cfg, insert_snapshot, insert_corpus, insert_out);
        if (verify->parsed())
            return cmd_verify(cfg, v_samples, v_size, v_seed, v_corpus, v_full,
                              v_cap, v_out);
        if (stats->parsed())
            return cmd_stats(cfg, stats_snapshot, stats_first, stats_out);
        if (heatmap_cmd->parsed())
            return cmd_heatmap(cfg, hm_snapshot, hm_level, hm_out);
        if (occurrence->parsed())
            return cmd_occurrence(cfg, occ_snapshot, occ_out);
        if (subtree->parsed())
            return cmd_subtree(cfg, st_snapshot, st_start, st_level, st_top,
                               st_out);
        if (predict->parsed())
            return cmd_predict(cfg, pd_snapshot, pd_prefix, pd_out);
        if (diversity->parsed())
            return cmd_diversity(cfg, dv_snapshot, dv_start, dv_end, dv_out);
        if (macro->parsed())
            return cmd_macro(cfg, mc_snapshot, mc_level, mc_q, mc_strategy,
                             mc_out);
        if (outliers->parsed())
            return cmd_outliers(cfg, ol_snapshot, ol_out);
    } catch (const error& e) {
        nlohmann::json j{{"error", {{"code", e.code()}, {"message", e.what()}}}};
        std::cerr << j.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        nlohmann::json j{
            {"error", {{"code", "internal"}, {"message", e.what()}}}};
        std::cerr << j.dump() << "\n";
        return 2;
    }
    return 0;
}
