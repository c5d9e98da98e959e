#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "CLI11.hpp"
#include "sgm/engine.hpp"
#include "sgm/gen.hpp"
#include "sgm/oracle.hpp"

namespace {

using namespace sgm;

Semantics parse_matcher(const std::string& name) {
    if (name == "iso") return Semantics::Iso;
    if (name == "homo") return Semantics::Homo;
    if (name == "dualsim") return Semantics::DualSim;
    if (name == "tciso") return Semantics::TcIso;
    throw CLI::ValidationError("--matcher", "unknown matcher: " + name);
}

StreamType parse_stream_type(const std::string& name) {
    if (name == "insert_only") return StreamType::InsertOnly;
    if (name == "insert_delete") return StreamType::InsertDelete;
    if (name == "sliding_window") return StreamType::SlidingWindow;
    throw CLI::ValidationError("--stream-type", "unknown stream type: " + name);
}

struct RunOptions {
    std::string query_path;
    std::string stream_path;
    std::string stream_type = "insert_only";
    std::string window;
    std::string stride;
    size_t batch_size = 1;
    size_t initial_load = 0;
    std::string matcher = "iso";
    unsigned threads = 1;
    size_t in_memory_window = 0;
    std::string spill_dir;
    size_t spill_buffer = 1u << 20;
    uint64_t reset_every = 0;
    std::string out_path = "-";
    std::string stats_path;
    bool plot_data = false;
    bool no_recycle = false;
    bool emit_vertices = false;
};

void add_stream_flags(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--query", o.query_path, "query pattern file")->required();
    cmd->add_option("--stream", o.stream_path, "edge stream file")->required();
    cmd->add_option("--stream-type", o.stream_type,
                    "insert_only, insert_delete, or sliding_window");
    cmd->add_option("--window", o.window, "sliding window size (count or 24h/10m/30s)");
    cmd->add_option("--stride", o.stride, "sliding window advance per snapshot");
    cmd->add_option("--batch-size", o.batch_size, "events per snapshot");
    cmd->add_option("--initial-load", o.initial_load,
                    "events loaded up front without reporting embeddings");
    cmd->add_option("--matcher", o.matcher, "iso, homo, dualsim, or tciso");
}

StreamConfig make_stream_config(const RunOptions& o) {
    StreamConfig sc;
    sc.type = parse_stream_type(o.stream_type);
    if (!o.window.empty()) sc.window = Span::parse(o.window);
    if (!o.stride.empty()) sc.stride = Span::parse(o.stride);
    sc.batch_size = o.batch_size;
    sc.initial_load = o.initial_load;
    sc.validate();
    return sc;
}

EngineOptions make_engine_options(const RunOptions& o, const StreamConfig& sc) {
    EngineOptions eo;
    eo.semantics = parse_matcher(o.matcher);
    eo.threads = o.threads;
    eo.recycle_ids = !o.no_recycle;
    eo.reset_every = o.reset_every;
    if (!o.spill_dir.empty()) {
        if (sc.type != StreamType::InsertOnly)
            throw CLI::ValidationError("--spill-dir", "spilling needs an insert-only stream");
        if (o.in_memory_window == 0)
            throw CLI::ValidationError("--spill-dir", "spilling needs --in-memory-window");
        eo.spill = SpillConfig{o.spill_dir, o.spill_buffer};
        eo.hot_window = o.in_memory_window;
    }
    return eo;
}

// Writes one log line per embedding:
//   <sign> <epoch> <queryEdgeIdx>:<dataEdgeId> ...
// and optionally appends the vertex assignment as | <queryNode>:<vertex> ...
class LogSink : public EmbeddingSink {
public:
    LogSink(std::ostream& out, bool vertices) : out_(out), vertices_(vertices) {}

    void set_epoch(uint64_t e) { epoch_ = e; }
    uint64_t positives() const { return positives_; }
    uint64_t negatives() const { return negatives_; }

    void emit(bool positive, const std::vector<EdgeId>& edge_map,
              const std::vector<VertexId>& vertex_map) override {
        out_ << (positive ? '+' : '-') << ' ' << epoch_;
        for (size_t i = 0; i < edge_map.size(); ++i) out_ << ' ' << i << ':' << edge_map[i];
        if (vertices_) {
            out_ << " |";
            for (size_t u = 0; u < vertex_map.size(); ++u) out_ << ' ' << u << ':' << vertex_map[u];
        }
        out_ << '\n';
        ++(positive ? positives_ : negatives_);
    }

private:
    std::ostream& out_;
    bool vertices_;
    uint64_t epoch_ = 0;
    uint64_t positives_ = 0;
    uint64_t negatives_ = 0;
};

void write_relation(std::ostream& out, uint64_t epoch, const SimulationRelation& rel) {
    for (size_t u = 0; u < rel.sets.size(); ++u) {
        out << "S " << epoch << ' ' << u;
        for (VertexId v : rel.sets[u]) out << ' ' << v;
        out << '\n';
    }
    for (size_t qi = 0; qi < rel.support.size(); ++qi) {
        out << "R " << epoch << ' ' << qi;
        for (EdgeId e : rel.support[qi]) out << ' ' << e;
        out << '\n';
    }
}

struct PlotSeries {
    uint64_t insert_events = 0;
    uint64_t traversals = 0;
    uint64_t busy_ns = 0;
    uint64_t wall_ns = 0;
    size_t peak_slots = 0;
    std::vector<std::pair<uint64_t, size_t>> placeholders; // (epoch, slots)
};

int do_run(const RunOptions& opt) {
    QueryGraph q = QueryGraph::load(opt.query_path);
    StreamConfig sc = make_stream_config(opt);
    EngineOptions eo = make_engine_options(opt, sc);
    MatchEngine engine(q, eo);

    std::ifstream stream_file(opt.stream_path);
    if (!stream_file) throw std::runtime_error("cannot open stream file: " + opt.stream_path);
    SnapshotStream snapshots(sc, stream_file);

    std::ofstream out_file;
    std::ostream* out = &std::cout;
    if (opt.out_path != "-") {
        out_file.open(opt.out_path);
        if (!out_file) throw std::runtime_error("cannot open output file: " + opt.out_path);
        out = &out_file;
    }
    std::ofstream stats_file;
    std::ostream* stats = nullptr;
    if (!opt.stats_path.empty()) {
        if (opt.stats_path == "-") {
            stats = &std::cout;
        } else {
            stats_file.open(opt.stats_path);
            if (!stats_file) throw std::runtime_error("cannot open stats file: " + opt.stats_path);
            stats = &stats_file;
        }
    }

    PlotSeries series;
    engine.set_stats_callback([&](const BatchStats& st) {
        if (stats) {
            *stats << "batch epoch=" << st.epoch
                   << " phase=" << (st.deletion_phase ? "delete" : "insert")
                   << " events=" << st.events << " frontier=" << st.frontier
                   << " traversals=" << st.traversals << " bits_set=" << st.bits_set
                   << " bits_cleared=" << st.bits_cleared << " embeddings=" << st.embeddings
                   << " units=" << st.units << " filter_ns=" << st.filter_ns
                   << " enum_wall_ns=" << st.enum_wall_ns << " enum_busy_ns=" << st.enum_busy_ns
                   << " live=" << st.live_edges << " cold=" << st.cold_edges
                   << " slots=" << st.edge_slots << '\n';
        }
        if (!st.deletion_phase) {
            series.insert_events += st.events;
            series.traversals += st.traversals;
        }
        series.busy_ns += st.enum_busy_ns;
        series.wall_ns += st.filter_ns + st.enum_wall_ns;
        series.peak_slots = std::max(series.peak_slots, st.edge_slots);
        if (!st.deletion_phase) series.placeholders.emplace_back(st.epoch, st.edge_slots);
    });

    LogSink sink(*out, opt.emit_vertices);
    bool dualsim = eo.semantics == Semantics::DualSim;
    uint64_t snapshot_count = 0;
    while (auto snap = snapshots.next()) {
        sink.set_epoch(snap->epoch);
        engine.apply(*snap, &sink);
        if (dualsim && !snap->initial) write_relation(*out, snap->epoch, engine.simulation());
        ++snapshot_count;
    }

    if (opt.plot_data) {
        std::ostream& p = stats ? *stats : std::cout;
        double per_edge = series.insert_events
                              ? double(series.traversals) / double(series.insert_events)
                              : 0.0;
        double utilization = series.wall_ns
                                 ? double(series.busy_ns) / (double(series.wall_ns) * opt.threads)
                                 : 0.0;
        p << "plot traversals_per_edge " << per_edge << '\n';
        p << "plot wall_ns_total " << series.wall_ns << '\n';
        p << "plot worker_utilization " << utilization << '\n';
        p << "plot placeholders_peak " << series.peak_slots << '\n';
        for (auto& [epoch, slots] : series.placeholders)
            p << "plot placeholders " << epoch << ' ' << slots << '\n';
    }
    std::ostream& tail = stats ? *stats : std::cerr;
    size_t live = engine.graph().live_edge_count() + (engine.cold() ? engine.cold()->cold_count() : 0);
    tail << "total snapshots=" << snapshot_count << " positives=" << sink.positives()
         << " negatives=" << sink.negatives() << " live=" << live << '\n';
    return 0;
}

// Collects canonical embedding sets per phase for oracle comparison.
class CollectSink : public EmbeddingSink {
public:
    void emit(bool positive, const std::vector<EdgeId>& edge_map,
              const std::vector<VertexId>&) override {
        auto& bucket = positive ? positives : negatives;
        if (!bucket.insert(edge_map).second) ++duplicates;
    }

    EmbeddingSet positives, negatives;
    uint64_t duplicates = 0;
};

// Mirrors the engine's deletion resolution: oldest live (src, dst, label)
// edge not already chosen in this snapshot.
std::vector<EdgeId> shadow_resolve(const DynamicGraph& g, const std::vector<StreamEvent>& dels) {
    std::vector<EdgeId> ids;
    std::unordered_set<EdgeId> chosen;
    for (const StreamEvent& ev : dels) {
        EdgeId best = kNoEdge;
        uint64_t best_seq = 0;
        for (EdgeId id : g.out_edges(ev.src)) {
            const EdgeRecord& rec = g.edge(id);
            if (rec.dst != ev.dst || rec.label != ev.label || chosen.count(id)) continue;
            if (best == kNoEdge || rec.seq < best_seq) {
                best = id;
                best_seq = rec.seq;
            }
        }
        if (best == kNoEdge) throw std::runtime_error("deletion names no live edge");
        chosen.insert(best);
        ids.push_back(best);
    }
    return ids;
}

int do_verify(const RunOptions& opt) {
    QueryGraph q = QueryGraph::load(opt.query_path);
    StreamConfig sc = make_stream_config(opt);
    RunOptions adjusted = opt;
    adjusted.spill_dir.clear(); // the reference rebuild needs everything hot
    EngineOptions eo = make_engine_options(adjusted, sc);
    Semantics sem = eo.semantics;
    MatchEngine engine(q, eo);

    std::ifstream stream_file(opt.stream_path);
    if (!stream_file) throw std::runtime_error("cannot open stream file: " + opt.stream_path);
    SnapshotStream snapshots(sc, stream_file);

    // A shadow copy of the data graph gives the oracle the in-between state
    // (after inserts, before deletes) with identical edge ids.
    DynamicGraph shadow(eo.recycle_ids);
    EmbeddingSet before;
    uint64_t checked = 0, embeddings = 0;

    while (auto snap = snapshots.next()) {
        CollectSink sink;
        engine.apply(*snap, &sink);
        if (sink.duplicates) {
            std::cout << "FAIL epoch " << snap->epoch << ": " << sink.duplicates
                      << " duplicate embeddings emitted\n";
            return 1;
        }

        for (const VertexDecl& d : snap->vertex_decls) {
            if (d.v < shadow.vertex_count())
                shadow.set_vertex_label(d.v, d.label);
            else
                shadow.ensure_vertex(d.v, d.label);
        }
        for (const StreamEvent& ev : snap->inserts) {
            shadow.ensure_vertex(ev.src);
            shadow.ensure_vertex(ev.dst);
            shadow.insert_edge(ev.src, ev.dst, ev.label, ev.ts);
        }

        if (sem == Semantics::DualSim) {
            for (const StreamEvent& ev : snap->deletes)
                shadow.delete_edge(shadow_resolve(shadow, {ev})[0]);
            auto got = engine.simulation();
            auto want = brute_force_dualsim(shadow, q);
            for (size_t u = 0; u < want.size(); ++u) {
                std::vector<VertexId> w(want[u].begin(), want[u].end());
                if (got.sets[u] != w) {
                    std::cout << "FAIL epoch " << snap->epoch << ": simulation set of node " << u
                              << " diverged\n";
                    return 1;
                }
            }
        } else {
            EmbeddingSet mid = brute_force(shadow, q, sem);
            auto added = delta(before, mid).first;
            if (!snap->initial && sink.positives != added) {
                std::cout << "FAIL epoch " << snap->epoch << ": engine emitted "
                          << sink.positives.size() << " positives, oracle expects "
                          << added.size() << '\n';
                return 1;
            }
            for (EdgeId id : shadow_resolve(shadow, snap->deletes)) shadow.delete_edge(id);
            EmbeddingSet after = snap->deletes.empty() ? std::move(mid)
                                                       : brute_force(shadow, q, sem);
            if (!snap->deletes.empty()) {
                auto removed = delta(mid, after).second;
                if (!snap->initial && sink.negatives != removed) {
                    std::cout << "FAIL epoch " << snap->epoch << ": engine emitted "
                              << sink.negatives.size() << " negatives, oracle expects "
                              << removed.size() << '\n';
                    return 1;
                }
            }
            embeddings += sink.positives.size() + sink.negatives.size();
            before = std::move(after);
        }

        if (!engine.index_matches_reference()) {
            std::cout << "FAIL epoch " << snap->epoch << ": index diverged from a full rebuild\n";
            return 1;
        }
        ++checked;
    }
    std::cout << "PASS (" << checked << " snapshots, " << embeddings << " embeddings)\n";
    return 0;
}

struct GenOptions {
    std::string kind = "uniform";
    GenConfig cfg;
    std::string out_path = "-";
};

int do_gen(const GenOptions& opt) {
    GenConfig cfg = opt.cfg;
    cfg.kind = parse_gen_kind(opt.kind);
    if (opt.out_path == "-") {
        generate_stream(cfg, std::cout);
        return 0;
    }
    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + opt.out_path);
    generate_stream(cfg, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming subgraph matcher"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "replay a stream and report embedding changes");
    add_stream_flags(run, run_opt);
    run->add_option("--threads", run_opt.threads, "worker count for filter and enumeration");
    run->add_option("--in-memory-window", run_opt.in_memory_window,
                    "live edges kept in RAM when spilling");
    run->add_option("--spill-dir", run_opt.spill_dir, "directory for cold edge segments");
    run->add_option("--spill-buffer-bytes", run_opt.spill_buffer,
                    "pending cold data flushed to a segment at this size");
    run->add_option("--reset-every", run_opt.reset_every, "rebuild the index every N snapshots");
    run->add_option("--out", run_opt.out_path, "embedding log path ('-' for stdout)");
    run->add_option("--stats", run_opt.stats_path, "per-batch statistics path ('-' for stdout)");
    run->add_flag("--plot-data", run_opt.plot_data, "append aggregate series to the stats output");
    run->add_flag("--no-recycle", run_opt.no_recycle, "never reuse freed edge ids");
    run->add_flag("--emit-vertices", run_opt.emit_vertices, "append vertex maps to log lines");

    RunOptions verify_opt;
    CLI::App* verify =
        app.add_subcommand("verify", "replay a stream and compare against exhaustive search");
    add_stream_flags(verify, verify_opt);
    verify->add_flag("--no-recycle", verify_opt.no_recycle, "never reuse freed edge ids");

    GenOptions gen_opt;
    CLI::App* gen = app.add_subcommand("gen", "write a synthetic stream");
    gen->add_option("--kind", gen_opt.kind, "uniform, powerlaw, or churn");
    gen->add_option("--vertices", gen_opt.cfg.vertices, "vertex count");
    gen->add_option("--edges", gen_opt.cfg.edges, "insert event count");
    gen->add_option("--vertex-labels", gen_opt.cfg.vertex_labels, "vertex label alphabet size");
    gen->add_option("--edge-labels", gen_opt.cfg.edge_labels, "edge label alphabet size");
    gen->add_option("--delete-ratio", gen_opt.cfg.delete_ratio, "fraction of events that delete");
    gen->add_option("--delete-lag", gen_opt.cfg.delete_lag,
                    "deletions only target edges at least this many inserts old");
    gen->add_option("--seed", gen_opt.cfg.seed, "random seed");
    gen->add_flag("--timestamps", gen_opt.cfg.timestamps, "write explicit event times");
    gen->add_option("--out", gen_opt.out_path, "stream path ('-' for stdout)");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return do_run(run_opt);
        if (verify->parsed()) return do_verify(verify_opt);
        return do_gen(gen_opt);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
