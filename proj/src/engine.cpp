#include "sgm/engine.hpp"

#include <chrono>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace sgm {

namespace {

uint64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

MatchEngine::MatchEngine(const QueryGraph& query, EngineOptions opts)
    : plan_(query, {}, opts.semantics == Semantics::TcIso),
      opts_(opts),
      graph_(opts.recycle_ids),
      debi_(static_cast<uint32_t>(plan_.node_count() - 1)),
      cold_(opts.spill ? std::make_unique<ColdStore>(*opts.spill, debi_.row_bytes()) : nullptr),
      idx_(graph_, debi_, plan_, cold_.get()),
      matcher_(make_matcher(opts.semantics)),
      pool_(opts.threads > 1 ? std::make_unique<ThreadPool>(opts.threads) : nullptr),
      filter_(idx_, *matcher_, pool_.get()) {
    if (cold_ && opts_.hot_window == 0)
        throw std::invalid_argument("spilling needs a positive in-memory window");
}

std::vector<EdgeId> MatchEngine::apply_inserts(const Snapshot& snap) {
    std::vector<EdgeId> ids;
    ids.reserve(snap.inserts.size());
    for (const StreamEvent& ev : snap.inserts) {
        graph_.ensure_vertex(ev.src);
        graph_.ensure_vertex(ev.dst);
        ids.push_back(graph_.insert_edge(ev.src, ev.dst, ev.label, ev.ts));
    }
    return ids;
}

std::vector<EdgeId> MatchEngine::resolve_deletes(const Snapshot& snap, uint64_t first_seq) const {
    std::vector<EdgeId> ids;
    ids.reserve(snap.deletes.size());
    std::unordered_set<EdgeId> chosen;
    for (const StreamEvent& ev : snap.deletes) {
        EdgeId best = kNoEdge;
        uint64_t best_seq = 0;
        for (EdgeId id : graph_.out_edges(ev.src)) {
            const EdgeRecord& rec = graph_.edge(id);
            if (rec.dst != ev.dst || rec.label != ev.label || chosen.count(id)) continue;
            if (best == kNoEdge || rec.seq < best_seq) {
                best = id;
                best_seq = rec.seq;
            }
        }
        if (best == kNoEdge)
            throw std::runtime_error("deletion names no live edge: " + std::to_string(ev.src) +
                                     " -> " + std::to_string(ev.dst) + " label " +
                                     std::to_string(ev.label));
        if (best_seq >= first_seq)
            throw std::runtime_error("snapshot deletes an edge it also inserts");
        chosen.insert(best);
        ids.push_back(best);
    }
    return ids;
}

void MatchEngine::run_phase(const Snapshot& snap, bool deletion, const std::vector<EdgeId>& batch,
                            EmbeddingSink* sink) {
    BatchStats st;
    st.epoch = snap.epoch;
    st.deletion_phase = deletion;
    st.events = batch.size();

    idx_.sync_sizes();
    idx_.reset_bit_counters();
    filter_.reset_traversals();
    idx_.set_marks(batch);

    bool want = sink && !snap.initial && !batch.empty() && opts_.semantics != Semantics::DualSim;

    if (!deletion) {
        uint64_t t0 = now_ns();
        filter_.seed_frontier(batch);
        filter_.top_down_insert();
        filter_.bottom_up_insert();
        st.filter_ns = now_ns() - t0;
        st.frontier = filter_.seeded_frontier_size();
        if (want) {
            std::vector<WorkUnit> units = decompose(idx_, *matcher_, batch);
            EnumStats es = enumerate_all(idx_, *matcher_, units, true, *sink, pool_.get());
            st.embeddings = es.emitted;
            st.units = es.units;
            st.enum_wall_ns = es.wall_ns;
            st.enum_busy_ns = es.busy_ns;
        }
    } else {
        uint64_t t0 = now_ns();
        filter_.seed_delete(batch);
        st.filter_ns = now_ns() - t0;
        st.frontier = filter_.seeded_frontier_size();
        if (want) {
            std::vector<WorkUnit> units = decompose(idx_, *matcher_, batch);
            EnumStats es = enumerate_all(idx_, *matcher_, units, false, *sink, pool_.get());
            st.embeddings = es.emitted;
            st.units = es.units;
            st.enum_wall_ns = es.wall_ns;
            st.enum_busy_ns = es.busy_ns;
        }
        uint64_t t1 = now_ns();
        for (EdgeId id : batch) {
            const EdgeRecord& rec = graph_.edge(id);
            idx_.clear_row_of(rec);
            graph_.delete_edge(id);
        }
        filter_.bottom_up_delete();
        filter_.top_down_delete();
        st.filter_ns += now_ns() - t1;
    }

    st.traversals = filter_.traversals();
    st.bits_set = idx_.bits_set();
    st.bits_cleared = idx_.bits_cleared();
    size_t cold_edges = cold_ ? cold_->cold_count() : 0;
    st.live_edges = graph_.live_edge_count() + cold_edges;
    st.cold_edges = cold_edges;
    st.edge_slots = graph_.edge_slot_count();
    if (stats_cb_) stats_cb_(st);
}

void MatchEngine::apply(const Snapshot& snap, EmbeddingSink* sink) {
    for (const VertexDecl& d : snap.vertex_decls) {
        if (d.v < graph_.vertex_count() && graph_.vertex_label(d.v) != d.label) {
            bool attached = !graph_.out_edges(d.v).empty() || !graph_.in_edges(d.v).empty();
            if (!attached && cold_) {
                auto snap_out = cold_->fetch(d.v, Direction::Out);
                auto snap_in = cold_->fetch(d.v, Direction::In);
                attached = !snap_out->recs.empty() || !snap_in->recs.empty();
            }
            if (attached)
                throw std::runtime_error("vertex " + std::to_string(d.v) +
                                         " relabeled while it has edges");
            graph_.set_vertex_label(d.v, d.label);
        } else {
            graph_.ensure_vertex(d.v, d.label);
        }
    }

    uint64_t first_seq = graph_.next_seq();
    std::vector<EdgeId> inserted = apply_inserts(snap);
    run_phase(snap, false, inserted, sink);

    if (!snap.deletes.empty()) {
        std::vector<EdgeId> removed = resolve_deletes(snap, first_seq);
        run_phase(snap, true, removed, sink);
    }

    ++snapshots_seen_;
    if (opts_.reset_every && snapshots_seen_ % opts_.reset_every == 0) filter_.rebuild();
    maybe_evict();
}

SimulationRelation MatchEngine::simulation() {
    idx_.sync_sizes();
    return dual_simulation(idx_, *matcher_);
}

DebiTable MatchEngine::rebuild_reference() {
    if (graph_.hot_base() != 0)
        throw std::logic_error("reference rebuild needs the whole graph in memory");
    DebiTable ref(debi_.width_bits());
    EngineIndex ridx(graph_, ref, plan_, nullptr);
    ridx.sync_sizes();
    Filter fresh(ridx, *matcher_, nullptr);
    fresh.rebuild();
    return ref;
}

bool MatchEngine::index_matches_reference() {
    DebiTable ref = rebuild_reference();
    return debi_.same_bits(ref);
}

void MatchEngine::maybe_evict() {
    if (!cold_) return;
    size_t slots = graph_.edge_slot_count();
    size_t hot = slots - graph_.hot_base();
    if (hot <= opts_.hot_window) return;
    cold_->evict(graph_, debi_, static_cast<EdgeId>(slots - opts_.hot_window));
}

} // namespace sgm
