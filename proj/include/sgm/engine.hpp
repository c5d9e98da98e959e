#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "sgm/access.hpp"
#include "sgm/coldstore.hpp"
#include "sgm/debi.hpp"
#include "sgm/dualsim.hpp"
#include "sgm/enumerate.hpp"
#include "sgm/filter.hpp"
#include "sgm/graph.hpp"
#include "sgm/matchers.hpp"
#include "sgm/pool.hpp"
#include "sgm/query.hpp"
#include "sgm/stream.hpp"

namespace sgm {

struct EngineOptions {
    Semantics semantics = Semantics::Iso;
    unsigned threads = 1;
    bool recycle_ids = true;
    uint64_t reset_every = 0; // full index rebuild every N snapshots (0 = never)
    std::optional<SpillConfig> spill;
    size_t hot_window = 0; // live edges kept in RAM when spilling
};

// Counters for one phase (insert or delete) of one snapshot.
struct BatchStats {
    uint64_t epoch = 0;
    bool deletion_phase = false;
    size_t events = 0;        // edges applied in this phase
    size_t frontier = 0;      // adjacency entries seeded into the filter
    uint64_t traversals = 0;  // adjacency entries the filter examined
    uint64_t bits_set = 0;
    uint64_t bits_cleared = 0;
    uint64_t embeddings = 0;
    uint64_t units = 0;       // enumeration work units
    uint64_t filter_ns = 0;
    uint64_t enum_wall_ns = 0;
    uint64_t enum_busy_ns = 0;
    size_t live_edges = 0;
    size_t cold_edges = 0;
    size_t edge_slots = 0;    // allocated id slots, live or not
};

// Streaming matcher: applies snapshots of edge insertions and deletions,
// keeps the binary index current, and reports appearing embeddings after
// inserts and disappearing ones before deletes take effect.
class MatchEngine {
public:
    MatchEngine(const QueryGraph& query, EngineOptions opts);

    void apply(const Snapshot& snap, EmbeddingSink* sink);

    // Greatest dual simulation over the current graph.
    SimulationRelation simulation();

    // Builds a second index from the live graph alone and compares it with
    // the incrementally maintained one.
    DebiTable rebuild_reference();
    bool index_matches_reference();

    const DynamicGraph& graph() const { return graph_; }
    DynamicGraph& graph() { return graph_; }
    const DebiTable& debi() const { return debi_; }
    DebiTable& debi() { return debi_; }
    const QueryPlan& plan() const { return plan_; }
    EngineIndex& index() { return idx_; }
    const Matcher& matcher() const { return *matcher_; }
    ColdStore* cold() { return cold_.get(); }

    void set_stats_callback(std::function<void(const BatchStats&)> cb) {
        stats_cb_ = std::move(cb);
    }

private:
    std::vector<EdgeId> apply_inserts(const Snapshot& snap);
    std::vector<EdgeId> resolve_deletes(const Snapshot& snap, uint64_t first_seq) const;
    void run_phase(const Snapshot& snap, bool deletion, const std::vector<EdgeId>& batch,
                   EmbeddingSink* sink);
    void maybe_evict();

    QueryPlan plan_;
    EngineOptions opts_;
    DynamicGraph graph_;
    DebiTable debi_;
    std::unique_ptr<ColdStore> cold_;
    EngineIndex idx_;
    std::unique_ptr<Matcher> matcher_;
    std::unique_ptr<ThreadPool> pool_;
    Filter filter_;
    std::function<void(const BatchStats&)> stats_cb_;
    uint64_t snapshots_seen_ = 0;
};

} // namespace sgm
