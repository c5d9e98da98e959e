#pragma once

#include <cstdint>
#include <vector>

#include "sgm/access.hpp"
#include "sgm/matchers.hpp"
#include "sgm/pool.hpp"

namespace sgm {

// An adjacency edge staged for evaluation at one tree edge, with endpoints
// already split into tree roles (copied so deleted records stay usable).
struct FrontierEdge {
    EdgeId id;
    VertexId parent_v;
    VertexId child_v;
};

// Incremental maintenance of the binary index. The stored state is kept equal
// to a pure function of the live graph:
//   bit(d, t)  = d matches t  and  count filters hold at the child endpoint
//                and the parent endpoint extends upward to the root
//                and the child endpoint covers every deeper tree edge
//   roots[v]   = v extends upward trivially and covers every top tree edge
// so any sequence of batches leaves exactly the same bits as a full rebuild.
//
// Inserts run top-down (optimistic sets, breadth-first) then bottom-up
// (coverage verification plus newly enabled sets). Deletes run bottom-up
// (cascading clears) then top-down (revalidating flagged vertices).
class Filter {
public:
    Filter(EngineIndex& idx, const Matcher& matcher, ThreadPool* pool = nullptr);

    // Insert pass; the graph already contains the batch.
    void seed_frontier(const std::vector<EdgeId>& batch);
    void top_down_insert();
    void bottom_up_insert();

    // Delete pass; seeding reads bits while the batch is still live, the two
    // passes run after the edges left the graph.
    void seed_delete(const std::vector<EdgeId>& batch);
    void bottom_up_delete();
    void top_down_delete();

    // Rebuilds the whole index from the live graph.
    void rebuild();

    uint64_t traversals() const { return traversals_; }
    void reset_traversals() { traversals_ = 0; }
    size_t seeded_frontier_size() const { return seeded_; }

    // Per-vertex predicates, exposed for direct testing.
    bool label_count_ok(VertexId v, VertexId u);
    bool top_down_valid(VertexId v, VertexId u);

private:
    struct Stage; // per-worker push buffers for the parallel insert pass

    void begin_pass(bool fresh_memo);
    void ensure_memo();
    bool edge_matches(const EdgeRecord& rec, int query_edge) const;
    Direction childside_dir(int t) const;
    Direction parentside_dir(int t) const;
    void split_roles(const EdgeRecord& rec, int t, VertexId& pv, VertexId& cv) const;
    FrontierEdge make_frontier(const EdgeRecord& rec, int t) const {
        FrontierEdge fe{rec.id, kNoVertex, kNoVertex};
        split_roles(rec, t, fe.parent_v, fe.child_v);
        return fe;
    }

    void push_frontier(int t, const EdgeRecord& rec);
    void push_root(VertexId v);
    void push_endpoint(VertexId v);
    bool mark_once(std::vector<uint32_t>& table, size_t index);

    bool side_ok(VertexId v, Direction dir, const SideNeeds& needs);
    bool chain_up(VertexId v, VertexId u);

    void process_insert_edge(const FrontierEdge& fe, int t, Stage& stage);
    void process_root(VertexId w, Stage& stage);
    void merge_stage(Stage& stage, int t);
    void run_roots();
    void run_level(int t);

    void clear_and_cascade(const FrontierEdge& fe, int t);
    void flag_vertex(VertexId v, VertexId u);

    EngineIndex& idx_;
    const QueryPlan& plan_;
    const QueryGraph& q_;
    const Matcher& matcher_;
    ThreadPool* pool_;
    bool capped_;
    uint32_t nq_;
    int tree_count_;

    uint32_t pass_epoch_ = 0;
    uint64_t memo_epoch_ = 0;
    std::vector<std::vector<FrontierEdge>> frontier_;
    std::vector<std::vector<uint32_t>> frontier_stamp_; // per tree edge, per slot
    std::vector<VertexId> root_frontier_;
    std::vector<VertexId> endpoints_;
    std::vector<VertexId> optimistic_roots_;
    std::vector<uint32_t> root_stamp_, endpoint_stamp_;  // per vertex
    std::vector<std::vector<VertexId>> verify_;          // per tree edge
    std::vector<std::vector<VertexId>> gains_;           // per query node
    std::vector<std::vector<VertexId>> flags_;           // per query node
    std::vector<uint32_t> verify_stamp_, gain_stamp_, flag_stamp_; // per (v, u)
    std::vector<uint64_t> memo_label_, memo_td_;         // per (v, u), epoch-tagged
    std::atomic<uint64_t> traversals_{0};
    size_t seeded_ = 0;
};

} // namespace sgm
