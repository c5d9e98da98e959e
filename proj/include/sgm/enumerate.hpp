#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sgm/access.hpp"
#include "sgm/matchers.hpp"
#include "sgm/pool.hpp"

namespace sgm {

// One self-contained enumeration task: a start query edge plus the data edges
// pre-bound to it. Non-tree starts carry up to two extra seeds, the matched
// parent tree edges of the start's endpoints.
struct WorkUnit {
    int start_canonical = 0;
    std::vector<std::pair<int, EdgeRecord>> seeds; // (query edge index, data edge)
};

class EmbeddingSink {
public:
    virtual ~EmbeddingSink() = default;
    // edge_map is indexed by query edge, vertex_map by query node.
    virtual void emit(bool positive, const std::vector<EdgeId>& edge_map,
                      const std::vector<VertexId>& vertex_map) = 0;
};

// Masked backtracker state, reusable across units on one worker.
class EnumContext {
public:
    EnumContext(const EngineIndex& idx, const Matcher& matcher);

    void set_sign(bool positive) { positive_ = positive; }
    void run(const WorkUnit& unit, EmbeddingSink& sink);

private:
    struct Binding {
        int qi;
        bool bound_src, bound_dst;
    };

    bool bind(int qi, const EdgeRecord& rec);
    void unbind();
    // Existence check of every unbound non-tree edge touching a newly bound
    // vertex; prunes dead branches before the tail steps reach them.
    bool verify_nte(VertexId u_new);
    void step(size_t k, EmbeddingSink& sink);

    const EngineIndex& idx_;
    const QueryPlan& plan_;
    const QueryGraph& q_;
    const Matcher& matcher_;
    MaskRow mask_{0};
    const std::vector<int>* order_ = nullptr;
    bool positive_ = true;
    std::vector<EdgeId> emap_;
    std::vector<VertexId> vmap_;
    std::vector<Timestamp> ets_;
    std::vector<Binding> trail_;
    std::vector<std::vector<int>> nte_at_; // non-tree edges touching each node
};

struct EnumStats {
    uint64_t units = 0;
    uint64_t emitted = 0;
    uint64_t busy_ns = 0;
    uint64_t wall_ns = 0;
};

/// Work units for one batch: per batch edge, one unit per tree edge whose bit
// is set, plus one unit per (non-tree match, parent-edge pair).
std::vector<WorkUnit> decompose(const EngineIndex& idx, const Matcher& matcher,
                                const std::vector<EdgeId>& batch);

// Executes units (in parallel when a pool is given) and forwards embeddings
// to the sink in unit order.
EnumStats enumerate_all(const EngineIndex& idx, const Matcher& matcher,
                        const std::vector<WorkUnit>& units, bool positive, EmbeddingSink& sink,
                        ThreadPool* pool);

} // namespace sgm
