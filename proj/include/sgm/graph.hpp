#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgm/types.hpp"

namespace sgm {

struct EdgeRecord {
    EdgeId id = kNoEdge;
    VertexId src = kNoVertex;
    VertexId dst = kNoVertex;
    Label label = 0;
    Timestamp ts = 0;
    bool live = false;
    // Monotone insertion counter, used to resolve "oldest matching edge"
    // when a deletion names an edge by (src, dst, label).
    uint64_t seq = 0;
};

// Dynamic directed multigraph. Vertices are created on first use and never
// deleted. Each live edge sits in its source's out-list and its destination's
// in-list; deletion swaps with the last list entry so both lists stay dense.
// Deleted edge ids are recycled per source vertex (LIFO).
class DynamicGraph {
public:
    DynamicGraph() = default;
    explicit DynamicGraph(bool recycle_ids) : recycle_ids_(recycle_ids) {}

    VertexId add_vertex(Label label);
    // Grows the vertex space to include v; label applies only on creation.
    void ensure_vertex(VertexId v, Label label = 0);
    void set_vertex_label(VertexId v, Label label);

    EdgeId insert_edge(VertexId src, VertexId dst, Label label, Timestamp ts);
    void delete_edge(EdgeId id);

    const EdgeRecord& edge(EdgeId id) const {
        if (id < base_ || id - base_ >= edges_.size())
            throw std::out_of_range("edge id out of range");
        return edges_[id - base_];
    }
    // Ids below the hot base were spilled while live and stay logically live.
    bool is_live(EdgeId id) const {
        if (id < base_) return true;
        return id - base_ < edges_.size() && edges_[id - base_].live;
    }

    std::span<const EdgeId> out_edges(VertexId v) const {
        if (v >= out_adj_.size()) return {};
        return out_adj_[v];
    }
    std::span<const EdgeId> in_edges(VertexId v) const {
        if (v >= in_adj_.size()) return {};
        return in_adj_[v];
    }
    std::span<const EdgeId> adjacency(VertexId v, Direction dir) const {
        return dir == Direction::Out ? out_edges(v) : in_edges(v);
    }

    Label vertex_label(VertexId v) const {
        return v < vertex_labels_.size() ? vertex_labels_[v] : Label{0};
    }
    size_t vertex_count() const { return vertex_labels_.size(); }
    size_t live_edge_count() const { return live_edges_; }
    // Total allocated edge slots, live or not: the placeholder metric.
    size_t edge_slot_count() const { return base_ + edges_.size(); }
    uint64_t next_seq() const { return next_seq_; }
    EdgeId hot_base() const { return base_; }

    // Drops records below boundary from RAM and unlinks them from adjacency
    // lists. Callers move them to external storage first.
    void spill_prefix(EdgeId boundary);

    // Oldest live edge matching (src, dst, label), or kNoEdge.
    EdgeId find_oldest(VertexId src, VertexId dst, Label label) const;

    // All live edge ids in slot order (test / oracle convenience).
    std::vector<EdgeId> live_edges() const;

private:
    std::vector<std::vector<EdgeId>> out_adj_;
    std::vector<std::vector<EdgeId>> in_adj_;
    std::vector<EdgeRecord> edges_;
    std::vector<Label> vertex_labels_;
    std::vector<std::vector<EdgeId>> free_ids_; // per source vertex
    size_t live_edges_ = 0;
    uint64_t next_seq_ = 0;
    EdgeId base_ = 0; // ids below this were spilled; edges_[0] is slot base_
    bool recycle_ids_ = true;
};

} // namespace sgm
