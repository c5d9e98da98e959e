#include "sgm/graph.hpp"

#include <algorithm>

namespace sgm {

VertexId DynamicGraph::add_vertex(Label label) {
    VertexId v = static_cast<VertexId>(vertex_labels_.size());
    vertex_labels_.push_back(label);
    out_adj_.emplace_back();
    in_adj_.emplace_back();
    free_ids_.emplace_back();
    return v;
}

void DynamicGraph::ensure_vertex(VertexId v, Label label) {
    while (vertex_labels_.size() <= v) add_vertex(label);
}

void DynamicGraph::set_vertex_label(VertexId v, Label label) {
    ensure_vertex(v, label);
    vertex_labels_[v] = label;
}

EdgeId DynamicGraph::insert_edge(VertexId src, VertexId dst, Label label, Timestamp ts) {
    ensure_vertex(std::max(src, dst));
    EdgeId id;
    if (recycle_ids_ && !free_ids_[src].empty()) {
        id = free_ids_[src].back();
        free_ids_[src].pop_back();
    } else {
        id = static_cast<EdgeId>(base_ + edges_.size());
        edges_.emplace_back();
    }
    edges_[id - base_] = EdgeRecord{id, src, dst, label, ts, true, next_seq_++};
    out_adj_[src].push_back(id);
    in_adj_[dst].push_back(id);
    ++live_edges_;
    return id;
}

void DynamicGraph::delete_edge(EdgeId id) {
    if (id < base_)
        throw std::invalid_argument("delete_edge: edge was spilled to cold storage");
    if (id - base_ >= edges_.size() || !edges_[id - base_].live)
        throw std::invalid_argument("delete_edge: edge not live");
    EdgeRecord& rec = edges_[id - base_];

    auto remove_from = [id](std::vector<EdgeId>& list) {
        auto it = std::find(list.begin(), list.end(), id);
        *it = list.back();
        list.pop_back();
    };
    remove_from(out_adj_[rec.src]);
    remove_from(in_adj_[rec.dst]);

    rec.live = false;
    free_ids_[rec.src].push_back(id);
    --live_edges_;
}

EdgeId DynamicGraph::find_oldest(VertexId src, VertexId dst, Label label) const {
    EdgeId best = kNoEdge;
    uint64_t best_seq = 0;
    for (EdgeId id : out_edges(src)) {
        const EdgeRecord& rec = edges_[id - base_];
        if (rec.dst != dst || rec.label != label) continue;
        if (best == kNoEdge || rec.seq < best_seq) {
            best = id;
            best_seq = rec.seq;
        }
    }
    return best;
}

std::vector<EdgeId> DynamicGraph::live_edges() const {
    std::vector<EdgeId> out;
    out.reserve(live_edges_);
    for (const EdgeRecord& rec : edges_)
        if (rec.live) out.push_back(rec.id);
    return out;
}

void DynamicGraph::spill_prefix(EdgeId boundary) {
    if (boundary <= base_) return;
    if (boundary - base_ > edges_.size())
        throw std::out_of_range("spill boundary beyond allocated slots");
    // Stable removal keeps the surviving entries in insertion order, so
    // adjacency scans read the same either side of an eviction.
    auto unlink = [boundary](std::vector<EdgeId>& list) {
        list.erase(std::remove_if(list.begin(), list.end(),
                                  [boundary](EdgeId e) { return e < boundary; }),
                   list.end());
    };
    for (EdgeId id = base_; id < boundary; ++id) {
        EdgeRecord& rec = edges_[id - base_];
        if (!rec.live)
            throw std::logic_error("spill_prefix crossed a non-live slot");
        unlink(out_adj_[rec.src]);
        unlink(in_adj_[rec.dst]);
        --live_edges_;
    }
    edges_.erase(edges_.begin(), edges_.begin() + (boundary - base_));
    base_ = boundary;
}

} // namespace sgm
