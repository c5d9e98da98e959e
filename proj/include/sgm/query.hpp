#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sgm/types.hpp"

namespace sgm {

struct QueryEdge {
    VertexId src = kNoVertex;
    VertexId dst = kNoVertex;
    Label label = kWildcardLabel; // kWildcardLabel matches any edge label
    Timestamp ts = 0;
    bool has_ts = false;
};

// Directed pattern graph. Node ids are dense 0..n-1. Edge labels may be
// wildcards; node labels are concrete.
class QueryGraph {
public:
    void add_node(VertexId u, Label label);
    int add_edge(VertexId src, VertexId dst, Label label);
    int add_edge(VertexId src, VertexId dst, Label label, Timestamp ts);

    size_t node_count() const { return node_labels_.size(); }
    size_t edge_count() const { return edges_.size(); }
    Label node_label(VertexId u) const { return node_labels_[u]; }
    const QueryEdge& edge(int i) const { return edges_[i]; }
    const std::vector<QueryEdge>& edges() const { return edges_; }

    // Text format: `v <id> <label>` lines, then `e <src> <dst> <label|*> [ts]`.
    // Lines starting with '#' are comments.
    static QueryGraph parse(std::istream& in);
    static QueryGraph load(const std::string& path);

private:
    std::vector<Label> node_labels_;
    std::vector<QueryEdge> edges_;
};

struct TreeEdge {
    int qe = -1;          // index into QueryGraph::edges()
    VertexId parent = kNoVertex;
    VertexId child = kNoVertex;
    int depth = 0;        // depth of child node (root = 0)
};

struct LabelNeed {
    Label label;
    uint32_t count;
};

// Degree / label-count requirements for one adjacency direction of a query
// node, used by the f2/f3 filters.
struct SideNeeds {
    uint32_t total = 0;                    // total incident query edges
    std::vector<LabelNeed> edge_labels;    // concrete edge-label minimums
    std::vector<LabelNeed> neighbor_labels; // distinct-neighbor minimums per vertex label
};

struct NodeNeeds {
    SideNeeds out, in;
};

struct MaskRow {
    int start_index = 0;
    // Query edges at canonical indices before the start cannot bind edges of
    // the current batch; this makes every delta embedding come out of exactly
    // one work unit.
    bool blocked(int canonical_index) const { return canonical_index < start_index; }
};

// Immutable per-query plan: spanning tree, canonical edge order, matching
// orders and masks per start edge, and the f2/f3 requirement tables.
class QueryPlan {
public:
    // stats[label] = frequency of that vertex label in the current data graph;
    // missing entries count as zero.
    QueryPlan(QueryGraph query, const std::vector<uint64_t>& stats,
              bool require_timestamps = false);

    const QueryGraph& query() const { return query_; }
    VertexId root() const { return root_; }
    const std::vector<TreeEdge>& tree_edges() const { return tree_edges_; }
    const std::vector<int>& non_tree_edges() const { return non_tree_edges_; }
    size_t node_count() const { return query_.node_count(); }
    size_t edge_count() const { return query_.edge_count(); }
    int tree_edge_count() const { return static_cast<int>(tree_edges_.size()); }

    int canonical_of(int query_edge) const { return canonical_of_edge_[query_edge]; }
    int edge_at_canonical(int canonical) const { return edge_of_canonical_[canonical]; }
    bool is_tree_edge(int query_edge) const { return tree_pos_of_edge_[query_edge] >= 0; }
    // Position in tree_edges() of a query edge, -1 for non-tree edges.
    int tree_pos(int query_edge) const { return tree_pos_of_edge_[query_edge]; }

    VertexId parent(VertexId u) const { return parent_[u]; }
    int parent_edge(VertexId u) const { return parent_qe_[u]; }
    int depth(VertexId u) const { return depth_[u]; }
    int diameter() const { return diameter_; }

    // DEBI bit position for the tree edge whose child is u. The root has no
    // tree edge and thus no bit.
    int bit_of(VertexId u) const;
    // Child node of the tree edge owning the given bit.
    VertexId child_of_bit(int bit) const { return tree_edges_[bit].child; }

    // Tree edges whose parent is u, as positions into tree_edges().
    const std::vector<int>& children_of(VertexId u) const { return children_[u]; }

    const NodeNeeds& needs(VertexId u, bool capped) const {
        return capped ? needs_capped_[u] : needs_full_[u];
    }

    const std::vector<int>& matching_order(int canonical_start) const {
        return orders_[canonical_start];
    }
    MaskRow mask_for(int canonical_start) const { return MaskRow{canonical_start}; }

private:
    QueryGraph query_;
    VertexId root_ = 0;
    std::vector<TreeEdge> tree_edges_;
    std::vector<int> non_tree_edges_;
    std::vector<int> canonical_of_edge_;
    std::vector<int> edge_of_canonical_;
    std::vector<int> tree_pos_of_edge_;
    std::vector<VertexId> parent_;
    std::vector<int> parent_qe_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> children_;
    std::vector<NodeNeeds> needs_full_, needs_capped_;
    std::vector<std::vector<int>> orders_;
    int diameter_ = 0;
};

} // namespace sgm
