#include "sgm/query.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sgm {

void QueryGraph::add_node(VertexId u, Label label) {
    if (node_labels_.size() <= u) node_labels_.resize(u + 1, Label{0});
    node_labels_[u] = label;
}

int QueryGraph::add_edge(VertexId src, VertexId dst, Label label) {
    if (src >= node_labels_.size() || dst >= node_labels_.size())
        throw std::invalid_argument("query edge references undeclared node");
    edges_.push_back(QueryEdge{src, dst, label, 0, false});
    return static_cast<int>(edges_.size()) - 1;
}

int QueryGraph::add_edge(VertexId src, VertexId dst, Label label, Timestamp ts) {
    int i = add_edge(src, dst, label);
    edges_[i].ts = ts;
    edges_[i].has_ts = true;
    return i;
}

QueryGraph QueryGraph::parse(std::istream& in) {
    QueryGraph q;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            VertexId u;
            Label l;
            if (!(ls >> u >> l))
                throw std::runtime_error("query line " + std::to_string(lineno) + ": bad vertex");
            q.add_node(u, l);
        } else if (tag == "e") {
            VertexId s, d;
            std::string ltok;
            if (!(ls >> s >> d >> ltok))
                throw std::runtime_error("query line " + std::to_string(lineno) + ": bad edge");
            Label l = ltok == "*" ? kWildcardLabel : static_cast<Label>(std::stoul(ltok));
            Timestamp ts;
            if (ls >> ts)
                q.add_edge(s, d, l, ts);
            else
                q.add_edge(s, d, l);
        } else {
            throw std::runtime_error("query line " + std::to_string(lineno) + ": unknown tag " + tag);
        }
    }
    if (q.node_count() < 2) throw std::runtime_error("query needs at least 2 nodes");
    return q;
}

QueryGraph QueryGraph::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open query file " + path);
    return parse(in);
}

namespace {

// Distinct neighbor nodes of u per direction, plus incident edges.
struct NodeAdjacency {
    std::vector<int> out_edges, in_edges;
    std::set<VertexId> out_nbrs, in_nbrs;
    std::set<VertexId> all_nbrs;
};

std::vector<NodeAdjacency> build_adjacency(const QueryGraph& q) {
    std::vector<NodeAdjacency> adj(q.node_count());
    for (size_t i = 0; i < q.edge_count(); ++i) {
        const QueryEdge& e = q.edge(i);
        adj[e.src].out_edges.push_back(static_cast<int>(i));
        adj[e.dst].in_edges.push_back(static_cast<int>(i));
        adj[e.src].out_nbrs.insert(e.dst);
        adj[e.dst].in_nbrs.insert(e.src);
        adj[e.src].all_nbrs.insert(e.dst);
        adj[e.dst].all_nbrs.insert(e.src);
    }
    return adj;
}

SideNeeds side_needs(const QueryGraph& q, const std::vector<int>& edges,
                     const std::set<VertexId>& nbrs, bool capped) {
    SideNeeds n;
    std::map<Label, uint32_t> elabels;
    std::map<Label, uint32_t> nlabels;
    for (int i : edges) {
        ++n.total;
        Label l = q.edge(i).label;
        if (l != kWildcardLabel) ++elabels[l];
    }
    for (VertexId w : nbrs) ++nlabels[q.node_label(w)];
    if (capped) {
        n.total = std::min<uint32_t>(n.total, 1);
        for (auto& [l, c] : elabels) c = 1;
        for (auto& [l, c] : nlabels) c = 1;
    }
    for (auto& [l, c] : elabels) n.edge_labels.push_back({l, c});
    for (auto& [l, c] : nlabels) n.neighbor_labels.push_back({l, c});
    return n;
}

} // namespace

int QueryPlan::bit_of(VertexId u) const {
    if (u == root_) throw std::invalid_argument("root query node has no DEBI bit");
    int b = tree_pos_of_edge_[parent_qe_[u]];
    return b;
}

QueryPlan::QueryPlan(QueryGraph query, const std::vector<uint64_t>& stats,
                     bool require_timestamps)
    : query_(std::move(query)) {
    size_t n = query_.node_count();
    size_t m = query_.edge_count();
    if (m == 0) throw std::runtime_error("query has no edges");
    if (require_timestamps) {
        for (const QueryEdge& e : query_.edges())
            if (!e.has_ts)
                throw std::runtime_error("time-constrained matching needs a timestamp on every query edge");
    }

    auto adj = build_adjacency(query_);
    auto freq = [&](Label l) -> uint64_t { return l < stats.size() ? stats[l] : 0; };

    // Root: the node with the smallest estimated candidate frequency, scaled
    // down by its degree; ties go to the smallest node id.
    root_ = 0;
    double best = -1;
    for (VertexId u = 0; u < n; ++u) {
        size_t deg = adj[u].out_edges.size() + adj[u].in_edges.size();
        double sel = static_cast<double>(freq(query_.node_label(u))) / (1.0 + deg);
        if (best < 0 || sel < best) {
            best = sel;
            root_ = u;
        }
    }

    // BFS spanning tree; parent/child ignores edge direction. Children of a
    // node are visited by (label frequency, node id) for determinism.
    parent_.assign(n, kNoVertex);
    parent_qe_.assign(n, -1);
    depth_.assign(n, -1);
    children_.assign(n, {});
    std::vector<bool> seen(n, false);
    std::deque<VertexId> bfs{root_};
    seen[root_] = true;
    depth_[root_] = 0;
    while (!bfs.empty()) {
        VertexId u = bfs.front();
        bfs.pop_front();
        std::vector<VertexId> nbrs(adj[u].all_nbrs.begin(), adj[u].all_nbrs.end());
        std::sort(nbrs.begin(), nbrs.end(), [&](VertexId a, VertexId b) {
            auto ka = std::make_pair(freq(query_.node_label(a)), a);
            auto kb = std::make_pair(freq(query_.node_label(b)), b);
            return ka < kb;
        });
        for (VertexId w : nbrs) {
            if (seen[w]) continue;
            seen[w] = true;
            // smallest-index query edge connecting u and w becomes the tree link
            int link = -1;
            for (size_t i = 0; i < m && link < 0; ++i) {
                const QueryEdge& e = query_.edge(i);
                if ((e.src == u && e.dst == w) || (e.src == w && e.dst == u))
                    link = static_cast<int>(i);
            }
            parent_[w] = u;
            parent_qe_[w] = link;
            depth_[w] = depth_[u] + 1;
            tree_edges_.push_back(TreeEdge{link, u, w, depth_[w]});
            bfs.push_back(w);
        }
    }
    for (VertexId u = 0; u < n; ++u)
        if (!seen[u]) throw std::runtime_error("query graph is disconnected");

    tree_pos_of_edge_.assign(m, -1);
    for (size_t t = 0; t < tree_edges_.size(); ++t)
        tree_pos_of_edge_[tree_edges_[t].qe] = static_cast<int>(t);
    for (size_t t = 0; t < tree_edges_.size(); ++t)
        children_[tree_edges_[t].parent].push_back(static_cast<int>(t));

    for (size_t i = 0; i < m; ++i)
        if (tree_pos_of_edge_[i] < 0) non_tree_edges_.push_back(static_cast<int>(i));

    canonical_of_edge_.assign(m, -1);
    for (size_t t = 0; t < tree_edges_.size(); ++t) {
        canonical_of_edge_[tree_edges_[t].qe] = static_cast<int>(t);
        edge_of_canonical_.push_back(tree_edges_[t].qe);
    }
    for (int e : non_tree_edges_) {
        canonical_of_edge_[e] = static_cast<int>(edge_of_canonical_.size());
        edge_of_canonical_.push_back(e);
    }

    // f2/f3 requirement tables, full and capped-at-one variants.
    needs_full_.resize(n);
    needs_capped_.resize(n);
    for (VertexId u = 0; u < n; ++u) {
        needs_full_[u].out = side_needs(query_, adj[u].out_edges, adj[u].out_nbrs, false);
        needs_full_[u].in = side_needs(query_, adj[u].in_edges, adj[u].in_nbrs, false);
        needs_capped_[u].out = side_needs(query_, adj[u].out_edges, adj[u].out_nbrs, true);
        needs_capped_[u].in = side_needs(query_, adj[u].in_edges, adj[u].in_nbrs, true);
    }

    // Matching order per canonical start edge: for a tree start, the path to
    // the root comes first, then the remaining tree edges in BFS order, then
    // the non-tree edges. A non-tree start leads with itself, then the parent
    // tree edges of both endpoints, then its source's root path and the rest.
    auto path_to_root = [&](VertexId u) {
        std::vector<int> path;
        for (VertexId x = u; x != root_; x = parent_[x]) path.push_back(parent_qe_[x]);
        return path;
    };
    auto append_unique = [](std::vector<int>& seq, int e) {
        if (std::find(seq.begin(), seq.end(), e) == seq.end()) seq.push_back(e);
    };
    orders_.resize(edge_of_canonical_.size());
    for (size_t c = 0; c < edge_of_canonical_.size(); ++c) {
        int start = edge_of_canonical_[c];
        std::vector<int>& seq = orders_[c];
        seq.push_back(start);
        if (tree_pos_of_edge_[start] >= 0) {
            VertexId child = tree_edges_[tree_pos_of_edge_[start]].child;
            for (int e : path_to_root(child)) append_unique(seq, e);
        } else {
            const QueryEdge& nte = query_.edge(start);
            if (nte.dst != root_) append_unique(seq, parent_qe_[nte.dst]);
            if (nte.src != root_) append_unique(seq, parent_qe_[nte.src]);
            for (int e : path_to_root(nte.src)) append_unique(seq, e);
        }
        for (const TreeEdge& t : tree_edges_) append_unique(seq, t.qe);
        for (int e : non_tree_edges_) append_unique(seq, e);
    }

    // Undirected diameter, for reporting.
    for (VertexId s = 0; s < n; ++s) {
        std::vector<int> dist(n, -1);
        std::deque<VertexId> dq{s};
        dist[s] = 0;
        while (!dq.empty()) {
            VertexId u = dq.front();
            dq.pop_front();
            for (VertexId w : adj[u].all_nbrs)
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    dq.push_back(w);
                }
        }
        diameter_ = std::max(diameter_, *std::max_element(dist.begin(), dist.end()));
    }
}

} // namespace sgm
