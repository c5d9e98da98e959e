#include "sgm/oracle.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace sgm {

namespace {

// Connected evaluation order over query-file edge indices, built greedily
// from edge 0. Independent of the engine's BFS-tree planning on purpose.
std::vector<int> connected_order(const QueryGraph& q) {
    size_t m = q.edge_count();
    std::vector<int> order;
    std::vector<bool> used(m, false), bound(q.node_count(), false);
    for (size_t step = 0; step < m; ++step) {
        int pick = -1;
        for (size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            if (order.empty() || bound[q.edge(i).src] || bound[q.edge(i).dst]) {
                pick = static_cast<int>(i);
                break;
            }
        }
        if (pick < 0) { // disconnected query: start a new component
            for (size_t i = 0; i < m; ++i)
                if (!used[i]) {
                    pick = static_cast<int>(i);
                    break;
                }
        }
        used[pick] = true;
        bound[q.edge(pick).src] = bound[q.edge(pick).dst] = true;
        order.push_back(pick);
    }
    return order;
}

struct Search {
    const DynamicGraph& g;
    const QueryGraph& q;
    Semantics sem;
    std::vector<int> order;
    std::vector<VertexId> vmap;
    std::vector<EdgeId> emap;
    EmbeddingSet out;

    bool injective() const { return sem == Semantics::Iso || sem == Semantics::TcIso; }

    bool labels_ok(const EdgeRecord& e, const QueryEdge& qe) const {
        if (qe.label != kWildcardLabel && qe.label != e.label) return false;
        return g.vertex_label(e.src) == q.node_label(qe.src) &&
               g.vertex_label(e.dst) == q.node_label(qe.dst);
    }

    bool accept(const EdgeRecord& e, int qi) {
        const QueryEdge& qe = q.edge(qi);
        if (!labels_ok(e, qe)) return false;
        if (qe.src == qe.dst && e.src != e.dst) return false;
        if (vmap[qe.src] != kNoVertex && vmap[qe.src] != e.src) return false;
        if (vmap[qe.dst] != kNoVertex && vmap[qe.dst] != e.dst) return false;
        if (injective()) {
            for (size_t u = 0; u < vmap.size(); ++u) {
                if (vmap[u] == kNoVertex) continue;
                if (u != qe.src && vmap[qe.src] == kNoVertex && vmap[u] == e.src) return false;
                if (u != qe.dst && vmap[qe.dst] == kNoVertex && vmap[u] == e.dst) return false;
            }
            // self-loop data edge cannot bind two distinct fresh query nodes
            if (qe.src != qe.dst && vmap[qe.src] == kNoVertex && vmap[qe.dst] == kNoVertex &&
                e.src == e.dst)
                return false;
            for (EdgeId prev : emap)
                if (prev == e.id) return false;
        }
        if (sem == Semantics::TcIso) {
            for (size_t j = 0; j < emap.size(); ++j) {
                if (emap[j] == kNoEdge) continue;
                const QueryEdge& other = q.edge(static_cast<int>(j));
                if (!other.has_ts || !qe.has_ts) continue;
                Timestamp ots = g.edge(emap[j]).ts;
                if (other.ts < qe.ts && !(ots < e.ts)) return false;
                if (qe.ts < other.ts && !(e.ts < ots)) return false;
            }
        }
        return true;
    }

    void run(size_t k) {
        if (k == order.size()) {
            out.insert(emap);
            return;
        }
        int qi = order[k];
        const QueryEdge& qe = q.edge(qi);
        auto try_edge = [&](EdgeId id) {
            const EdgeRecord& e = g.edge(id);
            if (!e.live || !accept(e, qi)) return;
            VertexId old_s = vmap[qe.src], old_d = vmap[qe.dst];
            vmap[qe.src] = e.src;
            vmap[qe.dst] = e.dst;
            emap[qi] = id;
            run(k + 1);
            emap[qi] = kNoEdge;
            vmap[qe.src] = old_s;
            vmap[qe.dst] = old_d;
        };
        if (vmap[qe.src] != kNoVertex) {
            for (EdgeId id : g.out_edges(vmap[qe.src])) try_edge(id);
        } else if (vmap[qe.dst] != kNoVertex) {
            for (EdgeId id : g.in_edges(vmap[qe.dst])) try_edge(id);
        } else {
            for (EdgeId id : g.live_edges()) try_edge(id);
        }
    }
};

} // namespace

EmbeddingSet brute_force(const DynamicGraph& g, const QueryGraph& q, Semantics sem,
                         size_t edge_guard) {
    if (g.live_edge_count() > edge_guard)
        throw std::runtime_error("brute-force oracle refused: graph exceeds guard");
    if (sem == Semantics::DualSim)
        throw std::invalid_argument("use brute_force_dualsim for simulation semantics");
    Search s{g, q, sem, connected_order(q),
             std::vector<VertexId>(q.node_count(), kNoVertex),
             std::vector<EdgeId>(q.edge_count(), kNoEdge),
             {}};
    s.run(0);
    return std::move(s.out);
}

std::vector<std::set<VertexId>> brute_force_dualsim(const DynamicGraph& g, const QueryGraph& q,
                                                    size_t edge_guard) {
    if (g.live_edge_count() > edge_guard)
        throw std::runtime_error("brute-force oracle refused: graph exceeds guard");
    size_t n = q.node_count();
    std::vector<std::set<VertexId>> cand(n);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        for (size_t u = 0; u < n; ++u)
            if (g.vertex_label(v) == q.node_label(static_cast<VertexId>(u)))
                cand[u].insert(v);

    auto edge_ok = [&](const EdgeRecord& e, const QueryEdge& qe) {
        return qe.label == kWildcardLabel || qe.label == e.label;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < q.edge_count(); ++i) {
            const QueryEdge& qe = q.edge(static_cast<int>(i));
            for (auto it = cand[qe.src].begin(); it != cand[qe.src].end();) {
                bool witness = false;
                for (EdgeId id : g.out_edges(*it)) {
                    const EdgeRecord& e = g.edge(id);
                    if (edge_ok(e, qe) && cand[qe.dst].count(e.dst)) {
                        witness = true;
                        break;
                    }
                }
                if (!witness) {
                    it = cand[qe.src].erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
            for (auto it = cand[qe.dst].begin(); it != cand[qe.dst].end();) {
                bool witness = false;
                for (EdgeId id : g.in_edges(*it)) {
                    const EdgeRecord& e = g.edge(id);
                    if (edge_ok(e, qe) && cand[qe.src].count(e.src)) {
                        witness = true;
                        break;
                    }
                }
                if (!witness) {
                    it = cand[qe.dst].erase(it);
                    changed = true;
                } else {
                    ++it;
                }
            }
        }
    }
    // a query node with an empty set empties every set
    for (size_t u = 0; u < n; ++u)
        if (cand[u].empty()) return std::vector<std::set<VertexId>>(n);
    return cand;
}

std::pair<EmbeddingSet, EmbeddingSet> delta(const EmbeddingSet& before, const EmbeddingSet& after) {
    EmbeddingSet added, removed;
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                        std::inserter(added, added.end()));
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::inserter(removed, removed.end()));
    return {std::move(added), std::move(removed)};
}

std::vector<VertexId> vertex_map_of(const DynamicGraph& g, const QueryGraph& q, const EdgeMap& em) {
    std::vector<VertexId> vm(q.node_count(), kNoVertex);
    for (size_t i = 0; i < em.size(); ++i) {
        if (em[i] == kNoEdge) continue;
        const EdgeRecord& e = g.edge(em[i]);
        vm[q.edge(static_cast<int>(i)).src] = e.src;
        vm[q.edge(static_cast<int>(i)).dst] = e.dst;
    }
    return vm;
}

} // namespace sgm
