#include "sgm/dualsim.hpp"

#include <algorithm>

namespace sgm {

SimulationRelation dual_simulation(const EngineIndex& idx, const Matcher& matcher) {
    const QueryPlan& plan = idx.plan();
    const QueryGraph& q = plan.query();
    const DynamicGraph& g = idx.graph();
    size_t nq = q.node_count();
    size_t nv = g.vertex_count();

    std::vector<std::vector<char>> in(nq, std::vector<char>(nv, 0));
    std::vector<size_t> sizes(nq, 0);
    for (VertexId u = 0; u < nq; ++u) {
        for (VertexId v = 0; v < nv; ++v) {
            bool cand = u == plan.root() ? idx.roots_read(v)
                                         : idx.child_support(v, uint32_t(plan.bit_of(u))) > 0;
            if (cand) {
                in[u][v] = 1;
                ++sizes[u];
            }
        }
    }

    auto has_witness = [&](int qi, VertexId v, bool as_src) {
        const QueryEdge& qe = q.edge(qi);
        VertexId need = as_src ? qe.dst : qe.src;
        bool found = false;
        idx.for_adjacent(v, as_src ? Direction::Out : Direction::In,
                         [&](const EdgeRecord& rec, const RowAccess&) {
                             if (!matcher.edge_match(rec, g.vertex_label(rec.src),
                                                     g.vertex_label(rec.dst), q, qi))
                                 return true;
                             VertexId other = as_src ? rec.dst : rec.src;
                             if (in[need][other]) {
                                 found = true;
                                 return false;
                             }
                             return true;
                         });
        return found;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int qi = 0; qi < int(q.edge_count()); ++qi) {
            const QueryEdge& qe = q.edge(qi);
            for (VertexId v = 0; v < nv; ++v) {
                if (in[qe.src][v] && !has_witness(qi, v, true)) {
                    in[qe.src][v] = 0;
                    --sizes[qe.src];
                    changed = true;
                }
                if (in[qe.dst][v] && !has_witness(qi, v, false)) {
                    in[qe.dst][v] = 0;
                    --sizes[qe.dst];
                    changed = true;
                }
            }
        }
    }

    SimulationRelation rel;
    rel.sets.resize(nq);
    rel.support.resize(q.edge_count());
    if (std::any_of(sizes.begin(), sizes.end(), [](size_t s) { return s == 0; })) return rel;
    for (VertexId u = 0; u < nq; ++u)
        for (VertexId v = 0; v < nv; ++v)
            if (in[u][v]) rel.sets[u].push_back(v);
    for (int qi = 0; qi < int(q.edge_count()); ++qi) {
        const QueryEdge& qe = q.edge(qi);
        for (VertexId v : rel.sets[qe.src]) {
            idx.for_adjacent(v, Direction::Out, [&](const EdgeRecord& rec, const RowAccess&) {
                if (in[qe.dst][rec.dst] &&
                    matcher.edge_match(rec, g.vertex_label(rec.src), g.vertex_label(rec.dst), q, qi))
                    rel.support[qi].push_back(rec.id);
                return true;
            });
        }
        std::sort(rel.support[qi].begin(), rel.support[qi].end());
    }
    return rel;
}

} // namespace sgm
