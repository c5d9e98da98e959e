#include "sgm/matchers.hpp"

#include <stdexcept>

namespace sgm {

bool Matcher::edge_match(const EdgeRecord& e, Label data_src_label, Label data_dst_label,
                         const QueryGraph& q, int query_edge) const {
    const QueryEdge& qe = q.edge(query_edge);
    if (qe.label != kWildcardLabel && qe.label != e.label) return false;
    return q.node_label(qe.src) == data_src_label && q.node_label(qe.dst) == data_dst_label;
}

std::unique_ptr<Matcher> make_matcher(Semantics sem) {
    switch (sem) {
    case Semantics::Iso: return std::make_unique<IsoMatcher>();
    case Semantics::Homo: return std::make_unique<HomoMatcher>();
    case Semantics::TcIso: return std::make_unique<TcIsoMatcher>();
    case Semantics::DualSim: return std::make_unique<DualSimMatcher>();
    }
    throw std::invalid_argument("unknown semantics");
}

} // namespace sgm
