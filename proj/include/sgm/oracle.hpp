#pragma once

#include <set>
#include <utility>
#include <vector>

#include "sgm/graph.hpp"
#include "sgm/matchers.hpp"
#include "sgm/query.hpp"

namespace sgm {

// Canonical embedding form: data edge id per query edge, in query-file order.
using EdgeMap = std::vector<EdgeId>;
using EmbeddingSet = std::set<EdgeMap>;

// Exhaustive from-scratch matcher over the current graph. Shares only the
// edge-label test with the engine: no index, no filtering, no masking. Used
// as ground truth; refuses graphs above the guard.
EmbeddingSet brute_force(const DynamicGraph& g, const QueryGraph& q, Semantics sem,
                         size_t edge_guard = 100000);

// Greatest dual-simulation relation computed from plain label candidates.
std::vector<std::set<VertexId>> brute_force_dualsim(const DynamicGraph& g, const QueryGraph& q,
                                                    size_t edge_guard = 100000);

// (added, removed)
std::pair<EmbeddingSet, EmbeddingSet> delta(const EmbeddingSet& before, const EmbeddingSet& after);

// Vertex assignment induced by an edge map.
std::vector<VertexId> vertex_map_of(const DynamicGraph& g, const QueryGraph& q, const EdgeMap& em);

} // namespace sgm
