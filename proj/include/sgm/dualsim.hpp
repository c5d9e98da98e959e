#pragma once

#include <vector>

#include "sgm/access.hpp"
#include "sgm/matchers.hpp"

namespace sgm {

// Greatest dual-simulation relation over the current graph, seeded from the
// index candidates. sets[u] holds the data vertices that can play query node
// u; support[qi] holds the data edges witnessing query edge qi between
// surviving sets. Both are sorted ascending. If any set is empty, all are.
struct SimulationRelation {
    std::vector<std::vector<VertexId>> sets;
    std::vector<std::vector<EdgeId>> support;

    bool operator==(const SimulationRelation&) const = default;
};

SimulationRelation dual_simulation(const EngineIndex& idx, const Matcher& matcher);

} // namespace sgm
