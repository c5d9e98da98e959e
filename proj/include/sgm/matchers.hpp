#pragma once

#include <memory>

#include "sgm/graph.hpp"
#include "sgm/query.hpp"
#include "sgm/types.hpp"

namespace sgm {

struct WorkUnit;
class EnumContext;
class EmbeddingSink;

// The user-facing plugin surface: a pure edge test plus the backtracking
// enumerator. The built-in semantics only toggle the injectivity and temporal
// checks; a custom matcher may also override enumerate() wholesale.
class Matcher {
public:
    virtual ~Matcher() = default;

    virtual Semantics semantics() const = 0;

    // True when the data edge can stand in for the given query edge: edge
    // labels equal (wildcard query labels pass) and endpoint vertex labels
    // match pairwise.
    virtual bool edge_match(const EdgeRecord& e, Label data_src_label, Label data_dst_label,
                            const QueryGraph& q, int query_edge) const;

    virtual bool vertex_injective() const { return true; }
    virtual bool edge_injective() const { return true; }
    virtual bool temporal() const { return false; }

    // Default implementation is the shared masked backtracker (enumerate.cpp).
    virtual void enumerate(const WorkUnit& unit, EnumContext& ctx, EmbeddingSink& sink) const;
};

class IsoMatcher : public Matcher {
public:
    Semantics semantics() const override { return Semantics::Iso; }
};

class HomoMatcher : public Matcher {
public:
    Semantics semantics() const override { return Semantics::Homo; }
    bool vertex_injective() const override { return false; }
    bool edge_injective() const override { return false; }
};

class TcIsoMatcher : public Matcher {
public:
    Semantics semantics() const override { return Semantics::TcIso; }
    bool temporal() const override { return true; }
};

// Dual simulation shares the label matcher; candidate sets come from the
// index and the fixpoint sweep lives in dualsim.cpp.
class DualSimMatcher : public Matcher {
public:
    Semantics semantics() const override { return Semantics::DualSim; }
    bool vertex_injective() const override { return false; }
    bool edge_injective() const override { return false; }
};

std::unique_ptr<Matcher> make_matcher(Semantics sem);

// Non-injective semantics get the capped f2/f3 requirement tables.
inline bool capped_filter(Semantics sem) {
    return sem == Semantics::Homo || sem == Semantics::DualSim;
}

} // namespace sgm
