#include "sgm/query.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "testutil.hpp"

using namespace sgm;

namespace {

QueryPlan empty_stats_plan(const QueryGraph& q) { return QueryPlan(q, {}); }

} // namespace

TEST(QueryParse, RoundTripWithWildcardsAndTimestamps) {
    std::istringstream in(
        "# header\n"
        "v 0 3\n"
        "v 1 0\n"
        "e 0 1 *\n"
        "e 1 0 7 42\n");
    QueryGraph q = QueryGraph::parse(in);
    EXPECT_EQ(q.node_count(), 2u);
    EXPECT_EQ(q.node_label(0), 3u);
    EXPECT_EQ(q.edge(0).label, kWildcardLabel);
    EXPECT_FALSE(q.edge(0).has_ts);
    EXPECT_EQ(q.edge(1).label, 7u);
    EXPECT_TRUE(q.edge(1).has_ts);
    EXPECT_EQ(q.edge(1).ts, 42u);
}

TEST(QueryParse, RejectsMalformedInput) {
    std::istringstream bad_tag("x 1 2\n");
    EXPECT_THROW(QueryGraph::parse(bad_tag), std::runtime_error);
    std::istringstream undeclared("v 0 0\nv 1 0\ne 0 5 *\n");
    EXPECT_THROW(QueryGraph::parse(undeclared), std::invalid_argument);
    std::istringstream tiny("v 0 0\n");
    EXPECT_THROW(QueryGraph::parse(tiny), std::runtime_error);
}

TEST(QueryPlanFixture, SpanningTreeMatchesWorkedExample) {
    QueryGraph q = test::worked_query();
    QueryPlan plan = empty_stats_plan(q);
    EXPECT_EQ(plan.root(), 0u);
    ASSERT_EQ(plan.tree_edge_count(), 6);
    ASSERT_EQ(plan.non_tree_edges().size(), 1u);
    EXPECT_EQ(plan.non_tree_edges()[0], 6);

    // Canonical order equals file order for this fixture.
    for (int i = 0; i < 7; ++i) {
        EXPECT_EQ(plan.canonical_of(i), i);
        EXPECT_EQ(plan.edge_at_canonical(i), i);
    }

    // Tree shape: node -> (parent, depth, bit).
    struct Row {
        VertexId u, parent;
        int depth, bit;
    };
    for (const Row& r : {Row{1, 0, 1, 0}, Row{2, 0, 1, 1}, Row{5, 0, 1, 2}, Row{3, 1, 2, 3},
                         Row{4, 1, 2, 4}, Row{6, 2, 2, 5}}) {
        EXPECT_EQ(plan.parent(r.u), r.parent) << "node " << r.u;
        EXPECT_EQ(plan.depth(r.u), r.depth) << "node " << r.u;
        EXPECT_EQ(plan.bit_of(r.u), r.bit) << "node " << r.u;
        EXPECT_EQ(plan.child_of_bit(r.bit), r.u);
    }
    EXPECT_THROW(plan.bit_of(0), std::invalid_argument);
    EXPECT_EQ(plan.depth(0), 0);
    EXPECT_EQ(plan.diameter(), 4); // undirected: node 3 to node 6
    EXPECT_EQ(plan.children_of(0), (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(plan.children_of(1), (std::vector<int>{3, 4}));
    EXPECT_EQ(plan.children_of(2), (std::vector<int>{5}));
    EXPECT_TRUE(plan.children_of(6).empty());
}

TEST(QueryPlanFixture, StatsSteerRootChoice) {
    QueryGraph q = test::worked_query();
    // Label 0 made very common: the root moves to the lowest-id node among
    // the best (frequency / degree) alternatives.
    QueryPlan plan(q, {100, 1, 1, 1, 1, 1});
    EXPECT_EQ(plan.root(), 1u);
}

TEST(QueryPlan, EveryMatchingOrderIsPrefixConnected) {
    QueryGraph q = test::worked_query();
    QueryPlan plan = empty_stats_plan(q);
    for (int c = 0; c < 7; ++c) {
        const std::vector<int>& order = plan.matching_order(c);
        ASSERT_EQ(order.size(), 7u);
        EXPECT_EQ(plan.canonical_of(order[0]), c);
        std::set<VertexId> bound;
        std::set<int> seen;
        for (int qi : order) {
            EXPECT_TRUE(seen.insert(qi).second);
            const QueryEdge& e = q.edge(qi);
            if (!bound.empty()) {
                EXPECT_TRUE(bound.count(e.src) || bound.count(e.dst))
                    << "start " << c << " edge " << qi << " is disconnected";
            }
            bound.insert(e.src);
            bound.insert(e.dst);
        }
    }
}

TEST(QueryPlan, MaskBlocksEarlierCanonicalIndices) {
    QueryGraph q = test::worked_query();
    QueryPlan plan = empty_stats_plan(q);
    MaskRow mask = plan.mask_for(3);
    EXPECT_TRUE(mask.blocked(0));
    EXPECT_TRUE(mask.blocked(2));
    EXPECT_FALSE(mask.blocked(3));
    EXPECT_FALSE(mask.blocked(6));
}

TEST(QueryPlan, NeedsCountLabelsAndNeighbors) {
    QueryGraph q = test::worked_query();
    QueryPlan plan = empty_stats_plan(q);

    // Node 2 points at two label-0 nodes and one label-5 node.
    const NodeNeeds& full = plan.needs(2, false);
    EXPECT_EQ(full.out.total, 3u);
    EXPECT_EQ(full.in.total, 0u);
    EXPECT_TRUE(full.out.edge_labels.empty()); // all wildcard
    ASSERT_EQ(full.out.neighbor_labels.size(), 2u);
    EXPECT_EQ(full.out.neighbor_labels[0].label, 0u);
    EXPECT_EQ(full.out.neighbor_labels[0].count, 2u);
    EXPECT_EQ(full.out.neighbor_labels[1].label, 5u);
    EXPECT_EQ(full.out.neighbor_labels[1].count, 1u);

    const NodeNeeds& capped = plan.needs(2, true);
    EXPECT_EQ(capped.out.total, 1u);
    EXPECT_EQ(capped.out.neighbor_labels[0].count, 1u);

    // Concrete edge labels do count.
    QueryGraph q2;
    q2.add_node(0, 0);
    q2.add_node(1, 1);
    q2.add_node(2, 1);
    q2.add_edge(0, 1, 4);
    q2.add_edge(0, 2, 4);
    QueryPlan p2 = empty_stats_plan(q2);
    const NodeNeeds& n0 = p2.needs(0, false);
    ASSERT_EQ(n0.out.edge_labels.size(), 1u);
    EXPECT_EQ(n0.out.edge_labels[0].label, 4u);
    EXPECT_EQ(n0.out.edge_labels[0].count, 2u);
}

TEST(QueryPlan, TimestampRequirementEnforced) {
    QueryGraph q = test::worked_query();
    EXPECT_THROW(QueryPlan(q, {}, true), std::runtime_error);
    QueryGraph qt;
    qt.add_node(0, 0);
    qt.add_node(1, 1);
    qt.add_edge(0, 1, kWildcardLabel, 5);
    EXPECT_NO_THROW(QueryPlan(qt, {}, true));
}

TEST(QueryPlan, RandomPlansKeepStructuralInvariants) {
    test::TrialRig rig(99);
    for (int trial = 0; trial < 40; ++trial) {
        size_t nodes = rig.pick(3, 12);
        QueryGraph q = rig.random_query(nodes, 4, 2, int(rig.pick(0, 3)), false);
        QueryPlan plan(q, {});
        EXPECT_EQ(plan.tree_edge_count() + int(plan.non_tree_edges().size()),
                  int(q.edge_count()));
        EXPECT_EQ(size_t(plan.tree_edge_count()), nodes - 1);
        // Bits are a bijection between tree positions and non-root nodes.
        std::set<int> bits;
        for (VertexId u = 0; u < nodes; ++u) {
            if (u == plan.root()) continue;
            int b = plan.bit_of(u);
            EXPECT_TRUE(bits.insert(b).second);
            EXPECT_EQ(plan.child_of_bit(b), u);
            EXPECT_EQ(plan.depth(u), plan.depth(plan.parent(u)) + 1);
        }
        // Every canonical start yields a connected full-length order.
        for (size_t c = 0; c < q.edge_count(); ++c) {
            const std::vector<int>& order = plan.matching_order(int(c));
            ASSERT_EQ(order.size(), q.edge_count());
            std::set<VertexId> bound;
            for (int qi : order) {
                const QueryEdge& e = q.edge(qi);
                if (!bound.empty()) {
                    ASSERT_TRUE(bound.count(e.src) || bound.count(e.dst));
                }
                bound.insert(e.src);
                bound.insert(e.dst);
            }
        }
    }
}
