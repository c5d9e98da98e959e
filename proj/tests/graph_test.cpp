#include "sgm/graph.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "testutil.hpp"

using namespace sgm;

TEST(Graph, AdjacencyAfterInsert) {
    DynamicGraph g = test::f1_graph();
    std::vector<EdgeId> out(g.out_edges(0).begin(), g.out_edges(0).end());
    EXPECT_EQ(out, (std::vector<EdgeId>{0, 2}));
    std::vector<EdgeId> in(g.in_edges(2).begin(), g.in_edges(2).end());
    EXPECT_EQ(in, (std::vector<EdgeId>{1, 2}));
    EXPECT_EQ(g.live_edge_count(), 3u);
}

TEST(Graph, AdjacencyAfterDelete) {
    DynamicGraph g = test::f1_graph();
    g.delete_edge(0);
    std::vector<EdgeId> out(g.out_edges(0).begin(), g.out_edges(0).end());
    EXPECT_EQ(out, (std::vector<EdgeId>{2}));
    EXPECT_FALSE(g.is_live(0));
    EXPECT_EQ(g.live_edge_count(), 2u);
    EXPECT_THROW(g.delete_edge(0), std::invalid_argument);
}

TEST(Graph, RecyclesIdsPerSourceLifo) {
    DynamicGraph g;
    g.add_vertex(0);
    g.add_vertex(0);
    g.add_vertex(0);
    EdgeId a = g.insert_edge(0, 1, 0, 0);
    EdgeId b = g.insert_edge(0, 2, 0, 0);
    EdgeId c = g.insert_edge(1, 2, 0, 0);
    g.delete_edge(a);
    g.delete_edge(b);
    // An insert from a different source must not take 0's freed ids.
    EXPECT_EQ(g.insert_edge(1, 0, 0, 0), c + 1);
    // Same source reuses most recently freed first.
    EXPECT_EQ(g.insert_edge(0, 1, 0, 0), b);
    EXPECT_EQ(g.insert_edge(0, 1, 0, 0), a);
    EXPECT_EQ(g.edge_slot_count(), 4u);
}

TEST(Graph, WorkedExampleReusesIdThree) {
    DynamicGraph g = test::worked_graph();
    g.ensure_vertex(9, 0);
    g.delete_edge(6);
    g.delete_edge(3);
    EXPECT_EQ(g.insert_edge(1, 9, 0, 0), 3u);
}

TEST(Graph, RecyclingCanBeDisabled) {
    DynamicGraph g(false);
    g.add_vertex(0);
    g.add_vertex(0);
    EdgeId a = g.insert_edge(0, 1, 0, 0);
    g.delete_edge(a);
    EXPECT_EQ(g.insert_edge(0, 1, 0, 0), a + 1);
    EXPECT_EQ(g.edge_slot_count(), 2u);
}

TEST(Graph, FindOldestPicksLowestSequence) {
    DynamicGraph g;
    g.add_vertex(0);
    g.add_vertex(0);
    EdgeId first = g.insert_edge(0, 1, 5, 0);
    g.insert_edge(0, 1, 5, 0);
    EXPECT_EQ(g.find_oldest(0, 1, 5), first);
    g.delete_edge(first);
    EdgeId reused = g.insert_edge(0, 1, 5, 0); // same id, fresh sequence
    EXPECT_EQ(reused, first);
    EXPECT_EQ(g.find_oldest(0, 1, 5), first + 1);
    EXPECT_EQ(g.find_oldest(0, 1, 9), kNoEdge);
    EXPECT_EQ(g.find_oldest(1, 0, 5), kNoEdge);
}

TEST(Graph, SpillPrefixKeepsAdjacencyOrderAndLiveness) {
    DynamicGraph g;
    g.add_vertex(0);
    g.add_vertex(0);
    for (int i = 0; i < 6; ++i) g.insert_edge(0, 1, Label(i), 0);
    g.spill_prefix(3);
    EXPECT_EQ(g.hot_base(), 3u);
    EXPECT_EQ(g.edge_slot_count(), 6u);
    EXPECT_EQ(g.live_edge_count(), 3u); // hot side only
    EXPECT_TRUE(g.is_live(0));          // spilled edges stay logically live
    EXPECT_THROW(g.edge(2), std::out_of_range);
    EXPECT_THROW(g.delete_edge(1), std::invalid_argument);
    std::vector<EdgeId> out(g.out_edges(0).begin(), g.out_edges(0).end());
    EXPECT_EQ(out, (std::vector<EdgeId>{3, 4, 5}));
    EXPECT_EQ(g.edge(4).label, 4u);
}

TEST(Graph, SlotsNeverExceedPerSourcePeaks) {
    // Allocated placeholders stay within the sum over sources of each
    // source's historical peak live out-degree.
    std::mt19937_64 rng(17);
    DynamicGraph g;
    const size_t kVerts = 12;
    for (size_t v = 0; v < kVerts; ++v) g.add_vertex(0);
    std::vector<size_t> live_out(kVerts, 0), peak_out(kVerts, 0);
    std::vector<EdgeId> live;
    for (int step = 0; step < 4000; ++step) {
        bool do_delete = !live.empty() && rng() % 10 < 4;
        if (do_delete) {
            size_t i = rng() % live.size();
            EdgeId id = live[i];
            --live_out[g.edge(id).src];
            g.delete_edge(id);
            live[i] = live.back();
            live.pop_back();
        } else {
            VertexId s = VertexId(rng() % kVerts), d = VertexId(rng() % kVerts);
            live.push_back(g.insert_edge(s, d, 0, 0));
            peak_out[s] = std::max(peak_out[s], ++live_out[s]);
        }
        size_t bound = 0;
        for (size_t v = 0; v < kVerts; ++v) bound += peak_out[v];
        ASSERT_LE(g.edge_slot_count(), bound);
    }
}
