#include "sgm/engine.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "testutil.hpp"

using namespace sgm;
using namespace sgm::test;

namespace {

EngineOptions opts_for(Semantics sem) {
    EngineOptions o;
    o.semantics = sem;
    return o;
}

QueryGraph path_query() {
    QueryGraph q;
    q.add_node(0, 0);
    q.add_node(1, 0);
    q.add_edge(0, 1, 0);
    return q;
}

} // namespace

TEST(Deletions, NamedDeletesPickOldestLiveInstances) {
    MatchEngine e(path_query(), opts_for(Semantics::Homo));
    Snapshot s0;
    s0.epoch = 0;
    s0.initial = true;
    s0.vertex_decls = {{0, 0}, {1, 0}};
    s0.inserts = {ins(0, 1, 0), ins(0, 1, 0), ins(0, 1, 0)};
    e.apply(s0, nullptr);
    ASSERT_EQ(e.graph().live_edge_count(), 3u);

    // Two identically named deletes must land on the two oldest copies.
    Snapshot s1 = snapshot_of(1, {}, {del(0, 1, 0), del(0, 1, 0)});
    e.apply(s1, nullptr);
    EXPECT_EQ(e.graph().live_edge_count(), 1u);
    EXPECT_FALSE(e.graph().is_live(0));
    EXPECT_FALSE(e.graph().is_live(1));
    EXPECT_TRUE(e.graph().is_live(2));
}

TEST(Deletions, UnknownEdgeIsAnError) {
    MatchEngine e(path_query(), opts_for(Semantics::Homo));
    Snapshot s0 = snapshot_of(0, {ins(0, 1, 0)}, {}, true);
    s0.vertex_decls = {{0, 0}, {1, 0}};
    e.apply(s0, nullptr);

    Snapshot bad = snapshot_of(1, {}, {del(0, 1, 1)});
    EXPECT_THROW(e.apply(bad, nullptr), std::runtime_error);
}

TEST(Deletions, DeletingAnEdgeInsertedInTheSameSnapshotIsAnError) {
    MatchEngine e(path_query(), opts_for(Semantics::Homo));
    Snapshot s0 = snapshot_of(0, {ins(0, 1, 0)}, {}, true);
    s0.vertex_decls = {{0, 0}, {1, 0}};
    e.apply(s0, nullptr);

    // The only (0,1,0) edge older than the batch is consumed by the first
    // delete; the second can only name the batch's own insert.
    Snapshot s1 = snapshot_of(1, {ins(0, 1, 0)}, {del(0, 1, 0), del(0, 1, 0)});
    EXPECT_THROW(e.apply(s1, nullptr), std::runtime_error);
}

TEST(VertexDecls, RelabelingAnAttachedVertexIsAnError) {
    MatchEngine e(path_query(), opts_for(Semantics::Homo));
    Snapshot s0 = snapshot_of(0, {ins(0, 1, 0)}, {}, true);
    s0.vertex_decls = {{0, 0}, {1, 0}};
    e.apply(s0, nullptr);

    Snapshot relabel_attached;
    relabel_attached.epoch = 1;
    relabel_attached.vertex_decls = {{0, 5}};
    EXPECT_THROW(e.apply(relabel_attached, nullptr), std::runtime_error);

    // Isolated vertices may change label freely.
    Snapshot grow;
    grow.epoch = 1;
    grow.vertex_decls = {{7, 1}};
    e.apply(grow, nullptr);
    Snapshot relabel_isolated;
    relabel_isolated.epoch = 2;
    relabel_isolated.vertex_decls = {{7, 2}};
    e.apply(relabel_isolated, nullptr);
    EXPECT_EQ(e.graph().vertex_label(7), 2u);
}

TEST(Engine, InitialSnapshotBuildsIndexSilently) {
    MatchEngine e(worked_query(), opts_for(Semantics::Iso));
    Snapshot t0 = worked_t0();
    t0.vertex_decls = worked_decls();
    SetSink sink;
    e.apply(t0, &sink);
    EXPECT_TRUE(sink.positives.empty());
    EXPECT_TRUE(sink.negatives.empty());
    EXPECT_TRUE(e.debi().roots_read(1));
    EXPECT_TRUE(e.index_matches_reference());
}

TEST(Engine, StatsCallbackSeesBothPhases) {
    MatchEngine e(worked_query(), opts_for(Semantics::Iso));
    std::vector<BatchStats> stats;
    e.set_stats_callback([&](const BatchStats& b) { stats.push_back(b); });

    Snapshot t0 = worked_t0();
    t0.vertex_decls = worked_decls();
    e.apply(t0, nullptr);
    SetSink sink;
    e.apply(worked_t1(), &sink);
    e.apply(worked_t2(), &sink);

    // t0 and t1 are insert-only; t2 adds a deletion phase.
    ASSERT_EQ(stats.size(), 4u);
    EXPECT_EQ(stats[0].epoch, 0u);
    EXPECT_FALSE(stats[0].deletion_phase);
    EXPECT_EQ(stats[0].events, 10u);
    EXPECT_EQ(stats[0].live_edges, 10u);
    EXPECT_EQ(stats[0].embeddings, 0u); // initial load is not enumerated

    EXPECT_EQ(stats[1].epoch, 1u);
    EXPECT_EQ(stats[1].events, 3u);
    EXPECT_EQ(stats[1].embeddings, 2u);
    EXPECT_GT(stats[1].traversals, 0u);
    EXPECT_GT(stats[1].bits_set, 0u);

    EXPECT_EQ(stats[2].epoch, 2u);
    EXPECT_FALSE(stats[2].deletion_phase);
    EXPECT_EQ(stats[2].events, 1u);
    EXPECT_EQ(stats[2].embeddings, 2u);

    EXPECT_EQ(stats[3].epoch, 2u);
    EXPECT_TRUE(stats[3].deletion_phase);
    EXPECT_EQ(stats[3].events, 2u);
    EXPECT_EQ(stats[3].embeddings, 4u);
    EXPECT_GT(stats[3].bits_cleared, 0u);
    EXPECT_EQ(stats[3].live_edges, 12u);
}

TEST(Engine, PeriodicRebuildChangesNothingObservable) {
    TrialRig rig(17);
    auto q = rig.random_query(4, 2, 2, 1, false);
    auto events = rig.random_inserts(80, 12, 2, false);

    auto run = [&](uint32_t reset_every) {
        EngineOptions o = opts_for(Semantics::Iso);
        o.reset_every = reset_every;
        MatchEngine e(q, o);
        SetSink sink;
        Snapshot init;
        init.epoch = 0;
        init.initial = true;
        for (VertexId v = 0; v < 12; ++v) init.vertex_decls.push_back({v, Label(v % 2)});
        e.apply(init, nullptr);
        std::pair<EmbeddingSet, EmbeddingSet> all;
        for (size_t i = 0; i < events.size(); i += 8) {
            Snapshot s = snapshot_of(1 + i / 8, {events.begin() + i, events.begin() + i + 8}, {});
            e.apply(s, &sink);
        }
        EXPECT_TRUE(e.index_matches_reference());
        return std::make_pair(sink.positives, sink.duplicates);
    };

    auto steady = run(0);
    auto churned = run(3);
    EXPECT_EQ(steady.first, churned.first);
    EXPECT_EQ(steady.second, 0u);
    EXPECT_EQ(churned.second, 0u);
}

TEST(Engine, RecyclingLimitsSlotGrowth) {
    auto run = [&](bool recycle) {
        EngineOptions o = opts_for(Semantics::Homo);
        o.recycle_ids = recycle;
        MatchEngine e(path_query(), o);
        Snapshot init;
        init.epoch = 0;
        init.initial = true;
        init.vertex_decls = {{0, 0}, {1, 0}};
        e.apply(init, nullptr);
        SetSink sink;
        for (uint64_t epoch = 1; epoch <= 30; ++epoch) {
            Snapshot s = snapshot_of(epoch, {ins(0, 1, 0)},
                                     epoch > 1 ? std::vector<StreamEvent>{del(0, 1, 0)}
                                               : std::vector<StreamEvent>{});
            e.apply(s, &sink);
        }
        return std::make_pair(e.graph().edge_slot_count(), sink.positives.size());
    };

    auto [slots_recycled, seen_recycled] = run(true);
    auto [slots_plain, seen_plain] = run(false);
    EXPECT_LE(slots_recycled, 2u);
    EXPECT_EQ(slots_plain, 30u);
    // Recycling reuses ids, so distinct edge maps collapse; every insert
    // still produced an embedding in both runs.
    EXPECT_LE(seen_recycled, seen_plain);
    EXPECT_EQ(seen_plain, 30u);
}

TEST(Engine, SpilledRunKeepsOutputAndRefusesReferenceRebuild) {
    TrialRig rig(5);
    auto events = rig.random_inserts(300, 10, 1, false);
    QueryGraph q;
    q.add_node(0, 0);
    q.add_node(1, 0);
    q.add_node(2, 0);
    q.add_edge(0, 1, 0);
    q.add_edge(1, 2, 0);

    auto run = [&](bool spill) {
        EngineOptions o = opts_for(Semantics::Iso);
        std::string dir = ::testing::TempDir() + "engine_spill";
        if (spill) {
            std::filesystem::remove_all(dir);
            o.spill = SpillConfig{dir, 1 << 16};
            o.hot_window = 60;
        }
        MatchEngine e(q, o);
        Snapshot init;
        init.epoch = 0;
        init.initial = true;
        for (VertexId v = 0; v < 10; ++v) init.vertex_decls.push_back({v, 0});
        e.apply(init, nullptr);
        SetSink sink;
        for (size_t i = 0; i < events.size(); i += 20) {
            Snapshot s = snapshot_of(1 + i / 20, {events.begin() + i, events.begin() + i + 20}, {});
            e.apply(s, &sink);
        }
        if (spill) {
            EXPECT_GT(e.cold()->cold_count(), 0u);
            EXPECT_THROW(e.rebuild_reference(), std::logic_error);
        } else {
            EXPECT_TRUE(e.index_matches_reference());
        }
        return sink.positives;
    };

    EXPECT_EQ(run(false), run(true));
}

TEST(Engine, SpillRequiresAWindow) {
    EngineOptions o = opts_for(Semantics::Iso);
    o.spill = SpillConfig{::testing::TempDir() + "engine_nowin", 1 << 16};
    EXPECT_THROW(MatchEngine(path_query(), o), std::invalid_argument);
}
