#include "sgm/stream.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <vector>

using namespace sgm;

namespace {

SnapshotStream make(const std::string& text, StreamConfig cfg, std::istringstream& buf) {
    buf.str(text);
    return SnapshotStream(cfg, buf);
}

} // namespace

TEST(SpanParse, CountsAndDurations) {
    EXPECT_EQ(Span::parse("1000").amount, 1000u);
    EXPECT_FALSE(Span::parse("1000").is_duration);
    EXPECT_EQ(Span::parse("24h").amount, 86400u);
    EXPECT_TRUE(Span::parse("24h").is_duration);
    EXPECT_EQ(Span::parse("10m").amount, 600u);
    EXPECT_EQ(Span::parse("30s").amount, 30u);
    EXPECT_THROW(Span::parse(""), std::invalid_argument);
}

TEST(StreamLine, ParsesEveryForm) {
    StreamEvent ev;
    VertexDecl decl;
    bool is_decl = false;

    EXPECT_FALSE(parse_stream_line("", 1, &ev, &decl, &is_decl));
    EXPECT_FALSE(parse_stream_line("# comment", 1, &ev, &decl, &is_decl));

    ASSERT_TRUE(parse_stream_line("v 7 3", 1, &ev, &decl, &is_decl));
    EXPECT_TRUE(is_decl);
    EXPECT_EQ(decl.v, 7u);
    EXPECT_EQ(decl.label, 3u);

    ASSERT_TRUE(parse_stream_line("1 2 5", 1, &ev, &decl, &is_decl));
    EXPECT_FALSE(is_decl);
    EXPECT_EQ(ev.kind, EventKind::Insert);
    EXPECT_EQ(ev.src, 1u);
    EXPECT_EQ(ev.dst, 2u);
    EXPECT_EQ(ev.label, 5u);
    EXPECT_EQ(ev.ts, kNoTimestamp);

    ASSERT_TRUE(parse_stream_line("1 2 5 99", 1, &ev, &decl, &is_decl));
    EXPECT_EQ(ev.ts, 99u);

    ASSERT_TRUE(parse_stream_line("-1 -3 2", 1, &ev, &decl, &is_decl));
    EXPECT_EQ(ev.kind, EventKind::Delete);
    EXPECT_EQ(ev.src, 1u);
    EXPECT_EQ(ev.dst, 3u);

    EXPECT_THROW(parse_stream_line("-1 3 2", 1, &ev, &decl, &is_decl), std::runtime_error);
    EXPECT_THROW(parse_stream_line("1 2", 1, &ev, &decl, &is_decl), std::runtime_error);
    EXPECT_THROW(parse_stream_line("v -1 0", 1, &ev, &decl, &is_decl), std::runtime_error);
}

TEST(StreamConfigValidate, SlidingWindowRules) {
    StreamConfig c;
    c.type = StreamType::SlidingWindow;
    EXPECT_THROW(c.validate(), std::invalid_argument); // missing window/stride
    c.window = Span{100, false};
    c.stride = Span{10, true};
    EXPECT_THROW(c.validate(), std::invalid_argument); // mixed units
    c.stride = Span{200, false};
    EXPECT_THROW(c.validate(), std::invalid_argument); // stride > window
    c.stride = Span{10, false};
    EXPECT_NO_THROW(c.validate());
    c.batch_size = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Snapshots, InsertOnlyBatching) {
    StreamConfig cfg;
    cfg.batch_size = 2;
    std::istringstream buf;
    auto s = make("v 0 1\n1 2 0\n2 3 0\n3 4 0\n", cfg, buf);

    auto a = s.next();
    ASSERT_TRUE(a);
    EXPECT_EQ(a->epoch, 0u);
    ASSERT_EQ(a->vertex_decls.size(), 1u);
    EXPECT_EQ(a->inserts.size(), 2u);
    EXPECT_FALSE(a->initial);
    // Missing timestamps are filled with the event sequence.
    EXPECT_EQ(a->inserts[0].ts, 0u);
    EXPECT_EQ(a->inserts[1].ts, 1u);

    auto b = s.next();
    ASSERT_TRUE(b);
    EXPECT_EQ(b->epoch, 1u);
    EXPECT_EQ(b->inserts.size(), 1u);
    EXPECT_FALSE(s.next());
}

TEST(Snapshots, InsertOnlyRejectsDeletes) {
    StreamConfig cfg;
    std::istringstream buf;
    auto s = make("1 2 0\n-1 -2 0\n", cfg, buf);
    ASSERT_TRUE(s.next());
    EXPECT_THROW(s.next(), std::runtime_error);
}

TEST(Snapshots, InitialLoadComesFirstAndIsFlagged) {
    StreamConfig cfg;
    cfg.type = StreamType::InsertDelete;
    cfg.batch_size = 2;
    cfg.initial_load = 3;
    std::istringstream buf;
    auto s = make("1 2 0\n2 3 0\n3 4 0\n4 5 0\n-1 -2 0\n", cfg, buf);

    auto a = s.next();
    ASSERT_TRUE(a);
    EXPECT_TRUE(a->initial);
    EXPECT_EQ(a->inserts.size(), 3u);

    auto b = s.next();
    ASSERT_TRUE(b);
    EXPECT_FALSE(b->initial);
    EXPECT_EQ(b->inserts.size(), 1u);
    EXPECT_EQ(b->deletes.size(), 1u);
    EXPECT_EQ(b->deletes[0].src, 1u);
    EXPECT_FALSE(s.next());
}

TEST(Snapshots, InitialLoadRejectsDeletions) {
    StreamConfig cfg;
    cfg.type = StreamType::InsertDelete;
    cfg.initial_load = 2;
    std::istringstream buf;
    auto s = make("1 2 0\n-1 -2 0\n", cfg, buf);
    EXPECT_THROW(s.next(), std::runtime_error);
}

TEST(Snapshots, InsertDeleteCountsBothKinds) {
    StreamConfig cfg;
    cfg.type = StreamType::InsertDelete;
    cfg.batch_size = 3;
    std::istringstream buf;
    auto s = make("1 2 0\n-3 -4 0\n5 6 0\n7 8 0\n", cfg, buf);
    auto a = s.next();
    ASSERT_TRUE(a);
    EXPECT_EQ(a->inserts.size(), 2u);
    EXPECT_EQ(a->deletes.size(), 1u);
    auto b = s.next();
    ASSERT_TRUE(b);
    EXPECT_EQ(b->inserts.size(), 1u);
}

TEST(Snapshots, CountWindowExpiresOldestFirst) {
    StreamConfig cfg;
    cfg.type = StreamType::SlidingWindow;
    cfg.window = Span{3, false};
    cfg.stride = Span{2, false};
    std::istringstream buf;
    auto s = make("1 2 0\n2 3 0\n3 4 0\n4 5 0\n5 6 0\n6 7 0\n", cfg, buf);

    auto a = s.next();
    ASSERT_TRUE(a);
    EXPECT_EQ(a->inserts.size(), 2u);
    EXPECT_TRUE(a->deletes.empty());

    auto b = s.next();
    ASSERT_TRUE(b);
    EXPECT_EQ(b->inserts.size(), 2u);
    ASSERT_EQ(b->deletes.size(), 1u);
    EXPECT_EQ(b->deletes[0].src, 1u); // oldest leaves first

    auto c = s.next();
    ASSERT_TRUE(c);
    ASSERT_EQ(c->deletes.size(), 2u);
    EXPECT_EQ(c->deletes[0].src, 2u);
    EXPECT_EQ(c->deletes[1].src, 3u);
    EXPECT_FALSE(s.next());
}

TEST(Snapshots, DurationWindowUsesTimestamps) {
    StreamConfig cfg;
    cfg.type = StreamType::SlidingWindow;
    cfg.window = Span{10, true};
    cfg.stride = Span{5, true};
    std::istringstream buf;
    // Events at t = 0, 4 | 5, 9 | 14: at t = 14 the cutoff is 4, so only the
    // t = 0 edge expires (strictly older than now - window).
    auto s = make("1 2 0 0\n2 3 0 4\n3 4 0 5\n4 5 0 9\n5 6 0 14\n", cfg, buf);

    auto a = s.next();
    ASSERT_TRUE(a);
    EXPECT_EQ(a->inserts.size(), 2u);
    EXPECT_TRUE(a->deletes.empty());

    auto b = s.next();
    ASSERT_TRUE(b);
    EXPECT_EQ(b->inserts.size(), 2u);
    EXPECT_TRUE(b->deletes.empty());

    auto c = s.next();
    ASSERT_TRUE(c);
    EXPECT_EQ(c->inserts.size(), 1u);
    ASSERT_EQ(c->deletes.size(), 1u);
    EXPECT_EQ(c->deletes[0].src, 1u);
    EXPECT_FALSE(s.next());
}

TEST(Snapshots, SlidingWindowRejectsExplicitDeletes) {
    StreamConfig cfg;
    cfg.type = StreamType::SlidingWindow;
    cfg.window = Span{3, false};
    cfg.stride = Span{1, false};
    std::istringstream buf;
    auto s = make("-1 -2 0\n", cfg, buf);
    EXPECT_THROW(s.next(), std::runtime_error);
}
