#pragma once

#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgm/types.hpp"

namespace sgm {

enum class StreamType { InsertOnly, InsertDelete, SlidingWindow };

enum class EventKind { Insert, Delete };

struct StreamEvent {
    VertexId src = 0;
    VertexId dst = 0;
    Label label = 0;
    Timestamp ts = 0;
    EventKind kind = EventKind::Insert;
};

struct VertexDecl {
    VertexId v;
    Label label;
};

// A count ("1000") or a time duration ("24h", "10m", "30s"); durations are in
// the same unit as event timestamps, with h/m/s multipliers of 3600/60/1.
struct Span {
    uint64_t amount = 0;
    bool is_duration = false;

    static Span parse(const std::string& text);
};

struct StreamConfig {
    StreamType type = StreamType::InsertOnly;
    Span window;
    Span stride;
    size_t batch_size = 1;
    size_t initial_load = 0;

    void validate() const;
};

struct Snapshot {
    uint64_t epoch = 0;
    std::vector<VertexDecl> vertex_decls;
    std::vector<StreamEvent> inserts;
    std::vector<StreamEvent> deletes;
    bool initial = false; // initial bulk load: embeddings are not reported
};

// One whitespace-separated event: src dst label [ts]. Both endpoints negative
// means deletion of the oldest live (src,dst,label) edge. Returns false for
// blank/comment lines; vertex registration lines fill *decl instead.
bool parse_stream_line(const std::string& line, int lineno, StreamEvent* ev, VertexDecl* decl,
                       bool* is_decl);

// Splits a stream file into snapshots per the configured stream type. Events
// without timestamps get their global sequence number as event time.
class SnapshotStream {
public:
    SnapshotStream(StreamConfig config, std::istream& in);

    std::optional<Snapshot> next();

private:
    struct Item {
        bool is_decl;
        VertexDecl decl;
        StreamEvent ev;
    };
    std::optional<Item> read_item();
    void expire_into(Snapshot& snap);

    StreamConfig config_;
    std::istream& in_;
    int lineno_ = 0;
    uint64_t edge_seq_ = 0;
    uint64_t epoch_ = 0;
    bool initial_done_ = false;
    std::optional<Item> pending_;
    // live edges in insertion order, for sliding-window expiry
    std::deque<StreamEvent> window_live_;
};

} // namespace sgm
