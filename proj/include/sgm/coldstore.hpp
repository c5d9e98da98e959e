#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgm/debi.hpp"
#include "sgm/graph.hpp"
#include "sgm/types.hpp"

namespace sgm {

struct SpillConfig {
    std::string directory;
    size_t buffer_bytes = 1u << 20; // pending data flushed to a segment at this size
};

// Cold adjacency of one (vertex, direction): parallel arrays of edge records
// and their index rows, in eviction (oldest-first) order.
struct ColdAdjacency {
    std::vector<EdgeRecord> recs;
    std::vector<uint8_t> rows;
    uint32_t row_bytes = 0;

    const uint8_t* row(size_t i) const { return rows.data() + i * row_bytes; }
    bool row_bit(size_t i, uint32_t bit) const {
        return (row(i)[bit >> 3] >> (bit & 7u)) & 1u;
    }
};

// Disk-backed store for the oldest prefix of edges. Eviction moves an edge's
// record and index row out of RAM into append-only segment files, grouped by
// (vertex, direction) so one vertex's cold adjacency reads contiguously.
// Bits of spilled rows remain writable through a copy-on-write overlay.
// Only insert-only streams spill, so cold edge ids always form a prefix.
class ColdStore {
public:
    ColdStore(SpillConfig cfg, uint32_t row_bytes);

    // Moves every slot in [current base, boundary) out of the graph and the
    // index table. Returns the number of edges evicted.
    size_t evict(DynamicGraph& g, DebiTable& debi, EdgeId boundary);

    // Forces pending entries into a segment file and rewrites the manifest.
    void flush();

    // Cached read path used during matching. The shared_ptr keeps a snapshot
    // alive for the caller even if a concurrent row write drops the cache.
    std::shared_ptr<const ColdAdjacency> fetch(VertexId v, Direction dir) const;

    // Uncached read straight from segment files plus pending entries.
    ColdAdjacency fetch_cold(VertexId v, Direction dir) const;

    bool row_read(EdgeId id, uint32_t bit) const;
    void row_write(EdgeId id, uint32_t bit, bool value);

    // Zeroes every cold row (used when the index is rebuilt from scratch).
    void reset_rows();

    void for_each_edge(const std::function<void(const EdgeRecord&)>& fn) const;

    EdgeId evicted_upto() const { return evicted_upto_; }
    size_t cold_count() const { return cold_count_; }
    uint32_t row_bytes() const { return row_bytes_; }

private:
    struct Key {
        VertexId v;
        uint8_t dir;
        bool operator<(const Key& o) const { return v != o.v ? v < o.v : dir < o.dir; }
        bool operator==(const Key& o) const { return v == o.v && dir == o.dir; }
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            return std::hash<uint64_t>()((uint64_t(k.v) << 1) | k.dir);
        }
    };
    struct Entry {
        EdgeRecord rec;
        std::vector<uint8_t> row;
    };
    struct Chunk {
        int segment;
        uint64_t offset; // file offset of the first record in the group
        uint32_t count;
    };

    void load_manifest();
    void write_manifest() const;
    void flush_unlocked();
    ColdAdjacency fetch_cold_unlocked(VertexId v, Direction dir) const;
    std::vector<uint8_t> stored_row(EdgeId id) const;
    void append_record(std::string& out, const EdgeRecord& rec, const uint8_t* row) const;
    void read_chunk(const Chunk& c, ColdAdjacency& out) const;
    std::string segment_path(int index) const;

    SpillConfig cfg_;
    uint32_t row_bytes_;
    uint32_t record_bytes_;
    EdgeId evicted_upto_ = 0;
    size_t cold_count_ = 0;
    size_t pending_bytes_ = 0;
    int segment_count_ = 0;

    std::map<Key, std::vector<Entry>> pending_;
    std::unordered_map<Key, std::vector<Chunk>, KeyHash> chunks_;
    // Location of each spilled edge's primary copy: segment and record offset,
    // or the pending entry holding it.
    std::unordered_map<EdgeId, std::pair<int, uint64_t>> flushed_loc_;
    std::unordered_map<EdgeId, std::pair<Key, size_t>> pending_loc_;
    std::unordered_map<EdgeId, std::vector<uint8_t>> overlay_;

    mutable std::unordered_map<Key, std::shared_ptr<const ColdAdjacency>, KeyHash> cache_;
    mutable std::mutex mu_;
};

} // namespace sgm
