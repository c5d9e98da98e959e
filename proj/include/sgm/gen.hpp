#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sgm/types.hpp"

namespace sgm {

enum class GenKind { Uniform, PowerLaw, Churn };

GenKind parse_gen_kind(const std::string& name);

// Synthetic stream generation. Vertex ids are 1-based so the negated-endpoint
// deletion encoding stays unambiguous. The same seed always produces a
// byte-identical file.
//
// uniform:  endpoints drawn uniformly; after a warmup of edges/10 inserts,
//           delete_ratio of all events delete a random live edge.
// powerlaw: like uniform but endpoints are skewed toward low ids, giving a
//           heavy-tailed degree distribution.
// churn:    sources rotate round-robin over the fixed vertex set; each insert
//           past the warmup is paired with a deletion of the edge inserted
//           delete_lag inserts earlier (default: one full rotation), keeping
//           the live count pinned at the lag.
struct GenConfig {
    GenKind kind = GenKind::Uniform;
    uint64_t vertices = 1000;
    uint64_t edges = 10000; // insert events
    uint32_t vertex_labels = 4;
    uint32_t edge_labels = 1;
    double delete_ratio = 0.0; // fraction of events that are deletions
    // Deletions only target edges at least this many insert events old; keep
    // it at or above the batch size the stream will be replayed with, so a
    // snapshot never deletes an edge it also inserts.
    uint64_t delete_lag = 0;
    uint64_t seed = 1;
    bool timestamps = false; // emit explicit event-time stamps on inserts

    void validate() const;
};

void generate_stream(const GenConfig& cfg, std::ostream& out);

} // namespace sgm
