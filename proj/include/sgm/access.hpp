#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "sgm/coldstore.hpp"
#include "sgm/debi.hpp"
#include "sgm/graph.hpp"
#include "sgm/query.hpp"
#include "sgm/types.hpp"

namespace sgm {

class EngineIndex;

// One adjacency entry's index row regardless of storage tier. Hot edges read
// the live table; cold edges read the fetched snapshot.
struct RowAccess {
    const EngineIndex* idx;
    EdgeId id;
    const uint8_t* cold_row;

    bool get(uint32_t bit) const;
};

// Unified view over the hot graph, the index table, and an optional cold
// store. All bit transitions funnel through here so two per-(vertex, bit)
// support counters stay exact:
//   child_support[v][b]  = bit-b edges whose child-side endpoint is v
//   parent_support[v][b] = bit-b edges whose parent-side endpoint is v
// They make sibling checks and child-coverage checks O(1) per query node.
class EngineIndex {
public:
    EngineIndex(DynamicGraph& g, DebiTable& debi, const QueryPlan& plan, ColdStore* cold = nullptr)
        : g_(g), debi_(debi), plan_(plan), cold_(cold), width_(debi.width_bits()) {}

    DynamicGraph& graph() const { return g_; }
    DebiTable& debi() const { return debi_; }
    const QueryPlan& plan() const { return plan_; }
    ColdStore* cold() const { return cold_; }

    // Grows the table and counter storage to the graph's current dimensions.
    void sync_sizes() {
        debi_.ensure_slots(g_.edge_slot_count());
        debi_.ensure_vertices(g_.vertex_count());
        size_t need = g_.vertex_count() * width_;
        if (child_support_.size() < need) {
            child_support_.resize(need, 0);
            parent_support_.resize(need, 0);
        }
        if (mark_stamp_.size() < g_.edge_slot_count())
            mark_stamp_.resize(g_.edge_slot_count(), 0);
    }

    bool bit_read(EdgeId id, uint32_t bit) const {
        if (id >= debi_.base()) return debi_.row_read(id, bit);
        return cold_->row_read(id, bit);
    }

    // parent_v / child_v are the edge's endpoints in the roles of the bit's
    // tree edge; they keep the support counters in step with the transition.
    void bit_write(EdgeId id, uint32_t bit, bool value, VertexId parent_v, VertexId child_v) {
        bool old = bit_read(id, bit);
        if (old == value) return;
        if (id >= debi_.base())
            debi_.row_write(id, bit, value);
        else
            cold_->row_write(id, bit, value);
        int delta = value ? 1 : -1;
        adjust(child_support_, child_v, bit, delta);
        adjust(parent_support_, parent_v, bit, delta);
        if (value)
            bits_set_.fetch_add(1, std::memory_order_relaxed);
        else
            bits_cleared_.fetch_add(1, std::memory_order_relaxed);
    }

    bool roots_read(VertexId v) const { return debi_.roots_read(v); }
    void roots_write(VertexId v, bool value) {
        if (debi_.roots_read(v) == value) return;
        debi_.roots_write(v, value);
        if (value)
            bits_set_.fetch_add(1, std::memory_order_relaxed);
        else
            bits_cleared_.fetch_add(1, std::memory_order_relaxed);
    }

    // Clears a row while the record is still available (deletion path).
    void clear_row_of(const EdgeRecord& rec) {
        for (uint32_t b = 0; b < width_; ++b) {
            if (!debi_.row_read(rec.id, b)) continue;
            VertexId u = plan_.child_of_bit(b);
            const QueryEdge& qe = plan_.query().edge(plan_.tree_edges()[b].qe);
            VertexId cv = (u == qe.src) ? rec.src : rec.dst;
            VertexId pv = (u == qe.src) ? rec.dst : rec.src;
            bit_write(rec.id, b, false, pv, cv);
        }
    }

    uint32_t child_support(VertexId v, uint32_t bit) const {
        return load(child_support_, v, bit);
    }
    uint32_t parent_support(VertexId v, uint32_t bit) const {
        return load(parent_support_, v, bit);
    }
    // True when every child tree edge of u has at least one supporting bit
    // at v on the parent side (the downward-coverage test).
    bool children_satisfied(VertexId v, VertexId u) const {
        for (int t : plan_.children_of(u))
            if (load(parent_support_, v, uint32_t(t)) == 0) return false;
        return true;
    }

    void zero_supports() {
        std::fill(child_support_.begin(), child_support_.end(), 0);
        std::fill(parent_support_.begin(), parent_support_.end(), 0);
    }

    void set_marks(const std::vector<EdgeId>& batch) {
        ++mark_epoch_;
        for (EdgeId id : batch) {
            if (id >= mark_stamp_.size()) mark_stamp_.resize(id + 1, 0);
            mark_stamp_[id] = mark_epoch_;
        }
    }
    bool marked(EdgeId id) const {
        return id < mark_stamp_.size() && mark_stamp_[id] == mark_epoch_;
    }

    // Applies f(rec, row) to every adjacent edge, cold tier first (oldest
    // first overall). f returns false to stop; so does for_adjacent.
    template <class F>
    bool for_adjacent(VertexId v, Direction dir, F&& f) const {
        if (cold_) {
            auto snap = cold_->fetch(v, dir);
            for (size_t i = 0; i < snap->recs.size(); ++i)
                if (!f(snap->recs[i], RowAccess{this, snap->recs[i].id, snap->row(i)}))
                    return false;
        }
        for (EdgeId id : g_.adjacency(v, dir))
            if (!f(g_.edge(id), RowAccess{this, id, nullptr})) return false;
        return true;
    }

    uint64_t bits_set() const { return bits_set_.load(std::memory_order_relaxed); }
    uint64_t bits_cleared() const { return bits_cleared_.load(std::memory_order_relaxed); }
    void reset_bit_counters() {
        bits_set_.store(0, std::memory_order_relaxed);
        bits_cleared_.store(0, std::memory_order_relaxed);
    }

private:
    void adjust(std::vector<uint32_t>& table, VertexId v, uint32_t bit, int delta) {
        std::atomic_ref<uint32_t> cell(table[size_t(v) * width_ + bit]);
        cell.fetch_add(uint32_t(delta), std::memory_order_relaxed);
    }
    uint32_t load(const std::vector<uint32_t>& table, VertexId v, uint32_t bit) const {
        size_t i = size_t(v) * width_ + bit;
        if (i >= table.size()) return 0;
        std::atomic_ref<const uint32_t> cell(table[i]);
        return cell.load(std::memory_order_relaxed);
    }

    DynamicGraph& g_;
    DebiTable& debi_;
    const QueryPlan& plan_;
    ColdStore* cold_;
    uint32_t width_;
    std::vector<uint32_t> child_support_;
    std::vector<uint32_t> parent_support_;
    std::vector<uint64_t> mark_stamp_;
    uint64_t mark_epoch_ = 0;
    std::atomic<uint64_t> bits_set_{0};
    std::atomic<uint64_t> bits_cleared_{0};
};

inline bool RowAccess::get(uint32_t bit) const {
    if (cold_row) return (cold_row[bit >> 3] >> (bit & 7u)) & 1u;
    return idx->debi().row_read(id, bit);
}

} // namespace sgm
