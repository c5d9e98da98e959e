#pragma once

#include <atomic>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "sgm/types.hpp"

namespace sgm {

// Data-graph edge-centric binary index: one row of |V_Q|-1 bits per edge slot
// (bit b belongs to the tree edge whose child was discovered b-th) plus a
// roots bit per data vertex. Rows are byte-aligned so concurrent writers on
// distinct edges never share a byte; roots words are updated atomically.
class DebiTable {
public:
    explicit DebiTable(uint32_t width_bits)
        : width_bits_(width_bits), row_bytes_((width_bits + 7) / 8) {
        if (width_bits == 0) throw std::invalid_argument("DEBI needs at least one tree edge");
    }
    DebiTable(DebiTable&& o) noexcept
        : width_bits_(o.width_bits_), row_bytes_(o.row_bytes_), base_(o.base_),
          slot_count_(o.slot_count_), vertex_count_(o.vertex_count_), rows_(std::move(o.rows_)),
          roots_(std::move(o.roots_)), counting_(o.counting_), ops_(o.op_count()) {}
    DebiTable(const DebiTable&) = delete;
    DebiTable& operator=(const DebiTable&) = delete;

    // Logical equality of the stored bits (rows, roots, and dimensions).
    bool same_bits(const DebiTable& o) const {
        return width_bits_ == o.width_bits_ && base_ == o.base_ && slot_count_ == o.slot_count_ &&
               vertex_count_ == o.vertex_count_ && rows_ == o.rows_ && roots_ == o.roots_;
    }

    uint32_t width_bits() const { return width_bits_; }
    uint32_t row_bytes() const { return row_bytes_; }

    void ensure_slots(size_t slot_count) {
        if (slot_count > slot_count_) {
            slot_count_ = slot_count;
            rows_.resize((slot_count_ - base_) * row_bytes_, 0);
        }
    }
    void ensure_vertices(size_t vertex_count) {
        if (vertex_count > vertex_count_) {
            vertex_count_ = vertex_count;
            roots_.resize((vertex_count_ + 63) / 64, 0);
        }
    }
    size_t slot_count() const { return slot_count_; }
    size_t vertex_count() const { return vertex_count_; }
    size_t base() const { return base_; }

    bool row_read(EdgeId id, uint32_t bit) const {
        check(id, bit);
        touch(1);
        return rows_[(id - base_) * row_bytes_ + (bit >> 3)] >> (bit & 7) & 1;
    }
    void row_write(EdgeId id, uint32_t bit, bool value) {
        check(id, bit);
        touch(1);
        uint8_t& b = rows_[(id - base_) * row_bytes_ + (bit >> 3)];
        if (value)
            b |= uint8_t(1u << (bit & 7));
        else
            b &= uint8_t(~(1u << (bit & 7)));
    }
    bool row_any(EdgeId id) const {
        check(id, 0);
        const uint8_t* p = &rows_[(id - base_) * row_bytes_];
        for (uint32_t i = 0; i < row_bytes_; ++i)
            if (p[i]) return true;
        return false;
    }
    void clear_row(EdgeId id) {
        check(id, 0);
        touch(row_bytes_);
        std::memset(&rows_[(id - base_) * row_bytes_], 0, row_bytes_);
    }
    const uint8_t* row_data(EdgeId id) const {
        check(id, 0);
        return &rows_[(id - base_) * row_bytes_];
    }
    void set_row_data(EdgeId id, const uint8_t* bytes) {
        check(id, 0);
        std::memcpy(&rows_[(id - base_) * row_bytes_], bytes, row_bytes_);
    }

    bool roots_read(VertexId v) const {
        if (v >= vertex_count_) return false;
        touch(1);
        return roots_[v >> 6] >> (v & 63) & 1;
    }
    void roots_write(VertexId v, bool value) {
        ensure_vertices(size_t(v) + 1);
        touch(1);
        std::atomic_ref<uint64_t> w(roots_[v >> 6]);
        if (value)
            w.fetch_or(uint64_t(1) << (v & 63), std::memory_order_relaxed);
        else
            w.fetch_and(~(uint64_t(1) << (v & 63)), std::memory_order_relaxed);
    }

    void reset_all() {
        std::fill(rows_.begin(), rows_.end(), uint8_t(0));
        std::fill(roots_.begin(), roots_.end(), uint64_t(0));
    }

    // Drop in-memory rows below new_base (they have been spilled).
    void trim_before(size_t new_base) {
        if (new_base <= base_) return;
        if (new_base > slot_count_) throw std::invalid_argument("trim past end");
        rows_.erase(rows_.begin(),
                    rows_.begin() + static_cast<ptrdiff_t>((new_base - base_) * row_bytes_));
        base_ = new_base;
    }

    // Index payload in bits: one (|V_Q|-1)-wide row per edge slot plus one
    // roots bit per vertex, independent of allocation granularity.
    size_t payload_bits() const { return slot_count_ * width_bits_ + vertex_count_; }

    // Memory-touch accounting for the constant-time access check.
    void enable_op_counting(bool on) { counting_ = on; }
    uint64_t op_count() const { return ops_.load(std::memory_order_relaxed); }
    void reset_op_count() { ops_.store(0, std::memory_order_relaxed); }

private:
    void check(EdgeId id, uint32_t bit) const {
        if (id < base_ || id >= slot_count_) throw std::out_of_range("DEBI row not allocated");
        if (bit >= width_bits_) throw std::out_of_range("DEBI bit out of range");
    }
    void touch(uint64_t n) const {
        if (counting_) ops_.fetch_add(n, std::memory_order_relaxed);
    }

    uint32_t width_bits_;
    uint32_t row_bytes_;
    size_t base_ = 0;
    size_t slot_count_ = 0;
    size_t vertex_count_ = 0;
    std::vector<uint8_t> rows_;
    std::vector<uint64_t> roots_;
    bool counting_ = false;
    mutable std::atomic<uint64_t> ops_{0};
};

} // namespace sgm
