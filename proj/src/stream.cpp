#include "sgm/stream.hpp"

#include <sstream>
#include <stdexcept>

namespace sgm {

Span Span::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty span");
    char suffix = text.back();
    uint64_t mult = 0;
    if (suffix == 'h') mult = 3600;
    else if (suffix == 'm') mult = 60;
    else if (suffix == 's') mult = 1;
    if (mult) {
        uint64_t n = std::stoull(text.substr(0, text.size() - 1));
        return Span{n * mult, true};
    }
    return Span{std::stoull(text), false};
}

void StreamConfig::validate() const {
    if (batch_size < 1) throw std::invalid_argument("batch size must be positive");
    if (type == StreamType::SlidingWindow) {
        if (window.amount == 0 || stride.amount == 0)
            throw std::invalid_argument("sliding window needs --window and --stride");
        if (window.is_duration != stride.is_duration)
            throw std::invalid_argument("window and stride must both be counts or both durations");
        if (stride.amount > window.amount)
            throw std::invalid_argument("stride must not exceed window");
    }
}

bool parse_stream_line(const std::string& line, int lineno, StreamEvent* ev, VertexDecl* decl,
                       bool* is_decl) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') return false;
    if (first == "v") {
        long long v, l;
        if (!(ls >> v >> l) || v < 0)
            throw std::runtime_error("stream line " + std::to_string(lineno) + ": bad vertex line");
        *is_decl = true;
        *decl = VertexDecl{static_cast<VertexId>(v), static_cast<Label>(l)};
        return true;
    }
    long long src, dst, label;
    std::istringstream es(line);
    if (!(es >> src >> dst >> label))
        throw std::runtime_error("stream line " + std::to_string(lineno) + ": expected src dst label [ts]");
    *is_decl = false;
    ev->kind = EventKind::Insert;
    if (src < 0 || dst < 0) {
        if (src >= 0 || dst >= 0)
            throw std::runtime_error("stream line " + std::to_string(lineno) +
                                     ": deletion must negate both endpoints");
        ev->kind = EventKind::Delete;
        src = -src;
        dst = -dst;
    }
    ev->src = static_cast<VertexId>(src);
    ev->dst = static_cast<VertexId>(dst);
    ev->label = static_cast<Label>(label);
    long long ts;
    if (es >> ts) {
        if (ts < 0) throw std::runtime_error("stream line " + std::to_string(lineno) + ": negative timestamp");
        ev->ts = static_cast<Timestamp>(ts);
    } else {
        ev->ts = kNoTimestamp; // filled with the event sequence number by the caller
    }
    return true;
}

SnapshotStream::SnapshotStream(StreamConfig config, std::istream& in)
    : config_(std::move(config)), in_(in) {
    config_.validate();
}

std::optional<SnapshotStream::Item> SnapshotStream::read_item() {
    if (pending_) {
        auto item = std::move(*pending_);
        pending_.reset();
        return item;
    }
    std::string line;
    while (std::getline(in_, line)) {
        ++lineno_;
        Item item;
        if (!parse_stream_line(line, lineno_, &item.ev, &item.decl, &item.is_decl)) continue;
        if (!item.is_decl) {
            if (item.ev.ts == kNoTimestamp) item.ev.ts = edge_seq_;
            ++edge_seq_;
        }
        return item;
    }
    return std::nullopt;
}

void SnapshotStream::expire_into(Snapshot& snap) {
    if (window_live_.empty()) return;
    if (config_.window.is_duration) {
        Timestamp now = window_live_.back().ts;
        if (now < config_.window.amount) return;
        Timestamp cutoff = now - config_.window.amount;
        while (!window_live_.empty() && window_live_.front().ts < cutoff) {
            StreamEvent dead = window_live_.front();
            window_live_.pop_front();
            dead.kind = EventKind::Delete;
            snap.deletes.push_back(dead);
        }
    } else {
        while (window_live_.size() > config_.window.amount) {
            StreamEvent dead = window_live_.front();
            window_live_.pop_front();
            dead.kind = EventKind::Delete;
            snap.deletes.push_back(dead);
        }
    }
}

std::optional<Snapshot> SnapshotStream::next() {
    Snapshot snap;
    snap.epoch = epoch_;

    if (!initial_done_) {
        initial_done_ = true;
        if (config_.initial_load > 0) {
            snap.initial = true;
            while (snap.inserts.size() < config_.initial_load) {
                auto item = read_item();
                if (!item) break;
                if (item->is_decl) {
                    snap.vertex_decls.push_back(item->decl);
                    continue;
                }
                if (item->ev.kind == EventKind::Delete)
                    throw std::runtime_error("initial load must contain only insertions");
                snap.inserts.push_back(item->ev);
                if (config_.type == StreamType::SlidingWindow) window_live_.push_back(item->ev);
            }
            if (config_.type == StreamType::SlidingWindow) expire_into(snap);
            if (!snap.inserts.empty() || !snap.vertex_decls.empty()) {
                ++epoch_;
                return snap;
            }
            snap.initial = false;
        }
    }

    switch (config_.type) {
    case StreamType::InsertOnly:
        while (snap.inserts.size() < config_.batch_size) {
            auto item = read_item();
            if (!item) break;
            if (item->is_decl) {
                snap.vertex_decls.push_back(item->decl);
                continue;
            }
            if (item->ev.kind == EventKind::Delete)
                throw std::runtime_error("deletion event in an insert-only stream");
            snap.inserts.push_back(item->ev);
        }
        break;
    case StreamType::InsertDelete: {
        size_t events = 0;
        while (events < config_.batch_size) {
            auto item = read_item();
            if (!item) break;
            if (item->is_decl) {
                snap.vertex_decls.push_back(item->decl);
                continue;
            }
            ++events;
            if (item->ev.kind == EventKind::Delete)
                snap.deletes.push_back(item->ev);
            else
                snap.inserts.push_back(item->ev);
        }
        break;
    }
    case StreamType::SlidingWindow: {
        uint64_t taken = 0;
        Timestamp stride_end = 0;
        bool have_end = false;
        while (true) {
            if (!config_.stride.is_duration && taken >= config_.stride.amount) break;
            auto item = read_item();
            if (!item) break;
            if (item->is_decl) {
                snap.vertex_decls.push_back(item->decl);
                continue;
            }
            if (item->ev.kind == EventKind::Delete)
                throw std::runtime_error("explicit deletion in a sliding-window stream");
            if (config_.stride.is_duration) {
                if (!have_end) {
                    stride_end = item->ev.ts + config_.stride.amount;
                    have_end = true;
                } else if (item->ev.ts >= stride_end) {
                    pending_ = std::move(item); // first event of the next stride
                    break;
                }
            }
            snap.inserts.push_back(item->ev);
            window_live_.push_back(item->ev);
            ++taken;
        }
        expire_into(snap);
        break;
    }
    }

    if (snap.inserts.empty() && snap.deletes.empty() && snap.vertex_decls.empty())
        return std::nullopt;
    ++epoch_;
    return snap;
}

} // namespace sgm
