#include "sgm/coldstore.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sgm {

namespace {

constexpr uint32_t kSegmentMagic = 0x314d4753; // "SGM1"

template <class T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T take(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
}

} // namespace

ColdStore::ColdStore(SpillConfig cfg, uint32_t row_bytes)
    : cfg_(std::move(cfg)), row_bytes_(row_bytes), record_bytes_(36 + row_bytes) {
    if (cfg_.directory.empty())
        throw std::invalid_argument("spill directory required");
    std::filesystem::create_directories(cfg_.directory);
    if (std::filesystem::exists(cfg_.directory + "/manifest.txt"))
        load_manifest();
}

std::string ColdStore::segment_path(int index) const {
    return cfg_.directory + "/seg" + std::to_string(index) + ".bin";
}

void ColdStore::append_record(std::string& out, const EdgeRecord& rec, const uint8_t* row) const {
    put<uint64_t>(out, rec.id);
    put<uint64_t>(out, rec.src);
    put<uint64_t>(out, rec.dst);
    put<uint32_t>(out, rec.label);
    put<uint64_t>(out, rec.ts);
    out.append(reinterpret_cast<const char*>(row), row_bytes_);
}

size_t ColdStore::evict(DynamicGraph& g, DebiTable& debi, EdgeId boundary) {
    std::lock_guard<std::mutex> lk(mu_);
    EdgeId from = g.hot_base();
    if (boundary <= from) return 0;
    size_t moved = 0;
    for (EdgeId id = from; id < boundary; ++id) {
        const EdgeRecord& rec = g.edge(id);
        if (!rec.live)
            throw std::logic_error("evicting a non-live edge slot");
        Entry e;
        e.rec = rec;
        e.row.assign(debi.row_data(id), debi.row_data(id) + row_bytes_);
        Key out_key{rec.src, 0};
        Key in_key{rec.dst, 1};
        auto& out_list = pending_[out_key];
        out_list.push_back(e);
        pending_loc_[id] = {out_key, out_list.size() - 1};
        pending_[in_key].push_back(std::move(e));
        pending_bytes_ += 2 * record_bytes_;
        ++cold_count_;
        ++moved;
    }
    g.spill_prefix(boundary);
    debi.trim_before(boundary);
    evicted_upto_ = boundary;
    cache_.clear();
    if (pending_bytes_ >= cfg_.buffer_bytes) flush_unlocked();
    return moved;
}

void ColdStore::flush() {
    std::lock_guard<std::mutex> lk(mu_);
    flush_unlocked();
}

void ColdStore::flush_unlocked() {
    if (!pending_.empty()) {
        std::string body;
        put<uint32_t>(body, kSegmentMagic);
        put<uint32_t>(body, row_bytes_);
        put<uint32_t>(body, static_cast<uint32_t>(pending_.size()));
        int seg = segment_count_;
        for (const auto& [key, entries] : pending_) {
            put<uint64_t>(body, key.v);
            put<uint8_t>(body, key.dir);
            put<uint32_t>(body, static_cast<uint32_t>(entries.size()));
            uint64_t first = body.size();
            chunks_[key].push_back(Chunk{seg, first, static_cast<uint32_t>(entries.size())});
            for (size_t i = 0; i < entries.size(); ++i) {
                if (key.dir == 0)
                    flushed_loc_[entries[i].rec.id] = {seg, body.size()};
                append_record(body, entries[i].rec, entries[i].row.data());
            }
        }
        std::ofstream f(segment_path(seg), std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write spill segment");
        f.write(body.data(), static_cast<std::streamsize>(body.size()));
        f.close();
        ++segment_count_;
        pending_.clear();
        pending_loc_.clear();
        pending_bytes_ = 0;
    }
    write_manifest();
}

void ColdStore::write_manifest() const {
    std::string tmp = cfg_.directory + "/manifest.tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        f << "rowbytes " << row_bytes_ << "\n";
        f << "evicted " << evicted_upto_ << "\n";
        f << "segments " << segment_count_ << "\n";
    }
    std::filesystem::rename(tmp, cfg_.directory + "/manifest.txt");
    std::string obody;
    for (const auto& [id, row] : overlay_) {
        put<uint64_t>(obody, id);
        obody.append(reinterpret_cast<const char*>(row.data()), row_bytes_);
    }
    std::ofstream of(cfg_.directory + "/overlay.bin", std::ios::binary | std::ios::trunc);
    of.write(obody.data(), static_cast<std::streamsize>(obody.size()));
}

void ColdStore::load_manifest() {
    std::ifstream f(cfg_.directory + "/manifest.txt");
    std::string word;
    uint32_t row_bytes = 0;
    uint64_t evicted = 0;
    int segments = 0;
    while (f >> word) {
        if (word == "rowbytes")
            f >> row_bytes;
        else if (word == "evicted")
            f >> evicted;
        else if (word == "segments")
            f >> segments;
    }
    if (row_bytes != row_bytes_)
        throw std::runtime_error("spill directory row width mismatch");
    evicted_upto_ = static_cast<EdgeId>(evicted);
    segment_count_ = segments;
    for (int seg = 0; seg < segments; ++seg) {
        std::ifstream s(segment_path(seg), std::ios::binary);
        if (!s) throw std::runtime_error("missing spill segment");
        if (take<uint32_t>(s) != kSegmentMagic)
            throw std::runtime_error("bad spill segment header");
        if (take<uint32_t>(s) != row_bytes_)
            throw std::runtime_error("spill segment row width mismatch");
        uint32_t groups = take<uint32_t>(s);
        for (uint32_t gi = 0; gi < groups; ++gi) {
            Key key{static_cast<VertexId>(take<uint64_t>(s)), take<uint8_t>(s)};
            uint32_t count = take<uint32_t>(s);
            uint64_t offset = static_cast<uint64_t>(s.tellg());
            chunks_[key].push_back(Chunk{seg, offset, count});
            for (uint32_t i = 0; i < count; ++i) {
                uint64_t id = take<uint64_t>(s);
                if (key.dir == 0) {
                    flushed_loc_[static_cast<EdgeId>(id)] = {seg, offset + uint64_t(i) * record_bytes_};
                    ++cold_count_;
                }
                s.seekg(record_bytes_ - 8, std::ios::cur);
            }
        }
    }
    std::ifstream ov(cfg_.directory + "/overlay.bin", std::ios::binary);
    if (ov) {
        for (;;) {
            uint64_t id = take<uint64_t>(ov);
            if (!ov) break;
            std::vector<uint8_t> row(row_bytes_);
            ov.read(reinterpret_cast<char*>(row.data()), row_bytes_);
            if (!ov) break;
            overlay_[static_cast<EdgeId>(id)] = std::move(row);
        }
    }
}

void ColdStore::read_chunk(const Chunk& c, ColdAdjacency& out) const {
    std::ifstream s(segment_path(c.segment), std::ios::binary);
    if (!s) throw std::runtime_error("missing spill segment");
    s.seekg(static_cast<std::streamoff>(c.offset));
    std::vector<char> buf(size_t(c.count) * record_bytes_);
    s.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!s) throw std::runtime_error("short spill segment read");
    const char* p = buf.data();
    for (uint32_t i = 0; i < c.count; ++i, p += record_bytes_) {
        EdgeRecord rec;
        uint64_t v64;
        std::memcpy(&v64, p, 8);
        rec.id = static_cast<EdgeId>(v64);
        std::memcpy(&v64, p + 8, 8);
        rec.src = static_cast<VertexId>(v64);
        std::memcpy(&v64, p + 16, 8);
        rec.dst = static_cast<VertexId>(v64);
        std::memcpy(&rec.label, p + 24, 4);
        std::memcpy(&rec.ts, p + 28, 8);
        rec.live = true;
        out.recs.push_back(rec);
        out.rows.insert(out.rows.end(), reinterpret_cast<const uint8_t*>(p + 36),
                        reinterpret_cast<const uint8_t*>(p + 36) + row_bytes_);
    }
}

ColdAdjacency ColdStore::fetch_cold_unlocked(VertexId v, Direction dir) const {
    ColdAdjacency out;
    out.row_bytes = row_bytes_;
    Key key{v, dir == Direction::Out ? uint8_t(0) : uint8_t(1)};
    if (auto it = chunks_.find(key); it != chunks_.end())
        for (const Chunk& c : it->second) read_chunk(c, out);
    if (auto it = pending_.find(key); it != pending_.end()) {
        for (const Entry& e : it->second) {
            out.recs.push_back(e.rec);
            out.rows.insert(out.rows.end(), e.row.begin(), e.row.end());
        }
    }
    for (size_t i = 0; i < out.recs.size(); ++i) {
        auto ov = overlay_.find(out.recs[i].id);
        if (ov != overlay_.end())
            std::memcpy(out.rows.data() + i * row_bytes_, ov->second.data(), row_bytes_);
    }
    return out;
}

ColdAdjacency ColdStore::fetch_cold(VertexId v, Direction dir) const {
    std::lock_guard<std::mutex> lk(mu_);
    return fetch_cold_unlocked(v, dir);
}

std::shared_ptr<const ColdAdjacency> ColdStore::fetch(VertexId v, Direction dir) const {
    std::lock_guard<std::mutex> lk(mu_);
    Key key{v, dir == Direction::Out ? uint8_t(0) : uint8_t(1)};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        auto snap = std::make_shared<ColdAdjacency>(fetch_cold_unlocked(v, dir));
        it = cache_.emplace(key, std::move(snap)).first;
    }
    return it->second;
}

std::vector<uint8_t> ColdStore::stored_row(EdgeId id) const {
    if (auto it = pending_loc_.find(id); it != pending_loc_.end()) {
        const Entry& e = pending_.at(it->second.first)[it->second.second];
        return e.row;
    }
    auto it = flushed_loc_.find(id);
    if (it == flushed_loc_.end())
        throw std::out_of_range("edge is not in the cold store");
    std::ifstream s(segment_path(it->second.first), std::ios::binary);
    s.seekg(static_cast<std::streamoff>(it->second.second + 36));
    std::vector<uint8_t> row(row_bytes_);
    s.read(reinterpret_cast<char*>(row.data()), row_bytes_);
    if (!s) throw std::runtime_error("short spill row read");
    return row;
}

bool ColdStore::row_read(EdgeId id, uint32_t bit) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto ov = overlay_.find(id);
    const uint8_t* row;
    std::vector<uint8_t> tmp;
    if (ov != overlay_.end()) {
        row = ov->second.data();
    } else {
        tmp = stored_row(id);
        row = tmp.data();
    }
    return (row[bit >> 3] >> (bit & 7u)) & 1u;
}

void ColdStore::row_write(EdgeId id, uint32_t bit, bool value) {
    std::lock_guard<std::mutex> lk(mu_);
    auto ov = overlay_.find(id);
    if (ov == overlay_.end())
        ov = overlay_.emplace(id, stored_row(id)).first;
    uint8_t& byte = ov->second[bit >> 3];
    if (value)
        byte = static_cast<uint8_t>(byte | (1u << (bit & 7u)));
    else
        byte = static_cast<uint8_t>(byte & ~(1u << (bit & 7u)));
    cache_.clear();
}

void ColdStore::reset_rows() {
    std::lock_guard<std::mutex> lk(mu_);
    std::vector<uint8_t> zero(row_bytes_, 0);
    for (const auto& [id, loc] : flushed_loc_) overlay_[id] = zero;
    for (const auto& [id, loc] : pending_loc_) overlay_[id] = zero;
    cache_.clear();
}

void ColdStore::for_each_edge(const std::function<void(const EdgeRecord&)>& fn) const {
    std::lock_guard<std::mutex> lk(mu_);
    for (const auto& [key, chunk_list] : chunks_) {
        if (key.dir != 0) continue;
        ColdAdjacency tmp;
        tmp.row_bytes = row_bytes_;
        for (const Chunk& c : chunk_list) read_chunk(c, tmp);
        for (const EdgeRecord& rec : tmp.recs) fn(rec);
    }
    for (const auto& [key, entries] : pending_) {
        if (key.dir != 0) continue;
        for (const Entry& e : entries) fn(e.rec);
    }
}

} // namespace sgm
