#include "sgm/enumerate.hpp"

#include <chrono>
#include <memory>
#include <stdexcept>

namespace sgm {

void Matcher::enumerate(const WorkUnit& unit, EnumContext& ctx, EmbeddingSink& sink) const {
    ctx.run(unit, sink);
}

EnumContext::EnumContext(const EngineIndex& idx, const Matcher& matcher)
    : idx_(idx), plan_(idx.plan()), q_(idx.plan().query()), matcher_(matcher) {
    emap_.assign(q_.edge_count(), kNoEdge);
    vmap_.assign(q_.node_count(), kNoVertex);
    ets_.assign(q_.edge_count(), 0);
    nte_at_.assign(q_.node_count(), {});
    for (int j : plan_.non_tree_edges()) {
        const QueryEdge& qe = q_.edge(j);
        nte_at_[qe.src].push_back(j);
        if (qe.dst != qe.src) nte_at_[qe.dst].push_back(j);
    }
}

bool EnumContext::bind(int qi, const EdgeRecord& rec) {
    const QueryEdge& qe = q_.edge(qi);
    if (idx_.marked(rec.id) && mask_.blocked(plan_.canonical_of(qi))) return false;
    const DynamicGraph& g = idx_.graph();
    if (!matcher_.edge_match(rec, g.vertex_label(rec.src), g.vertex_label(rec.dst), q_, qi))
        return false;
    if (qe.src == qe.dst && rec.src != rec.dst) return false;
    if (vmap_[qe.src] != kNoVertex && vmap_[qe.src] != rec.src) return false;
    if (vmap_[qe.dst] != kNoVertex && vmap_[qe.dst] != rec.dst) return false;
    if (matcher_.edge_injective())
        for (EdgeId e : emap_)
            if (e == rec.id) return false;
    if (matcher_.temporal() && qe.has_ts) {
        for (size_t qj = 0; qj < emap_.size(); ++qj) {
            if (emap_[qj] == kNoEdge) continue;
            const QueryEdge& other = q_.edge(static_cast<int>(qj));
            if (!other.has_ts) continue;
            if (other.ts < qe.ts && ets_[qj] >= rec.ts) return false;
            if (other.ts > qe.ts && ets_[qj] <= rec.ts) return false;
        }
    }
    auto vertex_ok = [&](VertexId u, VertexId v) {
        if (u == plan_.root() && !idx_.roots_read(v)) return false;
        if (matcher_.vertex_injective())
            for (VertexId w : vmap_)
                if (w == v) return false;
        return true;
    };
    Binding b{qi, false, false};
    if (vmap_[qe.src] == kNoVertex) {
        if (!vertex_ok(qe.src, rec.src)) return false;
        vmap_[qe.src] = rec.src;
        b.bound_src = true;
    }
    if (vmap_[qe.dst] == kNoVertex) {
        if (!vertex_ok(qe.dst, rec.dst)) {
            if (b.bound_src) vmap_[qe.src] = kNoVertex;
            return false;
        }
        vmap_[qe.dst] = rec.dst;
        b.bound_dst = true;
    }
    emap_[qi] = rec.id;
    ets_[qi] = rec.ts;
    trail_.push_back(b);
    if ((b.bound_src && !verify_nte(qe.src)) ||
        (b.bound_dst && qe.dst != qe.src && !verify_nte(qe.dst))) {
        unbind();
        return false;
    }
    return true;
}

void EnumContext::unbind() {
    Binding b = trail_.back();
    trail_.pop_back();
    const QueryEdge& qe = q_.edge(b.qi);
    emap_[b.qi] = kNoEdge;
    if (b.bound_src) vmap_[qe.src] = kNoVertex;
    if (b.bound_dst) vmap_[qe.dst] = kNoVertex;
}

bool EnumContext::verify_nte(VertexId u_new) {
    const DynamicGraph& g = idx_.graph();
    for (int j : nte_at_[u_new]) {
        if (emap_[j] != kNoEdge) continue;
        const QueryEdge& qe = q_.edge(j);
        VertexId vs = vmap_[qe.src], vd = vmap_[qe.dst];
        if (vs == kNoVertex || vd == kNoVertex) continue;
        bool found = false;
        idx_.for_adjacent(vs, Direction::Out, [&](const EdgeRecord& rec, const RowAccess&) {
            if (rec.dst != vd) return true;
            if (idx_.marked(rec.id) && mask_.blocked(plan_.canonical_of(j))) return true;
            if (!matcher_.edge_match(rec, g.vertex_label(rec.src), g.vertex_label(rec.dst), q_, j))
                return true;
            found = true;
            return false;
        });
        if (!found) return false;
    }
    return true;
}

void EnumContext::step(size_t k, EmbeddingSink& sink) {
    if (k == order_->size()) {
        sink.emit(positive_, emap_, vmap_);
        return;
    }
    int qi = (*order_)[k];
    if (emap_[qi] != kNoEdge) {
        step(k + 1, sink);
        return;
    }
    const QueryEdge& qe = q_.edge(qi);
    int t = plan_.tree_pos(qi);
    VertexId vs = vmap_[qe.src], vd = vmap_[qe.dst];
    auto scan = [&](const EdgeRecord& rec, const RowAccess& row) {
        if (t >= 0 && !row.get(static_cast<uint32_t>(t))) return true;
        if (bind(qi, rec)) {
            step(k + 1, sink);
            unbind();
        }
        return true;
    };
    if (vs != kNoVertex)
        idx_.for_adjacent(vs, Direction::Out, scan);
    else if (vd != kNoVertex)
        idx_.for_adjacent(vd, Direction::In, scan);
    else
        throw std::logic_error("matching order lost connectivity");
}

void EnumContext::run(const WorkUnit& unit, EmbeddingSink& sink) {
    mask_ = plan_.mask_for(unit.start_canonical);
    order_ = &plan_.matching_order(unit.start_canonical);
    size_t depth = trail_.size();
    bool ok = true;
    for (const auto& [qi, rec] : unit.seeds) {
        if (!bind(qi, rec)) {
            ok = false;
            break;
        }
    }
    if (ok) step(0, sink);
    while (trail_.size() > depth) unbind();
}

std::vector<WorkUnit> decompose(const EngineIndex& idx, const Matcher& matcher,
                                const std::vector<EdgeId>& batch) {
    std::vector<WorkUnit> units;
    const QueryPlan& plan = idx.plan();
    const QueryGraph& q = plan.query();
    const DynamicGraph& g = idx.graph();
    int tree_count = plan.tree_edge_count();

    // Matched, unmarked parent tree edge candidates of one endpoint.
    auto side = [&](VertexId u, VertexId v) {
        std::vector<EdgeRecord> out;
        int t = plan.bit_of(u);
        const TreeEdge& te = plan.tree_edges()[t];
        Direction dir = te.child == q.edge(te.qe).src ? Direction::Out : Direction::In;
        idx.for_adjacent(v, dir, [&](const EdgeRecord& cand, const RowAccess& row) {
            if (row.get(static_cast<uint32_t>(t)) && !idx.marked(cand.id)) out.push_back(cand);
            return true;
        });
        return out;
    };

    for (EdgeId id : batch) {
        const EdgeRecord& rec = g.edge(id);
        for (int t = 0; t < tree_count; ++t) {
            if (!idx.bit_read(id, t)) continue;
            int qi = plan.tree_edges()[t].qe;
            WorkUnit u;
            u.start_canonical = plan.canonical_of(qi);
            u.seeds.emplace_back(qi, rec);
            units.push_back(std::move(u));
        }
        for (int j : plan.non_tree_edges()) {
            if (!matcher.edge_match(rec, g.vertex_label(rec.src), g.vertex_label(rec.dst), q, j))
                continue;
            const QueryEdge& qe = q.edge(j);
            if (qe.src == qe.dst && rec.src != rec.dst) continue;
            if (qe.dst == plan.root() && !idx.roots_read(rec.dst)) continue;
            if (qe.src == plan.root() && !idx.roots_read(rec.src)) continue;
            bool want_dst = qe.dst != plan.root();
            bool want_src = qe.src != plan.root() && qe.src != qe.dst;
            std::vector<EdgeRecord> dst_side, src_side;
            if (want_dst) {
                dst_side = side(qe.dst, rec.dst);
                if (dst_side.empty()) continue;
            }
            if (want_src) {
                src_side = side(qe.src, rec.src);
                if (src_side.empty()) continue;
            }
            size_t ny = want_dst ? dst_side.size() : 1;
            size_t nx = want_src ? src_side.size() : 1;
            for (size_t y = 0; y < ny; ++y) {
                for (size_t x = 0; x < nx; ++x) {
                    WorkUnit u;
                    u.start_canonical = plan.canonical_of(j);
                    u.seeds.emplace_back(j, rec);
                    if (want_dst) u.seeds.emplace_back(plan.parent_edge(qe.dst), dst_side[y]);
                    if (want_src) u.seeds.emplace_back(plan.parent_edge(qe.src), src_side[x]);
                    units.push_back(std::move(u));
                }
            }
        }
    }
    return units;
}

namespace {

struct CountingSink final : EmbeddingSink {
    EmbeddingSink& inner;
    uint64_t count = 0;
    explicit CountingSink(EmbeddingSink& s) : inner(s) {}
    void emit(bool positive, const std::vector<EdgeId>& em,
              const std::vector<VertexId>& vm) override {
        inner.emit(positive, em, vm);
        ++count;
    }
};

// Per-unit buffer for the threaded path. Rows are stored flat so buffering an
// embedding never allocates once the vectors have grown.
struct BufferSink final : EmbeddingSink {
    std::vector<uint8_t> signs;
    std::vector<EdgeId> ems;
    std::vector<VertexId> vms;
    size_t em_width = 0, vm_width = 0;

    void emit(bool positive, const std::vector<EdgeId>& em,
              const std::vector<VertexId>& vm) override {
        em_width = em.size();
        vm_width = vm.size();
        signs.push_back(positive ? 1 : 0);
        ems.insert(ems.end(), em.begin(), em.end());
        vms.insert(vms.end(), vm.begin(), vm.end());
    }
    void clear() {
        signs.clear();
        ems.clear();
        vms.clear();
    }
};

} // namespace

EnumStats enumerate_all(const EngineIndex& idx, const Matcher& matcher,
                        const std::vector<WorkUnit>& units, bool positive, EmbeddingSink& sink,
                        ThreadPool* pool) {
    EnumStats st;
    st.units = units.size();
    auto w0 = std::chrono::steady_clock::now();
    int workers = pool ? pool->size() : 1;
    if (workers <= 1 || units.size() < 2) {
        EnumContext ctx(idx, matcher);
        ctx.set_sign(positive);
        CountingSink counting(sink);
        for (const WorkUnit& u : units) matcher.enumerate(u, ctx, counting);
        st.emitted = counting.count;
        st.wall_ns = static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                               std::chrono::steady_clock::now() - w0)
                                               .count());
        st.busy_ns = st.wall_ns;
        return st;
    }
    std::vector<std::unique_ptr<EnumContext>> ctxs;
    ctxs.reserve(static_cast<size_t>(workers));
    for (int i = 0; i < workers; ++i) {
        ctxs.push_back(std::make_unique<EnumContext>(idx, matcher));
        ctxs.back()->set_sign(positive);
    }
    // Units run in chunks: workers fill per-unit buffers, then the calling
    // thread replays them in unit order. The chunk bound caps buffered memory
    // while keeping the per-chunk barrier cost negligible.
    const size_t chunk = std::max<size_t>(static_cast<size_t>(workers) * 8, 256);
    std::vector<BufferSink> buffers(std::min(chunk, units.size()));
    std::vector<EdgeId> em;
    std::vector<VertexId> vm;
    for (size_t base = 0; base < units.size(); base += chunk) {
        size_t n = std::min(chunk, units.size() - base);
        st.busy_ns += pool->parallel_for(n, [&](size_t i, int w) {
            matcher.enumerate(units[base + i], *ctxs[w], buffers[i]);
        });
        for (size_t i = 0; i < n; ++i) {
            BufferSink& b = buffers[i];
            for (size_t r = 0; r < b.signs.size(); ++r) {
                em.assign(b.ems.begin() + static_cast<ptrdiff_t>(r * b.em_width),
                          b.ems.begin() + static_cast<ptrdiff_t>((r + 1) * b.em_width));
                vm.assign(b.vms.begin() + static_cast<ptrdiff_t>(r * b.vm_width),
                          b.vms.begin() + static_cast<ptrdiff_t>((r + 1) * b.vm_width));
                sink.emit(b.signs[r] != 0, em, vm);
                ++st.emitted;
            }
            b.clear();
        }
    }
    st.wall_ns = static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - w0)
            .count());
    return st;
}

} // namespace sgm
