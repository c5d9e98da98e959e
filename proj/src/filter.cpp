#include "sgm/filter.hpp"

#include <algorithm>

namespace sgm {

struct Filter::Stage {
    std::vector<std::vector<FrontierEdge>> frontier;
    std::vector<VertexId> verify, gains, opt_roots;
    explicit Stage(int tree_count) : frontier(static_cast<size_t>(tree_count)) {}
};

Filter::Filter(EngineIndex& idx, const Matcher& matcher, ThreadPool* pool)
    : idx_(idx),
      plan_(idx.plan()),
      q_(idx.plan().query()),
      matcher_(matcher),
      pool_(pool),
      capped_(capped_filter(matcher.semantics())),
      nq_(static_cast<uint32_t>(idx.plan().node_count())),
      tree_count_(idx.plan().tree_edge_count()) {
    frontier_stamp_.resize(static_cast<size_t>(tree_count_));
}

bool Filter::edge_matches(const EdgeRecord& rec, int query_edge) const {
    const DynamicGraph& g = idx_.graph();
    return matcher_.edge_match(rec, g.vertex_label(rec.src), g.vertex_label(rec.dst), q_,
                               query_edge);
}

Direction Filter::childside_dir(int t) const {
    const TreeEdge& te = plan_.tree_edges()[t];
    return te.child == q_.edge(te.qe).src ? Direction::Out : Direction::In;
}

Direction Filter::parentside_dir(int t) const {
    return childside_dir(t) == Direction::Out ? Direction::In : Direction::Out;
}

void Filter::split_roles(const EdgeRecord& rec, int t, VertexId& pv, VertexId& cv) const {
    const TreeEdge& te = plan_.tree_edges()[t];
    if (te.child == q_.edge(te.qe).src) {
        cv = rec.src;
        pv = rec.dst;
    } else {
        cv = rec.dst;
        pv = rec.src;
    }
}

void Filter::begin_pass(bool fresh_memo) {
    ++pass_epoch_;
    if (fresh_memo) ++memo_epoch_;
    size_t slots = idx_.graph().edge_slot_count();
    size_t nv = idx_.graph().vertex_count();
    frontier_.assign(static_cast<size_t>(tree_count_), {});
    for (auto& s : frontier_stamp_) s.resize(slots, 0);
    root_frontier_.clear();
    endpoints_.clear();
    optimistic_roots_.clear();
    root_stamp_.resize(nv, 0);
    endpoint_stamp_.resize(nv, 0);
    verify_.assign(static_cast<size_t>(tree_count_), {});
    gains_.assign(nq_, {});
    flags_.assign(nq_, {});
    verify_stamp_.resize(nv * nq_, 0);
    gain_stamp_.resize(nv * nq_, 0);
    flag_stamp_.resize(nv * nq_, 0);
    memo_label_.resize(nv * nq_, 0);
    memo_td_.resize(nv * nq_, 0);
    seeded_ = 0;
}

bool Filter::mark_once(std::vector<uint32_t>& table, size_t index) {
    if (table[index] == pass_epoch_) return false;
    table[index] = pass_epoch_;
    return true;
}

void Filter::push_frontier(int t, const EdgeRecord& rec) {
    if (!mark_once(frontier_stamp_[t], rec.id)) return;
    VertexId pv, cv;
    split_roles(rec, t, pv, cv);
    frontier_[t].push_back(FrontierEdge{rec.id, pv, cv});
}

void Filter::push_root(VertexId v) {
    if (mark_once(root_stamp_, v)) root_frontier_.push_back(v);
}

void Filter::push_endpoint(VertexId v) {
    if (mark_once(endpoint_stamp_, v)) endpoints_.push_back(v);
}

void Filter::flag_vertex(VertexId v, VertexId u) {
    if (mark_once(flag_stamp_, size_t(v) * nq_ + u)) flags_[u].push_back(v);
}

bool Filter::side_ok(VertexId v, Direction dir, const SideNeeds& needs) {
    if (needs.total == 0) return true;
    const DynamicGraph& g = idx_.graph();
    size_t el = needs.edge_labels.size();
    size_t nl = needs.neighbor_labels.size();
    uint32_t total = 0;
    std::vector<uint32_t> ecnt(el, 0);
    std::vector<std::vector<VertexId>> seen(nl);
    size_t unmet = 1 + el + nl;
    idx_.for_adjacent(v, dir, [&](const EdgeRecord& rec, const RowAccess&) {
        if (++total == needs.total) --unmet;
        for (size_t i = 0; i < el; ++i)
            if (needs.edge_labels[i].label == rec.label && ++ecnt[i] == needs.edge_labels[i].count)
                --unmet;
        VertexId w = dir == Direction::Out ? rec.dst : rec.src;
        Label wl = g.vertex_label(w);
        for (size_t i = 0; i < nl; ++i) {
            const LabelNeed& need = needs.neighbor_labels[i];
            if (need.label != wl) continue;
            auto& s = seen[i];
            if (s.size() >= need.count) continue;
            if (std::find(s.begin(), s.end(), w) == s.end()) {
                s.push_back(w);
                if (s.size() == need.count) --unmet;
            }
        }
        return unmet > 0;
    });
    return unmet == 0;
}

void Filter::ensure_memo() {
    size_t need = idx_.graph().vertex_count() * nq_;
    if (memo_label_.size() < need) {
        memo_label_.resize(need, 0);
        memo_td_.resize(need, 0);
    }
    if (memo_epoch_ == 0) memo_epoch_ = 1;
}

bool Filter::label_count_ok(VertexId v, VertexId u) {
    ensure_memo();
    size_t i = size_t(v) * nq_ + u;
    std::atomic_ref<uint64_t> cell(memo_label_[i]);
    uint64_t c = cell.load(std::memory_order_relaxed);
    if ((c >> 1) == memo_epoch_) return c & 1;
    const NodeNeeds& n = plan_.needs(u, capped_);
    bool ok = side_ok(v, Direction::Out, n.out) && side_ok(v, Direction::In, n.in);
    cell.store((memo_epoch_ << 1) | uint64_t(ok), std::memory_order_relaxed);
    return ok;
}

bool Filter::chain_up(VertexId v, VertexId u) {
    int t = plan_.bit_of(u);
    int qe = plan_.tree_edges()[t].qe;
    VertexId up = plan_.parent(u);
    bool found = false;
    idx_.for_adjacent(v, childside_dir(t), [&](const EdgeRecord& rec, const RowAccess&) {
        if (!edge_matches(rec, qe)) return true;
        VertexId pv, cv;
        split_roles(rec, t, pv, cv);
        if (top_down_valid(pv, up)) {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

bool Filter::top_down_valid(VertexId v, VertexId u) {
    ensure_memo();
    size_t i = size_t(v) * nq_ + u;
    std::atomic_ref<uint64_t> cell(memo_td_[i]);
    uint64_t c = cell.load(std::memory_order_relaxed);
    if ((c >> 1) == memo_epoch_) return c & 1;
    bool ok = idx_.graph().vertex_label(v) == q_.node_label(u) && label_count_ok(v, u) &&
              (u == plan_.root() || chain_up(v, u));
    cell.store((memo_epoch_ << 1) | uint64_t(ok), std::memory_order_relaxed);
    return ok;
}

void Filter::seed_frontier(const std::vector<EdgeId>& batch) {
    begin_pass(true);
    for (EdgeId id : batch) {
        const EdgeRecord& rec = idx_.graph().edge(id);
        push_endpoint(rec.src);
        push_endpoint(rec.dst);
        for (int t = 0; t < tree_count_; ++t)
            if (edge_matches(rec, plan_.tree_edges()[t].qe)) push_frontier(t, rec);
    }
    for (const auto& f : frontier_) seeded_ += f.size();
}

void Filter::seed_delete(const std::vector<EdgeId>& batch) {
    begin_pass(true);
    for (EdgeId id : batch) {
        const EdgeRecord& rec = idx_.graph().edge(id);
        push_endpoint(rec.src);
        push_endpoint(rec.dst);
        for (int t = 0; t < tree_count_; ++t)
            if (idx_.bit_read(id, t)) push_frontier(t, rec);
    }
    for (const auto& f : frontier_) seeded_ += f.size();
}

void Filter::process_insert_edge(const FrontierEdge& fe, int t, Stage& stage) {
    traversals_.fetch_add(1, std::memory_order_relaxed);
    if (idx_.bit_read(fe.id, t)) return;
    const TreeEdge& te = plan_.tree_edges()[t];
    if (idx_.child_support(fe.child_v, t) > 0) {
        // A sibling already carries this bit at the child vertex, so the
        // child-side conditions hold; only the upward condition is new here.
        if (top_down_valid(fe.parent_v, te.parent)) {
            idx_.bit_write(fe.id, t, true, fe.parent_v, fe.child_v);
            stage.gains.push_back(fe.parent_v);
        }
        return;
    }
    if (!label_count_ok(fe.child_v, te.child) || !top_down_valid(fe.parent_v, te.parent)) return;
    idx_.bit_write(fe.id, t, true, fe.parent_v, fe.child_v);
    stage.verify.push_back(fe.child_v);
    stage.gains.push_back(fe.parent_v);
    // This edge is a fresh upward witness for its child vertex, so edges
    // below may have become valid.
    for (int tc : plan_.children_of(te.child)) {
        int qe = plan_.tree_edges()[tc].qe;
        idx_.for_adjacent(fe.child_v, parentside_dir(tc),
                          [&](const EdgeRecord& rec, const RowAccess& row) {
                              if (!row.get(tc) && edge_matches(rec, qe))
                                  stage.frontier[tc].push_back(make_frontier(rec, tc));
                              return true;
                          });
    }
}

void Filter::process_root(VertexId w, Stage& stage) {
    traversals_.fetch_add(1, std::memory_order_relaxed);
    if (!top_down_valid(w, plan_.root())) return;
    if (idx_.roots_read(w)) return;
    idx_.roots_write(w, true);
    stage.opt_roots.push_back(w);
    for (int tc : plan_.children_of(plan_.root())) {
        int qe = plan_.tree_edges()[tc].qe;
        idx_.for_adjacent(w, parentside_dir(tc), [&](const EdgeRecord& rec, const RowAccess& row) {
            if (!row.get(tc) && edge_matches(rec, qe))
                stage.frontier[tc].push_back(make_frontier(rec, tc));
            return true;
        });
    }
}

void Filter::merge_stage(Stage& stage, int t) {
    for (int tc = 0; tc < tree_count_; ++tc)
        for (const FrontierEdge& fe : stage.frontier[tc])
            if (mark_once(frontier_stamp_[tc], fe.id)) frontier_[tc].push_back(fe);
    if (t >= 0) {
        VertexId u = plan_.tree_edges()[t].child;
        VertexId up = plan_.tree_edges()[t].parent;
        for (VertexId v : stage.verify)
            if (mark_once(verify_stamp_, size_t(v) * nq_ + u)) verify_[t].push_back(v);
        for (VertexId v : stage.gains)
            if (mark_once(gain_stamp_, size_t(v) * nq_ + up)) gains_[up].push_back(v);
    }
    for (VertexId v : stage.opt_roots)
        if (mark_once(verify_stamp_, size_t(v) * nq_ + plan_.root()))
            optimistic_roots_.push_back(v);
}

void Filter::top_down_insert() {
    // Count flips at batch endpoints can validate edges that carried no bit
    // before this batch; fold those candidates into the frontiers.
    Label root_label = q_.node_label(plan_.root());
    for (VertexId w : endpoints_) {
        for (int t = 0; t < tree_count_; ++t) {
            int qe = plan_.tree_edges()[t].qe;
            idx_.for_adjacent(w, childside_dir(t), [&](const EdgeRecord& rec, const RowAccess& row) {
                if (!row.get(t) && edge_matches(rec, qe)) push_frontier(t, rec);
                return true;
            });
        }
        if (idx_.graph().vertex_label(w) == root_label) push_root(w);
    }
    run_roots();
    for (int t = 0; t < tree_count_; ++t) run_level(t);
}

void Filter::run_roots() {
    if (root_frontier_.empty()) return;
    int workers = pool_ ? pool_->size() : 1;
    if (workers <= 1 || root_frontier_.size() < 4) {
        Stage stage(tree_count_);
        for (VertexId w : root_frontier_) process_root(w, stage);
        merge_stage(stage, -1);
        return;
    }
    std::vector<Stage> stages(static_cast<size_t>(workers), Stage(tree_count_));
    pool_->parallel_for(root_frontier_.size(),
                        [&](size_t i, int w) { process_root(root_frontier_[i], stages[w]); });
    for (auto& stage : stages) merge_stage(stage, -1);
}

void Filter::run_level(int t) {
    const std::vector<FrontierEdge>& entries = frontier_[t];
    if (entries.empty()) return;
    int workers = pool_ ? pool_->size() : 1;
    if (workers <= 1 || entries.size() < 4) {
        Stage stage(tree_count_);
        for (const FrontierEdge& fe : entries) process_insert_edge(fe, t, stage);
        merge_stage(stage, t);
        return;
    }
    std::vector<Stage> stages(static_cast<size_t>(workers), Stage(tree_count_));
    pool_->parallel_for(entries.size(),
                        [&](size_t i, int w) { process_insert_edge(entries[i], t, stages[w]); });
    for (auto& stage : stages) merge_stage(stage, t);
}

void Filter::bottom_up_insert() {
    for (int t = tree_count_ - 1; t >= 0; --t) {
        const TreeEdge& te = plan_.tree_edges()[t];
        // Coverage verification: every vertex that first gained this bit in
        // the current pass must cover all deeper tree edges, or the whole
        // group of optimistic bits at that vertex comes back out.
        for (VertexId v : verify_[t]) {
            traversals_.fetch_add(1, std::memory_order_relaxed);
            if (idx_.children_satisfied(v, te.child)) continue;
            idx_.for_adjacent(v, childside_dir(t), [&](const EdgeRecord& rec, const RowAccess& row) {
                if (row.get(t)) {
                    VertexId pv, cv;
                    split_roles(rec, t, pv, cv);
                    idx_.bit_write(rec.id, t, false, pv, cv);
                }
                return true;
            });
        }
        // Newly enabled sets: vertices whose coverage appeared this pass can
        // validate edges the top-down sweep had to leave unset.
        Stage stage(tree_count_);
        for (VertexId v : gains_[te.child]) {
            traversals_.fetch_add(1, std::memory_order_relaxed);
            if (!idx_.children_satisfied(v, te.child)) continue;
            if (!label_count_ok(v, te.child)) continue;
            idx_.for_adjacent(v, childside_dir(t), [&](const EdgeRecord& rec, const RowAccess& row) {
                if (row.get(t) || !edge_matches(rec, te.qe)) return true;
                VertexId pv, cv;
                split_roles(rec, t, pv, cv);
                if (top_down_valid(pv, te.parent)) {
                    idx_.bit_write(rec.id, t, true, pv, cv);
                    stage.gains.push_back(pv);
                }
                return true;
            });
        }
        merge_stage(stage, t);
    }
    VertexId root = plan_.root();
    for (VertexId w : optimistic_roots_) {
        traversals_.fetch_add(1, std::memory_order_relaxed);
        if (!idx_.children_satisfied(w, root)) idx_.roots_write(w, false);
    }
    for (VertexId v : gains_[root]) {
        traversals_.fetch_add(1, std::memory_order_relaxed);
        if (!idx_.roots_read(v) && top_down_valid(v, root) && idx_.children_satisfied(v, root))
            idx_.roots_write(v, true);
    }
}

void Filter::clear_and_cascade(const FrontierEdge& fe, int t) {
    traversals_.fetch_add(1, std::memory_order_relaxed);
    if (idx_.bit_read(fe.id, t)) idx_.bit_write(fe.id, t, false, fe.parent_v, fe.child_v);
    const TreeEdge& te = plan_.tree_edges()[t];
    flag_vertex(fe.child_v, te.child);
    // The parent vertex may have lost its last coverage for this tree edge;
    // if so, its own bits one level up are stale and must cascade.
    if (idx_.parent_support(fe.parent_v, t) != 0) return;
    if (te.parent == plan_.root()) {
        if (idx_.roots_read(fe.parent_v)) idx_.roots_write(fe.parent_v, false);
        return;
    }
    int tp = plan_.bit_of(te.parent);
    idx_.for_adjacent(fe.parent_v, childside_dir(tp),
                      [&](const EdgeRecord& rec, const RowAccess& row) {
                          if (row.get(tp)) push_frontier(tp, rec);
                          return true;
                      });
}

void Filter::bottom_up_delete() {
    ++memo_epoch_; // the batch has left the graph since seeding
    for (VertexId w : endpoints_)
        for (VertexId u = 0; u < nq_; ++u) flag_vertex(w, u);
    for (int t = tree_count_ - 1; t >= 0; --t) {
        const TreeEdge& te = plan_.tree_edges()[t];
        // Count filters at deletion endpoints: a failing child vertex loses
        // every bit of this tree edge at once.
        for (VertexId w : endpoints_) {
            if (idx_.child_support(w, t) == 0) continue;
            if (label_count_ok(w, te.child)) continue;
            idx_.for_adjacent(w, childside_dir(t), [&](const EdgeRecord& rec, const RowAccess& row) {
                if (row.get(t)) {
                    VertexId pv, cv;
                    split_roles(rec, t, pv, cv);
                    clear_and_cascade(FrontierEdge{rec.id, pv, cv}, t);
                }
                return true;
            });
        }
        for (size_t i = 0; i < frontier_[t].size(); ++i) {
            FrontierEdge fe = frontier_[t][i];
            clear_and_cascade(fe, t);
        }
    }
    VertexId root = plan_.root();
    for (VertexId w : endpoints_) {
        if (!idx_.roots_read(w)) continue;
        if (idx_.graph().vertex_label(w) != q_.node_label(root) || !label_count_ok(w, root))
            idx_.roots_write(w, false);
    }
}

void Filter::top_down_delete() {
    VertexId root = plan_.root();
    for (int level = -1; level < tree_count_; ++level) {
        VertexId u = level < 0 ? root : plan_.tree_edges()[level].child;
        for (size_t i = 0; i < flags_[u].size(); ++i) {
            VertexId v = flags_[u][i];
            traversals_.fetch_add(1, std::memory_order_relaxed);
            if (top_down_valid(v, u)) continue;
            if (u == root && idx_.roots_read(v)) idx_.roots_write(v, false);
            // The vertex no longer extends upward here: every bit where it
            // is the parent side is stale, and child vertices below need the
            // same re-check whether or not a bit was present.
            for (int tc : plan_.children_of(u)) {
                int qe = plan_.tree_edges()[tc].qe;
                VertexId uc = plan_.tree_edges()[tc].child;
                idx_.for_adjacent(v, parentside_dir(tc),
                                  [&](const EdgeRecord& rec, const RowAccess& row) {
                                      if (!edge_matches(rec, qe)) return true;
                                      VertexId pv, cv;
                                      split_roles(rec, tc, pv, cv);
                                      if (row.get(tc)) idx_.bit_write(rec.id, tc, false, pv, cv);
                                      flag_vertex(cv, uc);
                                      return true;
                                  });
            }
        }
    }
}

void Filter::rebuild() {
    idx_.sync_sizes();
    idx_.debi().reset_all();
    if (idx_.cold()) idx_.cold()->reset_rows();
    idx_.zero_supports();
    begin_pass(true);
    const DynamicGraph& g = idx_.graph();
    auto seed_all = [&](const EdgeRecord& rec) {
        for (int t = 0; t < tree_count_; ++t)
            if (edge_matches(rec, plan_.tree_edges()[t].qe)) push_frontier(t, rec);
    };
    for (EdgeId id : g.live_edges()) seed_all(g.edge(id));
    if (idx_.cold()) idx_.cold()->for_each_edge(seed_all);
    Label root_label = q_.node_label(plan_.root());
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.vertex_label(v) == root_label) push_root(v);
    for (const auto& f : frontier_) seeded_ += f.size();
    // No endpoint augmentation: the seed already covers every live edge.
    endpoints_.clear();
    run_roots();
    for (int t = 0; t < tree_count_; ++t) run_level(t);
    bottom_up_insert();
}

} // namespace sgm
