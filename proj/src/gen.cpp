#include "sgm/gen.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sgm {

GenKind parse_gen_kind(const std::string& name) {
    if (name == "uniform") return GenKind::Uniform;
    if (name == "powerlaw") return GenKind::PowerLaw;
    if (name == "churn") return GenKind::Churn;
    throw std::invalid_argument("unknown generator kind: " + name);
}

void GenConfig::validate() const {
    if (vertices == 0 || edges == 0)
        throw std::invalid_argument("generator needs positive vertex and edge counts");
    if (vertex_labels == 0 || edge_labels == 0)
        throw std::invalid_argument("generator needs positive label counts");
    if (delete_ratio < 0.0 || delete_ratio >= 1.0)
        throw std::invalid_argument("delete ratio must lie in [0, 1)");
}

namespace {

struct GenEdge {
    uint64_t src, dst;
    uint32_t label;
};

void write_insert(const GenConfig& cfg, std::ostream& out, const GenEdge& e, uint64_t tick) {
    out << e.src << ' ' << e.dst << ' ' << e.label;
    if (cfg.timestamps) out << ' ' << tick;
    out << '\n';
}

void write_delete(std::ostream& out, const GenEdge& e) {
    out << '-' << e.src << " -" << e.dst << ' ' << e.label << '\n';
}

} // namespace

void generate_stream(const GenConfig& cfg, std::ostream& out) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<uint32_t> vertex_label(0, cfg.vertex_labels - 1);
    std::uniform_int_distribution<uint32_t> edge_label(0, cfg.edge_labels - 1);
    std::uniform_int_distribution<uint64_t> uniform_v(1, cfg.vertices);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (uint64_t v = 1; v <= cfg.vertices; ++v) out << "v " << v << ' ' << vertex_label(rng) << '\n';

    // Cubing the uniform draw concentrates mass on low ids; the resulting
    // rank-degree curve falls off as rank^(-2/3).
    auto skewed_v = [&]() -> uint64_t {
        double u = unit(rng);
        return std::min<uint64_t>(1 + uint64_t(double(cfg.vertices) * u * u * u), cfg.vertices);
    };

    if (cfg.kind == GenKind::Churn) {
        uint64_t lag = cfg.delete_lag ? cfg.delete_lag : cfg.vertices;
        std::deque<GenEdge> fifo;
        for (uint64_t i = 0; i < cfg.edges; ++i) {
            GenEdge e{1 + (i % cfg.vertices), uniform_v(rng), edge_label(rng)};
            if (i >= lag) {
                write_delete(out, fifo.front());
                fifo.pop_front();
            }
            write_insert(cfg, out, e, i);
            fifo.push_back(e);
        }
        return;
    }

    bool skew = cfg.kind == GenKind::PowerLaw;
    // delete_ratio is a share of all events; one insert always accompanies a
    // possible delete, so the per-insert probability is f / (1 - f).
    double per_insert = cfg.delete_ratio / (1.0 - cfg.delete_ratio);
    uint64_t warmup = cfg.edges / 10;
    std::vector<GenEdge> aged;
    std::deque<std::pair<uint64_t, GenEdge>> fresh; // (insert tick, edge)
    for (uint64_t i = 0; i < cfg.edges; ++i) {
        while (!fresh.empty() && fresh.front().first + cfg.delete_lag <= i) {
            aged.push_back(fresh.front().second);
            fresh.pop_front();
        }
        if (i > warmup && !aged.empty() && unit(rng) < per_insert) {
            size_t pick = size_t(rng() % aged.size());
            write_delete(out, aged[pick]);
            aged[pick] = aged.back();
            aged.pop_back();
        }
        GenEdge e{skew ? skewed_v() : uniform_v(rng), skew ? skewed_v() : uniform_v(rng),
                  edge_label(rng)};
        write_insert(cfg, out, e, i);
        fresh.emplace_back(i, e);
    }
}

} // namespace sgm
