#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planarize/contraction.hpp"
#include "planarize/exhaustive.hpp"
#include "planarize/pipeline.hpp"

namespace planarize {

struct SolveConfig {
    uint64_t seed = 1;
    double sigma = 1.0;
    OracleMode oracle = OracleMode::Exact;
    int exact_limit = 14;
    int retry_budget = 20;
    long long opt_guess_start = 1;
    int exhaustive_budget = 4;       // subset-search depth for the oracle candidate
    int exhaustive_edge_limit = 40;  // only try the oracle below this edge count
};

struct GuessReport {
    long long guess = 0;
    int stage = 0;
    bool ok = false;
    bool nasty = false;
    long long size = -1;
    std::string failure;
    std::vector<IterationReport> iterations;
    int stopping_calls = 0;
};

struct SolveResult {
    EdgeSet e_star;
    bool verified = false;
    std::string best_source; // pipeline | stopping | exhaustive | trivial
    long long best_guess = 0;
    int stages = 0;
    std::vector<GuessReport> guesses;
    long long baseline_stopping = -1;
    long long baseline_trivial = -1;
    long long baseline_exhaustive = -1;
    std::vector<std::string> notes;
    Parameters params; // of the final stage, first guess
};

/// End-to-end planarization: OPT-guess doubling over the iteration engine,
/// contraction stages on nasty sets, a stopping-solver baseline and the
/// trivial fallback, plus (in exact mode, desk sizes) the exhaustive-search
/// candidate. The answer is the smallest verified planarizing set found.
inline SolveResult solve(const Graph &g, const SolveConfig &cfg) {
    SolveResult res;
    OracleConfig ocfg;
    ocfg.mode = cfg.oracle;
    ocfg.exact_limit = cfg.exact_limit;
    ocfg.seed = cfg.seed;

    struct Candidate {
        EdgeSet edges;
        std::string source;
        long long guess;
        int order;
    };
    std::vector<Candidate> candidates;
    int order_counter = 0;
    auto add_candidate = [&](EdgeSet edges, const std::string &source, long long guess) {
        if (!is_planar(g.without_edges(edges))) return false;
        candidates.push_back({std::move(edges), source, guess, order_counter++});
        return true;
    };

    if (is_planar(g)) {
        // verification short-circuit: nothing to remove
        res.e_star = {};
        res.verified = true;
        res.best_source = "pipeline";
        res.params = compute_parameters(g.n(), g.d_max(), 1, cfg.sigma, cfg.retry_budget);
        return res;
    }

    Graph h = g;
    GridFamily zs;
    std::optional<ContractedGraph> contracted;
    double root_alpha = 1.0 / (8.0 * std::max(1.0, std::log2(std::max(2, g.n()))));
    long long guess_cap = 2 * std::max(1, g.m());

    for (int stage = 0; stage <= g.n(); ++stage) {
        res.stages = stage;
        bool advanced = false;
        uint64_t guess_idx = 0;
        for (long long guess = std::max<long long>(1, cfg.opt_guess_start); guess <= guess_cap;
             guess *= 2, ++guess_idx) {
            Parameters par =
                compute_parameters(h.n(), h.d_max(), guess, cfg.sigma, cfg.retry_budget);
            if (stage == 0 && guess_idx == 0) res.params = par;
            EngineResult er = run_engine(h, zs, par, ocfg,
                                         Rng::derive(cfg.seed, stage * 131071ULL + guess_idx).raw());
            GuessReport gr;
            gr.guess = guess;
            gr.stage = stage;
            gr.iterations = er.iterations;
            gr.stopping_calls = er.stopping_calls;
            for (auto &n : er.notes) res.notes.push_back(n);
            if (er.nasty) {
                gr.nasty = true;
                res.guesses.push_back(gr);
                try {
                    if (contracted) {
                        auto [s2, nh] = recontract_after_nasty(g, *contracted, *er.nasty,
                                                               par.nasty_coeff, root_alpha, ocfg);
                        contracted = nh;
                    } else {
                        ClusterPartition cp =
                            partition_cluster_set(g, *er.nasty, root_alpha, ocfg);
                        contracted = build_contracted_graph(g, cp);
                    }
                    h = contracted->h;
                    zs = contracted->zs;
                    advanced = true;
                } catch (const Error &e) {
                    res.notes.push_back(std::string("contraction failed: ") + e.what());
                }
                break;
            }
            if (er.ok) {
                EdgeSet root_edges =
                    contracted ? lift_solution(er.removed, *contracted, g) : er.removed;
                gr.ok = add_candidate(root_edges, "pipeline", guess);
                gr.size = static_cast<long long>(root_edges.size());
            } else {
                gr.failure = er.failure;
            }
            res.guesses.push_back(gr);
        }
        if (!advanced) break;
    }

    // stopping-only baseline on the final contracted graph
    try {
        Parameters par = compute_parameters(h.n(), h.d_max(), 1, cfg.sigma, cfg.retry_budget);
        Instance root;
        root.vertices = VertexSet::range(h.n());
        EdgeSet e_h = stopping_solve(h, root, zs, par, ocfg, nullptr);
        EdgeSet root_edges = contracted ? lift_solution(e_h, *contracted, g) : e_h;
        if (add_candidate(root_edges, "stopping", 0))
            res.baseline_stopping = static_cast<long long>(candidates.back().edges.size());
    } catch (const Error &e) {
        res.notes.push_back(std::string("stopping baseline failed: ") + e.what());
    }

    // exhaustive candidate in exact-oracle mode at desk sizes
    if (cfg.oracle == OracleMode::Exact && g.m() <= cfg.exhaustive_edge_limit) {
        auto ex = exhaustive_planarization(g, cfg.exhaustive_budget);
        if (ex && add_candidate(*ex, "exhaustive", 0))
            res.baseline_exhaustive = static_cast<long long>(ex->size());
    }

    // trivial fallback: remove everything
    add_candidate(g.edges(), "trivial", 0);
    res.baseline_trivial = g.m();

    require(!candidates.empty(), "InternalError", "no verified candidate produced");
    const Candidate *best = &candidates.front();
    for (const Candidate &c : candidates)
        if (c.edges.size() < best->edges.size()) best = &c;
    res.e_star = best->edges;
    res.best_source = best->source;
    res.best_guess = best->guess;
    res.verified = is_planar(g.without_edges(res.e_star));
    return res;
}

} // namespace planarize
