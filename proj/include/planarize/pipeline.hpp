#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "planarize/concurrent_flow.hpp"
#include "planarize/conflict.hpp"
#include "planarize/contraction.hpp"
#include "planarize/exhaustive.hpp"
#include "planarize/flows.hpp"
#include "planarize/graph.hpp"
#include "planarize/oracles.hpp"
#include "planarize/planarity.hpp"
#include "planarize/rng.hpp"
#include "planarize/well_linked.hpp"

namespace planarize {

/// All run parameters. sigma = 1 keeps the paper formulas; smaller sigma
/// shrinks the threshold families multiplicatively until the desk-scale
/// floors take over, so every branch of the algorithm is reachable on small
/// graphs. Reports record every resolved value.
struct Parameters {
    int n = 1, d_max = 1;
    long long opt = 1;
    double sigma = 1.0;
    double log2n = 1.0;
    double alpha_star = 0.125;
    double epsilon = 0.25, eps_prime = 0.25 / 3.0;
    double lambda = 0.01;
    long long beta_fcg = 1;
    double rho = 4.0;
    long long case2_threshold = 24; // terminal threshold, also the E'' family
    long long comp_terminal_bound = 6;
    long long m_star = 96;
    long long path_count = 3;
    double nasty_coeff = 2.0;
    double stop_size = 20.0;
    double stopping_balance = 0.1; // balanced-cut target in the stopping solver
    double grid_divisor = 2.0;     // big-grid shortcut |Z| >= n / divisor
    int h_star = 1;
    int retry_budget = 20;

    double nh(int h) const {
        return static_cast<double>(n) * std::pow(1.0 - 1.0 / rho, (h - 1) / 2.0);
    }
    double pair_prob(long long t) const {
        if (t <= 1) return 1.0;
        double p_fail = 1.0 / (2.0 * rho * static_cast<double>(opt));
        double paper = sigma * p_fail * alpha_star /
                       (30.0 * static_cast<double>(opt) * static_cast<double>(beta_fcg) *
                        static_cast<double>(t));
        double floor = 3.0 * std::log2(static_cast<double>(t) + 2.0) / static_cast<double>(t);
        return std::min(1.0, std::max(paper, floor));
    }
};

inline Parameters compute_parameters(int n, int d_max, long long opt, double sigma,
                                     int retry_budget = 20) {
    Parameters p;
    p.n = std::max(1, n);
    p.d_max = std::max(1, d_max);
    p.opt = std::max<long long>(1, opt);
    p.sigma = sigma;
    p.retry_budget = retry_budget;
    double L = std::max(1.0, std::log2(static_cast<double>(p.n)));
    p.log2n = L;
    p.alpha_star = 1.0 / (8.0 * L);
    p.beta_fcg = static_cast<long long>(std::ceil(L));
    p.epsilon = 0.25;
    p.eps_prime = p.epsilon / 3.0;
    double d = p.d_max;
    p.lambda = p.epsilon * p.epsilon / (25.0 * d * d * L);

    // the two lower bounds on rho, evaluated at n' = n where they peak
    double bound1 = 25.0 * std::pow(2.0, 24.0) * std::pow(d, 8.0) * L /
                    (p.lambda * p.lambda * p.alpha_star * p.alpha_star);
    double bound2 = 9.0 * static_cast<double>(p.opt) / p.lambda;
    p.rho = std::max(4.0, sigma * std::max(bound1, bound2));

    double opt2 = static_cast<double>(p.opt) * static_cast<double>(p.opt);
    double budget_formula =
        1e7 * opt2 * p.rho * L * L * d * d * static_cast<double>(p.beta_fcg) / p.alpha_star;
    p.case2_threshold = static_cast<long long>(std::max(24.0, sigma * budget_formula));
    p.comp_terminal_bound = std::max<long long>(6, p.case2_threshold / 4);
    p.m_star = 2 * p.case2_threshold + 24;
    p.path_count = static_cast<long long>(std::max(3.0, sigma * 24.0 * opt2 * p.rho));
    p.nasty_coeff =
        std::max(2.0, sigma * std::pow(2.0, 16.0) * std::pow(d, 6.0) /
                          (p.alpha_star * p.alpha_star));
    p.stop_size = std::max(
        20.0, sigma * std::pow(static_cast<double>(p.m_star) * p.rho * L, 2.0));
    p.grid_divisor = std::max(2.0, sigma * std::pow(96.0 * d, 2.0));

    double cap_d = std::min(100000.0, std::ceil(2.0 * p.rho * L) + 2.0);
    int cap = static_cast<int>(cap_d);
    p.h_star = cap;
    for (int h = 1; h <= cap; ++h)
        if (p.nh(h) <= p.stop_size) {
            p.h_star = h;
            break;
        }
    p.h_star = std::max(1, p.h_star);
    return p;
}

/// A live sub-problem: an induced piece of the contracted graph plus its
/// bounding box (an ordered cycle of host vertices, possibly empty).
struct Instance {
    VertexSet vertices; // excludes the box
    std::vector<int> box;
    int h = 1;
    uint64_t id = 0;

    VertexSet box_set() const { return VertexSet(box); }
    VertexSet all_vertices() const { return vertices.set_union(box_set()); }
};

struct IterationReport {
    int h = 0;
    int instances = 0;
    int case_small = 0, case1 = 0, case2 = 0, case3 = 0, case4 = 0;
    int fallbacks = 0;
    long long e1 = 0, e2 = 0, estar = 0;
    int resamples = 0;
};

struct EngineResult {
    bool ok = false;
    EdgeSet removed;
    std::optional<VertexSet> nasty;
    std::vector<IterationReport> iterations;
    std::vector<std::string> notes;
    int stopping_calls = 0;
    std::string failure;
};

namespace detail {

// ordered box restricted to a vertex subset, keeping the cyclic order
inline std::vector<int> box_trace(const std::vector<int> &box, const VertexSet &keep) {
    std::vector<int> r;
    for (int v : box)
        if (keep.contains(v)) r.push_back(v);
    return r;
}

} // namespace detail

/// The stopping-condition solver: canonical balanced cuts with grid edges
/// protected, the big-grid shortcut, good-graph filtering, and a final dump
/// of whatever refuses to split. Always returns a verified weak solution.
struct StoppingStats {
    int rounds = 0;
    int dumped = 0;
    bool fallback = false;
};

inline EdgeSet stopping_solve(const Graph &host, const Instance &inst, const GridFamily &zs,
                              const Parameters &par, const OracleConfig &ocfg,
                              StoppingStats *stats = nullptr) {
    VertexSet box_vs = inst.box_set();
    VertexSet all = inst.all_vertices();
    GridFamily zs_i = zs.restrict_to(inst.vertices);
    require(zs_i.canonical(inst.vertices), "PreconditionViolated",
            "instance is not canonical for its grids");
    EdgeSet box_edges;
    for (size_t i = 0; i < inst.box.size(); ++i)
        box_edges.emplace_back(inst.box[i], inst.box[(i + 1) % inst.box.size()]);
    normalize(box_edges);
    EdgeSet grid_edges = zs_i.grid_edges(host);

    // position of box vertices along the cycle
    std::vector<int> box_pos(host.n(), -1);
    for (size_t i = 0; i < inst.box.size(); ++i) box_pos[inst.box[i]] = static_cast<int>(i);

    EdgeSet removed;
    std::vector<VertexSet> families{all};
    int round_cap = static_cast<int>(
        std::max(8.0, 4.0 * par.d_max * par.d_max * std::max(1.0, std::log2(all.size() + 1))));
    StoppingStats local;

    auto is_good = [&](const VertexSet &f, const std::vector<VertexSet> &others) {
        Subgraph s = induced_subgraph(host, f);
        // canonical drawing with the box vertices in order on a closed curve
        std::vector<int> xs = detail::box_trace(inst.box, f);
        if (xs.size() <= 2) {
            if (!is_planar(s.g)) return false;
        } else {
            int base = s.g.n();
            EdgeSet aug = s.g.edges();
            for (size_t i = 0; i < xs.size(); ++i) {
                aug.emplace_back(base + static_cast<int>(i),
                                 base + static_cast<int>((i + 1) % xs.size()));
                aug.emplace_back(base + static_cast<int>(i), s.local(xs[i]));
            }
            normalize(aug);
            if (!is_planar(Graph(base + static_cast<int>(xs.size()), aug))) return false;
        }
        // no other family may join inner vertices of two distinct segments
        if (xs.size() >= 2) {
            // segment index of every box vertex not in f
            std::map<int, int> seg_of;
            int len = static_cast<int>(inst.box.size());
            for (int i = 0; i < len; ++i) {
                int v = inst.box[i];
                if (f.contains(v)) continue;
                // find the previous box vertex of f (segment anchor)
                int seg = -1;
                for (int back = 1; back < len; ++back) {
                    int u = inst.box[(i - back % len + len) % len];
                    if (f.contains(u)) {
                        seg = (i - back % len + len) % len;
                        break;
                    }
                }
                seg_of[v] = seg;
            }
            for (const auto &other : others) {
                if (other == f) continue;
                for (const VertexSet &comp : connected_components(host, other)) {
                    int first_seg = -2;
                    for (int v : comp) {
                        auto it = seg_of.find(v);
                        if (it == seg_of.end()) continue;
                        if (first_seg == -2) first_seg = it->second;
                        else if (it->second != first_seg) return false;
                    }
                }
            }
        }
        return true;
    };

    double size_bound = static_cast<double>(all.size());
    bool dump_everything = false;
    while (!families.empty() && local.rounds < round_cap && !dump_everything) {
        ++local.rounds;
        size_bound *= (1.0 - par.stopping_balance);
        std::vector<VertexSet> next;
        for (const VertexSet &f : families) {
            int nf = f.size();
            // big-grid shortcut
            std::optional<VertexSet> big;
            for (const auto &z : zs_i.grids)
                if (z.subset_of(f) &&
                    static_cast<double>(z.size()) >= static_cast<double>(nf) / par.grid_divisor) {
                    big = z;
                    break;
                }
            if (big) {
                VertexSet rest = f.set_minus(*big);
                EdgeSet cut = edges_between(host, *big, rest);
                removed = edge_union(removed, cut);
                if (!big->empty()) next.push_back(*big);
                if (!rest.empty()) next.push_back(rest);
                continue;
            }
            bool split_ok = false;
            if (nf >= 4) {
                Subgraph s = induced_subgraph(host, f);
                EdgeSet inf_local;
                for (const Edge &e : grid_edges)
                    if (f.contains(e.u) && f.contains(e.v)) inf_local.push_back(s.local_edge(e));
                normalize(inf_local);
                OracleConfig bcfg = ocfg;
                if (bcfg.mode == OracleMode::Exact && s.g.n() > bcfg.exact_limit)
                    bcfg.mode = OracleMode::Heuristic;
                try {
                    Cut c = balanced_cut(s.g, inf_local, par.stopping_balance, bcfg);
                    VertexSet a, b;
                    for (int lv : c.side_a) a.insert(s.to_root[lv]);
                    for (int lv : c.side_b) b.insert(s.to_root[lv]);
                    removed = edge_union(removed, edges_between(host, a, b));
                    next.push_back(a);
                    next.push_back(b);
                    split_ok = true;
                } catch (const Error &) {
                    split_ok = false;
                }
            }
            if (split_ok) continue;
            if (static_cast<double>(nf) <= std::max(size_bound, 4.0)) {
                next.push_back(f); // small enough, try again next round
            } else {
                dump_everything = true;
                next.push_back(f);
            }
        }
        if (dump_everything) {
            for (const VertexSet &f : next) {
                EdgeSet inside = edges_inside(host, f);
                removed = edge_union(removed, edge_minus(inside, grid_edges));
                ++local.dumped;
            }
            families.clear();
            break;
        }
        // keep only the graphs that are not yet good
        std::vector<VertexSet> keep;
        for (const VertexSet &f : next)
            if (!is_good(f, next)) keep.push_back(f);
        families = std::move(keep);
    }
    if (!families.empty() && !dump_everything) {
        for (const VertexSet &f : families) {
            EdgeSet inside = edges_inside(host, f);
            removed = edge_union(removed, edge_minus(inside, grid_edges));
            ++local.dumped;
        }
    }
    removed = edge_minus(removed, box_edges);
    removed = edge_minus(removed, grid_edges);

    // verify; if composition failed, fall back to the full dump
    Subgraph s = induced_subgraph(host, all);
    EdgeSet removed_local;
    for (const Edge &e : removed)
        if (all.contains(e.u) && all.contains(e.v)) removed_local.push_back(s.local_edge(e));
    normalize(removed_local);
    std::vector<int> box_local;
    for (int v : inst.box) box_local.push_back(s.local(v));
    if (!embeddable_inside_cycle_order(s.g.without_edges(removed_local), box_local)) {
        local.fallback = true;
        EdgeSet inside = edges_inside(host, all);
        removed = edge_minus(edge_minus(inside, grid_edges), box_edges);
        removed_local.clear();
        for (const Edge &e : removed) removed_local.push_back(s.local_edge(e));
        normalize(removed_local);
        require(embeddable_inside_cycle_order(s.g.without_edges(removed_local), box_local),
                "InternalError", "even the trivial dump failed verification");
    }
    if (stats) *stats = local;
    return removed;
}

/// Invariant checks at an iteration boundary: V1 disjointness, V2
/// removed-edge avoidance, V3 grid containment, V7 size schedule, and the
/// composability probe standing in for V5 (replacing every live instance by
/// its trivial weak solution must leave a planar canonical residual).
/// Throws InvariantViolation with a diagnostic on failure.
inline void check_invariants(const Graph &host, const GridFamily &zs,
                             const std::vector<Instance> &live, const EdgeSet &removed,
                             const Parameters &par, int h) {
    EdgeSet grid_edges = zs.grid_edges(host);
    for (size_t i = 0; i < live.size(); ++i) {
        require(!live[i].vertices.intersects(live[i].box_set()), "InvariantViolation",
                "instance vertices overlap its box");
        for (size_t j = i + 1; j < live.size(); ++j)
            require(!live[i].vertices.intersects(live[j].vertices), "InvariantViolation",
                    "live instances overlap (V1)");
    }
    for (const Instance &inst : live) {
        EdgeSet inside = edges_inside(host, inst.all_vertices());
        require(edge_intersect(inside, removed).empty(), "InvariantViolation",
                "instance contains a removed edge (V2)");
        for (const auto &z : zs.grids) {
            bool any = z.intersects(inst.vertices);
            require(!any || z.subset_of(inst.vertices), "InvariantViolation",
                    "grid straddles an instance (V3)");
        }
        double bound = inst.box.empty() ? par.nh(std::max(1, h - 1)) : par.nh(h);
        require(static_cast<double>(inst.vertices.size()) <= bound + 1e-9,
                "InvariantViolation", "instance exceeds the size schedule (V7)");
    }
    EdgeSet probe = removed;
    for (const Instance &inst : live) {
        EdgeSet inside = edges_inside(host, inst.all_vertices());
        EdgeSet box_edges;
        for (size_t i = 0; i < inst.box.size(); ++i)
            box_edges.emplace_back(inst.box[i], inst.box[(i + 1) % inst.box.size()]);
        normalize(box_edges);
        probe = edge_union(probe, edge_minus(edge_minus(inside, grid_edges), box_edges));
    }
    require(is_planar(host.without_edges(probe)), "InvariantViolation",
            "live instances are not composable (V5)");
}

/// The iteration engine of the main algorithm, acting on one contracted
/// graph. Produces either a verified weak canonical solution or a nasty
/// canonical set; per-instance machinery failures fall back to the stopping
/// solver, which keeps every run sound.
class PipelineEngine {
public:
    PipelineEngine(const Graph &host, const GridFamily &zs, const Parameters &par,
                   const OracleConfig &ocfg, uint64_t seed)
        : host_(host), zs_(zs), par_(par), ocfg_(ocfg), seed_(seed) {}

    EngineResult run() {
        EngineResult res;
        grid_edges_ = zs_.grid_edges(host_);
        std::vector<Instance> live;
        Instance root;
        root.vertices = VertexSet::range(host_.n());
        root.h = 1;
        root.id = next_id_++;
        live.push_back(root);

        try {
            for (int h = 1; h <= par_.h_star && !live.empty(); ++h) {
                planarize::check_invariants(host_, zs_, live, removed_, par_, h);
                IterationReport ir;
                ir.h = h;
                ir.instances = static_cast<int>(live.size());
                if (h == par_.h_star) {
                    for (const Instance &inst : live) {
                        removed_ = edge_union(removed_, stopping_solve(host_, inst, zs_, par_,
                                                                       ocfg_, nullptr));
                        ++res.stopping_calls;
                    }
                    live.clear();
                    res.iterations.push_back(ir);
                    break;
                }
                std::vector<Instance> next;
                for (const Instance &inst : live) {
                    EdgeSet before = removed_;
                    try {
                        CaseOutcome outcome = step1(inst, ir);
                        if (outcome.kind == CaseOutcome::Nasty) {
                            res.nasty = outcome.nasty_set;
                            return res;
                        }
                        if (outcome.kind == CaseOutcome::Small ||
                            outcome.kind == CaseOutcome::NoCase) {
                            if (outcome.kind == CaseOutcome::NoCase) ++ir.fallbacks;
                            else ++ir.case_small;
                            removed_ = edge_union(
                                removed_, stopping_solve(host_, inst, zs_, par_, ocfg_, nullptr));
                            ++res.stopping_calls;
                            continue;
                        }
                        Rng rng = Rng::derive(seed_, inst.id * 1315423911ULL + h);
                        SkeletonPlan plan = step2(inst, outcome, rng, ir);
                        auto spawned = step3(inst, plan, ir);
                        EdgeSet mine = edge_union(edge_union(plan.e1, plan.e2), spawned.second);
                        require(static_cast<long long>(mine.size()) <= par_.m_star,
                                "InvariantViolation", "per-instance removal exceeds m*");
                        removed_ = edge_union(removed_, mine);
                        ir.e1 += plan.e1.size();
                        ir.e2 += plan.e2.size();
                        ir.estar += spawned.second.size();
                        ir.resamples += plan.resamples;
                        for (Instance &sp : spawned.first) {
                            sp.h = h + 1;
                            sp.id = next_id_++;
                            next.push_back(sp);
                        }
                    } catch (const Error &e) {
                        if (e.code() == "InvariantViolation") throw;
                        // machinery failure: sound fallback for this instance
                        removed_ = before;
                        removed_ = edge_union(
                            removed_, stopping_solve(host_, inst, zs_, par_, ocfg_, nullptr));
                        ++res.stopping_calls;
                        ++ir.fallbacks;
                        res.notes.push_back(std::string("fallback at h=") + std::to_string(h) +
                                            ": " + e.what());
                    }
                }
                // drop instances whose empty solution already works
                live.clear();
                for (Instance &inst : next) {
                    if (!trivially_solved(inst)) live.push_back(std::move(inst));
                }
                res.iterations.push_back(ir);
            }
        } catch (const Error &e) {
            res.failure = e.what();
            return res;
        }

        // final verification: planar and canonical
        require(edge_intersect(removed_, grid_edges_).empty(), "InternalError",
                "solution touches grid edges");
        if (!is_planar(host_.without_edges(removed_))) {
            res.failure = "final residual not planar";
            return res;
        }
        res.ok = true;
        res.removed = removed_;
        return res;
    }

private:
    struct CaseOutcome {
        enum Kind { Small, C1, C2, C3, C4, Nasty, NoCase } kind = NoCase;
        VertexSet hmain;
        VertexSet grid;
        EdgeSet terminals;
        VertexSet side_a, side_b;
        std::map<Edge, std::vector<Edge>> case4_paths;
        std::map<Edge, int> case4_box_end;
        VertexSet nasty_set;
    };

    struct SkeletonPlan {
        EdgeSet k_edges;
        VertexSet k_vertices;
        EdgeSet e1, e2;
        VertexSet gx; // vertices of G^X including the box
        std::optional<VertexSet> gprime;
        std::vector<VertexSet> z2; // grids crossing K in a simple path
        int resamples = 0;
    };

    const Graph &host_;
    GridFamily zs_;
    Parameters par_;
    OracleConfig ocfg_;
    uint64_t seed_;
    EdgeSet removed_;
    EdgeSet grid_edges_;
    uint64_t next_id_ = 0;

    OracleConfig sized_cfg(int n) const {
        OracleConfig c = ocfg_;
        if (c.mode == OracleMode::Exact && n > c.exact_limit) c.mode = OracleMode::Heuristic;
        return c;
    }

    bool trivially_solved(const Instance &inst) const {
        Subgraph s = induced_subgraph(host_, inst.all_vertices());
        std::vector<int> box_local;
        for (int v : inst.box) box_local.push_back(s.local(v));
        return embeddable_inside_cycle_order(s.g, box_local);
    }

    // ---- step 1: partition --------------------------------------------

    CaseOutcome step1(const Instance &inst, IterationReport &ir) {
        CaseOutcome out;
        auto comps = connected_components(host_, inst.vertices);
        if (comps.empty()) {
            out.kind = CaseOutcome::Small;
            return out;
        }
        VertexSet hmain = comps[0];
        for (const auto &c : comps)
            if (c.size() > hmain.size()) hmain = c;
        out.hmain = hmain;
        int n1 = hmain.size();
        if (static_cast<double>(n1) <= par_.stop_size) {
            out.kind = CaseOutcome::Small;
            return out;
        }
        GridFamily zs_main = zs_.restrict_to(hmain);
        for (const auto &z : zs_main.grids)
            if (2 * z.size() >= n1) {
                out.kind = CaseOutcome::C1;
                out.grid = z;
                ++ir.case1;
                return out;
            }

        Subgraph s = induced_subgraph(host_, hmain);
        GridFamily zs_local;
        for (const auto &z : zs_main.grids) {
            VertexSet lz;
            for (int v : z) lz.insert(s.local(v));
            zs_local.grids.push_back(lz);
        }
        EdgeSet grid_local;
        for (const Edge &e : grid_edges_)
            if (hmain.contains(e.u) && hmain.contains(e.v)) grid_local.push_back(s.local_edge(e));
        normalize(grid_local);

        // initial partition: a lambda-large grid wins outright, else a
        // canonical balanced cut trimmed until the A side is well-linked
        VertexSet a_local, b_local;
        double lam_n = std::max(1.0, par_.lambda * n1);
        bool have = false;
        for (const auto &z : zs_local.grids)
            if (static_cast<double>(z.size()) >= lam_n) {
                a_local = z;
                b_local = VertexSet::range(s.g.n()).set_minus(z);
                have = true;
                break;
            }
        if (!have) {
            Cut c = balanced_cut(s.g, grid_local, par_.epsilon, sized_cfg(s.g.n()));
            a_local = c.side_a.size() >= c.side_b.size() ? c.side_a : c.side_b;
            b_local = VertexSet::range(s.g.n()).set_minus(a_local);
            // trim A until alpha*-well-linked (canonical violating cuts only);
            // stop rather than drain A below the balance the later cases need
            int guard = 0;
            double floor_a = std::max(1.0, static_cast<double>(n1) / par_.rho);
            while (guard++ < 4 * s.g.m() + 16) {
                auto split = planarize::detail::find_violating_cut(s.g, a_local, zs_local,
                                                                   par_.alpha_star, ocfg_);
                if (!split.found) break;
                VertexSet smaller = split.a.size() <= split.b.size() ? split.a : split.b;
                if (static_cast<double>(a_local.size() - smaller.size()) < floor_a) break;
                a_local = a_local.set_minus(smaller);
                b_local = b_local.set_union(smaller);
            }
        }
        if (a_local.empty() || b_local.empty()) {
            out.kind = CaseOutcome::NoCase;
            return out;
        }

        EdgeSet t_local = edges_between(s.g, a_local, b_local);
        if (static_cast<long long>(t_local.size()) <= par_.case2_threshold) {
            out.kind = CaseOutcome::C2;
            for (int lv : a_local) out.side_a.insert(s.to_root[lv]);
            for (int lv : b_local) out.side_b.insert(s.to_root[lv]);
            out.terminals = s.root_edges(t_local);
            ++ir.case2;
            return out;
        }

        // decompose B, preserving P1 (towards A) and canonicality
        DecomposeFlags flags;
        flags.canonical = true;
        flags.p1 = check_P1(s.g, b_local);
        auto dec = well_linked_decompose(s.g, b_local, zs_local, flags, par_.alpha_star,
                                         sized_cfg(s.g.n()));

        // Case 3: a rho-large piece
        for (const VertexSet &piece : dec.pieces) {
            if (static_cast<double>(piece.size()) < static_cast<double>(n1) / par_.rho) continue;
            if (static_cast<double>(a_local.size()) < static_cast<double>(n1) / par_.rho) break;
            Cut c = canonical_min_cut(s.g, zs_local, a_local, piece);
            if (static_cast<double>(c.side_a.size()) < static_cast<double>(n1) / par_.rho ||
                static_cast<double>(c.side_b.size()) < static_cast<double>(n1) / par_.rho)
                continue;
            out.kind = CaseOutcome::C3;
            for (int lv : c.side_a) out.side_a.insert(s.to_root[lv]);
            for (int lv : c.side_b) out.side_b.insert(s.to_root[lv]);
            out.terminals = s.root_edges(c.cut_edges);
            ++ir.case3;
            return out;
        }

        // type-1 / type-2 split per piece (only with a bounding box)
        VertexSet type2_union_local;
        if (!inst.box.empty()) {
            for (const VertexSet &piece : dec.pieces) {
                VertexSet piece_host;
                for (int lv : piece) piece_host.insert(s.to_root[lv]);
                EdgeSet out_x = edges_between(host_, piece_host, inst.box_set());
                if (out_x.empty()) continue;
                // min cut between the H-side terminals and the box side
                VertexSet th; // endpoints of out_H(piece) outside the piece
                for (const Edge &e : cut_profile(s.g, piece).out)
                    th.insert(piece.contains(e.u) ? e.v : e.u);
                if (th.empty()) {
                    // everything reaches only the box: whole piece is type 2
                    type2_union_local = type2_union_local.set_union(piece);
                    continue;
                }
                // build piece graph with a source stub behind out_H and a
                // sink stub behind out^X, then take the canonical min cut
                Subgraph ps = induced_subgraph(host_, piece_host);
                int base = ps.g.n();
                EdgeSet pes = ps.g.edges();
                int src = base, dst = base + 1;
                for (const Edge &e : cut_profile(s.g, piece).out) {
                    int inside = piece.contains(e.u) ? e.u : e.v;
                    pes.emplace_back(ps.local(s.to_root[inside]), src);
                }
                for (const Edge &e : out_x) {
                    int inside = piece_host.contains(e.u) ? e.u : e.v;
                    pes.emplace_back(ps.local(inside), dst);
                }
                normalize(pes);
                Graph pg(base + 2, pes);
                GridFamily pzs;
                for (const auto &z : zs_main.grids)
                    if (z.subset_of(piece_host)) {
                        VertexSet lz;
                        for (int v : z) lz.insert(ps.local(v));
                        pzs.grids.push_back(lz);
                    }
                Cut c = canonical_min_cut(pg, pzs, VertexSet{src}, VertexSet{dst});
                for (int lv : c.side_b) {
                    if (lv >= base) continue;
                    type2_union_local.insert(s.local(ps.to_root[lv]));
                }
            }
        }
        double lam_half = std::max(1.0, par_.lambda * n1 / 2.0);
        if (!type2_union_local.empty() &&
            static_cast<double>(type2_union_local.size()) >= lam_half &&
            static_cast<double>(a_local.size()) >= static_cast<double>(n1) / par_.rho) {
            Cut c = canonical_min_cut(s.g, zs_local, a_local, type2_union_local);
            if (static_cast<double>(c.side_a.size()) >= static_cast<double>(n1) / par_.rho &&
                static_cast<double>(c.side_b.size()) >= static_cast<double>(n1) / par_.rho) {
                // path family: every cut edge routes to the box through B'
                auto paths = case4_path_family(inst, s, c);
                if (paths) {
                    out.kind = CaseOutcome::C4;
                    for (int lv : c.side_a) out.side_a.insert(s.to_root[lv]);
                    for (int lv : c.side_b) out.side_b.insert(s.to_root[lv]);
                    out.terminals = s.root_edges(c.cut_edges);
                    out.case4_paths = std::move(paths->first);
                    out.case4_box_end = std::move(paths->second);
                    ++ir.case4;
                    return out;
                }
            }
        }

        // nasty fallback: extended type-1 clusters in the full host graph
        VertexSet a_host;
        for (int lv : a_local) a_host.insert(s.to_root[lv]);
        auto nasty = find_nasty(inst, dec, s, a_host, type2_union_local);
        if (nasty) {
            out.kind = CaseOutcome::Nasty;
            out.nasty_set = *nasty;
            return out;
        }
        out.kind = CaseOutcome::NoCase;
        return out;
    }

    // per-terminal-edge path family to the box for Case 4
    std::optional<std::pair<std::map<Edge, std::vector<Edge>>, std::map<Edge, int>>>
    case4_path_family(const Instance &inst, const Subgraph &s, const Cut &c) {
        // paths live in H[B'] plus the cut edges plus the edges to the box
        VertexSet b_host;
        for (int lv : c.side_b) b_host.insert(s.to_root[lv]);
        EdgeSet tcut = s.root_edges(c.cut_edges);
        EdgeSet to_box = edges_between(host_, b_host, inst.box_set());
        if (to_box.empty()) return std::nullopt;

        // network: stub per cut edge -> B' interior -> stub per box edge
        std::vector<int> node_of(host_.n(), -1);
        int n_nodes = 0;
        for (int v : b_host) node_of[v] = n_nodes++;
        Dinic net(n_nodes + static_cast<int>(tcut.size()) + static_cast<int>(to_box.size()) + 2);
        int src = net.size() - 2, dst = net.size() - 1;
        for (const Edge &e : edges_inside(host_, b_host))
            net.add_undirected(node_of[e.u], node_of[e.v], 1);
        for (size_t i = 0; i < tcut.size(); ++i) {
            int inside = b_host.contains(tcut[i].u) ? tcut[i].u : tcut[i].v;
            net.add_arc(src, n_nodes + static_cast<int>(i), 1);
            net.add_arc(n_nodes + static_cast<int>(i), node_of[inside], 1);
        }
        int xbase = n_nodes + static_cast<int>(tcut.size());
        for (size_t i = 0; i < to_box.size(); ++i) {
            int inside = b_host.contains(to_box[i].u) ? to_box[i].u : to_box[i].v;
            net.add_arc(node_of[inside], xbase + static_cast<int>(i), 1);
            net.add_arc(xbase + static_cast<int>(i), dst, 1);
        }
        long long flow = net.max_flow(src, dst);
        if (flow < static_cast<long long>(tcut.size())) return std::nullopt;
        auto raw = net.extract_unit_paths(src, dst);
        std::map<Edge, std::vector<Edge>> path_of;
        std::map<Edge, int> box_end;
        std::vector<int> rev(net.size(), -1);
        for (int v : b_host) rev[node_of[v]] = v;
        for (const auto &p : raw) {
            // p = src, stub_t, interior..., stub_x, dst
            if (p.size() < 4) continue;
            int ti = p[1] - n_nodes;
            int xi = p[p.size() - 2] - xbase;
            if (ti < 0 || ti >= static_cast<int>(tcut.size()) || xi < 0 ||
                xi >= static_cast<int>(to_box.size()))
                continue;
            std::vector<Edge> edges{tcut[ti]};
            for (size_t i = 2; i + 2 < p.size(); ++i)
                edges.emplace_back(rev[p[i]], rev[p[i + 1]]);
            edges.push_back(to_box[xi]);
            path_of[tcut[ti]] = edges;
            int bx = inst.box_set().contains(to_box[xi].u) ? to_box[xi].u : to_box[xi].v;
            box_end[tcut[ti]] = bx;
        }
        if (path_of.size() != tcut.size()) return std::nullopt;
        return std::make_pair(std::move(path_of), std::move(box_end));
    }

    std::optional<VertexSet> find_nasty(const Instance &inst, const DecompositionResult &dec,
                                        const Subgraph &s, const VertexSet &a_host,
                                        const VertexSet &type2_local) {
        // type-1 side of every piece (host coordinates)
        std::vector<VertexSet> t1;
        VertexSet t1_union;
        for (const VertexSet &piece : dec.pieces) {
            VertexSet c1;
            for (int lv : piece.set_minus(type2_local)) c1.insert(s.to_root[lv]);
            if (!c1.empty()) {
                t1.push_back(c1);
                t1_union = t1_union.set_union(c1);
            }
        }
        if (t1.empty()) return std::nullopt;
        // components of the full host minus A, box, and the clusters
        VertexSet removed_set = a_host.set_union(inst.box_set()).set_union(t1_union);
        VertexSet rest = VertexSet::range(host_.n()).set_minus(removed_set);
        std::vector<VertexSet> extensions(t1.size());
        for (const VertexSet &comp : connected_components(host_, rest)) {
            int owner = -1;
            bool unique = true;
            for (const Edge &e : cut_profile(host_, comp).out) {
                int outside = comp.contains(e.u) ? e.v : e.u;
                int who = -1;
                for (size_t i = 0; i < t1.size(); ++i)
                    if (t1[i].contains(outside)) who = static_cast<int>(i);
                if (who == -1) {
                    unique = false;
                    break;
                }
                if (owner == -1) owner = who;
                else if (owner != who) {
                    unique = false;
                    break;
                }
            }
            if (unique && owner >= 0) extensions[owner] = extensions[owner].set_union(comp);
        }
        for (size_t i = 0; i < t1.size(); ++i) {
            VertexSet u = t1[i].set_union(extensions[i]);
            if (!zs_.canonical(u)) continue;
            NastySetReport rep = detect_nasty(host_, u, par_.nasty_coeff);
            if (rep.nasty) return u;
        }
        return std::nullopt;
    }

    // ---- step 2: skeleton ----------------------------------------------

    SkeletonPlan step2(const Instance &inst, const CaseOutcome &outcome, Rng &rng,
                       IterationReport &ir) {
        (void)ir;
        SkeletonPlan plan;
        EdgeSet box_edges;
        for (size_t i = 0; i < inst.box.size(); ++i)
            box_edges.emplace_back(inst.box[i], inst.box[(i + 1) % inst.box.size()]);
        normalize(box_edges);
        plan.gx = inst.all_vertices();

        if (outcome.kind == CaseOutcome::C2) {
            plan.k_edges = box_edges;
            plan.k_vertices = inst.box_set();
            plan.e2 = outcome.terminals;
            check_component_bound(inst, plan);
            return plan;
        }

        // initial skeleton
        EdgeSet k0;
        VertexSet k0_vs;
        if (outcome.kind == CaseOutcome::C1) {
            k0 = edges_inside(host_, outcome.grid);
            k0_vs = outcome.grid;
        } else {
            sample_skeleton(inst, outcome, rng, plan, k0, k0_vs);
        }

        // grid bookkeeping: absorb grids crossing K in a non-path way
        GridFamily zs_i = zs_.restrict_to(inst.vertices);
        absorb_grids(zs_i, k0, k0_vs, plan);

        if (inst.box.empty()) {
            plan.k_edges = k0;
            plan.k_vertices = k0_vs;
            verify_skeleton(inst, plan);
            return plan;
        }

        // connect to the bounding box
        VertexSet kplus = k0_vs;
        for (const auto &z : plan.z2) kplus = kplus.set_union(z);
        Subgraph s = induced_subgraph(host_, inst.all_vertices());
        EdgeSet e2_local;
        for (const Edge &e : plan.e2) e2_local.push_back(s.local_edge(e));
        normalize(e2_local);
        Graph work = s.g.without_edges(e2_local);
        VertexSet box_local, kplus_local;
        for (int v : inst.box) box_local.insert(s.local(v));
        for (int v : kplus) kplus_local.insert(s.local(v));
        auto paths = vertex_disjoint_paths(work, box_local, kplus_local);

        if (static_cast<long long>(paths.size()) >= par_.path_count) {
            // try a few random triples, avoiding more than two touches of any
            // single crossing grid
            for (int attempt = 0; attempt < par_.retry_budget; ++attempt) {
                std::vector<int> pick;
                std::vector<int> pool(paths.size());
                std::iota(pool.begin(), pool.end(), 0);
                for (int i = 0; i < 3; ++i) {
                    int j = rng.next_int(static_cast<int>(pool.size()));
                    pick.push_back(pool[j]);
                    pool.erase(pool.begin() + j);
                }
                EdgeSet k = edge_union(k0, box_edges);
                VertexSet kv = k0_vs.set_union(inst.box_set());
                std::vector<VertexSet> z2_left;
                bool grid_overuse = false;
                std::vector<int> touches(plan.z2.size(), 0);
                for (int pi : pick)
                    for (int v : paths[pi])
                        for (size_t zi = 0; zi < plan.z2.size(); ++zi)
                            if (plan.z2[zi].contains(s.to_root[v])) ++touches[zi];
                for (size_t zi = 0; zi < plan.z2.size(); ++zi)
                    if (touches[zi] > 2) grid_overuse = true;
                if (grid_overuse) continue;
                for (int pi : pick) {
                    const auto &p = paths[pi];
                    for (size_t i = 0; i + 1 < p.size(); ++i)
                        k.emplace_back(s.to_root[p[i]], s.to_root[p[i + 1]]);
                    for (int v : p) kv.insert(s.to_root[v]);
                }
                // absorb grids touched by the chosen paths
                for (size_t zi = 0; zi < plan.z2.size(); ++zi) {
                    if (touches[zi] == 0) {
                        z2_left.push_back(plan.z2[zi]);
                        continue;
                    }
                    EdgeSet ge = edges_inside(host_, plan.z2[zi]);
                    k = edge_union(k, ge);
                    kv = kv.set_union(plan.z2[zi]);
                }
                normalize(k);
                SkeletonPlan cand = plan;
                cand.k_edges = k;
                cand.k_vertices = kv;
                cand.z2 = z2_left;
                try {
                    verify_skeleton(inst, cand);
                    cand.resamples = plan.resamples + attempt;
                    return cand;
                } catch (const Error &) {
                    continue;
                }
            }
            fail("RetryExhausted", "could not connect the skeleton to the box");
        }

        // separator: split off the skeleton side entirely
        require(!box_local.intersects(kplus_local), "RetryExhausted",
                "box meets the skeleton but too few disjoint paths exist");
        GridFamily zs_loc;
        for (const auto &z : zs_i.grids) {
            VertexSet lz;
            for (int v : z) lz.insert(s.local(v));
            zs_loc.grids.push_back(lz);
        }
        Cut c = canonical_min_cut(work, zs_loc, box_local, kplus_local);
        require(static_cast<long long>(c.value) <=
                    par_.path_count * static_cast<long long>(par_.d_max),
                "RetryExhausted", "separator larger than the path-count budget");
        plan.e1 = s.root_edges(c.cut_edges);
        VertexSet gx;
        for (int lv : c.side_a) gx.insert(s.to_root[lv]);
        plan.gx = gx;
        VertexSet gprime;
        for (int lv : c.side_b) gprime.insert(s.to_root[lv]);
        plan.gprime = gprime;
        plan.k_edges = box_edges;
        plan.k_vertices = inst.box_set();
        verify_skeleton(inst, plan);
        return plan;
    }

    void sample_skeleton(const Instance &inst, const CaseOutcome &outcome, Rng &rng,
                         SkeletonPlan &plan, EdgeSet &k0, VertexSet &k0_vs) {
        const EdgeSet &terms = outcome.terminals;
        int q = static_cast<int>(terms.size());
        // routing graphs per side
        auto side_graph = [&](const VertexSet &side) {
            VertexSet vs = side;
            for (const Edge &e : terms) {
                vs.insert(e.u);
                vs.insert(e.v);
            }
            Subgraph sg = induced_subgraph(host_, vs);
            EdgeSet es = edges_inside(host_, side);
            EdgeSet local;
            for (const Edge &e : es) local.push_back(sg.local_edge(e));
            for (const Edge &e : terms) local.push_back(sg.local_edge(e));
            normalize(local);
            return std::make_pair(Graph(sg.g.n(), local), sg);
        };
        auto [gr, sr] = side_graph(outcome.side_a);
        EdgeSet terms_r;
        for (const Edge &e : terms) terms_r.push_back(sr.local_edge(e));
        normalize(terms_r);
        OracleConfig fcfg = ocfg_;
        fcfg.mode = (q <= 8 && gr.m() <= 48 && ocfg_.mode == OracleMode::Exact)
                        ? OracleMode::Exact
                        : OracleMode::Heuristic;
        double target = static_cast<double>(q) * par_.beta_fcg / par_.alpha_star;
        FlowRouting fr = route_concurrent_flow(gr, terms_r, target, fcfg);

        FlowRouting fb;
        Subgraph sb;
        Graph gb;
        if (outcome.kind == CaseOutcome::C3) {
            auto [g2, s2] = side_graph(outcome.side_b);
            gb = std::move(g2);
            sb = std::move(s2);
            EdgeSet terms_b;
            for (const Edge &e : terms) terms_b.push_back(sb.local_edge(e));
            normalize(terms_b);
            fb = route_concurrent_flow(gb, terms_b, target, fcfg);
        }

        double pp = par_.pair_prob(q);
        for (int attempt = 0; attempt <= par_.retry_budget; ++attempt) {
            plan.resamples = attempt;
            EdgeSet cycles;
            for (int i = 0; i < q; ++i)
                for (int j = i + 1; j < q; ++j) {
                    if (!rng.bernoulli(pp)) continue;
                    std::vector<Edge> pr = sample_path(fr, {i, j}, rng);
                    EdgeSet cyc;
                    for (const Edge &e : pr) cyc.push_back(sr.root_edge(e));
                    if (outcome.kind == CaseOutcome::C3) {
                        std::vector<Edge> pb = sample_path(fb, {i, j}, rng);
                        for (const Edge &e : pb) cyc.push_back(sb.root_edge(e));
                    } else {
                        // Case 4: terminal-to-box paths plus a box arc
                        const auto &p1 = outcome.case4_paths.at(terms[i]);
                        const auto &p2 = outcome.case4_paths.at(terms[j]);
                        cyc.insert(cyc.end(), p1.begin(), p1.end());
                        cyc.insert(cyc.end(), p2.begin(), p2.end());
                        int b1 = outcome.case4_box_end.at(terms[i]);
                        int b2 = outcome.case4_box_end.at(terms[j]);
                        int len = static_cast<int>(inst.box.size());
                        int i1 = 0, i2 = 0;
                        for (int x = 0; x < len; ++x) {
                            if (inst.box[x] == b1) i1 = x;
                            if (inst.box[x] == b2) i2 = x;
                        }
                        for (int x = i1; x != i2; x = (x + 1) % len)
                            cyc.emplace_back(inst.box[x], inst.box[(x + 1) % len]);
                    }
                    normalize(cyc);
                    cycles = edge_union(cycles, cyc);
                }
            if (cycles.empty()) continue;
            // candidate components of the union, largest first
            VertexSet cyc_vs;
            for (const Edge &e : cycles) {
                cyc_vs.insert(e.u);
                cyc_vs.insert(e.v);
            }
            std::vector<VertexSet> comps;
            {
                // components of the edge set `cycles`
                std::vector<int> comp_of(host_.n(), -1);
                int nc = 0;
                std::map<int, std::vector<int>> adj;
                for (const Edge &e : cycles) {
                    adj[e.u].push_back(e.v);
                    adj[e.v].push_back(e.u);
                }
                for (int v : cyc_vs) {
                    if (comp_of[v] != -1) continue;
                    std::vector<int> stack{v}, acc;
                    comp_of[v] = nc;
                    while (!stack.empty()) {
                        int x = stack.back();
                        stack.pop_back();
                        acc.push_back(x);
                        for (int w : adj[x])
                            if (comp_of[w] == -1) {
                                comp_of[w] = nc;
                                stack.push_back(w);
                            }
                    }
                    comps.emplace_back(acc);
                    ++nc;
                }
            }
            std::sort(comps.begin(), comps.end(), [&](const VertexSet &x, const VertexSet &y) {
                return x.size() > y.size();
            });
            for (const VertexSet &cand_vs : comps) {
                EdgeSet cand_edges = edges_inside(Graph(host_.n(), cycles), cand_vs);
                EdgeSet repaired = repair_two_cuts(cand_edges, outcome.terminals);
                VertexSet rv;
                for (const Edge &e : repaired) {
                    rv.insert(e.u);
                    rv.insert(e.v);
                }
                // fast structural screen before the full checks
                Subgraph ks = induced_subgraph(host_, rv);
                EdgeSet klocal;
                for (const Edge &e : repaired) klocal.push_back(ks.local_edge(e));
                normalize(klocal);
                Graph kg(ks.g.n(), klocal);
                RigidityReport rr;
                try {
                    rr = is_rigid(kg);
                } catch (const Error &) {
                    continue;
                }
                if (!rr.rigid || !is_planar(kg)) continue;
                // component terminal bound
                VertexSet hrest = outcome.hmain.set_minus(rv);
                bool ok = true;
                EdgeSet e2;
                for (const VertexSet &comp : connected_components(host_, hrest)) {
                    long long t_in = 0;
                    for (const Edge &t : outcome.terminals)
                        if (comp.contains(t.u) && comp.contains(t.v)) ++t_in;
                    if (t_in > par_.comp_terminal_bound) {
                        ok = false;
                        break;
                    }
                    if (2 * comp.size() > outcome.hmain.size()) {
                        for (const Edge &t : outcome.terminals)
                            if (comp.contains(t.u) && comp.contains(t.v)) e2.push_back(t);
                    }
                }
                if (!ok) continue;
                normalize(e2);
                k0 = repaired;
                k0_vs = rv;
                plan.e2 = e2;
                return;
            }
        }
        fail("RetryExhausted", "skeleton sampling failed to produce a rigid core");
    }

    // 2-cut repair: while the candidate has a 1- or 2-vertex cut, keep the
    // side with the most terminals and replace the rest by a path through a
    // terminal when one exists.
    EdgeSet repair_two_cuts(EdgeSet k, const EdgeSet &terminals) {
        for (int guard = 0; guard < 2 * static_cast<int>(k.size()) + 8; ++guard) {
            VertexSet kv;
            for (const Edge &e : k) {
                kv.insert(e.u);
                kv.insert(e.v);
            }
            if (kv.size() < 4) return k;
            Subgraph s = induced_subgraph(host_, kv);
            EdgeSet klocal;
            for (const Edge &e : k) klocal.push_back(s.local_edge(e));
            normalize(klocal);
            Graph kg(s.g.n(), klocal);
            if (!is_connected(kg)) {
                // keep the component with most terminals
                auto comps = connected_components(kg, VertexSet::range(kg.n()));
                long long best = -1;
                VertexSet keep;
                for (const auto &comp : comps) {
                    long long t = 0;
                    for (const Edge &te : terminals) {
                        Edge local(s.to_local[te.u] < 0 ? 0 : s.to_local[te.u],
                                   s.to_local[te.v] < 0 ? 0 : s.to_local[te.v]);
                        if (s.to_local[te.u] >= 0 && s.to_local[te.v] >= 0 &&
                            comp.contains(local.u) && comp.contains(local.v) &&
                            edge_in(klocal, local))
                            ++t;
                    }
                    if (t > best) {
                        best = t;
                        keep = comp;
                    }
                }
                EdgeSet kept;
                for (const Edge &e : k) {
                    Edge le = s.local_edge(e);
                    if (keep.contains(le.u) && keep.contains(le.v)) kept.push_back(e);
                }
                k = kept;
                continue;
            }
            RigidityReport rr = is_rigid(kg);
            if (rr.rigid) return k;
            // find a violating pair: a 1-cut, or a 2-cut of the suppression
            std::optional<std::pair<int, int>> cut;
            for (int x = 0; x < kg.n() && !cut; ++x) {
                VertexSet rest = VertexSet::range(kg.n());
                rest.erase(x);
                if (!is_connected(kg, rest)) cut = std::make_pair(x, -1);
            }
            for (int x = 0; x < kg.n() && !cut; ++x)
                for (int y = x + 1; y < kg.n() && !cut; ++y) {
                    VertexSet rest = VertexSet::range(kg.n());
                    rest.erase(x);
                    rest.erase(y);
                    if (rest.empty()) continue;
                    if (!is_connected(kg, rest)) cut = std::make_pair(x, y);
                }
            if (!cut) return k; // not rigid for another reason; give up here
            auto [cx, cy] = *cut;
            VertexSet rest = VertexSet::range(kg.n());
            rest.erase(cx);
            if (cy >= 0) rest.erase(cy);
            auto comps = connected_components(kg, rest);
            // keep the component holding the most terminals
            auto term_count = [&](const VertexSet &comp) {
                long long t = 0;
                for (const Edge &te : terminals)
                    if (s.to_local[te.u] >= 0 && s.to_local[te.v] >= 0) {
                        Edge le = s.local_edge(te);
                        bool inside = (comp.contains(le.u) || le.u == cx || le.u == cy) &&
                                      (comp.contains(le.v) || le.v == cx || le.v == cy);
                        if (inside && edge_in(klocal, le)) ++t;
                    }
                return t;
            };
            long long best = -1;
            size_t keep_idx = 0;
            for (size_t i = 0; i < comps.size(); ++i) {
                long long t = term_count(comps[i]);
                if (t > best) {
                    best = t;
                    keep_idx = i;
                }
            }
            // replace every other component by a path from cx to cy (through
            // a terminal when present); for a 1-cut just drop the others
            EdgeSet kept;
            VertexSet keep_set = comps[keep_idx];
            keep_set.insert(cx);
            if (cy >= 0) keep_set.insert(cy);
            for (const Edge &e : k) {
                Edge le = s.local_edge(e);
                if (keep_set.contains(le.u) && keep_set.contains(le.v)) kept.push_back(e);
            }
            if (cy >= 0) {
                // one replacement path through the union of dropped parts
                VertexSet dropped = VertexSet::range(kg.n()).set_minus(comps[keep_idx]);
                std::vector<char> allowed(kg.n(), 0);
                for (int v : dropped) allowed[v] = 1;
                allowed[cx] = 1;
                allowed[cy] = 1;
                // prefer a path through a terminal edge
                std::vector<int> path = bfs_path(kg, cx, cy, allowed);
                for (const Edge &te : terminals) {
                    if (s.to_local[te.u] < 0 || s.to_local[te.v] < 0) continue;
                    Edge le = s.local_edge(te);
                    if (!edge_in(klocal, le)) continue;
                    if (!dropped.contains(le.u) && !dropped.contains(le.v)) continue;
                    std::vector<char> a1 = allowed;
                    std::vector<int> first = bfs_path(kg, cx, le.u, a1);
                    if (first.empty()) continue;
                    std::vector<char> a2 = allowed;
                    for (size_t i = 0; i + 1 < first.size(); ++i) a2[first[i]] = 0;
                    std::vector<int> second = bfs_path(kg, le.v, cy, a2);
                    if (second.empty()) continue;
                    path = first;
                    path.insert(path.end(), second.begin(), second.end());
                    break;
                }
                if (!path.empty())
                    for (size_t i = 0; i + 1 < path.size(); ++i)
                        kept.emplace_back(s.to_root[path[i]], s.to_root[path[i + 1]]);
            }
            normalize(kept);
            if (kept == k) return k; // no progress; bail out
            k = kept;
        }
        return k;
    }

    void absorb_grids(const GridFamily &zs_i, EdgeSet &k, VertexSet &kv, SkeletonPlan &plan) {
        bool changed = true;
        while (changed) {
            changed = false;
            plan.z2.clear();
            for (const auto &z : zs_i.grids) {
                VertexSet inter = z.set_intersect(kv);
                if (inter.empty()) continue;
                if (z.subset_of(kv)) continue; // already fully absorbed
                // does K meet Z in a simple path?
                EdgeSet kz;
                for (const Edge &e : k)
                    if (z.contains(e.u) && z.contains(e.v)) kz.push_back(e);
                bool path_like = true;
                if (!kz.empty()) {
                    Subgraph zs_sub = induced_subgraph(host_, inter);
                    EdgeSet lz;
                    for (const Edge &e : kz) lz.push_back(zs_sub.local_edge(e));
                    normalize(lz);
                    Graph pz(zs_sub.g.n(), lz);
                    int deg_over = 0, comp = 0;
                    for (int v = 0; v < pz.n(); ++v)
                        if (pz.degree(v) > 2) ++deg_over;
                    comp = static_cast<int>(
                        connected_components(pz, VertexSet::range(pz.n())).size());
                    path_like = deg_over == 0 && comp == 1 &&
                                static_cast<int>(lz.size()) == pz.n() - 1;
                } else {
                    path_like = inter.size() == 1;
                }
                if (!path_like) {
                    k = edge_union(k, edges_inside(host_, z));
                    kv = kv.set_union(z);
                    changed = true;
                } else {
                    plan.z2.push_back(z);
                }
            }
        }
    }

    void check_component_bound(const Instance &inst, const SkeletonPlan &plan) const {
        Subgraph s = induced_subgraph(host_, plan.gx);
        EdgeSet drop;
        for (const Edge &e : edge_union(plan.e2, plan.k_edges))
            if (plan.gx.contains(e.u) && plan.gx.contains(e.v)) drop.push_back(s.local_edge(e));
        normalize(drop);
        Graph res = s.g.without_edges(drop);
        VertexSet inner = VertexSet::range(res.n());
        for (int v : plan.k_vertices)
            if (s.to_local[v] >= 0) inner.erase(s.to_local[v]);
        // children spawned with a bounding box must obey n_{h+1}; boxless
        // children fall under the lenient second branch of the size schedule
        double bound = plan.k_edges.empty() ? par_.nh(inst.h) + 1e-9
                                            : par_.nh(inst.h + 1) + 1e-9;
        for (const VertexSet &comp : connected_components(res, inner))
            require(static_cast<double>(comp.size()) <= bound, "RetryExhausted",
                    "a component exceeds the size schedule for the next iteration");
    }

    void verify_skeleton(const Instance &inst, const SkeletonPlan &plan) const {
        Subgraph s = induced_subgraph(host_, plan.k_vertices);
        EdgeSet local;
        for (const Edge &e : plan.k_edges) local.push_back(s.local_edge(e));
        normalize(local);
        Graph kg(s.g.n(), local);
        RigidityReport rr = is_rigid(kg);
        require(rr.rigid, "RetryExhausted", "skeleton is not rigid");
        require(is_planar(kg), "RetryExhausted", "skeleton is not planar");
        check_component_bound(inst, plan);
    }

    // ---- step 3: conflict resolution and spawning -----------------------

    std::pair<std::vector<Instance>, EdgeSet> step3(const Instance &inst, SkeletonPlan &plan,
                                                    IterationReport &ir) {
        (void)ir;
        if (plan.k_edges.empty()) {
            // empty skeleton (boxless Case 2): the components separate on
            // their own; spawn each one as a boxless instance
            std::vector<Instance> spawned;
            Subgraph s = induced_subgraph(host_, plan.gx);
            EdgeSet drop;
            for (const Edge &e : edge_union(plan.e1, plan.e2))
                if (plan.gx.contains(e.u) && plan.gx.contains(e.v))
                    drop.push_back(s.local_edge(e));
            normalize(drop);
            Graph res = s.g.without_edges(drop);
            for (const VertexSet &comp : connected_components(res, VertexSet::range(res.n()))) {
                Instance child;
                for (int lv : comp) child.vertices.insert(s.to_root[lv]);
                spawned.push_back(std::move(child));
            }
            if (plan.gprime && !plan.gprime->empty()) {
                Instance child;
                child.vertices = *plan.gprime;
                spawned.push_back(std::move(child));
            }
            return {std::move(spawned), {}};
        }
        // grids crossing K as a simple path: reroute K through the first row
        GridFamily zs_i = zs_.restrict_to(inst.vertices);
        for (const auto &z : plan.z2) reroute_through_first_row(z, plan);

        Subgraph ks = induced_subgraph(host_, plan.k_vertices);
        EdgeSet klocal;
        for (const Edge &e : plan.k_edges) klocal.push_back(ks.local_edge(e));
        normalize(klocal);
        Graph kg(ks.g.n(), klocal);
        RotationSystem emb = unique_embedding(kg);
        RigidityReport krig = is_rigid(kg);

        // faces as host-vertex cycles
        std::vector<std::vector<int>> face_cycles;
        for (const Face &f : emb.faces) {
            require(f.walks.size() == 1, "InternalError", "skeleton face not a single walk");
            std::vector<int> cyc;
            for (int lv : f.walks[0]) cyc.push_back(ks.to_root[lv]);
            face_cycles.push_back(cyc);
        }
        // forbidden face: the one reading exactly as the box (outside)
        EdgeSet box_edges;
        for (size_t i = 0; i < inst.box.size(); ++i)
            box_edges.emplace_back(inst.box[i], inst.box[(i + 1) % inst.box.size()]);
        normalize(box_edges);
        int forbidden = -1;
        if (!inst.box.empty()) {
            for (size_t fi = 0; fi < face_cycles.size(); ++fi) {
                EdgeSet fe;
                const auto &cyc = face_cycles[fi];
                for (size_t i = 0; i < cyc.size(); ++i)
                    fe.emplace_back(cyc[i], cyc[(i + 1) % cyc.size()]);
                normalize(fe);
                if (fe == box_edges) {
                    forbidden = static_cast<int>(fi);
                    break;
                }
            }
        } else if (krig.simple_cycle) {
            forbidden = 0; // mirror faces; use only one
        }

        // augmented graph and clusters
        TildeGraph tg = build_tilde_graph(host_, plan.gx, plan.k_vertices,
                                          plan.k_edges, grid_edges_);
        std::vector<FaceCluster> clusters = tilde_clusters(tg);

        // face boundaries in tilde-local ids
        std::vector<FaceBoundary> boundaries;
        std::vector<int> host_local(host_.n(), -1);
        for (size_t i = 0; i < tg.to_host.size(); ++i)
            if (tg.to_host[i] >= 0) host_local[tg.to_host[i]] = static_cast<int>(i);
        for (const auto &cyc : face_cycles) {
            std::vector<int> local_cyc;
            for (int v : cyc) local_cyc.push_back(host_local[v]);
            boundaries.push_back(make_boundary(local_cyc, tg.g.n()));
        }

        // candidate faces and types
        for (FaceCluster &c : clusters) {
            for (size_t fi = 0; fi < face_cycles.size(); ++fi) {
                if (static_cast<int>(fi) == forbidden) continue;
                bool all_on = true;
                for (int v : c.delta)
                    if (boundaries[fi].pos[v] < 0) {
                        all_on = false;
                        break;
                    }
                if (all_on) c.faces.push_back(static_cast<int>(fi));
            }
            require(!c.faces.empty(), "InternalError", "cluster attaches to no face");
            if (c.delta.size() <= 1) c.type = 3;
            else if (c.faces.size() == 1) c.type = 1;
            else c.type = 2;
            if (c.type != 2) c.assigned_face = c.faces.front();
            if (c.faces.size() > 2) {
                // rigid skeletons allow at most two; trim deterministically
                c.faces.resize(2);
            }
        }

        // map type-2 clusters to their maximal 2-path
        std::vector<std::vector<int>> path_vertices; // host ids per 2-path
        if (!krig.simple_cycle)
            for (const auto &p : krig.two_paths) {
                std::vector<int> hp;
                for (int lv : p) hp.push_back(ks.to_root[lv]);
                path_vertices.push_back(hp);
            }
        for (FaceCluster &c : clusters) {
            if (c.type != 2) continue;
            // delta holds local ids of skeleton vertices; compare in host ids
            for (size_t pi = 0; pi < path_vertices.size(); ++pi) {
                VertexSet pv(path_vertices[pi]);
                bool inside = true;
                for (int v : c.delta)
                    if (!pv.contains(tg.to_host[v])) {
                        inside = false;
                        break;
                    }
                if (inside) {
                    c.two_path = static_cast<int>(pi);
                    break;
                }
            }
            if (c.two_path < 0) {
                // no single 2-path carries it: pin to the first candidate
                c.type = 1;
                c.assigned_face = c.faces.front();
            }
        }

        // pair cuts for face-sharing, conflicting pairs
        auto pair_cut = [&](const FaceCluster &a, const FaceCluster &b, int face) -> EdgeSet {
            if (clusters_independent(boundaries[face], local_delta(tg, a),
                                     local_delta(tg, b)))
                return {};
            bool a_grid = all_infinite(tg, a), b_grid = all_infinite(tg, b);
            EdgeSet cut;
            if (!a_grid) {
                auto r = run_pair(tg, a, b, boundaries[face]);
                if (!r.infeasible) cut = edge_union(cut, r.cut);
            }
            if (!b_grid) {
                auto r = run_pair(tg, b, a, boundaries[face]);
                if (!r.infeasible) cut = edge_union(cut, r.cut);
            }
            return cut;
        };

        int nc = static_cast<int>(clusters.size());
        std::map<std::pair<int, int>, EdgeSet> cuts;
        auto cut_between = [&](int i, int j, int face) -> const EdgeSet & {
            auto key = std::minmax(i, j);
            auto it = cuts.find(key);
            if (it == cuts.end())
                it = cuts.emplace(key, pair_cut(clusters[i], clusters[j], face)).first;
            return it->second;
        };

        // min-uncut assignment of type-2 clusters
        std::vector<int> type2;
        for (int i = 0; i < nc; ++i)
            if (clusters[i].type == 2) type2.push_back(i);
        if (!type2.empty()) {
            // variables: per used 2-path two face vars, plus one per cluster
            std::map<int, std::pair<int, int>> path_vars;
            std::vector<MinUncutConstraint> cons;
            int next_var = 0;
            std::map<int, int> cluster_var;
            for (int ci : type2) {
                int p = clusters[ci].two_path;
                if (!path_vars.count(p)) {
                    path_vars[p] = {next_var, next_var + 1};
                    cons.push_back({next_var, next_var + 1, -1});
                    next_var += 2;
                }
                cluster_var[ci] = next_var++;
            }
            for (size_t a = 0; a < type2.size(); ++a)
                for (size_t b = a + 1; b < type2.size(); ++b) {
                    int ca = type2[a], cb = type2[b];
                    if (clusters[ca].two_path != clusters[cb].two_path) continue;
                    int shared_face = clusters[ca].faces[0];
                    long long w = static_cast<long long>(cut_between(ca, cb, shared_face).size());
                    if (w > 0) cons.push_back({cluster_var[ca], cluster_var[cb], w});
                }
            for (int ci : type2) {
                for (int side = 0; side < 2; ++side) {
                    int face = clusters[ci].faces[side % clusters[ci].faces.size()];
                    long long w = 0;
                    for (int cj = 0; cj < nc; ++cj) {
                        if (clusters[cj].type != 1 || clusters[cj].assigned_face != face)
                            continue;
                        w += static_cast<long long>(cut_between(ci, cj, face).size());
                    }
                    int pv = side == 0 ? path_vars[clusters[ci].two_path].first
                                       : path_vars[clusters[ci].two_path].second;
                    if (w > 0) cons.push_back({cluster_var[ci], pv, w});
                }
            }
            OracleConfig mcfg = ocfg_;
            if (mcfg.mode == OracleMode::Exact && next_var > mcfg.exact_var_limit)
                mcfg.mode = OracleMode::Heuristic;
            auto mu = min_uncut(next_var, cons, mcfg);
            for (int ci : type2) {
                auto [v1, v2] = path_vars[clusters[ci].two_path];
                int face0 = clusters[ci].faces[0];
                int face1 = clusters[ci].faces.size() > 1 ? clusters[ci].faces[1] : face0;
                clusters[ci].assigned_face =
                    mu.assignment[cluster_var[ci]] == mu.assignment[v1] ? face0 : face1;
            }
        }

        // apply cuts between co-face pairs
        EdgeSet tilde_cut;
        for (int i = 0; i < nc; ++i)
            for (int j = i + 1; j < nc; ++j) {
                if (clusters[i].type == 3 || clusters[j].type == 3) continue;
                if (clusters[i].assigned_face != clusters[j].assigned_face) continue;
                tilde_cut = edge_union(tilde_cut, cut_between(i, j, clusters[i].assigned_face));
            }

        // split clusters, group until independent, then spawn
        std::vector<Instance> spawned;
        EdgeSet estar_host;
        for (const Edge &e : tilde_cut) estar_host.push_back(tg.host_edge.at(e));
        normalize(estar_host);
        require(edge_intersect(estar_host, grid_edges_).empty(), "InternalError",
                "conflict cuts touch grid edges");

        Graph residual = tg.g.without_edges(tilde_cut);
        std::map<int, std::vector<VertexSet>> by_face; // face -> groups (tilde ids)
        for (int i = 0; i < nc; ++i) {
            auto qs = connected_components(residual, clusters[i].vertices);
            auto &bucket = by_face[clusters[i].assigned_face];
            // grouping within one parent cluster until pairwise independent
            std::vector<VertexSet> groups = qs;
            bool merged = true;
            while (merged) {
                merged = false;
                for (size_t a = 0; a < groups.size() && !merged; ++a)
                    for (size_t b = a + 1; b < groups.size() && !merged; ++b) {
                        VertexSet da = delta_of(tg, groups[a]);
                        VertexSet db = delta_of(tg, groups[b]);
                        const FaceBoundary &fb = boundaries[clusters[i].assigned_face];
                        if (!clusters_independent(fb, da, db) ||
                            !clusters_independent(fb, db, da)) {
                            groups[a] = groups[a].set_union(groups[b]);
                            groups.erase(groups.begin() + b);
                            merged = true;
                        }
                    }
            }
            for (auto &g0 : groups) bucket.push_back(g0);
        }

        // exhaustive pairwise independence check per face
        for (auto &[face, groups] : by_face) {
            for (size_t a = 0; a < groups.size(); ++a)
                for (size_t b = a + 1; b < groups.size(); ++b) {
                    VertexSet da = delta_of(tg, groups[a]);
                    VertexSet db = delta_of(tg, groups[b]);
                    require(clusters_independent(boundaries[face], da, db) &&
                                clusters_independent(boundaries[face], db, da),
                            "InternalError", "grouping left interleaved clusters");
                }
        }

        // spawn: host vertices of each group, minus artificial and minus
        // crossing-grid interiors (those grids joined the skeleton)
        VertexSet z2_union;
        for (const auto &z : plan.z2) z2_union = z2_union.set_union(z);
        for (auto &[face, groups] : by_face) {
            for (const VertexSet &q : groups) {
                VertexSet qh;
                for (int v : q)
                    if (tg.to_host[v] >= 0) qh.insert(tg.to_host[v]);
                qh = qh.set_minus(z2_union);
                qh = qh.set_minus(VertexSet(face_cycles[face]));
                if (qh.empty()) continue;
                Instance child;
                child.vertices = qh;
                child.box = face_cycles[face];
                spawned.push_back(std::move(child));
            }
        }
        // the G' side spawned by the separator branch of step 2
        if (plan.gprime && !plan.gprime->empty()) {
            Instance child;
            child.vertices = *plan.gprime;
            spawned.push_back(std::move(child));
        }
        return {std::move(spawned), estar_host};
    }

    static VertexSet local_delta(const TildeGraph &tg, const FaceCluster &c) {
        return c.delta;
    }
    static VertexSet delta_of(const TildeGraph &tg, const VertexSet &group) {
        VertexSet d;
        for (int v : group)
            if (tg.artificial[v]) d.insert(tg.anchor[v]);
        return d;
    }
    static bool all_infinite(const TildeGraph &tg, const FaceCluster &c) {
        bool any = false;
        for (const Edge &e : tg.g.edges()) {
            if (!c.vertices.contains(e.u) || !c.vertices.contains(e.v)) continue;
            any = true;
            if (!edge_in(tg.infinite_edges, e)) return false;
        }
        return any;
    }
    PairCutResult run_pair(const TildeGraph &tg, const FaceCluster &a, const FaceCluster &b,
                           const FaceBoundary &fb) const {
        long long groups = a.vertices.size();
        long long segs = b.delta.size();
        if (groups <= 60 && segs <= 8 && groups * segs <= 320)
            return resolve_pair_lp(tg, a, b, fb);
        return heuristic_pair_cut(tg, a, b, fb);
    }

    void reroute_through_first_row(const VertexSet &z, SkeletonPlan &plan) {
        // matching edges of Z inside K identify the entry points
        CutProfile cp = cut_profile(host_, z);
        std::vector<int> entries;
        for (const Edge &e : cp.out)
            if (edge_in(plan.k_edges, e)) entries.push_back(z.contains(e.u) ? e.u : e.v);
        if (entries.size() != 2) return; // degenerate crossing: leave as is
        // drop K edges inside Z, add the unique first-row path between the
        // two entry vertices (entries are first-row vertices by construction)
        EdgeSet inside;
        for (const Edge &e : plan.k_edges)
            if (z.contains(e.u) && z.contains(e.v)) inside.push_back(e);
        normalize(inside);
        plan.k_edges = edge_minus(plan.k_edges, inside);
        Subgraph s = induced_subgraph(host_, z);
        // first row of the gadget: the interface row (vertices with matching
        // edges); the unique path inside the row between the two entries
        VertexSet first_row = cp.interface;
        std::vector<char> allowed(s.g.n(), 0);
        for (int v : first_row) allowed[s.local(v)] = 1;
        std::vector<int> path = bfs_path(s.g, s.local(entries[0]), s.local(entries[1]), allowed);
        require(!path.empty(), "InternalError", "no first-row path through the grid");
        for (size_t i = 0; i + 1 < path.size(); ++i)
            plan.k_edges.emplace_back(s.to_root[path[i]], s.to_root[path[i + 1]]);
        normalize(plan.k_edges);
        VertexSet kv;
        for (const Edge &e : plan.k_edges) {
            kv.insert(e.u);
            kv.insert(e.v);
        }
        plan.k_vertices = kv;
    }
};

inline EngineResult run_engine(const Graph &host, const GridFamily &zs, const Parameters &par,
                               const OracleConfig &ocfg, uint64_t seed) {
    PipelineEngine engine(host, zs, par, ocfg, seed);
    return engine.run();
}

} // namespace planarize
