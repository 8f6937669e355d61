#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "planarize/exhaustive.hpp"
#include "planarize/graph.hpp"
#include "planarize/planarity.hpp"

namespace planarize {

/// Heuristic drawing by edge reinsertion: embed the planar residual, then
/// insert each removed edge along a shortest path in the face-adjacency
/// (dual) graph of the current drawing, planarizing each crossing with a
/// dummy vertex so later insertions see it.
struct DrawingReport {
    Graph planarized;                  // residual + dummy crossing vertices
    int n_original = 0;                // vertices < n_original are real
    std::vector<std::pair<Edge, int>> insertions; // per edge, crossing count
    long long total_crossings = 0;
    std::vector<std::pair<Edge, Edge>> crossings;  // (inserted, crossed)
};

inline DrawingReport reinsert_and_draw(const Graph &g, const EdgeSet &e_star) {
    Graph residual = g.without_edges(e_star);
    require(is_planar(residual), "NotPlanarResidual", "residual graph must be planar");

    DrawingReport rep;
    rep.n_original = g.n();
    Graph work = residual;
    std::vector<Edge> dummy_origin; // for each dummy vertex: the crossed edge
    // original identity of each current edge (crossed edges keep their origin
    // through subdivision)
    std::map<Edge, Edge> origin;
    for (const Edge &e : residual.edges()) origin[e] = e;

    EdgeSet todo = e_star; // sorted: deterministic insertion order
    for (const Edge &ins : todo) {
        RotationSystem rs = planar_embedding(work);
        int nf = rs.face_count();
        std::vector<VertexSet> face_vs;
        for (const Face &f : rs.faces) face_vs.push_back(f.vertex_set());
        std::vector<EdgeSet> face_es;
        for (const Face &f : rs.faces) face_es.push_back(f.edge_set());

        // BFS over faces from the faces containing ins.u
        std::vector<int> dist(nf, -1), via_face(nf, -1);
        std::vector<Edge> via_edge(nf, Edge(0, 1));
        std::vector<int> queue;
        for (int f = 0; f < nf; ++f)
            if (face_vs[f].contains(ins.u)) {
                dist[f] = 0;
                queue.push_back(f);
            }
        int goal = -1;
        for (int f : queue)
            if (face_vs[f].contains(ins.v)) goal = f;
        for (size_t qi = 0; qi < queue.size() && goal < 0; ++qi) {
            int f = queue[qi];
            for (int f2 = 0; f2 < nf && goal < 0; ++f2) {
                if (dist[f2] != -1 || f2 == f) continue;
                EdgeSet shared = edge_intersect(face_es[f], face_es[f2]);
                if (shared.empty()) continue;
                dist[f2] = dist[f] + 1;
                via_face[f2] = f;
                via_edge[f2] = shared.front();
                queue.push_back(f2);
                if (face_vs[f2].contains(ins.v)) goal = f2;
            }
        }
        require(goal >= 0, "InternalError", "no dual path for edge insertion");

        // realize: subdivide each crossed edge with a dummy vertex and route
        std::vector<Edge> crossed;
        for (int f = goal; via_face[f] != -1; f = via_face[f]) crossed.push_back(via_edge[f]);
        std::reverse(crossed.begin(), crossed.end());

        EdgeSet es = work.edges();
        int next = work.n();
        int prev = ins.u;
        for (const Edge &x : crossed) {
            int w = next++;
            dummy_origin.push_back(origin.at(x));
            rep.crossings.emplace_back(ins, origin.at(x));
            es = edge_minus(es, {x});
            Edge xa(x.u, w), xb(w, x.v);
            es.push_back(xa);
            es.push_back(xb);
            origin[xa] = origin.at(x);
            origin[xb] = origin.at(x);
            es.emplace_back(prev, w);
            origin[Edge(prev, w)] = ins;
            prev = w;
        }
        es.emplace_back(prev, ins.v);
        origin[Edge(prev, ins.v)] = ins;
        normalize(es);
        work = Graph(next, es);
        require(is_planar(work), "InternalError", "planarized insertion is not planar");
        rep.insertions.emplace_back(ins, static_cast<int>(crossed.size()));
        rep.total_crossings += static_cast<long long>(crossed.size());
    }
    rep.planarized = work;
    return rep;
}

/// Lower-bound sanity report: the skewness bound m - (3n - 6) must never
/// exceed |E*|, and no drawing may have fewer crossings than the bound.
struct SanityReport {
    long long skewness_bound = 0;
    bool planarization_ok = true;
    bool crossings_ok = true;
    double ajtai_leighton = 0.0; // informational: m^3 / (64 n^2) when m >= 4n
};

inline SanityReport sanity_lower_bounds(const Graph &g, long long e_star_size,
                                        long long crossings) {
    SanityReport r;
    r.skewness_bound = skewness_lower_bound(g);
    r.planarization_ok = e_star_size >= r.skewness_bound;
    r.crossings_ok = crossings >= r.skewness_bound;
    if (g.m() >= 4 * g.n() && g.n() > 0)
        r.ajtai_leighton = std::pow(static_cast<double>(g.m()), 3.0) /
                           (64.0 * static_cast<double>(g.n()) * static_cast<double>(g.n()));
    return r;
}

/// Barycentric (Tutte-style) layout pinned on the largest face, then an SVG
/// with crossing dummies marked. Purely presentational.
inline std::string render_svg(const DrawingReport &rep) {
    const Graph &w = rep.planarized;
    int n = w.n();
    std::vector<double> x(n, 0.0), y(n, 0.0);
    std::vector<char> pinned(n, 0);
    if (n > 0) {
        RotationSystem rs = planar_embedding(w);
        // pin the largest face on a circle
        size_t best = 0, best_len = 0;
        for (size_t f = 0; f < rs.faces.size(); ++f) {
            size_t len = 0;
            for (const auto &walk : rs.faces[f].walks) len += walk.size();
            if (len > best_len) {
                best_len = len;
                best = f;
            }
        }
        std::vector<int> outer;
        for (const auto &walk : rs.faces[best].walks)
            for (int v : walk)
                if (std::find(outer.begin(), outer.end(), v) == outer.end()) outer.push_back(v);
        int k = static_cast<int>(outer.size());
        for (int i = 0; i < k; ++i) {
            double a = 2.0 * 3.14159265358979 * i / std::max(1, k);
            x[outer[i]] = 400 + 380 * std::cos(a);
            y[outer[i]] = 400 + 380 * std::sin(a);
            pinned[outer[i]] = 1;
        }
        for (int it = 0; it < 300; ++it) {
            for (int v = 0; v < n; ++v) {
                if (pinned[v] || w.degree(v) == 0) continue;
                double sx = 0, sy = 0;
                for (int u : w.neighbors(v)) {
                    sx += x[u];
                    sy += y[u];
                }
                x[v] = sx / w.degree(v);
                y[v] = sy / w.degree(v);
            }
        }
        // isolated vertices on a side rail
        int rail = 0;
        for (int v = 0; v < n; ++v)
            if (w.degree(v) == 0) {
                x[v] = 20;
                y[v] = 20 + 24 * rail++;
            }
    }
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
           "viewBox=\"0 0 800 800\">\n";
    svg << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    auto px = [&](double t) {
        std::ostringstream o;
        o.precision(2);
        o << std::fixed << t;
        return o.str();
    };
    for (const Edge &e : w.edges())
        svg << "<line x1=\"" << px(x[e.u]) << "\" y1=\"" << px(y[e.u]) << "\" x2=\""
            << px(x[e.v]) << "\" y2=\"" << px(y[e.v])
            << "\" stroke=\"#345\" stroke-width=\"1\"/>\n";
    for (int v = 0; v < n; ++v) {
        if (v < rep.n_original)
            svg << "<circle cx=\"" << px(x[v]) << "\" cy=\"" << px(y[v])
                << "\" r=\"3\" fill=\"#1b6\"/>\n";
        else
            svg << "<g stroke=\"#c22\" stroke-width=\"1.5\"><line x1=\"" << px(x[v] - 4)
                << "\" y1=\"" << px(y[v] - 4) << "\" x2=\"" << px(x[v] + 4) << "\" y2=\""
                << px(y[v] + 4) << "\"/><line x1=\"" << px(x[v] - 4) << "\" y1=\""
                << px(y[v] + 4) << "\" x2=\"" << px(x[v] + 4) << "\" y2=\"" << px(y[v] - 4)
                << "\"/></g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace planarize
