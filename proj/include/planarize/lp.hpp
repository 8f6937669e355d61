#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "planarize/errors.hpp"

namespace planarize {

/// Small dense two-phase simplex: minimize c.x subject to linear rows and
/// x >= 0. Dantzig pricing with a switch to Bland's rule as an anti-cycling
/// guard. Instances in this project stay in the low thousands of nonzeros.
class LinearProgram {
public:
    enum Rel { LE, GE, EQ };

    struct Result {
        bool feasible = false;
        double objective = 0.0;
        std::vector<double> x;
    };

    int add_var(double cost) {
        costs_.push_back(cost);
        return static_cast<int>(costs_.size()) - 1;
    }

    void add_constraint(std::vector<std::pair<int, double>> terms, Rel rel, double rhs) {
        rows_.push_back({std::move(terms), rel, rhs});
    }

    Result solve() const {
        int n = static_cast<int>(costs_.size());
        int m = static_cast<int>(rows_.size());

        // build standard-form rows with slack/artificial columns
        int total = n;
        std::vector<int> slack_col(m, -1), art_col(m, -1);
        for (int i = 0; i < m; ++i) {
            double rhs = rows_[i].rhs;
            Rel rel = rows_[i].rel;
            if (rhs < 0) rel = rel == LE ? GE : (rel == GE ? LE : EQ);
            if (rel == LE) slack_col[i] = total++;
            else if (rel == GE) { slack_col[i] = total++; art_col[i] = -2; }
            else art_col[i] = -2;
        }
        for (int i = 0; i < m; ++i)
            if (art_col[i] == -2) art_col[i] = total++;

        std::vector<std::vector<double>> a(m, std::vector<double>(total + 1, 0.0));
        std::vector<int> basis(m, -1);
        for (int i = 0; i < m; ++i) {
            double sign = rows_[i].rhs < 0 ? -1.0 : 1.0;
            for (auto [j, c] : rows_[i].terms) a[i][j] += sign * c;
            a[i][total] = sign * rows_[i].rhs;
            Rel rel = rows_[i].rel;
            if (rows_[i].rhs < 0) rel = rel == LE ? GE : (rel == GE ? LE : EQ);
            if (slack_col[i] >= 0) a[i][slack_col[i]] = rel == LE ? 1.0 : -1.0;
            if (art_col[i] >= 0) {
                a[i][art_col[i]] = 1.0;
                basis[i] = art_col[i];
            } else {
                basis[i] = slack_col[i];
            }
        }

        // phase 1: minimize the sum of artificials
        std::vector<double> obj1(total, 0.0);
        bool any_art = false;
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0) { obj1[art_col[i]] = 1.0; any_art = true; }
        Result res;
        if (any_art) {
            double v1 = run_simplex(a, basis, obj1, total);
            if (v1 > 1e-7) return res; // infeasible
            // pivot remaining artificials out of the basis where possible
            for (int i = 0; i < m; ++i) {
                if (art_col[i] < 0 || basis[i] != art_col[i]) continue;
                int enter = -1;
                for (int j = 0; j < total; ++j) {
                    if (obj1[j] == 1.0) continue; // artificial column
                    if (std::fabs(a[i][j]) > 1e-9) { enter = j; break; }
                }
                if (enter >= 0) pivot(a, basis, i, enter, total);
            }
        }

        // phase 2: forbid artificial columns by zeroing them out
        std::vector<double> obj2(total, 0.0);
        for (int j = 0; j < n; ++j) obj2[j] = costs_[j];
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0)
                for (int r = 0; r < m; ++r) a[r][art_col[i]] = (basis[r] == art_col[i]) ? 1.0 : 0.0;
        std::vector<char> banned(total, 0);
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0) banned[art_col[i]] = 1;

        double v2 = run_simplex(a, basis, obj2, total, &banned);
        res.feasible = true;
        res.objective = v2;
        res.x.assign(n, 0.0);
        for (int i = 0; i < m; ++i)
            if (basis[i] >= 0 && basis[i] < n) res.x[basis[i]] = a[i][total];
        return res;
    }

private:
    struct Row {
        std::vector<std::pair<int, double>> terms;
        Rel rel;
        double rhs;
    };

    static void pivot(std::vector<std::vector<double>> &a, std::vector<int> &basis, int r,
                      int c, int total) {
        int m = static_cast<int>(a.size());
        double p = a[r][c];
        for (int j = 0; j <= total; ++j) a[r][j] /= p;
        for (int i = 0; i < m; ++i) {
            if (i == r || std::fabs(a[i][c]) < 1e-12) continue;
            double f = a[i][c];
            for (int j = 0; j <= total; ++j) a[i][j] -= f * a[r][j];
        }
        basis[r] = c;
    }

    static double run_simplex(std::vector<std::vector<double>> &a, std::vector<int> &basis,
                              const std::vector<double> &cost, int total,
                              const std::vector<char> *banned = nullptr) {
        int m = static_cast<int>(a.size());
        // reduced costs maintained in a dedicated row
        std::vector<double> z(total + 1, 0.0);
        auto rebuild_z = [&]() {
            for (int j = 0; j <= total; ++j) z[j] = (j < total) ? cost[j] : 0.0;
            for (int i = 0; i < m; ++i) {
                double cb = basis[i] >= 0 ? cost[basis[i]] : 0.0;
                if (cb == 0.0) continue;
                for (int j = 0; j <= total; ++j) z[j] -= cb * a[i][j];
            }
        };
        rebuild_z();
        long iter = 0;
        const long bland_after = 4000, hard_cap = 300000;
        while (true) {
            ++iter;
            if (iter > hard_cap) fail("InternalError", "simplex iteration cap exceeded");
            bool bland = iter > bland_after;
            int enter = -1;
            double best = -1e-9;
            for (int j = 0; j < total; ++j) {
                if (banned && (*banned)[j]) continue;
                if (z[j] < best) {
                    if (bland) { enter = j; break; }
                    best = z[j];
                    enter = j;
                }
            }
            if (enter < 0) break;
            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                if (a[i][enter] > 1e-9) {
                    double ratio = a[i][total] / a[i][enter];
                    if (leave < 0 || ratio < best_ratio - 1e-12 ||
                        (std::fabs(ratio - best_ratio) <= 1e-12 && basis[i] < basis[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) fail("Unbounded", "LP is unbounded");
            pivot(a, basis, leave, enter, total);
            // update reduced costs by the pivot row
            double f = z[enter];
            if (std::fabs(f) > 1e-15)
                for (int j = 0; j <= total; ++j) z[j] -= f * a[leave][j];
            if (iter % 512 == 0) rebuild_z(); // refresh against drift
        }
        double obj = 0.0;
        for (int i = 0; i < m; ++i)
            if (basis[i] >= 0 && basis[i] < static_cast<int>(cost.size()))
                obj += cost[basis[i]] * a[i][static_cast<int>(total)];
        return obj;
    }

    std::vector<double> costs_;
    std::vector<Row> rows_;
};

} // namespace planarize
