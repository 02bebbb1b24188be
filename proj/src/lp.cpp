#include "dualsmpc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace dualsmpc::lp {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
    int m = 0;
    int n_total = 0;
    std::vector<Vec> a;
    Vec rhs;
    std::vector<int> basis;
    Vec red;  // reduced-cost row, maintained across pivots

    void pivot(int row, int col, bool update_red) {
        const double p = a[row][col];
        for (double& v : a[row]) v /= p;
        rhs[row] /= p;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = a[i][col];
            if (f == 0.0) continue;
            for (int j = 0; j < n_total; ++j) a[i][j] -= f * a[row][j];
            rhs[i] -= f * rhs[row];
            if (rhs[i] < 0.0 && rhs[i] > -1e-12) rhs[i] = 0.0;
        }
        if (update_red) {
            const double f = red[col];
            if (f != 0.0)
                for (int j = 0; j < n_total; ++j) red[j] -= f * a[row][j];
        }
        basis[row] = col;
    }

    void compute_reduced(const Vec& cost) {
        red = cost;
        for (int i = 0; i < m; ++i) {
            const double cb = cost[basis[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j < n_total; ++j) red[j] -= cb * a[i][j];
        }
    }
};

// Dantzig pricing (largest reduced cost) with a permanent switch to Bland's
// rule after a run of degenerate pivots, which rules out cycling. The ratio
// test breaks ties toward the lowest basic index. Columns >= max_col may not
// enter. Returns false when unbounded.
bool run_simplex(Tableau& t, const Vec& cost, int max_col) {
    t.compute_reduced(cost);
    bool bland = false;
    int degenerate_run = 0;
    const int stall_limit = 64 + 2 * t.m;
    for (;;) {
        int enter = -1;
        if (bland) {
            for (int j = 0; j < max_col; ++j) {
                if (t.red[j] > kEps) {
                    enter = j;
                    break;
                }
            }
        } else {
            double best = kEps;
            for (int j = 0; j < max_col; ++j) {
                if (t.red[j] > best) {
                    best = t.red[j];
                    enter = j;
                }
            }
        }
        if (enter < 0) return true;

        int leave = -1;
        double best = 0.0;
        for (int i = 0; i < t.m; ++i) {
            if (t.a[i][enter] <= kEps) continue;
            const double ratio = t.rhs[i] / t.a[i][enter];
            if (leave < 0 || ratio < best - 1e-12 ||
                (std::abs(ratio - best) <= 1e-12 && t.basis[i] < t.basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0) return false;

        if (best <= 1e-12) {
            if (++degenerate_run > stall_limit) bland = true;
        } else {
            degenerate_run = 0;
        }
        t.pivot(leave, enter, true);
    }
}

}  // namespace

Result maximize(const Vec& objective, const std::vector<Constraint>& constraints) {
    const int n = static_cast<int>(objective.size());
    const int m = static_cast<int>(constraints.size());

    // The pruning filters solve millions of small instances, so every
    // workspace is reused across calls instead of reallocated.
    static thread_local Vec rhs;
    static thread_local std::vector<Relation> rel;
    static thread_local std::vector<char> flipped;
    static thread_local Tableau t;
    static thread_local std::vector<int> dual_col;
    static thread_local Vec dual_sign;
    static thread_local Vec phase1, cost;
    static thread_local std::vector<char> alive;

    // Normalized rows: nonnegative right-hand sides, and no >= rows with a
    // zero right-hand side (flipped to <=, where the slack basis is already
    // feasible and no artificial variable is needed).
    rhs.resize(m);
    rel.resize(m);
    flipped.assign(m, 0);
    for (int i = 0; i < m; ++i) {
        const Constraint& c = constraints[i];
        rhs[i] = c.rhs;
        rel[i] = c.rel;
        if (rhs[i] < 0.0 || (rhs[i] == 0.0 && rel[i] == Relation::greater_equal)) {
            flipped[i] = 1;
            rhs[i] = -rhs[i];
            if (rel[i] == Relation::less_equal)
                rel[i] = Relation::greater_equal;
            else if (rel[i] == Relation::greater_equal)
                rel[i] = Relation::less_equal;
        }
    }

    int n_slack = 0, n_art = 0;
    for (int i = 0; i < m; ++i) {
        if (rel[i] != Relation::equal) ++n_slack;
        if (rel[i] != Relation::less_equal) ++n_art;
    }

    t.m = m;
    t.n_total = n + n_slack + n_art;
    t.a.resize(m);
    for (Vec& row : t.a) row.assign(t.n_total, 0.0);
    t.rhs = rhs;
    t.basis.assign(m, -1);

    // Column whose reduced cost carries constraint i's dual multiplier,
    // and the sign it carries it with.
    dual_col.assign(m, -1);
    dual_sign.assign(m, 0.0);

    const int first_art = n + n_slack;
    int slack_col = n, art_col = first_art;
    for (int i = 0; i < m; ++i) {
        const Constraint& c = constraints[i];
        const double sign = flipped[i] ? -1.0 : 1.0;
        const int limit = std::min(n, static_cast<int>(c.coeffs.size()));
        for (int j = 0; j < limit; ++j) t.a[i][j] = sign * c.coeffs[j];
        switch (rel[i]) {
            case Relation::less_equal:
                t.a[i][slack_col] = 1.0;
                dual_col[i] = slack_col;
                dual_sign[i] = -1.0;
                t.basis[i] = slack_col++;
                break;
            case Relation::greater_equal:
                t.a[i][slack_col] = -1.0;
                dual_col[i] = slack_col;
                dual_sign[i] = 1.0;
                ++slack_col;
                t.a[i][art_col] = 1.0;
                t.basis[i] = art_col++;
                break;
            case Relation::equal:
                t.a[i][art_col] = 1.0;
                dual_col[i] = art_col;
                dual_sign[i] = -1.0;
                t.basis[i] = art_col++;
                break;
        }
    }

    // Constraints that were sign-flipped carry the opposite multiplier.
    for (int i = 0; i < m; ++i)
        if (flipped[i]) dual_sign[i] = -dual_sign[i];

    alive.assign(m, 1);
    if (n_art > 0) {
        phase1.assign(t.n_total, 0.0);
        for (int j = first_art; j < t.n_total; ++j) phase1[j] = -1.0;
        run_simplex(t, phase1, t.n_total);

        double infeas = 0.0;
        for (int i = 0; i < t.m; ++i)
            if (t.basis[i] >= first_art) infeas += t.rhs[i];
        if (infeas > 1e-7) return {Status::infeasible, 0.0, {}, {}};

        // Drive leftover artificials out of the basis; a row that cannot be
        // pivoted is redundant and gets dropped.
        static thread_local std::vector<int> row_origin;
        row_origin.resize(m);
        for (int i = 0; i < m; ++i) row_origin[i] = i;
        for (int i = t.m - 1; i >= 0; --i) {
            if (t.basis[i] < first_art) continue;
            int col = -1;
            for (int j = 0; j < first_art; ++j) {
                if (std::abs(t.a[i][j]) > kEps) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                t.pivot(i, col, false);
            } else {
                alive[row_origin[i]] = 0;
                t.a.erase(t.a.begin() + i);
                t.rhs.erase(t.rhs.begin() + i);
                t.basis.erase(t.basis.begin() + i);
                row_origin.erase(row_origin.begin() + i);
                --t.m;
            }
        }
    }

    cost.assign(t.n_total, 0.0);
    for (int j = 0; j < n; ++j) cost[j] = objective[j];
    if (!run_simplex(t, cost, first_art)) return {Status::unbounded, 0.0, {}, {}};

    Result res;
    res.status = Status::optimal;
    res.x.assign(n, 0.0);
    for (int i = 0; i < t.m; ++i) {
        if (t.basis[i] < n) res.x[t.basis[i]] = t.rhs[i];
    }
    res.objective = dot(objective, res.x);
    res.duals.assign(m, 0.0);
    for (int i = 0; i < m; ++i)
        if (alive[i]) res.duals[i] = dual_sign[i] * t.red[dual_col[i]];
    return res;
}

}  // namespace dualsmpc::lp
