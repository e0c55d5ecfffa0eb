#include "panelid/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace panelid {

void LinearProgram::validate() const {
    if (n_vars < 0) throw MalformedLP("negative variable count");
    if (!objective.empty() && static_cast<int>(objective.size()) != n_vars)
        throw MalformedLP("objective length " + std::to_string(objective.size()) +
                          " does not match " + std::to_string(n_vars) + " variables");
    for (double c : objective)
        if (!std::isfinite(c)) throw MalformedLP("objective coefficient is not finite");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SparseRow& r = rows[i];
        if (!std::isfinite(r.rhs))
            throw MalformedLP("row " + std::to_string(i) + " has non-finite rhs");
        for (const auto& [j, v] : r.coeffs) {
            if (j < 0 || j >= n_vars)
                throw MalformedLP("row " + std::to_string(i) + " references variable " +
                                  std::to_string(j));
            if (!std::isfinite(v))
                throw MalformedLP("row " + std::to_string(i) + " has non-finite coefficient");
        }
    }
}

namespace {

constexpr double kPivotEps = 1e-11;
constexpr int kDegenerateCap = 64; // consecutive zero-progress pivots before Bland's rule

// Full-tableau two-phase simplex over the row-scaled, sign-flipped system.
struct Tableau {
    int m, n;                    // rows, original columns
    std::vector<double> a;       // m x (n + m + 1), artificials then rhs
    std::vector<double> z;       // cost row, n + m entries
    std::vector<int> basis;      // basis[i] = column basic in row i
    std::vector<double> scale;   // original-row divisor
    std::vector<double> flip;    // +-1 applied after scaling
    int iterations = 0;
    int degenerate_streak = 0;
    bool bland = false;

    int width() const { return n + m + 1; }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * width() + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * width() + j]; }
    double& rhs(int i) { return a[static_cast<std::size_t>(i) * width() + n + m]; }
    double rhs(int i) const { return a[static_cast<std::size_t>(i) * width() + n + m]; }
};

Tableau build_tableau(const LinearProgram& lp) {
    Tableau t;
    t.m = static_cast<int>(lp.rows.size());
    t.n = lp.n_vars;
    t.a.assign(static_cast<std::size_t>(t.m) * t.width(), 0.0);
    t.basis.resize(t.m);
    t.scale.resize(t.m);
    t.flip.resize(t.m);
    std::vector<double> dense(t.n, 0.0);
    for (int i = 0; i < t.m; ++i) {
        std::fill(dense.begin(), dense.end(), 0.0);
        for (const auto& [j, v] : lp.rows[i].coeffs) dense[j] += v;
        double s = 0.0;
        for (double v : dense) s = std::max(s, std::fabs(v));
        if (s == 0.0) s = 1.0;
        double b = lp.rows[i].rhs / s;
        double f = b < 0.0 ? -1.0 : 1.0;
        t.scale[i] = s;
        t.flip[i] = f;
        for (int j = 0; j < t.n; ++j) t.at(i, j) = f * dense[j] / s;
        t.at(i, t.n + i) = 1.0;
        t.rhs(i) = f * b;
        t.basis[i] = t.n + i;
    }
    return t;
}

// One pivot on (row, col) over the tableau and the cost row.
void pivot(Tableau& t, int row, int col) {
    const int W = t.width();
    double* pr = &t.a[static_cast<std::size_t>(row) * W];
    const double inv = 1.0 / pr[col];
    for (int j = 0; j < W; ++j) pr[j] *= inv;
    pr[col] = 1.0;
    for (int i = 0; i < t.m; ++i) {
        if (i == row) continue;
        double* ri = &t.a[static_cast<std::size_t>(i) * W];
        const double f = ri[col];
        if (f == 0.0) continue;
        for (int j = 0; j < W; ++j) ri[j] -= f * pr[j];
        ri[col] = 0.0;
    }
    const double f = t.z[col];
    if (f != 0.0) {
        for (int j = 0; j < t.n + t.m; ++j) t.z[j] -= f * pr[j];
        t.z[col] = 0.0;
    }
    t.basis[row] = col;
    ++t.iterations;
}

// cost[j] over columns eligible to enter; artificials are barred in phase 2
// by passing eligible_cols < n + m.
template <typename OnLimit>
bool price_and_pivot(Tableau& t, int eligible_cols, int max_iterations, OnLimit on_limit) {
    for (;;) {
        int col = -1;
        if (!t.bland) {
            double best = -kPivotEps;
            for (int j = 0; j < eligible_cols; ++j)
                if (t.z[j] < best) { best = t.z[j]; col = j; }
        } else {
            for (int j = 0; j < eligible_cols; ++j)
                if (t.z[j] < -kPivotEps) { col = j; break; }
        }
        if (col < 0) return true; // optimal for this phase
        int row = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < t.m; ++i) {
            const double aij = t.at(i, col);
            if (aij <= kPivotEps) continue;
            const double ratio = t.rhs(i) / aij;
            if (row < 0 || ratio < best_ratio - 1e-15 ||
                (std::fabs(ratio - best_ratio) <= 1e-15 && t.basis[i] < t.basis[row])) {
                row = i;
                best_ratio = ratio;
            }
        }
        if (row < 0) return false; // unbounded direction on this column
        if (best_ratio <= 1e-12) {
            if (++t.degenerate_streak >= kDegenerateCap) t.bland = true;
        } else {
            t.degenerate_streak = 0;
        }
        if (t.iterations >= max_iterations) on_limit();
        pivot(t, row, col);
    }
}

std::vector<double> extract_x(const Tableau& t) {
    std::vector<double> x(t.n, 0.0);
    for (int i = 0; i < t.m; ++i)
        if (t.basis[i] < t.n) x[t.basis[i]] = std::max(0.0, t.at(i, t.n + t.m));
    return x;
}

// Multipliers of the scaled system read off the artificial columns, mapped
// back to original row units (undo the flip and the scaling divisor).
std::vector<double> extract_duals(const Tableau& t, const std::vector<double>& phase_cost,
                                  double sign) {
    std::vector<double> u(t.m, 0.0);
    for (int i = 0; i < t.m; ++i) {
        // reduced cost of artificial i: cost_art - u_i, with cost_art from phase_cost
        const double scaled = phase_cost[t.n + i] - t.z[t.n + i];
        u[i] = sign * scaled * t.flip[i] / t.scale[i];
    }
    return u;
}

double objective_value(const Tableau& t, const std::vector<double>& cost) {
    double v = 0.0;
    for (int i = 0; i < t.m; ++i) v += cost[t.basis[i]] * t.rhs(i);
    return v;
}

} // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& opt) {
    lp.validate();
    Tableau t = build_tableau(lp);
    const int N = t.n + t.m;

    // phase one: minimize the artificial mass
    std::vector<double> cost1(N, 0.0);
    for (int i = 0; i < t.m; ++i) cost1[t.n + i] = 1.0;
    t.z.assign(N, 0.0);
    for (int j = 0; j < t.n; ++j)
        for (int i = 0; i < t.m; ++i) t.z[j] -= t.at(i, j);

    auto on_limit = [&] {
        LpSolution partial;
        partial.status = LpStatus::Infeasible;
        partial.x = extract_x(t);
        partial.phase1_objective = std::max(0.0, objective_value(t, cost1));
        partial.iterations = t.iterations;
        throw IterationLimit("pivot cap " + std::to_string(opt.max_iterations) + " reached",
                             std::move(partial));
    };

    price_and_pivot(t, N, opt.max_iterations, on_limit); // sum of artificials never unbounded

    LpSolution out;
    out.phase1_objective = std::max(0.0, objective_value(t, cost1));
    out.iterations = t.iterations;
    if (out.phase1_objective >= opt.tol) {
        out.status = LpStatus::Infeasible;
        out.marginal = out.phase1_objective <= 10.0 * opt.tol;
        out.x = extract_x(t);
        out.duals = extract_duals(t, cost1, 1.0);
        return out;
    }

    if (lp.objective.empty()) {
        out.status = LpStatus::Feasible;
        out.x = extract_x(t);
        out.duals = extract_duals(t, cost1, 1.0);
        return out;
    }

    // Drive artificials still basic at level zero out of the basis; a row
    // with no eligible pivot is linearly dependent and stays fixed at zero.
    for (int i = 0; i < t.m; ++i) {
        if (t.basis[i] < t.n) continue;
        int col = -1;
        double best = kPivotEps;
        for (int j = 0; j < t.n; ++j)
            if (std::fabs(t.at(i, j)) > best) { best = std::fabs(t.at(i, j)); col = j; }
        if (col >= 0) pivot(t, i, col);
    }

    // phase two over the original columns; artificials stay barred
    const double sense = lp.sense == ObjectiveSense::Minimize ? 1.0 : -1.0;
    std::vector<double> cost2(N, 0.0);
    for (int j = 0; j < t.n; ++j) cost2[j] = sense * lp.objective[j];
    t.z.assign(N, 0.0);
    for (int j = 0; j < N; ++j) {
        t.z[j] = cost2[j];
        for (int i = 0; i < t.m; ++i)
            if (cost2[t.basis[i]] != 0.0) t.z[j] -= cost2[t.basis[i]] * t.at(i, j);
    }
    for (int i = 0; i < t.m; ++i) t.z[t.basis[i]] = 0.0;
    t.degenerate_streak = 0;

    const bool bounded = price_and_pivot(t, t.n, opt.max_iterations, on_limit);
    out.iterations = t.iterations;
    out.x = extract_x(t);
    if (!bounded) {
        out.status = LpStatus::Unbounded;
        return out;
    }
    out.status = LpStatus::Optimal;
    out.objective = sense * objective_value(t, cost2);
    out.duals = extract_duals(t, cost2, sense);
    return out;
}

std::string export_lp_text(const LinearProgram& lp) {
    lp.validate();
    auto number = [](double v) {
        char b[40];
        std::snprintf(b, sizeof(b), "%.17g", v);
        return std::string(b);
    };
    auto terms = [&](const std::vector<std::pair<int, double>>& coeffs) {
        std::string s;
        for (const auto& [j, v] : coeffs) {
            s += v < 0.0 ? " - " : " + ";
            s += number(std::fabs(v));
            s += " psi_" + std::to_string(j);
        }
        return s.empty() ? std::string(" 0") : s;
    };
    std::string out = lp.sense == ObjectiveSense::Maximize && !lp.objective.empty()
                          ? "Maximize\n"
                          : "Minimize\n";
    if (lp.objective.empty()) {
        out += " obj: 0\n";
    } else {
        std::vector<std::pair<int, double>> oc;
        for (int j = 0; j < lp.n_vars; ++j)
            if (lp.objective[j] != 0.0) oc.emplace_back(j, lp.objective[j]);
        out += " obj:" + terms(oc) + "\n";
    }
    out += "Subject To\n";
    for (std::size_t i = 0; i < lp.rows.size(); ++i)
        out += " c" + std::to_string(i) + ":" + terms(lp.rows[i].coeffs) +
               " = " + number(lp.rows[i].rhs) + "\n";
    out += "Bounds\n";
    for (int j = 0; j < lp.n_vars; ++j) out += " psi_" + std::to_string(j) + " >= 0\n";
    out += "End\n";
    return out;
}

} // namespace panelid
