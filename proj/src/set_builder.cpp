#include "panelid/set_builder.hpp"

#include "panelid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace panelid {

const char* mode_name(ExogeneityMode m) {
    return m == ExogeneityMode::Predetermined ? "predetermined" : "strict";
}

int PsiLayout::index(int x1, unsigned xmask, unsigned ymask, int k) const {
    const int cell = static_cast<int>((xmask << (T - 1)) | ymask);
    return (x1 ? 0 : block_vars()) + cell * K + k;
}

PsiLayout::Cell PsiLayout::decode(int flat) const {
    Cell c;
    c.x1 = flat < block_vars() ? 1 : 0;
    const int r = flat - (c.x1 ? 0 : block_vars());
    c.k = r % K;
    const unsigned cell = static_cast<unsigned>(r / K);
    c.ymask = cell & ((1u << (T - 1)) - 1u);
    c.xmask = cell >> (T - 1);
    return c;
}

namespace {

double outcome_term(const LinkSpec& link, double u, int y) {
    const double f = evaluate(link, u);
    return y ? f : 1.0 - f;
}

void require_candidate_in_domain(const LinkSpec& link, double theta_tilde,
                                 const HeterogeneityGrid& grid) {
    for (double a : grid.points)
        for (int x = 0; x <= 1; ++x)
            if (!in_domain(link, theta_tilde * x + a))
                throw DomainError("candidate coefficient " + std::to_string(theta_tilde) +
                                  " leaves the link domain at support point " + std::to_string(a));
}

void check_set_inputs(const OutcomeVector& Q, const HeterogeneityGrid& grid) {
    if (Q.T < kMinPeriods || Q.T > kMaxPeriods)
        throw CapExceeded("observed distribution covers " + std::to_string(Q.T) +
                          " periods; supported range is [" + std::to_string(kMinPeriods) + ", " +
                          std::to_string(kMaxPeriods) + "]");
    grid.validate();
    Q.validate();
}

} // namespace

LinearProgram build_feasibility_lp(double theta_tilde, const OutcomeVector& Q,
                                   const LinkSpec& link, const HeterogeneityGrid& grid,
                                   ExogeneityMode mode, ApeObjective objective, RowAudit* audit) {
    check_set_inputs(Q, grid);
    require_candidate_in_domain(link, theta_tilde, grid);

    const int T = Q.T;
    const int K = grid.size();
    const PsiLayout lay{T, K};
    const int H = history_count(T);

    LinearProgram lp;
    lp.n_vars = lay.n_vars();
    RowAudit counts;

    // Matching: mixing the masses over the support and resolving the terminal
    // outcome must reproduce every observed-distribution entry.
    for (int x1 : {1, 0}) {
        for (int h = 0; h < H; ++h) {
            const History hist = decode_history(T, h);
            const unsigned ym_prefix = hist.ymask & ((1u << (T - 1)) - 1u);
            const int xT = hist.x(T);
            SparseRow row;
            row.rhs = Q.at(x1, h);
            for (int k = 0; k < K; ++k) {
                const double w =
                    outcome_term(link, theta_tilde * xT + grid.points[k], hist.y(T));
                row.coeffs.push_back({lay.index(x1, hist.xmask, ym_prefix, k), w});
            }
            lp.rows.push_back(std::move(row));
            ++counts.matching;
        }
    }

    // Unit mass per initial-covariate block.
    for (int x1 : {1, 0}) {
        SparseRow row;
        row.rhs = 1.0;
        const int base = x1 ? 0 : lay.block_vars();
        for (int c = 0; c < lay.block_vars(); ++c) row.coeffs.push_back({base + c, 1.0});
        lp.rows.push_back(std::move(row));
        ++counts.normalization;
    }

    // Outcome-law rows: at every period t <= T-1 and every prefix, the mass
    // splits over y_t in the candidate model proportions, whatever covariates
    // come later.
    for (int x1 : {1, 0})
        for (int k = 0; k < K; ++k)
            for (int t = 1; t <= T - 1; ++t) {
                const int pre_bits = t - 1; // y_1..y_{t-1} and x_2..x_t
                for (unsigned xpre = 0; xpre < (1u << pre_bits); ++xpre)
                    for (unsigned ypre = 0; ypre < (1u << pre_bits); ++ypre) {
                        const int xt =
                            t == 1 ? x1 : static_cast<int>((xpre >> (t - 2)) & 1u);
                        const double f1 =
                            evaluate(link, theta_tilde * xt + grid.points[k]);
                        for (int v = 0; v <= 1; ++v) {
                            const double fv = v ? f1 : 1.0 - f1;
                            SparseRow row;
                            row.rhs = 0.0;
                            const int ycont_bits = T - 1 - t;
                            const int xcont_bits = T - t;
                            for (unsigned xc = 0; xc < (1u << xcont_bits); ++xc)
                                for (unsigned yc = 0; yc < (1u << ycont_bits); ++yc) {
                                    const unsigned xm = xpre | (xc << pre_bits);
                                    const unsigned ym_keep =
                                        ypre | (static_cast<unsigned>(v) << (t - 1)) |
                                        (yc << t);
                                    const unsigned ym_swap =
                                        ypre | (static_cast<unsigned>(1 - v) << (t - 1)) |
                                        (yc << t);
                                    row.coeffs.push_back(
                                        {lay.index(x1, xm, ym_keep, k), 1.0 - fv});
                                    row.coeffs.push_back(
                                        {lay.index(x1, xm, ym_swap, k), -fv});
                                }
                            lp.rows.push_back(std::move(row));
                            ++counts.conditional;
                        }
                    }
            }

    // Factorization rows (strict mode): within one covariate path the
    // outcome-history masses stay proportional to their model probabilities,
    // so the path carries no information about past outcomes.
    if (mode == ExogeneityMode::StrictlyExogenous) {
        const unsigned n_pre = 1u << (T - 1);
        for (int x1 : {1, 0})
            for (unsigned xm = 0; xm < n_pre; ++xm)
                for (int k = 0; k < K; ++k) {
                    std::vector<double> p(n_pre, 1.0);
                    for (unsigned ym = 0; ym < n_pre; ++ym)
                        for (int t = 1; t <= T - 1; ++t) {
                            const int xt =
                                t == 1 ? x1 : static_cast<int>((xm >> (t - 2)) & 1u);
                            p[ym] *= outcome_term(link, theta_tilde * xt + grid.points[k],
                                                  static_cast<int>((ym >> (t - 1)) & 1u));
                        }
                    for (unsigned a = 0; a + 1 < n_pre; ++a) {
                        SparseRow row;
                        row.rhs = 0.0;
                        row.coeffs.push_back({lay.index(x1, xm, a + 1, k), p[a]});
                        row.coeffs.push_back({lay.index(x1, xm, a, k), -p[a + 1]});
                        lp.rows.push_back(std::move(row));
                        ++counts.strict;
                    }
                }
    }

    if (objective != ApeObjective::None) {
        lp.objective.assign(lp.n_vars, 0.0);
        for (int flat = 0; flat < lp.n_vars; ++flat) {
            const auto cell = lay.decode(flat);
            const double gain = evaluate(link, theta_tilde + grid.points[cell.k]) -
                                evaluate(link, grid.points[cell.k]);
            lp.objective[flat] = Q.q[static_cast<std::size_t>(cell.x1)] * gain;
        }
        lp.sense = objective == ApeObjective::Lower ? ObjectiveSense::Minimize
                                                    : ObjectiveSense::Maximize;
    }

    if (audit) *audit = counts;
    return lp;
}

ScanOptions default_scan(double theta_true) {
    ScanOptions opt;
    opt.theta_min = theta_true - 1.5;
    opt.theta_max = theta_true + 1.5;
    opt.step = 0.02;
    opt.bisect_tol = 1e-3;
    return opt;
}

// ---------------------------------------------------------------------------
// Column form. Per initial-covariate block, the reproducible distributions
// are exactly the unit-mass nonnegative combinations of "slice laws": the law
// of (y^T, x^{2:T}) under one support point when covariates follow a
// deterministic rule (predetermined mode) or a fixed path (strict mode).
// Fixed paths are the constant rules, which is what nests the strict set
// inside the predetermined one.
// ---------------------------------------------------------------------------

namespace {

using Rule = std::vector<std::uint8_t>;

// A rule picks x_t from the cell (y^{t-1}, x^{2:t-1});
// cell id = offset(t) + (xprefix << (t-1)) + yprefix.
int rule_cell_offset(int T, int t) {
    (void)T;
    int off = 0;
    for (int s = 2; s < t; ++s) off += 1 << (2 * s - 3);
    return off;
}

int rule_cell_count(int T) { return rule_cell_offset(T, T + 1); }

// Law over (y^T, x^{2:T}) for one support point under `rule`.
std::vector<double> rule_law(int T, const LinkSpec& link, double theta_tilde, double alpha,
                             int x1, const Rule& rule) {
    std::vector<double> law(static_cast<std::size_t>(history_count(T)), 0.0);
    for (unsigned ym = 0; ym < (1u << T); ++ym) {
        double w = 1.0;
        unsigned xm = 0;
        for (int t = 1; t <= T; ++t) {
            int xt = x1;
            if (t >= 2) {
                const unsigned ypre = ym & ((1u << (t - 1)) - 1u);
                const unsigned xpre = xm & ((t >= 3 ? (1u << (t - 2)) : 1u) - 1u);
                xt = rule[static_cast<std::size_t>(
                    rule_cell_offset(T, t) + static_cast<int>((xpre << (t - 1)) + ypre))];
                xm |= static_cast<unsigned>(xt) << (t - 2);
            }
            w *= outcome_term(link, theta_tilde * xt + alpha,
                              static_cast<int>((ym >> (t - 1)) & 1u));
        }
        law[static_cast<std::size_t>(encode_history(T, History{ym, xm}))] = w;
    }
    return law;
}

// Law for one support point when the covariate path is pinned to xm.
std::vector<double> path_law(int T, const LinkSpec& link, double theta_tilde, double alpha,
                             int x1, unsigned xm) {
    std::vector<double> law(static_cast<std::size_t>(history_count(T)), 0.0);
    for (unsigned ym = 0; ym < (1u << T); ++ym) {
        double w = 1.0;
        for (int t = 1; t <= T; ++t) {
            const int xt = t == 1 ? x1 : static_cast<int>((xm >> (t - 2)) & 1u);
            w *= outcome_term(link, theta_tilde * xt + alpha,
                              static_cast<int>((ym >> (t - 1)) & 1u));
        }
        law[static_cast<std::size_t>(encode_history(T, History{ym, xm}))] = w;
    }
    return law;
}

// Best rule against row prices u (sign +1 maximizes u'law, -1 minimizes).
// Every (t, prefix) node of the decision tree is its own cell, so the tree
// optimum is attained by a single deterministic rule, found backward.
double price_rule(int T, const LinkSpec& link, double theta_tilde, double alpha, int x1,
                  const std::vector<double>& u, double sign, Rule& rule) {
    rule.assign(static_cast<std::size_t>(rule_cell_count(T)), 0);
    auto rec = [&](auto&& self, int t, unsigned ym, unsigned xm) -> double {
        if (t == T + 1)
            return u[static_cast<std::size_t>(encode_history(T, History{ym, xm}))];
        if (t == 1) {
            double total = 0.0;
            for (unsigned y = 0; y <= 1; ++y)
                total += outcome_term(link, theta_tilde * x1 + alpha, static_cast<int>(y)) *
                         self(self, 2, ym | y, xm);
            return total;
        }
        const int cell =
            rule_cell_offset(T, t) + static_cast<int>((xm << (t - 1)) + ym);
        double best = 0.0;
        int best_x = 0;
        for (int x = 0; x <= 1; ++x) {
            double val = 0.0;
            for (unsigned y = 0; y <= 1; ++y)
                val += outcome_term(link, theta_tilde * x + alpha, static_cast<int>(y)) *
                       self(self, t + 1, ym | (y << (t - 1)),
                            xm | (static_cast<unsigned>(x) << (t - 2)));
            if (x == 0 || sign * val > sign * best) {
                best = val;
                best_x = x;
            }
        }
        rule[static_cast<std::size_t>(cell)] = static_cast<std::uint8_t>(best_x);
        return best;
    };
    return rec(rec, 1, 0u, 0u);
}

constexpr int kMaxPricingRounds = 1000;

} // namespace

struct ScanEngine::Impl {
    OutcomeVector Q;
    LinkSpec link;
    HeterogeneityGrid grid;
    ExogeneityMode mode;
    double lp_tol;
    int T = 0, K = 0, H = 0;
    std::vector<Rule> seeds; // canonical starting rules, predetermined mode
    bool seeds_complete = false;

    Impl(const OutcomeVector& Q_, const LinkSpec& link_, const HeterogeneityGrid& grid_,
         ExogeneityMode mode_, double lp_tol_)
        : Q(Q_), link(link_), grid(grid_), mode(mode_), lp_tol(lp_tol_) {
        check_set_inputs(Q, grid);
        T = Q.T;
        K = grid.size();
        H = history_count(T);
        if (mode == ExogeneityMode::Predetermined) build_seeds();
    }

    void build_seeds() {
        const int cells = rule_cell_count(T);
        if (T == 2) {
            // two cells -> four rules; the slice laws are fully enumerated
            for (unsigned bits = 0; bits < 4; ++bits)
                seeds.push_back(Rule{static_cast<std::uint8_t>(bits & 1u),
                                     static_cast<std::uint8_t>((bits >> 1) & 1u)});
            seeds_complete = true;
            return;
        }
        Rule zero(static_cast<std::size_t>(cells), 0);
        Rule one(static_cast<std::size_t>(cells), 1);
        Rule copy_last(static_cast<std::size_t>(cells), 0);
        Rule flip_last(static_cast<std::size_t>(cells), 0);
        for (int t = 2; t <= T; ++t)
            for (unsigned xpre = 0; xpre < (t >= 3 ? (1u << (t - 2)) : 1u); ++xpre)
                for (unsigned ypre = 0; ypre < (1u << (t - 1)); ++ypre) {
                    const std::size_t cell = static_cast<std::size_t>(
                        rule_cell_offset(T, t) + static_cast<int>((xpre << (t - 1)) + ypre));
                    const std::uint8_t last =
                        static_cast<std::uint8_t>((ypre >> (t - 2)) & 1u);
                    copy_last[cell] = last;
                    flip_last[cell] = static_cast<std::uint8_t>(1u - last);
                }
        seeds = {zero, one, copy_last, flip_last};
        seeds_complete = false;
    }

    // Columns of one block master at one candidate point.
    struct Pool {
        bool complete = false;
        std::vector<int> k_of;
        std::vector<std::vector<double>> laws;
        std::vector<std::vector<Rule>> rules_by_k;
    };

    Pool make_pool(int x1, double theta_tilde) const {
        Pool pool;
        if (mode == ExogeneityMode::StrictlyExogenous) {
            pool.complete = true;
            for (int k = 0; k < K; ++k)
                for (unsigned xm = 0; xm < (1u << (T - 1)); ++xm) {
                    pool.k_of.push_back(k);
                    pool.laws.push_back(
                        path_law(T, link, theta_tilde, grid.points[k], x1, xm));
                }
            return pool;
        }
        pool.complete = seeds_complete;
        pool.rules_by_k.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            for (const Rule& r : seeds) add_rule(pool, x1, theta_tilde, k, r);
        return pool;
    }

    bool add_rule(Pool& pool, int x1, double theta_tilde, int k, const Rule& r) const {
        auto& known = pool.rules_by_k[static_cast<std::size_t>(k)];
        if (std::find(known.begin(), known.end(), r) != known.end()) return false;
        known.push_back(r);
        pool.k_of.push_back(k);
        pool.laws.push_back(rule_law(T, link, theta_tilde, grid.points[k], x1, r));
        return true;
    }

    LpSolution solve_master(const Pool& pool, int x1, const std::vector<double>* cost,
                            ObjectiveSense sense) const {
        LinearProgram lp;
        lp.n_vars = static_cast<int>(pool.k_of.size());
        lp.rows.reserve(static_cast<std::size_t>(H) + 1);
        for (int h = 0; h < H; ++h) {
            SparseRow row;
            row.rhs = Q.at(x1, h);
            for (int j = 0; j < lp.n_vars; ++j) {
                const double a = pool.laws[static_cast<std::size_t>(j)][static_cast<std::size_t>(h)];
                if (a != 0.0) row.coeffs.push_back({j, a});
            }
            lp.rows.push_back(std::move(row));
        }
        SparseRow norm;
        norm.rhs = 1.0;
        for (int j = 0; j < lp.n_vars; ++j) norm.coeffs.push_back({j, 1.0});
        lp.rows.push_back(std::move(norm));
        if (cost) {
            lp.objective = *cost;
            lp.sense = sense;
        }
        SolveOptions so;
        so.tol = lp_tol;
        return solve(lp, so);
    }

    static double pricing_eps(const std::vector<double>& u) {
        double peak = 0.0;
        for (double v : u) peak = std::max(peak, std::fabs(v));
        return 1e-9 * (1.0 + peak);
    }

    struct BlockVerdict {
        bool feasible = false;
        double phase1 = 0.0;
        bool marginal = false;
    };

    // Feasibility of one block; grows `pool` until the master is feasible or
    // the last price round certifies that no rule can help.
    BlockVerdict settle_feasibility(Pool& pool, int x1, double theta_tilde) const {
        for (int round = 0;; ++round) {
            const LpSolution sol = solve_master(pool, x1, nullptr, ObjectiveSense::Minimize);
            if (sol.status != LpStatus::Infeasible)
                return {true, sol.phase1_objective, sol.marginal};
            if (pool.complete) return {false, sol.phase1_objective, sol.marginal};
            if (round >= kMaxPricingRounds)
                throw Error("column pricing did not settle while testing feasibility");

            std::vector<double> u = sol.duals;
            // orient the certificate so it scores the right-hand side positive
            double ub = u[static_cast<std::size_t>(H)];
            for (int h = 0; h < H; ++h) ub += u[static_cast<std::size_t>(h)] * Q.at(x1, h);
            if (ub < 0.0)
                for (double& v : u) v = -v;
            const double eps = pricing_eps(u);

            bool added = false;
            Rule r;
            for (int k = 0; k < K; ++k) {
                const double val =
                    price_rule(T, link, theta_tilde, grid.points[k], x1, u, 1.0, r);
                if (val + u[static_cast<std::size_t>(H)] > eps)
                    added = add_rule(pool, x1, theta_tilde, k, r) || added;
            }
            if (!added) return {false, sol.phase1_objective, sol.marginal};
        }
    }

    BlockVerdict block_feasible(int x1, double theta_tilde) const {
        Pool pool = make_pool(x1, theta_tilde);
        return settle_feasibility(pool, x1, theta_tilde);
    }

    // Extreme average-effect contributions of one block, [min, max].
    std::pair<double, double> block_effect_range(int x1, double theta_tilde) const {
        Pool pool = make_pool(x1, theta_tilde);
        if (!settle_feasibility(pool, x1, theta_tilde).feasible)
            throw Error("average-effect bounds requested at an infeasible candidate");

        std::vector<double> slice_gain(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            slice_gain[static_cast<std::size_t>(k)] =
                Q.q[static_cast<std::size_t>(x1)] *
                (evaluate(link, theta_tilde + grid.points[k]) -
                 evaluate(link, grid.points[k]));

        double out[2] = {0.0, 0.0};
        for (int s = 0; s < 2; ++s) {
            const ObjectiveSense sense = s ? ObjectiveSense::Maximize : ObjectiveSense::Minimize;
            for (int round = 0;; ++round) {
                std::vector<double> cost(pool.k_of.size());
                for (std::size_t j = 0; j < pool.k_of.size(); ++j)
                    cost[j] = slice_gain[static_cast<std::size_t>(pool.k_of[j])];
                const LpSolution sol = solve_master(pool, x1, &cost, sense);
                if (sol.status != LpStatus::Optimal)
                    throw Error("effect master did not reach an optimum");
                if (pool.complete) {
                    out[s] = sol.objective;
                    break;
                }
                if (round >= kMaxPricingRounds)
                    throw Error("column pricing did not settle while bounding the effect");

                const std::vector<double>& u = sol.duals;
                const double eps = pricing_eps(u);
                const double u_norm = u[static_cast<std::size_t>(H)];
                bool added = false;
                Rule r;
                for (int k = 0; k < K; ++k) {
                    const double ck = slice_gain[static_cast<std::size_t>(k)];
                    // propose from both pricing directions; only genuinely new
                    // rules enter, so the loop stays finite either way
                    const double vmax =
                        price_rule(T, link, theta_tilde, grid.points[k], x1, u, 1.0, r);
                    if (vmax + u_norm > ck + eps)
                        added = add_rule(pool, x1, theta_tilde, k, r) || added;
                    const double vmin =
                        price_rule(T, link, theta_tilde, grid.points[k], x1, u, -1.0, r);
                    if (vmin + u_norm < ck - eps)
                        added = add_rule(pool, x1, theta_tilde, k, r) || added;
                }
                if (!added) {
                    out[s] = sol.objective;
                    break;
                }
            }
        }
        return {out[0], out[1]};
    }
};

ScanEngine::ScanEngine(const OutcomeVector& Q, const LinkSpec& link,
                       const HeterogeneityGrid& grid, ExogeneityMode mode, double lp_tol)
    : impl_(new Impl(Q, link, grid, mode, lp_tol)) {}

ScanEngine::~ScanEngine() = default;

ScanEngine::ScanEngine(ScanEngine&&) noexcept = default;

ScanEngine::PointStatus ScanEngine::feasible(double theta_tilde) {
    require_candidate_in_domain(impl_->link, theta_tilde, impl_->grid);
    const auto b1 = impl_->block_feasible(1, theta_tilde);
    if (!b1.feasible) return {false, b1.phase1, b1.marginal};
    const auto b0 = impl_->block_feasible(0, theta_tilde);
    if (!b0.feasible) return {false, b0.phase1, b0.marginal};
    return {true, b1.phase1 + b0.phase1, b1.marginal || b0.marginal};
}

Interval ScanEngine::ape_range(double theta_tilde) {
    require_candidate_in_domain(impl_->link, theta_tilde, impl_->grid);
    const auto r1 = impl_->block_effect_range(1, theta_tilde);
    const auto r0 = impl_->block_effect_range(0, theta_tilde);
    return {r1.first + r0.first, r1.second + r0.second};
}

SetResult compute_theta_set(const OutcomeVector& Q, const LinkSpec& link,
                            const HeterogeneityGrid& grid, ExogeneityMode mode,
                            const ScanOptions& opt) {
    if (!(opt.step > 0.0) || !(opt.bisect_tol > 0.0) || !(opt.theta_min < opt.theta_max))
        throw DomainError("scan window must have min < max, positive step, and positive "
                          "bisection tolerance");

    const int n =
        static_cast<int>(std::floor((opt.theta_max - opt.theta_min) / opt.step + 1e-9)) + 1;
    std::vector<double> cand(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cand[static_cast<std::size_t>(i)] = opt.theta_min + i * opt.step;

    // Grid pass. Verdicts are a pure function of the candidate, so striding
    // the grid over worker threads cannot change any result.
    std::vector<PointRecord> recs(static_cast<std::size_t>(n));
    const int workers = std::max(1, std::min(opt.threads, n));
    auto eval_stride = [&](int w) {
        ScanEngine engine(Q, link, grid, mode, opt.lp_tol);
        for (int i = w; i < n; i += workers) {
            const auto st = engine.feasible(cand[static_cast<std::size_t>(i)]);
            recs[static_cast<std::size_t>(i)] =
                PointRecord{cand[static_cast<std::size_t>(i)], st.feasible, st.phase1_obj,
                            st.marginal, std::nullopt, std::nullopt};
        }
    };
    if (workers == 1) {
        eval_stride(0);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                try {
                    eval_stride(w);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        for (auto& t : threads) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    int first_feas = -1, last_feas = -1, runs = 0;
    for (int i = 0; i < n; ++i) {
        if (!recs[static_cast<std::size_t>(i)].feasible) continue;
        if (first_feas < 0) first_feas = i;
        last_feas = i;
        if (i == 0 || !recs[static_cast<std::size_t>(i - 1)].feasible) ++runs;
    }
    if (first_feas < 0) throw EmptySet("no feasible candidate on the scan grid");

    SetResult set;
    set.nonconvex = runs > 1;
    set.bisect_tol = opt.bisect_tol;
    set.points = recs;

    ScanEngine refine(Q, link, grid, mode, opt.lp_tol);
    std::vector<PointRecord> probes;
    auto probe = [&](double theta_tilde) {
        const auto st = refine.feasible(theta_tilde);
        probes.push_back(PointRecord{theta_tilde, st.feasible, st.phase1_obj, st.marginal,
                                     std::nullopt, std::nullopt});
        return st.feasible;
    };

    if (first_feas == 0) {
        set.lo = cand.front();
        set.lo_open = true;
    } else {
        double outside = cand[static_cast<std::size_t>(first_feas - 1)];
        double inside = cand[static_cast<std::size_t>(first_feas)];
        while (inside - outside > opt.bisect_tol) {
            const double mid = 0.5 * (inside + outside);
            (probe(mid) ? inside : outside) = mid;
        }
        set.lo = inside;
    }
    if (last_feas == n - 1) {
        set.hi = cand.back();
        set.hi_open = true;
    } else {
        double inside = cand[static_cast<std::size_t>(last_feas)];
        double outside = cand[static_cast<std::size_t>(last_feas + 1)];
        while (outside - inside > opt.bisect_tol) {
            const double mid = 0.5 * (inside + outside);
            (probe(mid) ? inside : outside) = mid;
        }
        set.hi = inside;
    }

    set.points.insert(set.points.end(), probes.begin(), probes.end());
    std::sort(set.points.begin(), set.points.end(),
              [](const PointRecord& a, const PointRecord& b) {
                  return a.theta_tilde < b.theta_tilde;
              });
    return set;
}

Interval compute_ape_bounds(const OutcomeVector& Q, const LinkSpec& link,
                            const HeterogeneityGrid& grid, ExogeneityMode mode,
                            SetResult& set) {
    ScanEngine engine(Q, link, grid, mode);
    bool any = false;
    Interval total{0.0, 0.0};
    for (auto& p : set.points) {
        if (!p.feasible) continue;
        const Interval iv = engine.ape_range(p.theta_tilde);
        p.delta_lo = iv.lo;
        p.delta_hi = iv.hi;
        if (!any) {
            total = iv;
            any = true;
        } else {
            total.lo = std::min(total.lo, iv.lo);
            total.hi = std::max(total.hi, iv.hi);
        }
    }
    if (!any) throw EmptySet("no feasible scan point to bound the average effect over");
    return total;
}

void write_set_trace_csv(std::ostream& os, const SetResult& set) {
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "theta_tilde,feasible,delta_lo,delta_hi,phase1_obj\n";
    for (const auto& p : set.points) {
        os << fmt(p.theta_tilde) << ',' << (p.feasible ? 1 : 0) << ','
           << (p.delta_lo ? fmt(*p.delta_lo) : std::string()) << ','
           << (p.delta_hi ? fmt(*p.delta_hi) : std::string()) << ','
           << fmt(p.phase1_obj) << '\n';
    }
}

} // namespace panelid
