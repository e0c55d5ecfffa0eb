#include "panelid/diagnostics.hpp"

#include "panelid/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace panelid {

MomentFunction MomentFunction::zeros(int T) {
    if (T < kMinPeriods || T > kMaxPeriods)
        throw CapExceeded("moment function periods outside the supported range");
    MomentFunction f;
    f.T = T;
    f.values.assign(2 * history_count(T), 0.0);
    return f;
}

MomentFunction exponential_moment_function(double theta) {
    MomentFunction f = MomentFunction::zeros(2);
    for (int x1 = 0; x1 <= 1; ++x1)
        for (int h = 0; h < history_count(2); ++h) {
            History hist = decode_history(2, h);
            f.at(x1, h) = (1 - hist.y(2)) * std::exp(theta * hist.x(2)) -
                          (1 - hist.y(1)) * std::exp(theta * x1);
        }
    return f;
}

IndependenceResult check_linear_independence(const LinkSpec& link, double theta,
                                             const HeterogeneityGrid& grid, double tol) {
    const int K = grid.size();
    Eigen::MatrixXd M(K, 3);
    for (int k = 0; k < K; ++k) {
        M(k, 0) = evaluate(link, theta + grid.points[k]);
        M(k, 1) = evaluate(link, grid.points[k]);
        M(k, 2) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    IndependenceResult r;
    r.largest_sv = sv(0);
    r.smallest_sv = K >= 3 ? sv(2) : 0.0;
    r.independent = K >= 3 && r.smallest_sv > tol * r.largest_sv;
    if (!r.independent) {
        Eigen::Vector3d v = svd.matrixV().col(2);
        // deterministic sign: the largest-magnitude component points up
        int imax = 0;
        for (int i = 1; i < 3; ++i)
            if (std::fabs(v(i)) > std::fabs(v(imax))) imax = i;
        if (v(imax) < 0.0) v = -v;
        r.certificate = std::array<double, 3>{v(0), v(1), v(2)};
    }
    return r;
}

std::pair<double, double> sign_moment(const OutcomeVector& Q) {
    double m0 = 0.0, m1 = 0.0;
    for (int h = 0; h < Q.block_size(); ++h) {
        History hist = decode_history(Q.T, h);
        const int d = hist.y(2) - hist.y(1);
        m0 += Q.at(0, h) * d;
        m1 -= Q.at(1, h) * d;
    }
    return {m0, m1};
}

MomentResiduals verify_feedback_robust_moment(const MomentFunction& phi, double theta,
                                              const LinkSpec& link,
                                              const HeterogeneityGrid& grid, int T) {
    if (phi.T != T || static_cast<int>(phi.values.size()) != 2 * history_count(T))
        throw DimensionMismatch("moment function does not cover " + std::to_string(T) +
                                " periods");
    grid.validate();
    MomentResiduals out;

    // per-period success probabilities, indexed [x][k]
    const int K = grid.size();
    std::vector<std::array<double, 2>> F(K);
    for (int k = 0; k < K; ++k)
        for (int x = 0; x <= 1; ++x) F[k][x] = evaluate(link, theta * x + grid.points[k]);
    auto term = [&](int k, int x, int y) { return y ? F[k][x] : 1.0 - F[k][x]; };

    for (int x1 = 0; x1 <= 1; ++x1)
        for (int k = 0; k < K; ++k) {
            // full outcome-weighted sum per covariate path
            for (unsigned xm = 0; xm < (1u << (T - 1)); ++xm) {
                double s = 0.0;
                for (unsigned ym = 0; ym < (1u << T); ++ym) {
                    History h{ym, xm};
                    double w = term(k, x1, h.y(1));
                    for (int t = 2; t <= T; ++t) w *= term(k, h.x(t), h.y(t));
                    s += phi.at(x1, encode_history(T, h)) * w;
                }
                out.max_residual_eq2 = std::max(out.max_residual_eq2, std::fabs(s));
            }
            // partial sums must ignore the covariate continuation
            for (int s_len = 0; s_len <= T - 2; ++s_len) {
                const int P = T - s_len - 1; // periods fixed in the prefix
                const int cont = T - P;      // periods summed out
                for (unsigned yp = 0; yp < (1u << P); ++yp)
                    for (unsigned xp = 0; xp < (1u << (P - 1)); ++xp) {
                        double lo = 0.0, hi = 0.0;
                        bool first = true;
                        for (unsigned xc = 0; xc < (1u << cont); ++xc) {
                            const unsigned xm = xp | (xc << (P - 1));
                            double partial = 0.0;
                            for (unsigned yc = 0; yc < (1u << cont); ++yc) {
                                const unsigned ym = yp | (yc << P);
                                History h{ym, xm};
                                double w = 1.0;
                                for (int t = P + 1; t <= T; ++t) // P >= 1, so t >= 2
                                    w *= term(k, h.x(t), h.y(t));
                                partial += phi.at(x1, encode_history(T, h)) * w;
                            }
                            if (first) {
                                lo = hi = partial;
                                first = false;
                            } else {
                                lo = std::min(lo, partial);
                                hi = std::max(hi, partial);
                            }
                        }
                        out.max_residual_eq1 = std::max(out.max_residual_eq1, hi - lo);
                    }
            }
        }
    return out;
}

namespace {

// flattened parameter vector: feedback cells reachable from the block's x1
struct GCell {
    int t;
    unsigned ym, xm;
    int k;
};

std::vector<GCell> reachable_cells(int T, int K, int x1) {
    std::vector<GCell> cells;
    for (int t = 2; t <= T; ++t)
        for (unsigned ym = 0; ym < (1u << (t - 1)); ++ym)
            for (unsigned xm = 0; xm < (1u << (t - 1)); ++xm) {
                if ((xm & 1u) != static_cast<unsigned>(x1)) continue;
                for (int k = 0; k < K; ++k) cells.push_back({t, ym, xm, k});
            }
    return cells;
}

} // namespace

JacobianRangeResult jacobian_range_test(double theta, const LinkSpec& link,
                                        const HeterogeneityGrid& grid,
                                        const HeterogeneityDist& dist,
                                        const FeedbackProcess& G, double fd_step) {
    const int T = G.periods();
    const int K = grid.size();
    const int H = history_count(T);
    const double h = fd_step;
    JacobianRangeResult out;

    for (int x1 = 0; x1 <= 1; ++x1) {
        // block law as a function of (theta, pi chart, feedback cells)
        auto block = [&](double th, const std::vector<double>& pi, const FeedbackProcess& g) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(H);
            for (int k = 0; k < K; ++k) {
                if (pi[k] == 0.0) continue;
                for (int idx = 0; idx < H; ++idx)
                    v(idx) += pi[k] * history_probability(th, link, grid.points[k], k, x1,
                                                          decode_history(T, idx), g);
            }
            return v;
        };

        const std::vector<double>& pi0 = dist.pi[x1];
        const auto cells = reachable_cells(T, K, x1);
        const int n_dir = (K - 1) + static_cast<int>(cells.size());

        Eigen::VectorXd d =
            (block(theta + h, pi0, G) - block(theta - h, pi0, G)) / (2.0 * h);

        Eigen::MatrixXd N(H, n_dir);
        for (int k = 0; k + 1 < K; ++k) { // mass chart: bucket k against the last bucket
            std::vector<double> up = pi0, dn = pi0;
            up[k] += h;
            up[K - 1] -= h;
            dn[k] -= h;
            dn[K - 1] += h;
            N.col(k) = (block(theta, up, G) - block(theta, dn, G)) / (2.0 * h);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            FeedbackProcess up = G, dn = G;
            const GCell& cc = cells[c];
            up.set(cc.t, cc.ym, cc.xm, cc.k, G.at(cc.t, cc.ym, cc.xm, cc.k) + h);
            dn.set(cc.t, cc.ym, cc.xm, cc.k, G.at(cc.t, cc.ym, cc.xm, cc.k) - h);
            N.col(K - 1 + static_cast<int>(c)) =
                (block(theta, pi0, up) - block(theta, pi0, dn)) / (2.0 * h);
        }

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(N, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double cutoff = 1e-10 * (sv.size() ? sv(0) : 0.0);
        int rank = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > cutoff) ++rank;
        out.rank[x1] = rank;
        if (rank < std::min<int>(H, n_dir)) out.singular_projection = true;

        // least-squares projection of d onto the column span, rank-truncated
        Eigen::VectorXd counit = svd.matrixU().transpose() * d;
        Eigen::VectorXd fitted = Eigen::VectorXd::Zero(H);
        for (int i = 0; i < rank; ++i) fitted += counit(i) * svd.matrixU().col(i);
        out.residual[x1] = (d - fitted).norm();
    }
    return out;
}

} // namespace panelid
