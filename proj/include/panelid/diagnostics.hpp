#pragma once

#include "panelid/panel_model.hpp"

#include <array>
#include <optional>

namespace panelid {

// Candidate moment function phi(x1, y^T, x^{2:T}), stored like OutcomeVector.
struct MomentFunction {
    int T = 0;
    std::vector<double> values; // size 2 * 2^{2T-1}
    static MomentFunction zeros(int T);
    double at(int x1, int h) const { return values[(x1 ? 0 : history_count(T)) + h]; }
    double& at(int x1, int h) { return values[(x1 ? 0 : history_count(T)) + h]; }
};

// The T=2 exponential-family moment function: (1-y2)e^{theta x2} - (1-y1)e^{theta x1}.
MomentFunction exponential_moment_function(double theta);

struct IndependenceResult {
    bool independent = false;
    double smallest_sv = 0.0;
    double largest_sv = 0.0;
    // Unit-length null vector (A, B, C) with A*F(theta+a) + B*F(a) + C ~ 0,
    // present when dependent.
    std::optional<std::array<double, 3>> certificate;
};

// Rank test of {F(theta+alpha), F(alpha), 1} on the grid via SVD.
IndependenceResult check_linear_independence(const LinkSpec& link, double theta,
                                             const HeterogeneityGrid& grid,
                                             double tol = 1e-8);

// m0 = E[Y2 - Y1 | X1=0], m1 = E[Y1 - Y2 | X1=1]; both share the sign of theta
// under interior feedback and a strictly increasing link.
std::pair<double, double> sign_moment(const OutcomeVector& Q);

struct MomentResiduals {
    double max_residual_eq1 = 0.0; // dependence of partial sums on future covariates
    double max_residual_eq2 = 0.0; // full outcome-weighted sum
};

// Exact residuals of the two feedback-robustness conditions for phi.
MomentResiduals verify_feedback_robust_moment(const MomentFunction& phi, double theta,
                                              const LinkSpec& link,
                                              const HeterogeneityGrid& grid, int T);

struct JacobianRangeResult {
    std::array<double, 2> residual{0.0, 0.0}; // indexed by x1
    std::array<int, 2> rank{0, 0};            // numerical rank of the design matrix
    bool singular_projection = false;         // design matrix rank-deficient
};

// Residual norm of the theta-direction derivative of each block after
// least-squares projection onto the nuisance-direction derivatives
// (heterogeneity weights in the free chart, feedback entries), all by central
// finite differences. Near-zero residuals for both blocks indicate that the
// theta direction is locally indistinguishable from nuisance movements.
JacobianRangeResult jacobian_range_test(double theta, const LinkSpec& link,
                                        const HeterogeneityGrid& grid,
                                        const HeterogeneityDist& dist,
                                        const FeedbackProcess& G,
                                        double fd_step = 1e-5);

} // namespace panelid
