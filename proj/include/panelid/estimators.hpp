#pragma once

#include "panelid/panel_model.hpp"

#include <array>
#include <utility>
#include <vector>

namespace panelid {

// Conditional mean of (1-Y2)e^{theta X2} - (1-Y1)e^{theta X1} given X1 = x1.
// The OutcomeVector overload evaluates it exactly from the population law.
double exponential_moment(double theta_tilde, const PanelDataset& data, int x1);
double exponential_moment(double theta_tilde, const OutcomeVector& Q, int x1);

// Bisection root of the moment over the bracket; stops when the moment falls
// below tol in magnitude or the bracket narrows to tol.
double exponential_estimate(const PanelDataset& data, int x1,
                            std::pair<double, double> bracket, double tol = 1e-10);
double exponential_estimate(const OutcomeVector& Q, int x1,
                            std::pair<double, double> bracket, double tol = 1e-10);

struct WclResult {
    double theta_hat = 0.0;
    std::array<double, 4> g_hat{}; // empirical Pr(X2=1 | y1, x1), cell index y1*2+x1
    std::int64_t n_switchers = 0;  // units with y1 + y2 = 1
};

// Conditional-logit objective over switcher units with per-unit weights;
// exposed for property checks.
double conditional_logit_objective(const PanelDataset& data,
                                   const std::vector<double>& weights, double theta);

// Maximizer of the weighted objective (golden section + Newton refinement).
double conditional_logit_fit(const PanelDataset& data,
                             const std::vector<double>& weights, double tol = 1e-8);

// Two-period estimator with inverse covariate-frequency weights; feedback
// cells are estimated from the data. Requires every (y1, x1) cell nonempty
// and at least one switcher with x1 != x2.
WclResult weighted_conditional_logit(const PanelDataset& data, double tol = 1e-8);

} // namespace panelid
