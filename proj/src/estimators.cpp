#include "panelid/estimators.hpp"

#include "panelid/errors.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace panelid {

namespace {

double phi_term(double theta, int x1, int y1, int x2, int y2) {
    return (1 - y2) * std::exp(theta * x2) - (1 - y1) * std::exp(theta * x1);
}

double log1pexp(double u) {
    if (u > 0.0) return u + std::log1p(std::exp(-u));
    return std::log1p(std::exp(u));
}

void check_two_periods(const PanelDataset& d) {
    if (d.T < 2) throw DimensionMismatch("dataset needs at least two periods");
}

// switcher rows reduced to what the likelihood sees
struct SwitcherTerms {
    std::vector<int> z;   // x2 - x1
    std::vector<int> y2;  // second-period outcome
    std::vector<double> w;
};

SwitcherTerms collect_switchers(const PanelDataset& d, const std::vector<double>& weights) {
    if (static_cast<std::int64_t>(weights.size()) != d.n())
        throw DimensionMismatch("weight vector has " + std::to_string(weights.size()) +
                                " entries for " + std::to_string(d.n()) + " units");
    check_two_periods(d);
    SwitcherTerms s;
    for (std::int64_t i = 0; i < d.n(); ++i) {
        if (d.y(i, 1) + d.y(i, 2) != 1) continue;
        s.z.push_back(d.x(i, 2) - d.x(i, 1));
        s.y2.push_back(d.y(i, 2));
        s.w.push_back(weights[i]);
    }
    return s;
}

double objective_at(const SwitcherTerms& s, double theta) {
    double v = 0.0;
    for (std::size_t i = 0; i < s.z.size(); ++i)
        v += s.w[i] * (theta * s.z[i] * s.y2[i] - log1pexp(theta * s.z[i]));
    return v;
}

} // namespace

double exponential_moment(double theta_tilde, const OutcomeVector& Q, int x1) {
    double m = 0.0;
    for (int h = 0; h < Q.block_size(); ++h) {
        History hist = decode_history(Q.T, h);
        m += Q.at(x1, h) * phi_term(theta_tilde, x1, hist.y(1), hist.x(2), hist.y(2));
    }
    return m;
}

double exponential_moment(double theta_tilde, const PanelDataset& data, int x1) {
    check_two_periods(data);
    double s = 0.0;
    std::int64_t n = 0;
    for (std::int64_t i = 0; i < data.n(); ++i) {
        if (data.x(i, 1) != x1) continue;
        s += phi_term(theta_tilde, x1, data.y(i, 1), data.x(i, 2), data.y(i, 2));
        ++n;
    }
    if (n == 0)
        throw NoObservations("no units with initial covariate " + std::to_string(x1));
    return s / static_cast<double>(n);
}

namespace {

template <typename Moment>
double bisect_root(Moment f, std::pair<double, double> bracket, double tol) {
    double lo = bracket.first, hi = bracket.second;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NoSignChange("moment keeps the same sign over [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::fabs(fm) < tol) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double exponential_estimate(const OutcomeVector& Q, int x1,
                            std::pair<double, double> bracket, double tol) {
    return bisect_root([&](double t) { return exponential_moment(t, Q, x1); }, bracket, tol);
}

double exponential_estimate(const PanelDataset& data, int x1,
                            std::pair<double, double> bracket, double tol) {
    return bisect_root([&](double t) { return exponential_moment(t, data, x1); }, bracket, tol);
}

double conditional_logit_objective(const PanelDataset& data,
                                   const std::vector<double>& weights, double theta) {
    return objective_at(collect_switchers(data, weights), theta);
}

double conditional_logit_fit(const PanelDataset& data,
                             const std::vector<double>& weights, double tol) {
    SwitcherTerms s = collect_switchers(data, weights);
    if (s.z.empty()) throw NoSwitchers("no units switch outcomes between the two periods");

    // Normalize to unit mean over switchers: the maximizer is scale-free and
    // the stopping rules below then are too.
    double mean = 0.0;
    for (double v : s.w) mean += v;
    mean /= static_cast<double>(s.w.size());
    if (!(mean > 0.0)) throw NoSwitchers("switcher weights carry no mass");
    for (double& v : s.w) v /= mean;

    double a = -16.0, b = 16.0;
    const double gr = 0.61803398874989484820;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = objective_at(s, c), fd = objective_at(s, d);
    while (b - a > 1e-4) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = objective_at(s, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = objective_at(s, d);
        }
    }
    double theta = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
        double g = 0.0, H = 0.0;
        for (std::size_t i = 0; i < s.z.size(); ++i) {
            if (s.z[i] == 0) continue;
            const double u = theta * s.z[i];
            const double p = 1.0 / (1.0 + std::exp(-u));
            g += s.w[i] * s.z[i] * (s.y2[i] - p);
            H -= s.w[i] * s.z[i] * s.z[i] * p * (1.0 - p);
        }
        if (!(H < 0.0)) break;
        const double step = g / H;
        theta -= step;
        if (std::fabs(step) <= tol) break;
    }
    if (theta < -32.0) theta = -32.0;
    if (theta > 32.0) theta = 32.0;
    return theta;
}

WclResult weighted_conditional_logit(const PanelDataset& data, double tol) {
    check_two_periods(data);
    if (data.n() == 0) throw NoObservations("dataset is empty");

    std::array<std::int64_t, 4> count{}, ones{};
    std::int64_t switchers = 0, informative = 0;
    for (std::int64_t i = 0; i < data.n(); ++i) {
        const int cell = data.y(i, 1) * 2 + data.x(i, 1);
        ++count[cell];
        ones[cell] += data.x(i, 2);
        if (data.y(i, 1) + data.y(i, 2) == 1) {
            ++switchers;
            if (data.x(i, 1) != data.x(i, 2)) ++informative;
        }
    }
    WclResult r;
    for (int cell = 0; cell < 4; ++cell) {
        if (count[cell] == 0)
            throw EmptyCell("no units in cell y1=" + std::to_string(cell / 2) +
                            ", x1=" + std::to_string(cell % 2));
        r.g_hat[cell] = static_cast<double>(ones[cell]) / static_cast<double>(count[cell]);
    }
    if (switchers == 0) throw NoSwitchers("no units switch outcomes between the two periods");
    if (informative == 0)
        throw NoSwitchers("every switcher keeps the same covariate in both periods");
    r.n_switchers = switchers;

    std::vector<double> w(static_cast<std::size_t>(data.n()), 1.0);
    for (std::int64_t i = 0; i < data.n(); ++i) {
        const double g = r.g_hat[data.y(i, 1) * 2 + data.x(i, 1)];
        const double p = data.x(i, 2) ? g : 1.0 - g;
        if (p <= 0.0) {
            // unreachable when the cells are estimated from this same sample:
            // a zero-frequency side has no units on it by construction
            throw DegenerateWeight("covariate frequency vanishes on an observed cell side");
        }
        w[static_cast<std::size_t>(i)] = 1.0 / p;
    }
    r.theta_hat = conditional_logit_fit(data, w, tol);
    return r;
}

} // namespace panelid
