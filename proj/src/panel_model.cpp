#include "panelid/panel_model.hpp"

#include "panelid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace panelid {

namespace {

void check_periods(int T) {
    if (T < kMinPeriods || T > kMaxPeriods)
        throw CapExceeded("number of periods " + std::to_string(T) + " outside [" +
                          std::to_string(kMinPeriods) + ", " + std::to_string(kMaxPeriods) + "]");
}

double normal_pdf(double u) { return 0.39894228040143267794 * std::exp(-0.5 * u * u); }

double normal_cdf(double u) { return 0.5 * std::erfc(-u * 0.70710678118654752440); }

// Acklam's rational approximation refined by one Halley step.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile argument must lie in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u); // Halley
    return x;
}

// uniform in [0,1) from the top 53 bits, independent of library distributions
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

void HeterogeneityGrid::validate() const {
    if (points.empty()) throw DomainError("heterogeneity grid is empty");
    for (double v : points)
        if (!std::isfinite(v)) throw DomainError("heterogeneity grid has a non-finite point");
    for (std::size_t k = 1; k < points.size(); ++k)
        if (!(points[k] > points[k - 1]))
            throw DomainError("heterogeneity grid must be strictly increasing");
}

void HeterogeneityDist::validate(int K) const {
    for (int x1 = 0; x1 <= 1; ++x1) {
        if (static_cast<int>(pi[x1].size()) != K)
            throw DimensionMismatch("heterogeneity mass has " + std::to_string(pi[x1].size()) +
                                    " entries, grid has " + std::to_string(K));
        double s = 0.0;
        for (double w : pi[x1]) {
            if (!(w >= 0.0)) throw DomainError("heterogeneity mass entries must be nonnegative");
            s += w;
        }
        if (std::fabs(s - 1.0) > 1e-12)
            throw DomainError("heterogeneity mass must sum to one, got " + std::to_string(s));
    }
}

FeedbackProcess::FeedbackProcess(int T, int K) : T_(T), K_(K) {
    check_periods(T);
    if (K < 1) throw DimensionMismatch("grid size must be positive");
    tables_.resize(T - 1);
    for (int t = 2; t <= T; ++t)
        tables_[t - 2].assign((std::size_t{1} << (2 * (t - 1))) * K, 0.0);
}

FeedbackProcess FeedbackProcess::constant(int T, int K, double g) {
    FeedbackProcess G(T, K);
    for (auto& tab : G.tables_) std::fill(tab.begin(), tab.end(), g);
    G.validate();
    return G;
}

FeedbackProcess FeedbackProcess::by_cell_t2(int K, const std::array<double, 4>& cell) {
    FeedbackProcess G(2, K);
    for (unsigned y1 = 0; y1 <= 1; ++y1)
        for (unsigned x1 = 0; x1 <= 1; ++x1)
            for (int k = 0; k < K; ++k) G.set(2, y1, x1, k, cell[y1 * 2 + x1]);
    return G;
}

std::size_t FeedbackProcess::slot(int t, unsigned ymask, unsigned xmask, int k) const {
    if (t < 2 || t > T_)
        throw DimensionMismatch("feedback table asked for period " + std::to_string(t) +
                                " with T=" + std::to_string(T_));
    const unsigned lim = 1u << (t - 1);
    if (ymask >= lim || xmask >= lim)
        throw DimensionMismatch("feedback history mask out of range for period " +
                                std::to_string(t));
    if (k < 0 || k >= K_) throw DimensionMismatch("feedback grid index out of range");
    return (static_cast<std::size_t>(ymask) * lim + xmask) * K_ + k;
}

double FeedbackProcess::at(int t, unsigned ymask, unsigned xmask, int k) const {
    const std::size_t s = slot(t, ymask, xmask, k); // validates t first
    return tables_[t - 2][s];
}

void FeedbackProcess::set(int t, unsigned ymask, unsigned xmask, int k, double v) {
    if (!(v >= 0.0 && v <= 1.0))
        throw DomainError("feedback probability " + std::to_string(v) + " outside [0,1]");
    const std::size_t s = slot(t, ymask, xmask, k);
    tables_[t - 2][s] = v;
}

bool FeedbackProcess::interior() const {
    for (const auto& tab : tables_)
        for (double v : tab)
            if (!(v > 0.0 && v < 1.0)) return false;
    return true;
}

void FeedbackProcess::validate() const {
    if (T_ == 0) throw DimensionMismatch("feedback process is uninitialized");
    for (const auto& tab : tables_)
        for (double v : tab)
            if (!(v >= 0.0 && v <= 1.0))
                throw DomainError("feedback probability outside [0,1]");
}

int history_count(int T) { return 1 << (2 * T - 1); }

int encode_history(int T, const History& h) {
    int idx = 0;
    for (int t = 1; t <= T; ++t) idx |= (1 - h.y(t)) << (2 * (t - 1));
    for (int t = 2; t <= T; ++t) idx |= (1 - h.x(t)) << (2 * t - 3);
    return idx;
}

History decode_history(int T, int index) {
    History h;
    for (int t = 1; t <= T; ++t)
        if (!((index >> (2 * (t - 1))) & 1)) h.ymask |= 1u << (t - 1);
    for (int t = 2; t <= T; ++t)
        if (!((index >> (2 * t - 3)) & 1)) h.xmask |= 1u << (t - 2);
    return h;
}

std::vector<History> enumerate_histories(int T) {
    check_periods(T);
    std::vector<History> out;
    out.reserve(history_count(T));
    for (int i = 0; i < history_count(T); ++i) out.push_back(decode_history(T, i));
    return out;
}

double history_probability(double theta, const LinkSpec& link, double alpha,
                           int alpha_index, int x1, const History& h,
                           const FeedbackProcess& G) {
    const int T = G.periods();
    double p = 1.0;
    unsigned ym = 0, xm = static_cast<unsigned>(x1); // running pre-period masks, x1 in bit 0
    for (int t = 1; t <= T; ++t) {
        const int xt = t == 1 ? x1 : h.x(t);
        if (t >= 2) {
            const double g = G.at(t, ym, xm, alpha_index);
            p *= xt ? g : 1.0 - g;
            xm |= static_cast<unsigned>(xt) << (t - 1);
        }
        const double F = evaluate(link, theta * xt + alpha);
        p *= h.y(t) ? F : 1.0 - F;
        ym |= static_cast<unsigned>(h.y(t)) << (t - 1);
    }
    return p;
}

void OutcomeVector::validate() const {
    check_periods(T);
    if (static_cast<int>(values.size()) != 2 * block_size())
        throw DimensionMismatch("outcome vector has wrong length");
    for (double v : values)
        if (!(v >= -1e-12)) throw DomainError("outcome vector entry is negative");
    for (int x1 = 0; x1 <= 1; ++x1) {
        double s = 0.0;
        for (int h = 0; h < block_size(); ++h) s += at(x1, h);
        if (std::fabs(s - 1.0) > 1e-10)
            throw DomainError("outcome block must sum to one, got " + std::to_string(s));
    }
    if (!(q[0] >= 0.0 && q[1] >= 0.0) || std::fabs(q[0] + q[1] - 1.0) > 1e-10)
        throw DomainError("initial covariate law must be a probability pair");
}

OutcomeVector compute_Q(double theta, const LinkSpec& link, const HeterogeneityGrid& grid,
                        const HeterogeneityDist& dist, const FeedbackProcess& G,
                        const std::array<double, 2>& q) {
    const int T = G.periods();
    OutcomeVector Q;
    Q.T = T;
    Q.q = q;
    Q.values.assign(2 * history_count(T), 0.0);
    const auto hs = enumerate_histories(T);
    for (int x1 = 0; x1 <= 1; ++x1)
        for (int k = 0; k < grid.size(); ++k) {
            const double w = dist.pi[x1][k];
            if (w == 0.0) continue;
            for (int h = 0; h < static_cast<int>(hs.size()); ++h)
                Q.at(x1, h) += w * history_probability(theta, link, grid.points[k], k, x1,
                                                       hs[h], G);
        }
    return Q;
}

OutcomeVector compute_Q(const ModelConfig& m) {
    m.validate();
    return compute_Q(m.theta, m.link, m.grid, m.dist, m.feedback, m.q);
}

void ModelConfig::validate() const {
    check_periods(T);
    grid.validate();
    dist.validate(grid.size());
    feedback.validate();
    if (feedback.periods() != T)
        throw DimensionMismatch("feedback process covers " + std::to_string(feedback.periods()) +
                                " periods, model has " + std::to_string(T));
    if (feedback.grid_size() != grid.size())
        throw DimensionMismatch("feedback grid size differs from heterogeneity grid");
    if (!(q[0] >= 0.0 && q[1] >= 0.0) || std::fabs(q[0] + q[1] - 1.0) > 1e-12)
        throw DomainError("initial covariate law must be a probability pair");
    for (int x = 0; x <= 1; ++x)
        for (double a : grid.points)
            if (!in_domain(link, theta * x + a))
                throw DomainError("index theta*x + alpha leaves the link domain");
}

ModelConfig dgp_default(int T, double theta, const LinkSpec& link, int K) {
    check_periods(T);
    if (K < 1) throw DimensionMismatch("grid size must be positive");
    ModelConfig m;
    m.T = T;
    m.link = link;
    m.theta = theta;
    m.grid.points.resize(K);
    std::vector<double> w(K);
    double s = 0.0;
    // Quantile grid with density weights from a reference heterogeneity law:
    // standard normal in general, standard exponential when the link demands a
    // nonnegative index (the exponential link is only defined for u >= 0).
    const bool positive_support = link.family == LinkFamily::Exponential;
    for (int k = 0; k < K; ++k) {
        const double p = static_cast<double>(k + 1) / (K + 1);
        if (positive_support) {
            m.grid.points[k] = -std::log1p(-p);
            w[k] = std::exp(-m.grid.points[k]);
        } else {
            m.grid.points[k] = normal_quantile(p);
            w[k] = normal_pdf(m.grid.points[k]);
        }
        s += w[k];
    }
    for (double& v : w) v /= s;
    m.dist.pi[0] = w;
    m.dist.pi[1] = w;
    m.feedback = FeedbackProcess::constant(T, K, 0.5);
    m.q = {0.5, 0.5};
    return m;
}

double average_effect(const ModelConfig& m) {
    double d = 0.0;
    for (int x1 = 0; x1 <= 1; ++x1)
        for (int k = 0; k < m.grid.size(); ++k)
            d += m.q[x1] * m.dist.pi[x1][k] *
                 (evaluate(m.link, m.theta + m.grid.points[k]) -
                  evaluate(m.link, m.grid.points[k]));
    return d;
}

PanelDataset sample_panel(const ModelConfig& m, std::int64_t n, std::uint64_t seed) {
    m.validate();
    if (n <= 0) throw NoObservations("sample size must be positive");
    PanelDataset d;
    d.T = m.T;
    d.cells.resize(static_cast<std::size_t>(n) * 2 * m.T);
    std::mt19937_64 rng(seed);
    const int K = m.grid.size();
    for (std::int64_t i = 0; i < n; ++i) {
        const int x1 = unit_uniform(rng) < m.q[1] ? 1 : 0;
        int k = K - 1;
        double u = unit_uniform(rng), acc = 0.0;
        for (int j = 0; j < K; ++j) {
            acc += m.dist.pi[x1][j];
            if (u < acc) { k = j; break; }
        }
        const double alpha = m.grid.points[k];
        std::uint8_t* row = d.cells.data() + static_cast<std::size_t>(i) * 2 * m.T;
        unsigned ym = 0, xm = static_cast<unsigned>(x1);
        int xt = x1;
        for (int t = 1; t <= m.T; ++t) {
            if (t >= 2) {
                xt = unit_uniform(rng) < m.feedback.at(t, ym, xm, k) ? 1 : 0;
                xm |= static_cast<unsigned>(xt) << (t - 1);
            }
            const int yt = unit_uniform(rng) < evaluate(m.link, m.theta * xt + alpha) ? 1 : 0;
            ym |= static_cast<unsigned>(yt) << (t - 1);
            row[2 * (t - 1)] = static_cast<std::uint8_t>(xt);
            row[2 * (t - 1) + 1] = static_cast<std::uint8_t>(yt);
        }
    }
    return d;
}

void write_panel_csv(std::ostream& os, const PanelDataset& d) {
    for (int t = 1; t <= d.T; ++t)
        os << (t > 1 ? "," : "") << "x" << t << ",y" << t;
    os << "\n";
    for (std::int64_t i = 0; i < d.n(); ++i) {
        for (int t = 1; t <= d.T; ++t)
            os << (t > 1 ? "," : "") << d.x(i, t) << "," << d.y(i, t);
        os << "\n";
    }
}

PanelDataset read_panel_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error("panel csv is empty");
    int T = 0;
    {
        std::string want;
        for (int t = 1; t <= kMaxPeriods; ++t) {
            want += (t > 1 ? "," : "");
            want += "x" + std::to_string(t) + ",y" + std::to_string(t);
            if (line == want) { T = t; break; }
        }
    }
    if (T < kMinPeriods) throw Error("panel csv header not recognized: " + line);
    PanelDataset d;
    d.T = T;
    std::int64_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        int col = 0;
        while (std::getline(ls, tok, ',')) {
            if (tok != "0" && tok != "1")
                throw Error("panel csv line " + std::to_string(lineno) +
                            ": cell must be 0 or 1, got '" + tok + "'");
            d.cells.push_back(static_cast<std::uint8_t>(tok == "1"));
            ++col;
        }
        if (col != 2 * T)
            throw Error("panel csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(2 * T) + " cells, got " + std::to_string(col));
    }
    return d;
}

} // namespace panelid
