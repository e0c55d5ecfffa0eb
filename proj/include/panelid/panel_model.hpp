#pragma once

#include "panelid/links.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace panelid {

inline constexpr int kMinPeriods = 2;
inline constexpr int kMaxPeriods = 6;

// Support grid of the heterogeneity distribution; strictly increasing.
struct HeterogeneityGrid {
    std::vector<double> points;
    int size() const { return static_cast<int>(points.size()); }
    void validate() const;
};

// Mass function over the grid per initial-covariate value: pi[x1][k].
struct HeterogeneityDist {
    std::array<std::vector<double>, 2> pi;
    void validate(int K) const;
};

// Covariate transition probabilities Pr(X_t = 1 | y^{t-1}, x^{t-1}, alpha_k)
// for t = 2..T. ymask bit i-1 = y_i, xmask bit i-1 = x_i (x_1 included).
class FeedbackProcess {
public:
    FeedbackProcess() = default;

    static FeedbackProcess constant(int T, int K, double g);
    // T=2 shorthand: one probability per (y1, x1) cell, flat in alpha.
    // cell index = y1*2 + x1.
    static FeedbackProcess by_cell_t2(int K, const std::array<double, 4>& cell);

    int periods() const { return T_; }
    int grid_size() const { return K_; }
    double at(int t, unsigned ymask, unsigned xmask, int k) const;
    void set(int t, unsigned ymask, unsigned xmask, int k, double v);
    bool interior() const; // every entry strictly inside (0,1)
    void validate() const; // entries in [0,1]

private:
    FeedbackProcess(int T, int K);
    std::size_t slot(int t, unsigned ymask, unsigned xmask, int k) const;
    int T_ = 0, K_ = 0;
    std::vector<std::vector<double>> tables_; // tables_[t-2] has 4^{t-1} * K entries
};

// Path (y_1..y_T, x_2..x_T); the initial covariate is carried separately.
// ymask bit t-1 = y_t; xmask bit t-2 = x_t for t >= 2.
struct History {
    unsigned ymask = 0;
    unsigned xmask = 0;
    int y(int t) const { return static_cast<int>((ymask >> (t - 1)) & 1u); }
    int x(int t) const { return static_cast<int>((xmask >> (t - 2)) & 1u); }
    bool operator==(const History&) const = default;
};

int history_count(int T); // 2^{2T-1}
int encode_history(int T, const History& h);
History decode_history(int T, int index);
std::vector<History> enumerate_histories(int T); // CapExceeded outside [2,6]

// Product of outcome terms F(theta*x_t+alpha)^{y_t}(1-F)^{1-y_t} over t=1..T
// and feedback terms over t=2..T; alpha_index selects the feedback column.
double history_probability(double theta, const LinkSpec& link, double alpha,
                           int alpha_index, int x1, const History& h,
                           const FeedbackProcess& G);

// Distribution of (y^T, x^{2:T}) by initial-covariate block; the x1=1 block
// occupies indices [0, 2^{2T-1}) and the x1=0 block follows. q[x1] = Pr(X_1=x1).
struct OutcomeVector {
    int T = 0;
    std::vector<double> values;
    std::array<double, 2> q{0.5, 0.5};

    int block_size() const { return history_count(T); }
    double at(int x1, int h) const { return values[offset(x1) + h]; }
    double& at(int x1, int h) { return values[offset(x1) + h]; }
    int offset(int x1) const { return x1 ? 0 : block_size(); }
    void validate() const; // entries >= 0, block sums within 1e-10 of 1
};

struct ModelConfig {
    int T = 2;
    LinkSpec link;
    double theta = 0.0;
    HeterogeneityGrid grid;
    HeterogeneityDist dist;
    FeedbackProcess feedback;
    std::array<double, 2> q{0.5, 0.5};
    void validate() const;
};

OutcomeVector compute_Q(double theta, const LinkSpec& link, const HeterogeneityGrid& grid,
                        const HeterogeneityDist& dist, const FeedbackProcess& G,
                        const std::array<double, 2>& q);
OutcomeVector compute_Q(const ModelConfig& m);

// Benchmark generating process: grid at the K equidistant standard-normal
// percentiles with density-proportional weights, feedback flat at 1/2,
// q = (1/2, 1/2), identical heterogeneity across initial covariate values.
ModelConfig dgp_default(int T, double theta, const LinkSpec& link, int K);

// True average effect of moving the covariate 0 -> 1 under the config.
double average_effect(const ModelConfig& m);

// Observed panel, one unit per row: x1,y1,x2,y2,...,xT,yT as 0/1.
struct PanelDataset {
    int T = 0;
    std::vector<std::uint8_t> cells; // row-major, 2T entries per unit
    std::int64_t n() const { return T ? static_cast<std::int64_t>(cells.size()) / (2 * T) : 0; }
    int x(std::int64_t i, int t) const { return cells[static_cast<std::size_t>(i) * 2 * T + 2 * (t - 1)]; }
    int y(std::int64_t i, int t) const { return cells[static_cast<std::size_t>(i) * 2 * T + 2 * (t - 1) + 1]; }
};

PanelDataset sample_panel(const ModelConfig& m, std::int64_t n, std::uint64_t seed);
void write_panel_csv(std::ostream& os, const PanelDataset& d);
PanelDataset read_panel_csv(std::istream& is);

} // namespace panelid
