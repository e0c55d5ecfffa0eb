#pragma once

#include "panelid/lp_core.hpp"
#include "panelid/panel_model.hpp"

#include <iosfwd>
#include <memory>
#include <optional>

namespace panelid {

enum class ExogeneityMode { Predetermined, StrictlyExogenous };

const char* mode_name(ExogeneityMode m);

// Latent-mass variables psi(x1, x^{2:T}, y^{T-1}, alpha_k) <-> flat LP columns.
// The x1=1 block precedes the x1=0 block, mirroring OutcomeVector.
struct PsiLayout {
    int T = 0;
    int K = 0;

    int n_vars() const { return 2 * block_vars(); }
    int block_vars() const { return prefix_count() * K; }
    int prefix_count() const { return 1 << (2 * T - 2); } // joint (x, y-prefix) cells

    // xmask bit t-2 = x_t (t>=2); ymask bit t-1 = y_t (t<=T-1).
    int index(int x1, unsigned xmask, unsigned ymask, int k) const;
    struct Cell { int x1; unsigned xmask; unsigned ymask; int k; };
    Cell decode(int flat) const;
};

struct RowAudit {
    int matching = 0;      // one row per observed-distribution entry
    int normalization = 0; // unit mass per block
    int conditional = 0;   // per-period outcome-law rows
    int strict = 0;        // factorization rows, strict mode only
};

enum class ApeObjective { None, Lower, Upper };

// Assembles the feasibility program for a candidate theta. Row order:
// matching, normalization, conditional, then (strict mode) factorization.
LinearProgram build_feasibility_lp(double theta_tilde, const OutcomeVector& Q,
                                   const LinkSpec& link, const HeterogeneityGrid& grid,
                                   ExogeneityMode mode,
                                   ApeObjective objective = ApeObjective::None,
                                   RowAudit* audit = nullptr);

struct ScanOptions {
    double theta_min = 0.0;
    double theta_max = 0.0;
    double step = 0.02;
    double bisect_tol = 1e-3;
    double lp_tol = 1e-9;
    int threads = 1;
};

// Figure-style default: [theta_true - 1.5, theta_true + 1.5], step 0.02.
ScanOptions default_scan(double theta_true);

struct PointRecord {
    double theta_tilde = 0.0;
    bool feasible = false;
    double phase1_obj = 0.0;
    bool marginal = false;
    std::optional<double> delta_lo, delta_hi;
};

struct SetResult {
    std::vector<PointRecord> points; // sorted by theta_tilde
    double lo = 0.0, hi = 0.0;       // smallest interval covering all feasible points
    bool nonconvex = false;          // disconnected feasible grid points seen
    bool lo_open = false, hi_open = false; // set touches the scan boundary
    double bisect_tol = 0.0;
    double width() const { return hi - lo; }
};

SetResult compute_theta_set(const OutcomeVector& Q, const LinkSpec& link,
                            const HeterogeneityGrid& grid, ExogeneityMode mode,
                            const ScanOptions& opt);

struct Interval {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
};

// Min/max average effect over the feasible masses at every feasible scan
// point of `set`; fills the per-point delta fields in place.
Interval compute_ape_bounds(const OutcomeVector& Q, const LinkSpec& link,
                            const HeterogeneityGrid& grid, ExogeneityMode mode,
                            SetResult& set);

// One row per evaluated candidate: theta_tilde,feasible,delta_lo,delta_hi,phase1_obj.
void write_set_trace_csv(std::ostream& os, const SetResult& set);

// Single-candidate feasibility / average-effect range, used by the scan.
//
// Works on an equivalent column form of the constraint system: per effects
// point, admissible mass slices are cones over laws generated by deterministic
// covariate rules (predetermined mode) or fixed covariate paths (strict mode).
// Small rule sets are enumerated outright; large ones are priced in by a
// dynamic program over decision cells (column generation). Masters are solved
// with the two-phase simplex of lp_core, so verdicts agree with solving the
// assembled program directly.
class ScanEngine {
public:
    ScanEngine(const OutcomeVector& Q, const LinkSpec& link, const HeterogeneityGrid& grid,
               ExogeneityMode mode, double lp_tol = 1e-9);
    ~ScanEngine();
    ScanEngine(ScanEngine&&) noexcept;

    struct PointStatus {
        bool feasible = false;
        double phase1_obj = 0.0;
        bool marginal = false;
    };
    PointStatus feasible(double theta_tilde);
    Interval ape_range(double theta_tilde); // pre: feasible(theta_tilde) holds

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace panelid
