#pragma once

#include "panelid/errors.hpp"

#include <string>
#include <utility>
#include <vector>

namespace panelid {

enum class ObjectiveSense { Minimize, Maximize };

struct SparseRow {
    std::vector<std::pair<int, double>> coeffs; // (variable index, coefficient)
    double rhs = 0.0;
};

// Equality-constrained program over nonnegative variables.
struct LinearProgram {
    int n_vars = 0;
    std::vector<SparseRow> rows;
    std::vector<double> objective; // dense, size n_vars; empty = feasibility only
    ObjectiveSense sense = ObjectiveSense::Minimize;
    void validate() const; // throws MalformedLP
};

enum class LpStatus { Optimal, Feasible, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;        // phase-two value when Optimal
    double phase1_objective = 0.0; // residual infeasibility after phase one
    bool marginal = false;         // phase-one value landed in [tol, 10*tol]
    std::vector<double> duals;     // row multipliers of the last phase solved
    int iterations = 0;
};

// Thrown when the pivot cap is hit; carries the state reached so far.
struct IterationLimit : Error {
    IterationLimit(const std::string& msg, LpSolution partial_)
        : Error(msg), partial(std::move(partial_)) {}
    LpSolution partial;
};

struct SolveOptions {
    double tol = 1e-9;         // infeasibility threshold on the phase-one optimum
    int max_iterations = 50000;
};

LpSolution solve(const LinearProgram& lp, const SolveOptions& opt = {});

// Text form with sections Minimize/Maximize, Subject To, Bounds, End;
// variables are named psi_<index>.
std::string export_lp_text(const LinearProgram& lp);

} // namespace panelid
