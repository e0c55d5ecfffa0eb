#pragma once

#include "panelid/panel_model.hpp"
#include "panelid/set_builder.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace panelid {

// Parsed and validated run configuration (JSON, schema version 1).
//
// {
//   "schema": 1,
//   "model": {"link": "logit", "T": 2, "K": 31, "theta": 0.5},        // or "theta_list": [...]
//   "dgp": {"grid": [...], "g_cells": [g00,g01,g10,g11], "q": [q0,q1]},      // optional block
//   "scan": {"min": -1.0, "max": 2.0, "step": 0.05, "bisect_tol": 1e-3},     // optional block
//   "mode": "predetermined" | "strict" | "both",
//   "seed": 42, "threads": 1, "n": 100000, "data": "panel.csv"
// }
//
// Unknown keys anywhere are rejected. Without a scan block the scan covers
// [theta-1.5, theta+1.5] per theta at step 0.02. The dgp block overrides parts
// of the benchmark process: "grid" replaces the support points (K must match),
// "g_cells" sets the two-period covariate transition probability per (y1, x1)
// cell in the order (0,0),(0,1),(1,0),(1,1), "q" sets the initial-covariate law.
struct RunConfig {
    LinkSpec link;
    int T = 2;
    int K = 31;
    std::vector<double> thetas;

    std::array<double, 2> q{0.5, 0.5};
    std::optional<std::vector<double>> grid_override;
    std::optional<std::array<double, 4>> g_cells;

    std::optional<ScanOptions> scan; // absolute range when present
    std::vector<ExogeneityMode> modes;

    std::uint64_t seed = 1;
    int threads = 1;
    std::int64_t n = 10000;
    std::string data_path;

    ModelConfig model(double theta) const;
    ScanOptions scan_for(double theta) const;
};

RunConfig parse_run_config(const std::string& json_text); // throws ConfigError
RunConfig load_run_config(const std::string& path);       // throws ConfigError

} // namespace panelid
