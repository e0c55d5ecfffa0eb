#include "panelid/run_config.hpp"

#include "panelid/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace panelid {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const char* where, std::set<std::string> allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(std::string("unknown key '") + key + "' in " + where);
}

double number_at(const json& obj, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> number_list(const json& v, const char* what) {
    if (!v.is_array()) throw ConfigError(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(std::string(what) + " must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
        reject_unknown(doc, "document",
                       {"schema", "model", "dgp", "scan", "mode", "seed", "threads", "n", "data"});
        if (!doc.contains("schema") || doc["schema"] != 1)
            throw ConfigError("missing or unsupported schema version (expected 1)");

        RunConfig cfg;

        if (!doc.contains("model")) throw ConfigError("missing 'model' block");
        const json& model = doc["model"];
        if (!model.is_object()) throw ConfigError("'model' must be an object");
        reject_unknown(model, "model", {"link", "T", "K", "theta", "theta_list"});
        if (!model.contains("link") || !model["link"].is_string())
            throw ConfigError("model.link must be a string");
        cfg.link.family = family_from_name(model["link"].get<std::string>());
        cfg.T = static_cast<int>(number_at(model, "T"));
        if (cfg.T < kMinPeriods || cfg.T > kMaxPeriods)
            throw ConfigError("model.T must lie in [" + std::to_string(kMinPeriods) + ", " +
                              std::to_string(kMaxPeriods) + "]");
        cfg.K = static_cast<int>(number_at(model, "K"));
        if (cfg.K < 1) throw ConfigError("model.K must be at least 1");
        const bool has_one = model.contains("theta");
        const bool has_list = model.contains("theta_list");
        if (has_one == has_list)
            throw ConfigError("model needs exactly one of 'theta' or 'theta_list'");
        if (has_one) {
            cfg.thetas = {number_at(model, "theta")};
        } else {
            cfg.thetas = number_list(model["theta_list"], "model.theta_list");
            if (cfg.thetas.empty()) throw ConfigError("model.theta_list is empty");
        }

        if (doc.contains("dgp")) {
            const json& dgp = doc["dgp"];
            if (!dgp.is_object()) throw ConfigError("'dgp' must be an object");
            reject_unknown(dgp, "dgp", {"grid", "g_cells", "q"});
            if (dgp.contains("grid")) {
                auto g = number_list(dgp["grid"], "dgp.grid");
                if (static_cast<int>(g.size()) != cfg.K)
                    throw ConfigError("dgp.grid has " + std::to_string(g.size()) +
                                      " points, model.K is " + std::to_string(cfg.K));
                for (std::size_t k = 1; k < g.size(); ++k)
                    if (!(g[k] > g[k - 1]))
                        throw ConfigError("dgp.grid must be strictly increasing");
                cfg.grid_override = std::move(g);
            }
            if (dgp.contains("g_cells")) {
                auto c = number_list(dgp["g_cells"], "dgp.g_cells");
                if (c.size() != 4)
                    throw ConfigError("dgp.g_cells needs 4 entries, one per (y1, x1) cell");
                for (double v : c)
                    if (!(v >= 0.0 && v <= 1.0))
                        throw ConfigError("dgp.g_cells entries must lie in [0,1]");
                cfg.g_cells = std::array<double, 4>{c[0], c[1], c[2], c[3]};
            }
            if (dgp.contains("q")) {
                auto qv = number_list(dgp["q"], "dgp.q");
                if (qv.size() != 2 || !(qv[0] >= 0.0) || !(qv[1] >= 0.0) ||
                    std::fabs(qv[0] + qv[1] - 1.0) > 1e-9)
                    throw ConfigError("dgp.q must be two nonnegative numbers summing to one");
                cfg.q = {qv[0], qv[1]};
            }
        }

        if (doc.contains("scan")) {
            const json& scan = doc["scan"];
            if (!scan.is_object()) throw ConfigError("'scan' must be an object");
            reject_unknown(scan, "scan", {"min", "max", "step", "bisect_tol"});
            ScanOptions o;
            o.theta_min = number_at(scan, "min");
            o.theta_max = number_at(scan, "max");
            o.step = number_at(scan, "step");
            if (scan.contains("bisect_tol")) o.bisect_tol = number_at(scan, "bisect_tol");
            if (!(o.theta_min < o.theta_max))
                throw ConfigError("scan.min must be below scan.max");
            if (!(o.step > 0.0)) throw ConfigError("scan.step must be positive");
            if (!(o.bisect_tol > 0.0)) throw ConfigError("scan.bisect_tol must be positive");
            cfg.scan = o;
        }

        if (!doc.contains("mode") || !doc["mode"].is_string())
            throw ConfigError("missing 'mode' (predetermined, strict, or both)");
        const std::string mode = doc["mode"].get<std::string>();
        if (mode == "predetermined") {
            cfg.modes = {ExogeneityMode::Predetermined};
        } else if (mode == "strict") {
            cfg.modes = {ExogeneityMode::StrictlyExogenous};
        } else if (mode == "both") {
            cfg.modes = {ExogeneityMode::Predetermined, ExogeneityMode::StrictlyExogenous};
        } else {
            throw ConfigError("mode must be predetermined, strict, or both; got '" + mode + "'");
        }

        if (doc.contains("seed")) {
            if (!doc["seed"].is_number_unsigned())
                throw ConfigError("'seed' must be a nonnegative integer");
            cfg.seed = doc["seed"].get<std::uint64_t>();
        }
        if (doc.contains("threads")) {
            cfg.threads = static_cast<int>(number_at(doc, "threads"));
            if (cfg.threads < 1) throw ConfigError("'threads' must be at least 1");
        }
        if (doc.contains("n")) {
            cfg.n = static_cast<std::int64_t>(number_at(doc, "n"));
            if (cfg.n < 1) throw ConfigError("'n' must be at least 1");
        }
        if (doc.contains("data")) {
            if (!doc["data"].is_string()) throw ConfigError("'data' must be a file path");
            cfg.data_path = doc["data"].get<std::string>();
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

ModelConfig RunConfig::model(double theta) const {
    ModelConfig m = dgp_default(T, theta, link, K);
    if (grid_override) {
        m.grid.points = *grid_override;
        // explicit support: normal-density weights at the new points, renormalized
        std::vector<double> w(K);
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
            w[k] = std::exp(-0.5 * m.grid.points[k] * m.grid.points[k]);
            s += w[k];
        }
        for (double& v : w) v /= s;
        m.dist.pi[0] = w;
        m.dist.pi[1] = w;
    }
    if (g_cells)
        for (unsigned y1 = 0; y1 <= 1; ++y1)
            for (unsigned x1 = 0; x1 <= 1; ++x1)
                for (int k = 0; k < K; ++k)
                    m.feedback.set(2, y1, x1, k, (*g_cells)[y1 * 2 + x1]);
    m.q = q;
    return m;
}

ScanOptions RunConfig::scan_for(double theta) const {
    if (scan) return *scan;
    return default_scan(theta);
}

} // namespace panelid
