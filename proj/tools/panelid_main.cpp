// panelid: sharp identified sets for the coefficient and the average effect
// in two-or-more-period binary-choice panels with one binary predetermined
// covariate, plus the point estimators and diagnostics that go with them.

#include "panelid/diagnostics.hpp"
#include "panelid/errors.hpp"
#include "panelid/estimators.hpp"
#include "panelid/lp_core.hpp"
#include "panelid/panel_model.hpp"
#include "panelid/run_config.hpp"
#include "panelid/set_builder.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace panelid;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot open output file " + p.string());
    return os;
}

void run_set(const RunConfig& cfg, const fs::path& out) {
    auto summary = open_out(out / "summary.csv");
    summary << "theta_true,mode,lo,hi,width\n";
    for (std::size_t i = 0; i < cfg.thetas.size(); ++i) {
        const double theta = cfg.thetas[i];
        const ModelConfig m = cfg.model(theta);
        const OutcomeVector Q = compute_Q(m);
        ScanOptions opt = cfg.scan_for(theta);
        opt.threads = cfg.threads;
        for (ExogeneityMode mode : cfg.modes) {
            const SetResult set = compute_theta_set(Q, m.link, m.grid, mode, opt);
            summary << fmt(theta) << ',' << mode_name(mode) << ',' << fmt(set.lo) << ','
                    << fmt(set.hi) << ',' << fmt(set.width()) << '\n';
            auto trace = open_out(out / ("trace_" + std::to_string(i) + "_" +
                                         mode_name(mode) + ".csv"));
            write_set_trace_csv(trace, set);
        }
    }
}

void run_ape(const RunConfig& cfg, const fs::path& out) {
    auto csv = open_out(out / "ape.csv");
    csv << "theta_true,delta_true,mode,delta_lo,delta_hi\n";
    for (double theta : cfg.thetas) {
        const ModelConfig m = cfg.model(theta);
        const OutcomeVector Q = compute_Q(m);
        const double delta_true = average_effect(m);
        ScanOptions opt = cfg.scan_for(theta);
        opt.threads = cfg.threads;
        for (ExogeneityMode mode : cfg.modes) {
            SetResult set = compute_theta_set(Q, m.link, m.grid, mode, opt);
            const Interval iv = compute_ape_bounds(Q, m.link, m.grid, mode, set);
            csv << fmt(theta) << ',' << fmt(delta_true) << ',' << mode_name(mode) << ','
                << fmt(iv.lo) << ',' << fmt(iv.hi) << '\n';
        }
    }
}

void run_diagnose(const RunConfig& cfg, const fs::path& out) {
    auto txt = open_out(out / "diagnose.txt");
    auto csv = open_out(out / "diagnose.csv");
    csv << "check,quantity,value\n";
    for (double theta : cfg.thetas) {
        const ModelConfig m = cfg.model(theta);
        const OutcomeVector Q = compute_Q(m);

        txt << "link: " << family_name(m.link.family) << "  T: " << m.T
            << "  theta: " << fmt(theta) << "\n";
        csv << "model,theta," << fmt(theta) << '\n';

        const IndependenceResult ind = check_linear_independence(m.link, theta, m.grid);
        txt << "point-identifying contrast {F(theta+a), F(a), 1}: "
            << (ind.independent ? "independent" : "dependent")
            << "  (smallest sv " << fmt(ind.smallest_sv) << ", largest sv "
            << fmt(ind.largest_sv) << ")\n";
        csv << "independence,independent," << (ind.independent ? 1 : 0) << '\n';
        csv << "independence,smallest_sv," << fmt(ind.smallest_sv) << '\n';
        csv << "independence,largest_sv," << fmt(ind.largest_sv) << '\n';
        if (ind.certificate) {
            const auto& c = *ind.certificate;
            txt << "  null combination: " << fmt(c[0]) << " * F(theta+a) + " << fmt(c[1])
                << " * F(a) + " << fmt(c[2]) << "\n";
            csv << "independence,certificate_a," << fmt(c[0]) << '\n';
            csv << "independence,certificate_b," << fmt(c[1]) << '\n';
            csv << "independence,certificate_c," << fmt(c[2]) << '\n';
        }

        const auto [m0, m1] = sign_moment(Q);
        txt << "sign moments: m0 " << fmt(m0) << ", m1 " << fmt(m1) << "\n";
        csv << "sign_moment,m0," << fmt(m0) << '\n';
        csv << "sign_moment,m1," << fmt(m1) << '\n';

        if (m.T == 2) {
            const MomentResiduals res = verify_feedback_robust_moment(
                exponential_moment_function(theta), theta, m.link, m.grid, m.T);
            txt << "feedback-robust difference transform residuals: eq1 "
                << fmt(res.max_residual_eq1) << ", eq2 " << fmt(res.max_residual_eq2)
                << "\n";
            csv << "robust_moment,max_residual_eq1," << fmt(res.max_residual_eq1) << '\n';
            csv << "robust_moment,max_residual_eq2," << fmt(res.max_residual_eq2) << '\n';
        } else {
            txt << "feedback-robust difference transform: two-period check, skipped\n";
        }

        const JacobianRangeResult jac =
            jacobian_range_test(theta, m.link, m.grid, m.dist, m.feedback);
        txt << "local coefficient direction vs nuisance span: residual x1=1 "
            << fmt(jac.residual[1]) << ", x1=0 " << fmt(jac.residual[0]) << ", ranks "
            << jac.rank[1] << "/" << jac.rank[0]
            << (jac.singular_projection ? " (rank-deficient nuisance design)" : "") << "\n";
        csv << "jacobian_range,residual_x1," << fmt(jac.residual[1]) << '\n';
        csv << "jacobian_range,residual_x0," << fmt(jac.residual[0]) << '\n';
        csv << "jacobian_range,rank_x1," << jac.rank[1] << '\n';
        csv << "jacobian_range,rank_x0," << jac.rank[0] << '\n';
        csv << "jacobian_range,singular_projection," << (jac.singular_projection ? 1 : 0)
            << '\n';
    }
}

void run_estimate(const RunConfig& cfg, const fs::path& out) {
    if (cfg.data_path.empty())
        throw ConfigError("estimate needs a \"data\" path in the configuration");
    std::ifstream is(cfg.data_path);
    if (!is) throw ConfigError("cannot open data file " + cfg.data_path);
    const PanelDataset data = read_panel_csv(is);

    auto report = open_out(out / "estimate.txt");
    switch (cfg.link.family) {
        case LinkFamily::Logit: {
            const WclResult r = weighted_conditional_logit(data);
            report << "method: weighted_conditional_logit\n";
            report << "theta_hat: " << fmt(r.theta_hat) << "\n";
            report << "n_switchers: " << r.n_switchers << "\n";
            report << "g_hat: " << fmt(r.g_hat[0]) << ',' << fmt(r.g_hat[1]) << ','
                   << fmt(r.g_hat[2]) << ',' << fmt(r.g_hat[3]) << "\n";
            break;
        }
        case LinkFamily::Exponential: {
            const double hat = exponential_estimate(data, 0, {-4.0, 4.0});
            report << "method: exponential_moment_root\n";
            report << "theta_hat: " << fmt(hat) << "\n";
            break;
        }
        case LinkFamily::Probit:
            throw ConfigError("no estimator is available for the probit link");
    }
}

void run_simulate(const RunConfig& cfg, const fs::path& out) {
    const ModelConfig m = cfg.model(cfg.thetas.front());
    const PanelDataset data = sample_panel(m, cfg.n, cfg.seed);
    auto os = open_out(out / "panel.csv");
    write_panel_csv(os, data);
}

void run_export_lp(const RunConfig& cfg, const fs::path& out) {
    const double theta = cfg.thetas.front();
    const ModelConfig m = cfg.model(theta);
    const OutcomeVector Q = compute_Q(m);
    for (ExogeneityMode mode : cfg.modes) {
        const LinearProgram lp = build_feasibility_lp(theta, Q, m.link, m.grid, mode);
        auto os = open_out(out / (std::string("program_") + mode_name(mode) + ".lp"));
        os << export_lp_text(lp);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"identified sets for binary-choice panels with a predetermined binary "
                 "covariate"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int threads = 1;
    std::uint64_t seed = 0;
    std::vector<CLI::Option*> threads_opts, seed_opts;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        threads_opts.push_back(
            sub->add_option("--threads", threads, "scan worker threads (overrides config)"));
        seed_opts.push_back(
            sub->add_option("--seed", seed, "simulation seed (overrides config)"));
        return sub;
    };

    CLI::App* sc_set =
        add_common(app.add_subcommand("set", "scan the identified set of the coefficient"));
    CLI::App* sc_ape =
        add_common(app.add_subcommand("ape", "bound the average effect over the set"));
    CLI::App* sc_diag =
        add_common(app.add_subcommand("diagnose", "run the identification diagnostics"));
    CLI::App* sc_est =
        add_common(app.add_subcommand("estimate", "point-estimate the coefficient from data"));
    CLI::App* sc_sim =
        add_common(app.add_subcommand("simulate", "draw a panel from the configured process"));
    CLI::App* sc_lp =
        add_common(app.add_subcommand("export-lp", "write the feasibility program as text"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = load_run_config(config_path);
        for (const auto* o : threads_opts)
            if (o->count()) cfg.threads = threads;
        for (const auto* o : seed_opts)
            if (o->count()) cfg.seed = seed;
        if (cfg.threads < 1) throw ConfigError("threads must be at least 1");

        const fs::path out(out_dir);
        fs::create_directories(out);

        if (sc_set->parsed()) run_set(cfg, out);
        else if (sc_ape->parsed()) run_ape(cfg, out);
        else if (sc_diag->parsed()) run_diagnose(cfg, out);
        else if (sc_est->parsed()) run_estimate(cfg, out);
        else if (sc_sim->parsed()) run_simulate(cfg, out);
        else if (sc_lp->parsed()) run_export_lp(cfg, out);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "computation failed: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}
