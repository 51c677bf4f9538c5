// Command-line front end for the constrained (1,lambda) ES simulator.
//
//   lces run <config.ini> [--seed N] [--out DIR] [--no-plots]
//   lces check <config.ini>
//   lces diagnose <config.ini>
//
// Exit codes: 0 success, 1 configuration error, 2 simulation error,
// 3 completed with an ergodicity-condition flag raised.

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lces/lces.hpp"

namespace {

int check_command(const std::string& path) {
    const lces::ParseResult parsed = lces::parse_config_file(path);
    if (!parsed.ok()) {
        std::fprintf(stderr, "config invalid: %zu problem(s)\n", parsed.errors.size());
        for (const std::string& e : parsed.errors)
            std::fprintf(stderr, "  - %s\n", e.c_str());
        return 1;
    }
    const lces::ExperimentConfig& cfg = *parsed.config;
    std::printf("config ok: n=%d lambda=%d theta=%.10g sigma=%.10g\n", cfg.n, cfg.lambda,
                cfg.theta, cfg.sigma);
    std::printf("  distribution: %s\n", cfg.build_distribution()->describe().c_str());
    std::printf("  run: steps=%ld burn_in=%ld replicas=%d seed=%" PRIu64
                " delta0=%.10g thinning=%ld\n",
                cfg.run.steps, cfg.run.burn_in, cfg.run.replicas, cfg.run.seed, cfg.run.delta0,
                cfg.run.thinning);
    return 0;
}

void print_doubling(const char* label, const lces::DoublingTest& t) {
    std::printf("  %-28s final mean %12.6g  tail fluctuation %8.4f  %s\n", label,
                t.final_mean, t.tail_fluctuation, t.divergent ? "DIVERGENT" : "stable");
}

int diagnose_command(const std::string& path) {
    const lces::ParseResult parsed = lces::parse_config_file(path);
    if (!parsed.ok()) {
        for (const std::string& e : parsed.errors)
            std::fprintf(stderr, "  - %s\n", e.c_str());
        return 1;
    }
    const lces::ExperimentConfig& cfg = *parsed.config;
    try {
        const lces::Problem problem = cfg.problem();
        const auto dist = cfg.build_distribution();
        const lces::ConditionDiagnostics diag = lces::diagnose_conditions(
            problem, *dist, {0.25, 1.0, 4.0, 16.0}, 40000, cfg.run.seed);

        std::printf("condition diagnostics for %s (lambda=%d, theta=%.6g)\n",
                    dist->describe().c_str(), problem.lambda, problem.theta);
        print_doubling("E[exp(g(M))], raw step:", diag.exp_moment);
        for (std::size_t i = 0; i < diag.delta_grid.size(); ++i) {
            char label[64];
            std::snprintf(label, sizeof(label), "E|g(M~)| at delta=%-8.4g", diag.delta_grid[i]);
            print_doubling(label, diag.feasible_abs_g[i]);
        }
        std::printf("  selected-step mean constraint value by delta:\n");
        for (std::size_t i = 0; i < diag.delta_grid.size(); ++i)
            std::printf("    delta=%-8.4g E[g(M*)] = %12.6g (se %.3g)\n", diag.delta_grid[i],
                        diag.selected_g_mean[i], diag.selected_g_se[i]);
        if (diag.unconstrained_limit)
            std::printf("  unconstrained limit of E[g(M*)]: %.6g\n",
                        *diag.unconstrained_limit);
        const lces::IsotropyCheck iso =
            lces::isotropy_positivity_check(problem, *dist, 1.0, 50000, 50000, cfg.run.seed);
        std::printf("  isotropy declared: %s; E[M*_2|delta=1] = %.6g [%.6g, %.6g]; "
                    "rate = %.6g [%.6g, %.6g]\n",
                    iso.declared_isotropic ? "yes" : "no", iso.selected_m2.estimate,
                    iso.selected_m2.lower, iso.selected_m2.upper,
                    iso.divergence_rate.estimate, iso.divergence_rate.lower,
                    iso.divergence_rate.upper);
        if (diag.any_flag()) {
            std::printf("flag raised: %s%s\n",
                        diag.exp_moment_flag ? "[exp moment] " : "",
                        diag.abs_moment_flag ? "[feasible |g| moment]" : "");
            return 3;
        }
        std::printf("no condition flags raised\n");
        return 0;
    } catch (const lces::ResampleCapError& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

int run_command(const std::string& path, const lces::RunOptions& options) {
    const lces::ParseResult parsed = lces::parse_config_file(path);
    if (!parsed.ok()) {
        std::fprintf(stderr, "config invalid: %zu problem(s)\n", parsed.errors.size());
        for (const std::string& e : parsed.errors)
            std::fprintf(stderr, "  - %s\n", e.c_str());
        return 1;
    }
    const lces::ExperimentOutcome outcome = lces::run_experiment(*parsed.config, options);
    if (outcome.report) {
        const lces::RunReport& r = *outcome.report;
        std::printf("distribution: %s  (n=%d, lambda=%d, theta=%.6g, sigma=%.6g)\n",
                    r.distribution.c_str(), r.n, r.lambda, r.theta, r.sigma);
        std::printf("steps: %ld (burn-in %ld, replicas %d, seed %" PRIu64 ")\n", r.steps,
                    r.burn_in, r.replicas, r.seed);
        std::printf("divergence rate: %.8g  [%.8g, %.8g] (95%% CI)\n",
                    r.divergence_rate.estimate, r.divergence_rate.lower,
                    r.divergence_rate.upper);
        std::printf("stationarity residual E[g(M*)]: %.4g  [%.4g, %.4g]\n",
                    r.stationarity_residual.estimate, r.stationarity_residual.lower,
                    r.stationarity_residual.upper);
        std::printf("stationary delta: mean %.6g, quartiles [%.6g, %.6g, %.6g]\n",
                    r.stationary_delta.mean, r.stationary_delta.q25, r.stationary_delta.q50,
                    r.stationary_delta.q75);
        std::printf("resampling: %.4g per iteration (max %" PRIu64 " in one iteration)\n",
                    r.resampling.mean_per_iteration, r.resampling.max_in_one_iteration);
        for (const std::string& f : outcome.files)
            std::printf("wrote %s\n", f.c_str());
    }
    if (!outcome.message.empty())
        std::printf("%s\n", outcome.message.c_str());
    return outcome.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained (1,lambda) evolution strategy simulator"};
    app.require_subcommand(1);

    std::string run_config;
    lces::RunOptions options;
    std::uint64_t seed_value = 0;
    CLI::App* run = app.add_subcommand("run", "simulate the chain and write artifacts");
    run->add_option("config", run_config, "INI config file")->required();
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_value, "override the [run] seed");
    std::string out_dir;
    CLI::Option* out_opt =
        run->add_option("--out", out_dir, "output directory (wins over config and env)");
    run->add_flag("--no-plots", options.no_plots, "skip SVG plot output");

    std::string check_config;
    CLI::App* check = app.add_subcommand("check", "validate a config and exit");
    check->add_option("config", check_config, "INI config file")->required();

    std::string diagnose_config;
    CLI::App* diagnose =
        app.add_subcommand("diagnose", "probe the ergodicity conditions and exit");
    diagnose->add_option("config", diagnose_config, "INI config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (run->parsed()) {
        if (*seed_opt)
            options.seed = seed_value;
        if (*out_opt)
            options.out_dir = out_dir;
        return run_command(run_config, options);
    }
    if (check->parsed())
        return check_command(check_config);
    return diagnose_command(diagnose_config);
}
