#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lces/es.hpp"
#include "lces/stats.hpp"

// Long-run analysis of the normalized-distance chain
//   delta_{t+1} = delta_t - g(M*_t),
// Monte Carlo estimation of the divergence rate sigma E[M*_1] under the
// stationary law, diagnostics for the moment conditions behind geometric
// ergodicity, and the covariance/angle reduction for Gaussian steps.

namespace lces {

struct ChainRunConfig {
    long steps = 100000;
    long burn_in = 10000;
    int replicas = 1;
    std::uint64_t seed = 1;
    double delta0 = 1.0;
    long thinning = 1;
    bool diagnostics = true;
};

struct DeltaSummary {
    double mean = 0.0;
    double variance = 0.0;
    double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
};

struct ResampleSummary {
    double mean_per_iteration = 0.0;
    std::uint64_t max_in_one_iteration = 0;
    std::uint64_t total = 0;
};

// Cumulative-mean stability probe: running means are recorded each time the
// sample count doubles; a heavy-tailed (infinite-moment) statistic keeps
// jumping between doublings instead of settling.
struct DoublingTest {
    std::vector<long> sample_sizes;
    std::vector<double> running_means;
    double final_mean = 0.0;
    double tail_fluctuation = 0.0; // max relative change over the last 3 doublings
    bool divergent = false;
};

struct ConditionDiagnostics {
    DoublingTest exp_moment; // E[exp(g(M))] over the raw step
    std::vector<double> delta_grid;
    std::vector<DoublingTest> feasible_abs_g; // E[|g(Mtilde)|] per delta
    std::vector<double> selected_g_mean;      // E[g(M*) | delta]
    std::vector<double> selected_g_se;
    std::optional<double> unconstrained_limit; // lim_{delta->inf} E[g(M*) | delta]
    bool exp_moment_flag = false;
    bool abs_moment_flag = false;
    bool any_flag() const { return exp_moment_flag || abs_moment_flag; }
};

struct RunReport {
    long steps = 0;
    long burn_in = 0;
    int replicas = 0;
    std::uint64_t seed = 0;
    double delta0 = 0.0;
    long thinning = 1;
    std::string distribution;
    int n = 0;
    int lambda = 0;
    double theta = 0.0;
    double sigma = 0.0;
    stats::CiEstimate divergence_rate{0, 0, 0};       // sigma E[M*_1]
    stats::CiEstimate stationarity_residual{0, 0, 0}; // E[g(M*)], ~0 at stationarity
    DeltaSummary stationary_delta;
    ResampleSummary resampling;
    std::optional<ConditionDiagnostics> diagnostics;
};

// Full per-iteration record of one replica (used for the CSV trace).
struct ChainTrace {
    std::vector<double> delta;      // delta_t before the update
    std::vector<double> m1, m2;     // selected step, first two coordinates
    std::vector<std::uint64_t> rejections;
};

namespace detail {

struct FrontDraw {
    double m1;
    double m2;
    double g;
    std::uint64_t rejections;
};

// One kernel step: lambda feasible children, winner by first coordinate.
inline FrontDraw selected_front(const StepDistribution& dist, int lambda, double delta,
                                RngStream& rng) {
    FrontDraw best{0.0, 0.0, 0.0, 0};
    double best_obj = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < lambda; ++i) {
        FeasibleDraw d = sample_feasible_step(dist, delta, rng);
        best.rejections += d.rejections;
        if (d.step[0] > best_obj) {
            best_obj = d.step[0];
            best.m1 = d.step[0];
            best.m2 = d.step[1];
            best.g = d.g_value;
        }
    }
    return best;
}

} // namespace detail

inline ConditionDiagnostics diagnose_conditions(const Problem& problem,
                                                const StepDistribution& dist,
                                                std::vector<double> delta_grid = {0.25, 1.0,
                                                                                  4.0, 16.0},
                                                long samples_per_delta = 20000,
                                                std::uint64_t seed = 1);

// Simulate the delta chain and assemble the Monte Carlo report. The chain
// state is delta alone (the update is independent of sigma and of the parent
// position); replica i uses the derived seed mix_seed(seed, i), so results
// are reproducible bit-for-bit regardless of scheduling.
inline RunReport run_delta_chain(const Problem& problem, const StepDistribution& dist,
                                 const ChainRunConfig& cfg, ChainTrace* trace = nullptr) {
    if (cfg.steps <= 0)
        throw std::invalid_argument("run_delta_chain: steps must be positive");
    if (cfg.burn_in < 0 || cfg.burn_in >= cfg.steps)
        throw std::invalid_argument("run_delta_chain: need 0 <= burn_in < steps");
    if (cfg.replicas < 1)
        throw std::invalid_argument("run_delta_chain: replicas must be >= 1");
    if (cfg.thinning < 1)
        throw std::invalid_argument("run_delta_chain: thinning must be >= 1");
    if (cfg.delta0 < 0.0)
        throw std::invalid_argument("run_delta_chain: delta0 must be >= 0");
    if (dist.dimension() != problem.n ||
        std::abs(dist.theta() - problem.theta) > 1e-12)
        throw std::invalid_argument("run_delta_chain: distribution does not match problem");

    const int r_total = cfg.replicas;
    std::vector<std::vector<double>> m1_series(r_total);
    std::vector<std::vector<double>> g_series(r_total);
    std::vector<std::vector<double>> delta_series(r_total);

    ResampleSummary resamples;
    for (int r = 0; r < r_total; ++r) {
        RngStream rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        double delta = cfg.delta0;
        const long kept_cap = (cfg.steps - cfg.burn_in + cfg.thinning - 1) / cfg.thinning;
        m1_series[r].reserve(kept_cap);
        g_series[r].reserve(kept_cap);
        delta_series[r].reserve(kept_cap);
        const bool record = (trace != nullptr && r == 0);
        if (record) {
            trace->delta.reserve(cfg.steps);
            trace->m1.reserve(cfg.steps);
            trace->m2.reserve(cfg.steps);
            trace->rejections.reserve(cfg.steps);
        }
        for (long t = 0; t < cfg.steps; ++t) {
            const detail::FrontDraw d =
                detail::selected_front(dist, problem.lambda, delta, rng);
            if (record) {
                trace->delta.push_back(delta);
                trace->m1.push_back(d.m1);
                trace->m2.push_back(d.m2);
                trace->rejections.push_back(d.rejections);
            }
            if (t >= cfg.burn_in && (t - cfg.burn_in) % cfg.thinning == 0) {
                m1_series[r].push_back(d.m1);
                g_series[r].push_back(d.g);
                delta_series[r].push_back(delta);
            }
            resamples.total += d.rejections;
            resamples.max_in_one_iteration =
                std::max(resamples.max_in_one_iteration, d.rejections);
            delta = delta_update(delta, d.g);
        }
    }
    resamples.mean_per_iteration =
        static_cast<double>(resamples.total) /
        (static_cast<double>(cfg.steps) * static_cast<double>(r_total));

    RunReport report;
    report.steps = cfg.steps;
    report.burn_in = cfg.burn_in;
    report.replicas = cfg.replicas;
    report.seed = cfg.seed;
    report.delta0 = cfg.delta0;
    report.thinning = cfg.thinning;
    report.distribution = dist.describe();
    report.n = problem.n;
    report.lambda = problem.lambda;
    report.theta = problem.theta;
    report.sigma = problem.sigma;
    report.resampling = resamples;

    const std::size_t block =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.steps))));
    {
        RngStream boot_rng(mix_seed(cfg.seed, 0x626f6f74ULL));
        stats::CiEstimate ci =
            stats::moving_block_bootstrap(m1_series, block, 1000, 0.95, boot_rng);
        report.divergence_rate = {problem.sigma * ci.estimate, problem.sigma * ci.lower,
                                  problem.sigma * ci.upper};
    }
    {
        RngStream boot_rng(mix_seed(cfg.seed, 0x726573ULL));
        report.stationarity_residual =
            stats::moving_block_bootstrap(g_series, block, 1000, 0.95, boot_rng);
    }

    std::vector<double> all_delta;
    for (const auto& s : delta_series)
        all_delta.insert(all_delta.end(), s.begin(), s.end());
    report.stationary_delta.mean = stats::mean(all_delta);
    report.stationary_delta.variance =
        all_delta.size() > 1 ? stats::variance(all_delta) : 0.0;
    std::sort(all_delta.begin(), all_delta.end());
    report.stationary_delta.q05 = stats::quantile_sorted(all_delta, 0.05);
    report.stationary_delta.q25 = stats::quantile_sorted(all_delta, 0.25);
    report.stationary_delta.q50 = stats::quantile_sorted(all_delta, 0.50);
    report.stationary_delta.q75 = stats::quantile_sorted(all_delta, 0.75);
    report.stationary_delta.q95 = stats::quantile_sorted(all_delta, 0.95);

    if (cfg.diagnostics)
        report.diagnostics = diagnose_conditions(problem, dist, {0.25, 1.0, 4.0, 16.0},
                                                 20000, mix_seed(cfg.seed, 0xd1a6ULL));
    return report;
}

namespace detail {

// Record running means at successive sample-count doublings; flag as
// divergent when the last few doublings still move the mean materially.
template <class Draw>
DoublingTest doubling_test(Draw&& draw, long total_samples) {
    DoublingTest result;
    const int n_doublings = 10;
    long n0 = std::max<long>(64, total_samples >> n_doublings);
    long double sum = 0.0L;
    long count = 0;
    bool overflow = false;
    for (int j = 0; j <= n_doublings; ++j) {
        const long target = n0 << j;
        while (count < target) {
            const double x = draw();
            // Samples at or beyond 1e300 saturate the running mean (e.g. an
            // exp() clamped near the double range): the mean then looks
            // stable across doublings even though the moment is infinite.
            // No statistic with a finite mean below ~1e300 produces such a
            // sample observably, so treat it as overflow outright.
            if (!std::isfinite(x) || std::abs(x) >= 1e300)
                overflow = true;
            sum += x;
            ++count;
        }
        result.sample_sizes.push_back(count);
        result.running_means.push_back(static_cast<double>(sum / count));
    }
    result.final_mean = result.running_means.back();
    const std::size_t m = result.running_means.size();
    double fluct = 0.0;
    for (std::size_t j = m - 3; j < m; ++j) {
        const double prev = result.running_means[j - 1];
        const double cur = result.running_means[j];
        const double denom = std::max({std::abs(cur), std::abs(prev), 1e-300});
        fluct = std::max(fluct, std::abs(cur - prev) / denom);
    }
    result.tail_fluctuation = fluct;
    result.divergent = overflow || !std::isfinite(result.final_mean) || fluct > 0.25;
    return result;
}

} // namespace detail

// Monte Carlo probes of the two moment conditions behind geometric
// ergodicity of the delta chain, plus the approach of E[g(M*) | delta] to
// its unconstrained limit as delta grows:
//   (a) E[exp(g(M))] finite, taken over the *raw* step so that heavy tails
//       on the feasible side of the constraint are visible;
//   (b) sup_delta E[|g(Mtilde)|] finite, probed on a grid of deltas.
inline ConditionDiagnostics diagnose_conditions(const Problem& problem,
                                                const StepDistribution& dist,
                                                std::vector<double> delta_grid,
                                                long samples_per_delta,
                                                std::uint64_t seed) {
    if (delta_grid.empty())
        throw std::invalid_argument("diagnose_conditions: empty delta grid");
    if (samples_per_delta < 2048)
        throw std::invalid_argument("diagnose_conditions: need at least 2048 samples per delta");
    ConditionDiagnostics out;
    out.delta_grid = delta_grid;
    const double theta = dist.theta();

    {
        RngStream rng(mix_seed(seed, 1));
        out.exp_moment = detail::doubling_test(
            [&]() {
                const Vec m = dist.sample(rng);
                const double g = constraint(m[0], m[1], theta);
                return std::exp(std::min(g, 700.0));
            },
            samples_per_delta);
        out.exp_moment_flag = out.exp_moment.divergent;
    }

    std::uint64_t key = 2;
    for (const double delta : delta_grid) {
        RngStream rng(mix_seed(seed, key++));
        DoublingTest t = detail::doubling_test(
            [&]() {
                return std::abs(sample_feasible_step(dist, delta, rng).g_value);
            },
            samples_per_delta);
        out.abs_moment_flag = out.abs_moment_flag || t.divergent;
        out.feasible_abs_g.push_back(std::move(t));
    }

    for (const double delta : delta_grid) {
        RngStream rng(mix_seed(seed, key++));
        std::vector<double> g_sel;
        g_sel.reserve(samples_per_delta);
        for (long i = 0; i < samples_per_delta; ++i)
            g_sel.push_back(
                detail::selected_front(dist, problem.lambda, delta, rng).g);
        const double m = stats::mean(g_sel);
        out.selected_g_mean.push_back(m);
        out.selected_g_se.push_back(
            std::sqrt(stats::variance(g_sel) / static_cast<double>(g_sel.size())));
    }

    out.unconstrained_limit = dist.unconstrained_selected_g_limit(problem.lambda);
    return out;
}

// Componentwise scaling + angle substitution that reduces a Gaussian step
// with covariance C to an isotropic one: beta_k = sqrt((C^{-1})_kk) and
// x0'_k = beta_k x0_k. Under y = diag(beta) x the constraint hyperplane
// {cos t x1 + sin t x2 = 0} becomes {cos t / beta_1 y1 + sin t / beta_2 y2
// = 0} -- the normal picks up the *inverse* scaling -- so the reduced angle
// is theta' = arccos(beta_2 cos t / beta_g) with
// beta_g = sqrt(beta_2^2 cos^2 t + beta_1^2 sin^2 t). The simulation
// equivalence check below is the ground truth for this formula.
struct CovarianceAngleTransform {
    Vec beta;
    double beta_g = 0.0;
    double theta_prime = 0.0;
    Vec x0_prime;
};

inline CovarianceAngleTransform covariance_angle_reduction(const Mat& covariance,
                                                           double theta, const Vec& x0) {
    const int n = static_cast<int>(covariance.rows());
    if (covariance.cols() != n || x0.size() != n)
        throw std::invalid_argument("covariance_angle_reduction: dimension mismatch");
    Eigen::LLT<Mat> llt(covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(
            "covariance_angle_reduction: covariance must be positive definite");
    const Mat inv = llt.solve(Mat::Identity(n, n));
    CovarianceAngleTransform t;
    t.beta.resize(n);
    for (int k = 0; k < n; ++k)
        t.beta[k] = std::sqrt(inv(k, k));
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    t.beta_g = std::sqrt(t.beta[1] * t.beta[1] * c * c + t.beta[0] * t.beta[0] * s * s);
    t.theta_prime = std::acos(t.beta[1] * c / t.beta_g);
    t.x0_prime = t.beta.cwiseProduct(x0);
    return t;
}

struct EquivalenceOptions {
    std::vector<long> checkpoints{10, 100, 1000};
    int replicas = 200;
    double sigma = 1.0;
    std::uint64_t seed = 2026;
    double p_threshold = 0.01;
    // Override of theta' for negative controls (deliberately wrong angle).
    std::optional<double> theta_prime_override;
};

struct EquivalenceCheck {
    long checkpoint = 0;
    int coordinate = 0; // 1-based
    double ks_statistic = 0.0;
    double p_value = 0.0;
    bool pass = false;
};

struct EquivalenceReport {
    CovarianceAngleTransform transform;
    std::vector<EquivalenceCheck> checks;
    bool all_pass = true;
};

// Monte Carlo check that, per coordinate k, beta_k X_t from the run with
// Gaussian covariance C at angle theta matches in distribution the run with
// identity covariance at angle theta' (same lambda, sigma, X0' = beta .* x0).
inline EquivalenceReport verify_covariance_angle_equivalence(
    const Mat& covariance, double theta, const Vec& x0, int lambda,
    const EquivalenceOptions& opt = {}) {
    const int n = static_cast<int>(covariance.rows());
    const CovarianceAngleTransform transform = covariance_angle_reduction(covariance, theta, x0);
    const double theta_b = opt.theta_prime_override.value_or(transform.theta_prime);

    const Problem prob_a(n, lambda, theta, opt.sigma);
    const Problem prob_b(n, lambda, theta_b, opt.sigma);
    const auto dist_a = gaussian_step_distribution(n, covariance, theta);
    const auto dist_b = gaussian_step_distribution(n, Mat::Identity(n, n), theta_b);

    std::vector<long> cps = opt.checkpoints;
    std::sort(cps.begin(), cps.end());
    const long horizon = cps.back();

    // parents[cp][coord][replica]
    auto run_side = [&](const Problem& prob, const StepDistribution& dist, const Vec& start,
                        std::uint64_t salt) {
        std::vector<std::vector<std::vector<double>>> vals(
            cps.size(), std::vector<std::vector<double>>(n));
        for (int r = 0; r < opt.replicas; ++r) {
            RngStream rng(mix_seed(opt.seed, salt + 2 * static_cast<std::uint64_t>(r)));
            ESState state = make_initial_state(prob, start);
            std::size_t next_cp = 0;
            for (long t = 1; t <= horizon; ++t) {
                state = es_iterate(state, prob, dist, rng).first;
                if (next_cp < cps.size() && t == cps[next_cp]) {
                    for (int k = 0; k < n; ++k)
                        vals[next_cp][k].push_back(state.parent[k]);
                    ++next_cp;
                }
            }
        }
        return vals;
    };

    const auto side_a = run_side(prob_a, *dist_a, x0, 0);
    const auto side_b = run_side(prob_b, *dist_b, transform.x0_prime, 1);

    EquivalenceReport report;
    report.transform = transform;
    for (std::size_t ci = 0; ci < cps.size(); ++ci) {
        for (int k = 0; k < n; ++k) {
            std::vector<double> a = side_a[ci][k];
            for (double& v : a)
                v *= transform.beta[k];
            const stats::KsResult ks = stats::ks_two_sample(std::move(a), side_b[ci][k]);
            EquivalenceCheck chk{cps[ci], k + 1, ks.statistic, ks.p_value,
                                 ks.p_value > opt.p_threshold};
            report.all_pass = report.all_pass && chk.pass;
            report.checks.push_back(chk);
        }
    }
    return report;
}

struct IsotropyCheck {
    bool declared_isotropic = false;
    stats::CiEstimate selected_m2{0, 0, 0};  // E[M*_2 | delta], expected < 0
    stats::CiEstimate divergence_rate{0, 0, 0}; // expected > 0
    bool m2_negative = false;
    bool rate_positive = false;
    // For an isotropic law both sign conditions must hold; for a law that
    // never declared isotropy the check records but does not demand them.
    bool consistent = true;
};

inline IsotropyCheck isotropy_positivity_check(const Problem& problem,
                                               const StepDistribution& dist, double delta,
                                               long samples = 100000,
                                               long chain_steps = 100000,
                                               std::uint64_t seed = 7) {
    IsotropyCheck out;
    out.declared_isotropic = dist.isotropic();

    RngStream rng(mix_seed(seed, 11));
    std::vector<double> m2;
    m2.reserve(samples);
    for (long i = 0; i < samples; ++i)
        m2.push_back(detail::selected_front(dist, problem.lambda, delta, rng).m2);
    const double m = stats::mean(m2);
    const double se = std::sqrt(stats::variance(m2) / static_cast<double>(m2.size()));
    out.selected_m2 = {m, m - 1.959963984540054 * se, m + 1.959963984540054 * se};
    out.m2_negative = out.selected_m2.upper < 0.0;

    ChainRunConfig cfg;
    cfg.steps = chain_steps;
    cfg.burn_in = chain_steps / 10;
    cfg.seed = mix_seed(seed, 13);
    cfg.delta0 = delta;
    cfg.diagnostics = false;
    out.divergence_rate = run_delta_chain(problem, dist, cfg).divergence_rate;
    out.rate_positive = out.divergence_rate.lower > 0.0;

    if (out.declared_isotropic)
        out.consistent = out.m2_negative && out.rate_positive;
    return out;
}

} // namespace lces
