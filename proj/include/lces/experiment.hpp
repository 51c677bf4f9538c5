#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lces/analysis.hpp"
#include "lces/config.hpp"

// Experiment driver: runs the configured chain, writes delta_trace.csv,
// report.json and (optionally) SVG plots into the output directory, and maps
// failures onto the CLI exit-code contract:
//   0 success, 1 config error (handled by the caller), 2 simulation error,
//   3 success with an ergodicity-condition flag raised.

namespace lces {

inline constexpr const char* kOutputDirEnvVar = "LCES_OUT_DIR";

struct RunOptions {
    std::optional<std::string> out_dir; // explicit flag; wins over config and env
    std::optional<std::uint64_t> seed;  // overrides [run] seed
    bool no_plots = false;
};

struct ExperimentOutcome {
    int exit_code = 0;
    std::string message;
    std::vector<std::string> files;
    std::optional<RunReport> report;
};

namespace detail {

// Shortest decimal that round-trips a double through text.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline nlohmann::json ci_to_json(const stats::CiEstimate& ci) {
    return {{"estimate", ci.estimate}, {"ci95_lower", ci.lower}, {"ci95_upper", ci.upper}};
}

inline nlohmann::json doubling_to_json(const DoublingTest& t) {
    return {{"sample_sizes", t.sample_sizes},
            {"running_means", t.running_means},
            {"final_mean", t.final_mean},
            {"tail_fluctuation", t.tail_fluctuation},
            {"divergent", t.divergent}};
}

} // namespace detail

inline nlohmann::json report_to_json(const RunReport& r) {
    nlohmann::json j;
    j["run"] = {{"steps", r.steps},     {"burn_in", r.burn_in}, {"replicas", r.replicas},
                {"seed", r.seed},       {"delta0", r.delta0},   {"thinning", r.thinning}};
    j["problem"] = {{"n", r.n},
                    {"lambda", r.lambda},
                    {"theta", r.theta},
                    {"sigma", r.sigma},
                    {"distribution", r.distribution}};
    j["divergence_rate"] = detail::ci_to_json(r.divergence_rate);
    j["stationarity_residual"] = detail::ci_to_json(r.stationarity_residual);
    j["stationary_delta"] = {{"mean", r.stationary_delta.mean},
                             {"variance", r.stationary_delta.variance},
                             {"q05", r.stationary_delta.q05},
                             {"q25", r.stationary_delta.q25},
                             {"q50", r.stationary_delta.q50},
                             {"q75", r.stationary_delta.q75},
                             {"q95", r.stationary_delta.q95}};
    j["resampling"] = {{"mean_per_iteration", r.resampling.mean_per_iteration},
                       {"max_in_one_iteration", r.resampling.max_in_one_iteration},
                       {"total", r.resampling.total}};
    if (r.diagnostics) {
        const ConditionDiagnostics& d = *r.diagnostics;
        nlohmann::json jd;
        jd["exp_moment"] = detail::doubling_to_json(d.exp_moment);
        jd["delta_grid"] = d.delta_grid;
        nlohmann::json abs_list = nlohmann::json::array();
        for (const auto& t : d.feasible_abs_g)
            abs_list.push_back(detail::doubling_to_json(t));
        jd["feasible_abs_g"] = abs_list;
        jd["selected_g_mean"] = d.selected_g_mean;
        jd["selected_g_se"] = d.selected_g_se;
        if (d.unconstrained_limit)
            jd["unconstrained_limit"] = *d.unconstrained_limit;
        jd["exp_moment_flag"] = d.exp_moment_flag;
        jd["abs_moment_flag"] = d.abs_moment_flag;
        jd["any_flag"] = d.any_flag();
        j["condition_diagnostics"] = jd;
    }
    return j;
}

namespace detail {

inline void write_delta_trace_csv(const std::string& path, const ChainTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "t,delta,m_star_1,m_star_2,resamples\n";
    for (std::size_t t = 0; t < trace.delta.size(); ++t)
        out << t << ',' << fmt_double(trace.delta[t]) << ',' << fmt_double(trace.m1[t]) << ','
            << fmt_double(trace.m2[t]) << ',' << trace.rejections[t] << '\n';
}

struct SvgCanvas {
    int width = 720;
    int height = 420;
    int margin = 56;
    std::string body;

    void line(double x1, double y1, double x2, double y2, const char* color, double w) {
        body += "<line x1=\"" + std::to_string(x1) + "\" y1=\"" + std::to_string(y1) +
                "\" x2=\"" + std::to_string(x2) + "\" y2=\"" + std::to_string(y2) +
                "\" stroke=\"" + color + "\" stroke-width=\"" + std::to_string(w) + "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const char* color) {
        body += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                "\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) +
                "\" fill=\"" + color + "\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 12,
              const char* anchor = "start") {
        body += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                "\" font-size=\"" + std::to_string(size) +
                "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s +
                "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
        body += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts)
            body += std::to_string(x) + "," + std::to_string(y) + " ";
        body += "\"/>\n";
    }
    std::string render() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
               "\" height=\"" + std::to_string(height) + "\">\n<rect width=\"100%\" "
               "height=\"100%\" fill=\"white\"/>\n" +
               body + "</svg>\n";
    }
};

inline void write_delta_histogram_svg(const std::string& path, const ChainTrace& trace,
                                      long burn_in) {
    std::vector<double> post(trace.delta.begin() + burn_in, trace.delta.end());
    std::sort(post.begin(), post.end());
    const double lo = 0.0;
    const double hi = std::max(stats::quantile_sorted(post, 0.995), 1e-12);
    const int bins = 50;
    std::vector<double> counts(bins, 0.0);
    for (double d : post) {
        if (d > hi)
            continue;
        int b = static_cast<int>((d - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        counts[b] += 1.0;
    }
    const double cmax = *std::max_element(counts.begin(), counts.end());
    SvgCanvas svg;
    const double w = svg.width - 2.0 * svg.margin;
    const double h = svg.height - 2.0 * svg.margin;
    svg.line(svg.margin, svg.height - svg.margin, svg.width - svg.margin,
             svg.height - svg.margin, "black", 1.0);
    svg.line(svg.margin, svg.margin, svg.margin, svg.height - svg.margin, "black", 1.0);
    for (int b = 0; b < bins; ++b) {
        const double bh = cmax > 0 ? counts[b] / cmax * h : 0.0;
        svg.rect(svg.margin + w * b / bins, svg.height - svg.margin - bh, w / bins * 0.92, bh,
                 "#4878a8");
    }
    svg.text(svg.width / 2.0, svg.height - svg.margin + 36,
             "stationary normalized distance to the constraint", 13, "middle");
    svg.text(svg.margin, svg.margin - 16, "frequency", 12);
    svg.text(svg.margin, svg.height - svg.margin + 16, fmt_double(lo), 11);
    svg.text(svg.width - svg.margin, svg.height - svg.margin + 16, fmt_double(hi), 11, "end");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << svg.render();
}

inline void write_divergence_rate_svg(const std::string& path, const ChainTrace& trace,
                                      long burn_in, double sigma, double final_rate) {
    const std::size_t n = trace.m1.size();
    std::vector<std::pair<double, double>> pts;
    long double cum = 0.0L;
    std::size_t kept = 0;
    double ymin = 0.0, ymax = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, (n - burn_in) / 800);
    std::vector<std::pair<double, double>> raw;
    for (std::size_t t = burn_in; t < n; ++t) {
        cum += trace.m1[t];
        ++kept;
        if ((kept - 1) % stride == 0 || t + 1 == n) {
            const double est = sigma * static_cast<double>(cum / kept);
            raw.emplace_back(static_cast<double>(t), est);
            if (raw.size() == 1) { ymin = ymax = est; }
            ymin = std::min(ymin, est);
            ymax = std::max(ymax, est);
        }
    }
    if (ymax == ymin) { ymax = ymin + 1.0; }
    const double pad = 0.08 * (ymax - ymin);
    ymin -= pad; ymax += pad;
    SvgCanvas svg;
    const double w = svg.width - 2.0 * svg.margin;
    const double h = svg.height - 2.0 * svg.margin;
    const double t0 = raw.front().first;
    const double t1 = raw.back().first;
    for (auto& [x, y] : raw) {
        x = svg.margin + (x - t0) / std::max(1.0, t1 - t0) * w;
        y = svg.height - svg.margin - (y - ymin) / (ymax - ymin) * h;
    }
    svg.line(svg.margin, svg.height - svg.margin, svg.width - svg.margin,
             svg.height - svg.margin, "black", 1.0);
    svg.line(svg.margin, svg.margin, svg.margin, svg.height - svg.margin, "black", 1.0);
    const double yf = svg.height - svg.margin - (final_rate - ymin) / (ymax - ymin) * h;
    svg.line(svg.margin, yf, svg.width - svg.margin, yf, "#b04030", 1.0);
    svg.polyline(raw, "#305880");
    svg.text(svg.width / 2.0, svg.height - svg.margin + 36,
             "running divergence-rate estimate after burn-in", 13, "middle");
    svg.text(svg.width - svg.margin, yf - 6, "final: " + fmt_double(final_rate), 11, "end");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << svg.render();
}

} // namespace detail

// Resolution order for the output directory: explicit option, config value,
// environment variable, then "./lces_out".
inline std::string resolve_output_dir(const ExperimentConfig& cfg, const RunOptions& opt) {
    if (opt.out_dir && !opt.out_dir->empty())
        return *opt.out_dir;
    if (!cfg.output.directory.empty())
        return cfg.output.directory;
    if (const char* env = std::getenv(kOutputDirEnvVar); env && *env)
        return env;
    return "lces_out";
}

inline ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                        const RunOptions& options = {}) {
    ExperimentOutcome outcome;
    ExperimentConfig cfg = config;
    if (options.seed)
        cfg.run.seed = *options.seed;

    const std::string dir = resolve_output_dir(cfg, options);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        outcome.exit_code = 2;
        outcome.message = "cannot create output directory '" + dir + "': " + ec.message();
        return outcome;
    }

    ChainTrace trace;
    RunReport report;
    try {
        const Problem problem = cfg.problem();
        const auto dist = cfg.build_distribution();
        report = run_delta_chain(problem, *dist, cfg.run, &trace);
    } catch (const ResampleCapError& e) {
        outcome.exit_code = 2;
        outcome.message = std::string("simulation aborted: ") + e.what();
        return outcome;
    } catch (const quad::QuadratureError& e) {
        outcome.exit_code = 2;
        outcome.message = std::string("numerical integration failed: ") + e.what();
        return outcome;
    }
    outcome.report = report;

    try {
        if (cfg.output.csv) {
            const std::string path = dir + "/delta_trace.csv";
            detail::write_delta_trace_csv(path, trace);
            outcome.files.push_back(path);
        }
        if (cfg.output.json) {
            const std::string path = dir + "/report.json";
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot write " + path);
            out << report_to_json(report).dump(2) << '\n';
            outcome.files.push_back(path);
        }
        if (cfg.output.svg && !options.no_plots) {
            const std::string hist = dir + "/delta_histogram.svg";
            detail::write_delta_histogram_svg(hist, trace, cfg.run.burn_in);
            outcome.files.push_back(hist);
            const std::string rate = dir + "/divergence_rate.svg";
            detail::write_divergence_rate_svg(rate, trace, cfg.run.burn_in, cfg.sigma,
                                              report.divergence_rate.estimate);
            outcome.files.push_back(rate);
        }
    } catch (const std::exception& e) {
        outcome.exit_code = 2;
        outcome.message = std::string("failed to write artifacts: ") + e.what();
        return outcome;
    }

    if (report.diagnostics && report.diagnostics->any_flag()) {
        outcome.exit_code = 3;
        outcome.message = "run completed; ergodicity-condition diagnostics raised a flag";
        return outcome;
    }
    outcome.message = "run completed";
    return outcome;
}

} // namespace lces
