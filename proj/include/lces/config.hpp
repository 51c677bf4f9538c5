#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lces/analysis.hpp"
#include "lces/copula.hpp"
#include "lces/distribution.hpp"
#include "lces/marginals.hpp"
#include "lces/problem.hpp"

// Flat INI experiment configuration:
//
//   [problem]       n, lambda, theta, sigma
//   [distribution]  kind = gaussian | copula | student_t
//                   covariance = identity | diag: v1, ... | full: v11, v12, ...
//                   generator = gumbel | clayton | independence
//                   vartheta, marginal1, marginal2, tails, dof
//   [run]           steps, burn_in, replicas, seed, delta0, thinning
//   [output]        directory, formats = csv, json, svg
//
// Lines starting with '#' or ';' are comments. Parsing validates everything
// and reports the full list of problems, not just the first.

namespace lces {

struct MarginalSpec {
    std::string family = "normal"; // normal | student_t | cauchy
    double parameter = 1.0;        // sd / dof / scale
};

struct DistributionSpec {
    std::string kind; // gaussian | copula | student_t
    // gaussian
    std::string covariance_form = "identity"; // identity | diag | full
    std::vector<double> covariance_values;
    // copula
    std::string generator = "gumbel";
    std::optional<double> vartheta;
    MarginalSpec marginal1;
    MarginalSpec marginal2;
    MarginalSpec tails;
    // student_t
    double dof = 0.0;
};

struct OutputSpec {
    std::string directory; // empty: resolved from --out / env / default
    bool csv = true;
    bool json = true;
    bool svg = true;
};

struct ExperimentConfig {
    int n = 0;
    int lambda = 0;
    double theta = 0.0;
    double sigma = 1.0;
    DistributionSpec distribution;
    ChainRunConfig run;
    OutputSpec output;

    Problem problem() const { return Problem(n, lambda, theta, sigma); }

    std::shared_ptr<const StepDistribution> build_distribution() const;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return config.has_value() && errors.empty(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

inline bool parse_long(const std::string& s, long long& out) {
    try {
        std::size_t pos = 0;
        out = std::stoll(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline bool parse_u64(const std::string& s, std::uint64_t& out) {
    try {
        std::size_t pos = 0;
        out = std::stoull(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

// "normal" | "normal: 2.0" | "student_t: 3" | "cauchy" | "cauchy: 0.5"
inline bool parse_marginal(const std::string& s, MarginalSpec& out, std::string& err) {
    std::string family = s;
    std::string param;
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
        family = trim(s.substr(0, colon));
        param = trim(s.substr(colon + 1));
    }
    double value = 1.0;
    const bool has_param = !param.empty();
    if (has_param && !parse_double(param, value)) {
        err = "marginal parameter is not a number: '" + param + "'";
        return false;
    }
    if (family == "normal") {
        out = {"normal", has_param ? value : 1.0};
        if (!(out.parameter > 0.0)) { err = "normal marginal needs sd > 0"; return false; }
    } else if (family == "student_t") {
        if (!has_param) { err = "student_t marginal needs a dof parameter, e.g. student_t: 3"; return false; }
        out = {"student_t", value};
        if (!(out.parameter > 0.0)) { err = "student_t marginal needs dof > 0"; return false; }
    } else if (family == "cauchy") {
        out = {"cauchy", has_param ? value : 1.0};
        if (!(out.parameter > 0.0)) { err = "cauchy marginal needs scale > 0"; return false; }
    } else {
        err = "unknown marginal family '" + family + "' (expected normal, student_t or cauchy)";
        return false;
    }
    return true;
}

inline std::shared_ptr<const Marginal1D> make_marginal(const MarginalSpec& spec) {
    if (spec.family == "normal")
        return std::make_shared<NormalMarginal>(spec.parameter);
    if (spec.family == "student_t")
        return std::make_shared<StudentTMarginal>(spec.parameter);
    if (spec.family == "cauchy")
        return std::make_shared<CauchyMarginal>(spec.parameter);
    throw std::invalid_argument("make_marginal: unknown family " + spec.family);
}

} // namespace detail

inline std::shared_ptr<const StepDistribution> ExperimentConfig::build_distribution() const {
    RotationFrame frame(n, theta);
    if (distribution.kind == "gaussian") {
        Mat cov = Mat::Identity(n, n);
        if (distribution.covariance_form == "diag") {
            for (int i = 0; i < n; ++i)
                cov(i, i) = distribution.covariance_values[i];
        } else if (distribution.covariance_form == "full") {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    cov(i, j) = distribution.covariance_values[i * n + j];
        }
        return std::make_shared<GaussianStep>(cov, frame);
    }
    if (distribution.kind == "copula") {
        std::shared_ptr<const ArchimedeanGenerator> gen;
        if (distribution.generator == "gumbel")
            gen = std::make_shared<GumbelGenerator>(*distribution.vartheta);
        else if (distribution.generator == "clayton")
            gen = std::make_shared<ClaytonGenerator>(*distribution.vartheta);
        else
            gen = std::make_shared<IndependenceGenerator>();
        std::vector<std::shared_ptr<const Marginal1D>> tails;
        for (int k = 2; k < n; ++k)
            tails.push_back(detail::make_marginal(distribution.tails));
        return std::make_shared<CopulaStep>(archimedean_copula(gen),
                                            detail::make_marginal(distribution.marginal1),
                                            detail::make_marginal(distribution.marginal2),
                                            std::move(tails), frame);
    }
    if (distribution.kind == "student_t")
        return std::make_shared<IsotropicStudentTStep>(distribution.dof, frame);
    throw std::invalid_argument("build_distribution: unknown kind " + distribution.kind);
}

// The angle gate at the config boundary is slightly stricter than the open
// interval (0, pi/2): a guard band keeps the geometry away from the
// degenerate axis-aligned limits where resampling acceptance collapses.
inline constexpr double kThetaGuard = 1e-6;

inline ParseResult parse_config(const std::string& text) {
    ParseResult result;
    std::vector<std::string>& errors = result.errors;

    std::map<std::string, std::map<std::string, std::string>> kv;
    {
        std::istringstream in(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';')
                continue;
            if (t.front() == '[') {
                if (t.back() != ']') {
                    errors.push_back("line " + std::to_string(lineno) +
                                     ": malformed section header '" + t + "'");
                    continue;
                }
                section = detail::trim(t.substr(1, t.size() - 2));
                if (section != "problem" && section != "distribution" && section != "run" &&
                    section != "output")
                    errors.push_back("line " + std::to_string(lineno) + ": unknown section [" +
                                     section + "]");
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                errors.push_back("line " + std::to_string(lineno) +
                                 ": expected 'key = value', got '" + t + "'");
                continue;
            }
            if (section.empty()) {
                errors.push_back("line " + std::to_string(lineno) +
                                 ": key outside of any [section]");
                continue;
            }
            const std::string key = detail::trim(t.substr(0, eq));
            const std::string value = detail::trim(t.substr(eq + 1));
            if (kv[section].count(key))
                errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key +
                                 "' in [" + section + "]");
            else
                kv[section][key] = value;
        }
    }

    static const std::map<std::string, std::vector<std::string>> known = {
        {"problem", {"n", "lambda", "theta", "sigma"}},
        {"distribution",
         {"kind", "covariance", "generator", "vartheta", "marginal1", "marginal2", "tails",
          "dof"}},
        {"run", {"steps", "burn_in", "replicas", "seed", "delta0", "thinning"}},
        {"output", {"directory", "formats"}}};
    for (const auto& [section, pairs] : kv) {
        const auto it = known.find(section);
        if (it == known.end())
            continue; // already reported
        for (const auto& [key, value] : pairs)
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                errors.push_back("unknown key '" + key + "' in [" + section + "]");
    }

    ExperimentConfig cfg;
    auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
        const auto s = kv.find(sec);
        if (s == kv.end())
            return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    };
    auto want_long = [&](const std::string& sec, const std::string& key, long long lo,
                         long long hi, bool required, long long fallback) -> long long {
        const std::string* v = get(sec, key);
        if (!v) {
            if (required)
                errors.push_back("missing required key '" + key + "' in [" + sec + "]");
            return fallback;
        }
        long long out = fallback;
        if (!detail::parse_long(*v, out)) {
            errors.push_back("[" + sec + "] " + key + ": not an integer: '" + *v + "'");
            return fallback;
        }
        if (out < lo || out > hi) {
            errors.push_back("[" + sec + "] " + key + " = " + *v + " out of range [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return fallback;
        }
        return out;
    };
    auto want_double = [&](const std::string& sec, const std::string& key, bool required,
                           double fallback) -> std::optional<double> {
        const std::string* v = get(sec, key);
        if (!v) {
            if (required)
                errors.push_back("missing required key '" + key + "' in [" + sec + "]");
            return required ? std::nullopt : std::optional<double>(fallback);
        }
        double out = 0.0;
        if (!detail::parse_double(*v, out)) {
            errors.push_back("[" + sec + "] " + key + ": not a number: '" + *v + "'");
            return std::nullopt;
        }
        return out;
    };

    cfg.n = static_cast<int>(want_long("problem", "n", 2, 20, true, 2));
    cfg.lambda = static_cast<int>(want_long("problem", "lambda", 2, 1000, true, 2));
    if (const auto th = want_double("problem", "theta", true, 0.0)) {
        cfg.theta = *th;
        const double hi = 0.5 * specfun::kPi - kThetaGuard;
        if (!(cfg.theta >= kThetaGuard && cfg.theta <= hi))
            errors.push_back("[problem] theta = " + std::to_string(cfg.theta) +
                             " out of range: need " + std::to_string(kThetaGuard) +
                             " <= theta <= " + std::to_string(hi));
    }
    if (const auto sg = want_double("problem", "sigma", false, 1.0)) {
        cfg.sigma = *sg;
        if (!(cfg.sigma > 0.0))
            errors.push_back("[problem] sigma must be positive");
    }

    DistributionSpec& d = cfg.distribution;
    if (const std::string* kind = get("distribution", "kind")) {
        d.kind = *kind;
        if (d.kind != "gaussian" && d.kind != "copula" && d.kind != "student_t")
            errors.push_back("[distribution] kind = '" + d.kind +
                             "' (expected gaussian, copula or student_t)");
    } else {
        errors.push_back("missing required key 'kind' in [distribution]");
    }

    if (d.kind == "gaussian") {
        for (const char* k : {"generator", "vartheta", "marginal1", "marginal2", "tails", "dof"})
            if (get("distribution", k))
                errors.push_back(std::string("[distribution] key '") + k +
                                 "' does not apply to kind = gaussian");
        if (const std::string* cov = get("distribution", "covariance")) {
            std::string form = *cov;
            std::string payload;
            const auto colon = cov->find(':');
            if (colon != std::string::npos) {
                form = detail::trim(cov->substr(0, colon));
                payload = detail::trim(cov->substr(colon + 1));
            }
            d.covariance_form = form;
            if (form == "identity") {
                if (!payload.empty())
                    errors.push_back("[distribution] covariance = identity takes no values");
            } else if (form == "diag" || form == "full") {
                const std::size_t expect =
                    form == "diag" ? static_cast<std::size_t>(cfg.n)
                                   : static_cast<std::size_t>(cfg.n) * cfg.n;
                for (const std::string& item : detail::split_list(payload)) {
                    double v = 0.0;
                    if (!detail::parse_double(item, v)) {
                        errors.push_back("[distribution] covariance entry not a number: '" +
                                         item + "'");
                        continue;
                    }
                    d.covariance_values.push_back(v);
                }
                if (d.covariance_values.size() != expect)
                    errors.push_back("[distribution] covariance " + form + " needs " +
                                     std::to_string(expect) + " values, got " +
                                     std::to_string(d.covariance_values.size()));
                else if (form == "diag") {
                    for (double v : d.covariance_values)
                        if (!(v > 0.0))
                            errors.push_back("[distribution] diagonal covariance entries must "
                                             "be positive");
                } else {
                    Mat cov_m(cfg.n, cfg.n);
                    for (int i = 0; i < cfg.n; ++i)
                        for (int j = 0; j < cfg.n; ++j)
                            cov_m(i, j) = d.covariance_values[i * cfg.n + j];
                    if (!cov_m.isApprox(cov_m.transpose(), 1e-12))
                        errors.push_back("[distribution] covariance matrix must be symmetric");
                    else if (Eigen::LLT<Mat>(cov_m).info() != Eigen::Success)
                        errors.push_back(
                            "[distribution] covariance matrix must be positive definite");
                }
            } else {
                errors.push_back("[distribution] covariance form '" + form +
                                 "' (expected identity, diag: ... or full: ...)");
            }
        }
    } else if (d.kind == "copula") {
        for (const char* k : {"covariance", "dof"})
            if (get("distribution", k))
                errors.push_back(std::string("[distribution] key '") + k +
                                 "' does not apply to kind = copula");
        if (const std::string* gen = get("distribution", "generator")) {
            d.generator = *gen;
            if (d.generator != "gumbel" && d.generator != "clayton" &&
                d.generator != "independence")
                errors.push_back("[distribution] generator = '" + d.generator +
                                 "' (expected gumbel, clayton or independence)");
        } else {
            errors.push_back("missing required key 'generator' in [distribution] for kind = "
                             "copula");
        }
        const std::string* vt = get("distribution", "vartheta");
        if (d.generator == "independence") {
            if (vt)
                errors.push_back("[distribution] vartheta does not apply to the independence "
                                 "generator");
        } else if (d.generator == "gumbel" || d.generator == "clayton") {
            if (!vt) {
                errors.push_back("missing required key 'vartheta' in [distribution] for "
                                 "generator = " + d.generator);
            } else {
                double v = 0.0;
                if (!detail::parse_double(*vt, v))
                    errors.push_back("[distribution] vartheta: not a number: '" + *vt + "'");
                else if (d.generator == "gumbel" && !(v >= 1.0))
                    errors.push_back("[distribution] gumbel generator needs vartheta >= 1");
                else if (d.generator == "clayton" && !(v > 0.0))
                    errors.push_back("[distribution] clayton generator needs vartheta > 0");
                else
                    d.vartheta = v;
            }
        }
        for (auto [key, slot] : {std::pair<const char*, MarginalSpec*>{"marginal1", &d.marginal1},
                                 {"marginal2", &d.marginal2},
                                 {"tails", &d.tails}}) {
            if (const std::string* m = get("distribution", key)) {
                std::string err;
                if (!detail::parse_marginal(*m, *slot, err))
                    errors.push_back("[distribution] " + std::string(key) + ": " + err);
            }
        }
        if (get("distribution", "tails") && cfg.n <= 2)
            errors.push_back("[distribution] tails given but n = 2 leaves no tail coordinates");
    } else if (d.kind == "student_t") {
        for (const char* k :
             {"covariance", "generator", "vartheta", "marginal1", "marginal2", "tails"})
            if (get("distribution", k))
                errors.push_back(std::string("[distribution] key '") + k +
                                 "' does not apply to kind = student_t");
        if (const std::string* dof = get("distribution", "dof")) {
            double v = 0.0;
            if (!detail::parse_double(*dof, v))
                errors.push_back("[distribution] dof: not a number: '" + *dof + "'");
            else if (!(v > 0.0))
                errors.push_back("[distribution] dof must be positive");
            else
                d.dof = v;
        } else {
            errors.push_back("missing required key 'dof' in [distribution] for kind = "
                             "student_t");
        }
    }

    cfg.run.steps = want_long("run", "steps", 1, 2000000000LL, true, 1);
    // Default burn-in is 10000 iterations; for short runs it scales down to a
    // tenth of the run so a minimal config stays valid. Explicit values are
    // taken literally and validated below.
    const long default_burn_in = std::min<long>(10000, cfg.run.steps / 10);
    cfg.run.burn_in =
        want_long("run", "burn_in", 0, 2000000000LL, false, default_burn_in);
    cfg.run.replicas = static_cast<int>(want_long("run", "replicas", 1, 10000, false, 1));
    cfg.run.thinning = want_long("run", "thinning", 1, 1000000, false, 1);
    if (const std::string* seed = get("run", "seed")) {
        std::uint64_t s = 0;
        if (!detail::parse_u64(*seed, s))
            errors.push_back("[run] seed: not an unsigned integer: '" + *seed + "'");
        else
            cfg.run.seed = s;
    } else {
        cfg.run.seed = 1;
    }
    if (const auto d0 = want_double("run", "delta0", false, 1.0)) {
        cfg.run.delta0 = *d0;
        if (!(cfg.run.delta0 >= 0.0))
            errors.push_back("[run] delta0 must be >= 0");
    }
    if (cfg.run.burn_in >= cfg.run.steps)
        errors.push_back("[run] burn_in (" + std::to_string(cfg.run.burn_in) +
                         ") must be smaller than steps (" + std::to_string(cfg.run.steps) +
                         ")");

    if (const std::string* dir = get("output", "directory"))
        cfg.output.directory = *dir;
    if (const std::string* formats = get("output", "formats")) {
        cfg.output.csv = cfg.output.json = cfg.output.svg = false;
        for (const std::string& f : detail::split_list(*formats)) {
            if (f == "csv") cfg.output.csv = true;
            else if (f == "json") cfg.output.json = true;
            else if (f == "svg") cfg.output.svg = true;
            else errors.push_back("[output] unknown format '" + f +
                                  "' (expected csv, json, svg)");
        }
    }

    if (errors.empty())
        result.config = std::move(cfg);
    return result;
}

inline ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult r;
        r.errors.push_back("cannot open config file: " + path);
        return r;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace lces
