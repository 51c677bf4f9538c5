#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "lces/config.hpp"

using namespace lces;
using Catch::Approx;

namespace {

std::string minimal_gaussian = R"(
[problem]
n = 2
lambda = 5
theta = 0.7853981633974483
sigma = 1.0

[distribution]
kind = gaussian
covariance = identity

[run]
steps = 1000
)";

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
    for (const auto& e : errors)
        if (e.find(needle) != std::string::npos)
            return true;
    return false;
}

} // namespace

TEST_CASE("minimal config parses with documented defaults") {
    const ParseResult r = parse_config(minimal_gaussian);
    REQUIRE(r.ok());
    const ExperimentConfig& c = *r.config;
    CHECK(c.n == 2);
    CHECK(c.lambda == 5);
    CHECK(c.theta == Approx(0.7853981633974483));
    CHECK(c.sigma == 1.0);
    CHECK(c.distribution.kind == "gaussian");
    CHECK(c.run.steps == 1000);
    CHECK(c.run.burn_in == 100); // scaled default: min(10000, steps/10)
    CHECK(c.run.replicas == 1);
    CHECK(c.run.seed == 1);
    CHECK(c.run.delta0 == 1.0);
    CHECK(c.run.thinning == 1);
    CHECK(c.output.csv);
    CHECK(c.output.json);
    CHECK(c.output.svg);

    const auto dist = c.build_distribution();
    REQUIRE(dist);
    CHECK(dist->dimension() == 2);
    CHECK(dist->isotropic());
    CHECK_NOTHROW(c.problem());
}

TEST_CASE("comments, blank lines and spacing are tolerated") {
    const std::string text = R"(
# leading comment
; alternative comment style
[problem]
  n    =   3
lambda=2
theta = 0.5
sigma = 2.5

[distribution]
kind = gaussian
covariance = diag: 1.0, 2.0, 3.0

[run]
steps = 50000
burn_in = 2000
replicas = 3
seed = 99
delta0 = 0.25
thinning = 5

[output]
directory = /tmp/x
formats = csv, json
)";
    const ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    CHECK(r.config->n == 3);
    CHECK(r.config->sigma == 2.5);
    CHECK(r.config->run.burn_in == 2000);
    CHECK(r.config->run.replicas == 3);
    CHECK(r.config->run.seed == 99);
    CHECK(r.config->run.delta0 == 0.25);
    CHECK(r.config->run.thinning == 5);
    CHECK(r.config->output.directory == "/tmp/x");
    CHECK(r.config->output.csv);
    CHECK(r.config->output.json);
    CHECK_FALSE(r.config->output.svg);

    const auto dist = r.config->build_distribution();
    CHECK_FALSE(dist->isotropic());
    CHECK(dist->dimension() == 3);
}

TEST_CASE("angle guard band rejects near-degenerate theta") {
    std::string text = minimal_gaussian;
    const auto replace_theta = [&](const std::string& v) {
        std::string t = minimal_gaussian;
        const auto pos = t.find("theta = 0.7853981633974483");
        t.replace(pos, std::string("theta = 0.7853981633974483").size(), "theta = " + v);
        return t;
    };
    CHECK_FALSE(parse_config(replace_theta("0")).ok());
    CHECK_FALSE(parse_config(replace_theta("1e-9")).ok());
    CHECK_FALSE(parse_config(replace_theta("1.5707963")).ok()); // inside the guard band
    CHECK(parse_config(replace_theta("1.57")).ok());
    CHECK(parse_config(replace_theta("1e-5")).ok());
}

TEST_CASE("copula configuration round-trips") {
    const std::string text = R"(
[problem]
n = 2
lambda = 4
theta = 0.9
sigma = 1.0

[distribution]
kind = copula
generator = gumbel
vartheta = 2.0
marginal1 = normal: 1.0
marginal2 = student_t: 4.0

[run]
steps = 100
burn_in = 10
)";
    const ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    CHECK(r.config->distribution.generator == "gumbel");
    CHECK(r.config->distribution.vartheta == Approx(2.0));
    CHECK(r.config->distribution.marginal1.family == "normal");
    CHECK(r.config->distribution.marginal2.family == "student_t");
    CHECK(r.config->distribution.marginal2.parameter == Approx(4.0));
    const auto dist = r.config->build_distribution();
    CHECK_FALSE(dist->rotated_independent());
    CHECK_FALSE(dist->isotropic());

    // Independence generator forbids vartheta.
    std::string indep = text;
    indep.replace(indep.find("generator = gumbel"), 18, "generator = independence");
    CHECK_FALSE(parse_config(indep).ok());
    indep.replace(indep.find("vartheta = 2.0"), 14, "");
    const ParseResult r2 = parse_config(indep);
    REQUIRE(r2.ok());
    CHECK(r2.config->build_distribution()->rotated_independent());
}

TEST_CASE("copula parameter domains are enforced") {
    const std::string base = R"(
[problem]
n = 2
lambda = 4
theta = 0.9
sigma = 1.0

[distribution]
kind = copula
generator = GEN
vartheta = VT

[run]
steps = 100
)";
    const auto with = [&](const std::string& gen, const std::string& vt) {
        std::string t = base;
        t.replace(t.find("GEN"), 3, gen);
        t.replace(t.find("VT"), 2, vt);
        return parse_config(t);
    };
    CHECK_FALSE(with("gumbel", "0.5").ok());  // needs vartheta >= 1
    CHECK(with("gumbel", "1.0").ok());
    CHECK_FALSE(with("clayton", "0").ok());   // needs vartheta > 0
    CHECK(with("clayton", "1.5").ok());
    CHECK_FALSE(with("frank", "1.0").ok());   // unknown generator
}

TEST_CASE("student-t configuration") {
    const std::string text = R"(
[problem]
n = 2
lambda = 3
theta = 1.0471975511965976
sigma = 0.5

[distribution]
kind = student_t
dof = 3

[run]
steps = 100
)";
    const ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    const auto dist = r.config->build_distribution();
    CHECK(dist->isotropic());
    CHECK_FALSE(dist->rotated_independent());

    std::string bad = text;
    bad.replace(bad.find("dof = 3"), 7, "dof = 0");
    CHECK_FALSE(parse_config(bad).ok());
    std::string missing = text;
    missing.replace(missing.find("dof = 3"), 7, "");
    CHECK_FALSE(parse_config(missing).ok());
}

TEST_CASE("full covariance parsing and SPD validation") {
    const std::string base = R"(
[problem]
n = 2
lambda = 2
theta = 0.7
sigma = 1.0

[distribution]
kind = gaussian
covariance = full: COV

[run]
steps = 100
)";
    const auto with_cov = [&](const std::string& cov) {
        std::string t = base;
        t.replace(t.find("COV"), 3, cov);
        return parse_config(t);
    };
    const ParseResult good = with_cov("4.0, 1.2, 1.2, 1.0");
    REQUIRE(good.ok());
    const auto dist = good.config->build_distribution();
    const auto* g = dynamic_cast<const GaussianStep*>(dist.get());
    REQUIRE(g != nullptr);
    CHECK(g->covariance()(0, 0) == Approx(4.0));
    CHECK(g->covariance()(0, 1) == Approx(1.2));

    CHECK_FALSE(with_cov("1.0, 2.0, 2.0, 1.0").ok()); // indefinite
    CHECK_FALSE(with_cov("1.0, 0.1, 0.2, 1.0").ok()); // asymmetric
    CHECK_FALSE(with_cov("1.0, 0.0, 0.0").ok());      // wrong count
    CHECK_FALSE(with_cov("1.0, x, 0.0, 1.0").ok());   // malformed number
}

TEST_CASE("error accumulation reports every problem at once") {
    const std::string text = R"(
[problem]
n = 1
lambda = 1
theta = 2.0
sigma = -1

[distribution]
kind = gaussian
covariance = identity
dof = 3

[run]
steps = 0
burn_in = -5

[mystery]
k = v
)";
    const ParseResult r = parse_config(text);
    CHECK_FALSE(r.ok());
    CHECK(r.errors.size() >= 6);
    CHECK(mentions(r.errors, "n"));
    CHECK(mentions(r.errors, "lambda"));
    CHECK(mentions(r.errors, "theta"));
    CHECK(mentions(r.errors, "sigma"));
    CHECK(mentions(r.errors, "steps"));
    CHECK(mentions(r.errors, "mystery"));
    CHECK(mentions(r.errors, "dof")); // inapplicable key for gaussian kind
}

TEST_CASE("structural errors: duplicates, unknown keys, malformed lines") {
    std::string dup = minimal_gaussian;
    dup += "\n[run]\nsteps = 2000\n";
    CHECK_FALSE(parse_config(dup).ok());
    CHECK(mentions(parse_config(dup).errors, "duplicate"));

    std::string unknown = minimal_gaussian;
    unknown += "\n[output]\ncolor = red\n";
    CHECK_FALSE(parse_config(unknown).ok());

    std::string malformed = minimal_gaussian;
    malformed += "\n[output]\nthis line has no equals sign\n";
    const ParseResult r = parse_config(malformed);
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.errors, "line"));

    std::string orphan = "steps = 5\n" + minimal_gaussian;
    CHECK_FALSE(parse_config(orphan).ok());

    std::string bad_fmt = minimal_gaussian;
    bad_fmt += "\n[output]\nformats = csv, pdf\n";
    CHECK_FALSE(parse_config(bad_fmt).ok());
}

TEST_CASE("run section bounds") {
    const auto with_run = [&](const std::string& run_body) {
        std::string t = minimal_gaussian;
        t.replace(t.find("steps = 1000"), 12, run_body);
        return parse_config(t);
    };
    CHECK_FALSE(with_run("steps = 1000\nburn_in = 1000").ok()); // burn_in >= steps
    CHECK(with_run("steps = 1000\nburn_in = 999").ok());
    CHECK_FALSE(with_run("steps = 3000000000").ok()); // above 2e9 cap
    CHECK_FALSE(with_run("steps = 1000\nreplicas = 0").ok());
    CHECK_FALSE(with_run("steps = 1000\nreplicas = 20000").ok());
    CHECK_FALSE(with_run("steps = 1000\ndelta0 = -0.5").ok());
    CHECK(with_run("steps = 1000\ndelta0 = 0").ok());
    CHECK_FALSE(with_run("steps = 1000\nthinning = 0").ok());
}

TEST_CASE("tails marginal only applies beyond two dimensions") {
    const std::string text = R"(
[problem]
n = 3
lambda = 4
theta = 0.9
sigma = 1.0

[distribution]
kind = copula
generator = clayton
vartheta = 1.0
tails = cauchy: 2.0

[run]
steps = 100
)";
    const ParseResult r = parse_config(text);
    REQUIRE(r.ok());
    CHECK(r.config->distribution.tails.family == "cauchy");
    CHECK(r.config->build_distribution()->dimension() == 3);

    std::string flat = text;
    flat.replace(flat.find("n = 3"), 5, "n = 2");
    CHECK_FALSE(parse_config(flat).ok());
}

TEST_CASE("file loading errors are reported, not thrown") {
    const ParseResult r = parse_config_file("/nonexistent/path/config.ini");
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.errors.empty());
}
