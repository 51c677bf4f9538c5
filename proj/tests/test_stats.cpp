#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "lces/rng.hpp"
#include "lces/specfun.hpp"
#include "lces/stats.hpp"

using namespace lces;
using Catch::Approx;

TEST_CASE("pairwise summation tracks an extended-precision reference") {
    RngStream rng(99);
    std::vector<double> v(1000000);
    long double ref = 0.0L;
    for (auto& x : v) {
        x = rng.normal() + 0.125; // non-zero mean so the sum does not cancel away
        ref += x;
    }
    const double s = stats::pairwise_sum(v);
    CHECK(std::abs(s - static_cast<double>(ref)) <=
          1e-13 * std::abs(static_cast<double>(ref)));
}

TEST_CASE("mean and variance") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(stats::mean(v) == Approx(2.5));
    CHECK(stats::variance(v) == Approx(5.0 / 3.0));
    CHECK_THROWS(stats::mean(std::vector<double>{}));
}

TEST_CASE("sorted-sample quantiles interpolate linearly") {
    std::vector<double> v{0.0, 1.0, 2.0, 3.0, 4.0};
    CHECK(stats::quantile_sorted(v, 0.0) == 0.0);
    CHECK(stats::quantile_sorted(v, 1.0) == 4.0);
    CHECK(stats::quantile_sorted(v, 0.5) == Approx(2.0));
    CHECK(stats::quantile_sorted(v, 0.375) == Approx(1.5));
}

TEST_CASE("two-sample KS accepts same law and rejects a shift") {
    RngStream rng(101);
    std::vector<double> a(20000), b(20000), c(20000);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    for (auto& x : c) x = rng.normal() + 0.1;
    CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
    CHECK(stats::ks_two_sample(a, c).p_value < 1e-6);
}

TEST_CASE("one-sample KS against the normal cdf") {
    RngStream rng(103);
    std::vector<double> a(50000);
    for (auto& x : a) x = rng.normal();
    CHECK(stats::ks_one_sample(a, [](double t) { return specfun::normal_cdf(t); }).p_value >
          0.01);
    // Wrong scale must be rejected decisively.
    CHECK(stats::ks_one_sample(a, [](double t) { return specfun::normal_cdf(t / 1.1); })
              .p_value < 1e-6);
}

TEST_CASE("spearman rank correlation") {
    std::vector<double> x(1000), y(1000), z(1000);
    RngStream rng(105);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.normal();
        y[i] = std::exp(x[i]); // monotone transform: rho = 1
        z[i] = rng.normal();
    }
    CHECK(stats::spearman_rho(x, y) == Approx(1.0).margin(1e-12));
    CHECK(std::abs(stats::spearman_rho(x, z)) < 0.1);
    std::vector<double> neg(x);
    for (auto& v : neg) v = -v;
    CHECK(stats::spearman_rho(x, neg) == Approx(-1.0).margin(1e-12));
}

TEST_CASE("moving-block bootstrap covers the mean of an AR(1) series") {
    RngStream rng(1007);
    const double phi = 0.6;
    const double mu = 1.5;
    std::vector<double> series(200000);
    double state = 0.0;
    for (auto& v : series) {
        state = phi * state + rng.normal();
        v = mu + state;
    }
    RngStream boot(1);
    const auto ci = stats::moving_block_bootstrap(
        {series}, static_cast<std::size_t>(std::sqrt(series.size())), 1000, 0.95, boot);
    CHECK(ci.lower < mu);
    CHECK(ci.upper > mu);
    CHECK(ci.lower < ci.estimate);
    CHECK(ci.estimate < ci.upper);
    // Width should reflect the autocorrelation-inflated variance:
    // var of the mean ~ (1/n) * sigma_x^2 * (1+phi)/(1-phi).
    const double sd_mean = std::sqrt((1.0 / (1.0 - phi * phi)) * (1.0 + phi) /
                                     (1.0 - phi) / series.size());
    const double width = ci.upper - ci.lower;
    CHECK(width > 2.0 * sd_mean);
    CHECK(width < 6.0 * sd_mean);
}

TEST_CASE("bootstrap pools several replicas") {
    RngStream rng(109);
    std::vector<std::vector<double>> series(3, std::vector<double>(5000));
    for (auto& s : series)
        for (auto& v : s) v = 2.0 + rng.normal();
    RngStream boot(2);
    const auto ci = stats::moving_block_bootstrap(series, 70, 500, 0.95, boot);
    CHECK(ci.lower < 2.0);
    CHECK(ci.upper > 2.0);
}
