#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "lces/rng.hpp"
#include "lces/specfun.hpp"

// Statistical utilities: numerically careful summation, sample summaries,
// Kolmogorov-Smirnov tests, rank correlation, and a moving-block bootstrap
// for confidence intervals on means of autocorrelated series.

namespace lces::stats {

// Pairwise (cascade) summation: O(log n) error growth instead of O(n).
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
    if (v.empty())
        throw std::invalid_argument("mean: empty sample");
    return pairwise_sum(v) / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
    if (v.size() < 2)
        throw std::invalid_argument("variance: need at least two points");
    const double m = mean(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - m;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

// Linear-interpolation quantile of an already sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty())
        throw std::invalid_argument("quantile_sorted: empty sample");
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

struct KsResult {
    double statistic;
    double p_value;
};

namespace detail {

// Asymptotic KS p-value with the Stephens small-sample correction.
inline double ks_p_value(double d, double n_effective) {
    const double rn = std::sqrt(n_effective);
    return specfun::kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
}

} // namespace detail

// One-sample KS test of `sample` against a continuous CDF.
template <class Cdf>
KsResult ks_one_sample(std::vector<double> sample, Cdf&& cdf) {
    if (sample.empty())
        throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(f - lo), std::abs(hi - f)));
    }
    return {d, detail::ks_p_value(d, n)};
}

// Two-sample KS test (continuous data; ties handled by the merge walk).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return {d, detail::ks_p_value(d, ne)};
}

// Spearman rank correlation (average ranks for ties).
inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("spearman_rho: need equal-length samples, n >= 3");
    auto ranks = [](std::span<const double> v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    const double mx = mean(rx);
    const double my = mean(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

struct CiEstimate {
    double estimate;
    double lower;
    double upper;
};

// Percentile confidence interval for the pooled mean of one or more
// autocorrelated series via the moving-block bootstrap. Each resample
// rebuilds every series from `block_length`-long contiguous blocks drawn
// uniformly at random, preserving short-range dependence. Block sums come
// from extended-precision prefix sums, so a resample costs O(n / block).
inline CiEstimate moving_block_bootstrap(const std::vector<std::vector<double>>& series,
                                         std::size_t block_length, int n_resamples,
                                         double level, RngStream& rng) {
    std::size_t total = 0;
    for (const auto& s : series) total += s.size();
    if (total == 0)
        throw std::invalid_argument("moving_block_bootstrap: empty input");
    if (block_length == 0)
        block_length = 1;

    std::vector<std::vector<long double>> prefix(series.size());
    long double grand = 0.0L;
    for (std::size_t si = 0; si < series.size(); ++si) {
        prefix[si].resize(series[si].size() + 1);
        prefix[si][0] = 0.0L;
        for (std::size_t i = 0; i < series[si].size(); ++i)
            prefix[si][i + 1] = prefix[si][i] + series[si][i];
        grand += prefix[si].back();
    }
    const double point = static_cast<double>(grand / static_cast<long double>(total));

    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(n_resamples));
    for (int b = 0; b < n_resamples; ++b) {
        long double sum = 0.0L;
        for (std::size_t si = 0; si < series.size(); ++si) {
            const std::size_t n = series[si].size();
            if (n == 0)
                continue;
            const std::size_t blk = std::min(block_length, n);
            const std::size_t starts = n - blk + 1;
            std::size_t filled = 0;
            while (filled < n) {
                std::size_t start =
                    static_cast<std::size_t>(rng.uniform01() * static_cast<double>(starts));
                start = std::min(start, starts - 1);
                const std::size_t take = std::min(blk, n - filled);
                sum += prefix[si][start + take] - prefix[si][start];
                filled += take;
            }
        }
        means.push_back(static_cast<double>(sum / static_cast<long double>(total)));
    }
    std::sort(means.begin(), means.end());
    const double alpha = 0.5 * (1.0 - level);
    return {point, quantile_sorted(means, alpha), quantile_sorted(means, 1.0 - alpha)};
}

} // namespace lces::stats
