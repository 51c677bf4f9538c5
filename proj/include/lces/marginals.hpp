#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "lces/rng.hpp"
#include "lces/specfun.hpp"

// One-dimensional absolutely continuous marginal laws with density, CDF and
// quantile. Quantiles fall back to bracketed bisection when no closed form
// exists (absolute tolerance 1e-10).

namespace lces {

class Marginal1D {
public:
    virtual ~Marginal1D() = default;
    virtual double pdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual std::string name() const = 0;

    virtual double quantile(double u) const {
        u = std::clamp(u, 1e-12, 1.0 - 1e-12);
        double lo = -1.0;
        double hi = 1.0;
        for (int i = 0; i < 400 && cdf(lo) > u; ++i) lo *= 2.0;
        for (int i = 0; i < 400 && cdf(hi) < u; ++i) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (hi - lo < 1e-10 * std::max(1.0, std::abs(mid)))
                break;
            if (cdf(mid) < u)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    double sample(RngStream& rng) const { return quantile(rng.uniform01()); }

    // Doubling-test probe: whether E[exp(a X)] is finite for some a > 0
    // (used only for reporting; the Monte Carlo diagnostics are the arbiter).
    virtual bool has_exponential_moment() const = 0;
};

class NormalMarginal final : public Marginal1D {
public:
    explicit NormalMarginal(double sd = 1.0) : sd_(sd) {
        if (!(sd > 0.0))
            throw std::invalid_argument("NormalMarginal: sd must be positive");
    }
    double pdf(double x) const override { return specfun::normal_pdf(x / sd_) / sd_; }
    double cdf(double x) const override { return specfun::normal_cdf(x / sd_); }
    double quantile(double u) const override {
        u = std::clamp(u, 1e-16, 1.0 - 1e-16);
        return sd_ * specfun::normal_quantile(u);
    }
    std::string name() const override { return "normal(" + std::to_string(sd_) + ")"; }
    bool has_exponential_moment() const override { return true; }
    double sd() const { return sd_; }

private:
    double sd_;
};

class StudentTMarginal final : public Marginal1D {
public:
    explicit StudentTMarginal(double nu) : nu_(nu) {
        if (!(nu > 0.0))
            throw std::invalid_argument("StudentTMarginal: nu must be positive");
    }
    double pdf(double x) const override { return specfun::student_t_pdf(x, nu_); }
    double cdf(double x) const override { return specfun::student_t_cdf(x, nu_); }
    std::string name() const override { return "student_t(" + std::to_string(nu_) + ")"; }
    bool has_exponential_moment() const override { return false; }
    double dof() const { return nu_; }

private:
    double nu_;
};

class CauchyMarginal final : public Marginal1D {
public:
    explicit CauchyMarginal(double scale = 1.0) : scale_(scale) {
        if (!(scale > 0.0))
            throw std::invalid_argument("CauchyMarginal: scale must be positive");
    }
    double pdf(double x) const override {
        const double z = x / scale_;
        return 1.0 / (specfun::kPi * scale_ * (1.0 + z * z));
    }
    double cdf(double x) const override {
        return 0.5 + std::atan(x / scale_) / specfun::kPi;
    }
    double quantile(double u) const override {
        u = std::clamp(u, 1e-12, 1.0 - 1e-12);
        return scale_ * std::tan(specfun::kPi * (u - 0.5));
    }
    std::string name() const override { return "cauchy(" + std::to_string(scale_) + ")"; }
    bool has_exponential_moment() const override { return false; }

private:
    double scale_;
};

} // namespace lces
