#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "lces/rng.hpp"

// Bivariate Archimedean copulas C(u1,u2) = psi(psi^{-1}(u1) + psi^{-1}(u2))
// built from a completely monotone generator psi, together with the exact
// density, the conditional distribution C(u2 | u1) = d C / d u1, and
// conditional-inversion sampling.

namespace lces {

// Arguments are clamped into [kCopulaEps, 1 - kCopulaEps] before evaluating
// generator inverses; since any copula is 1-Lipschitz in each argument this
// perturbs values by at most the clamp width.
inline constexpr double kCopulaEps = 1e-12;

class ArchimedeanGenerator {
public:
    virtual ~ArchimedeanGenerator() = default;
    virtual double psi(double t) const = 0;
    virtual double psi_inverse(double u) const = 0;
    virtual double psi_prime(double t) const = 0;
    virtual double psi_double_prime(double t) const = 0;
    virtual double parameter() const = 0;
    virtual std::string name() const = 0;
    // True when the generator yields the product copula exactly.
    virtual bool is_independence() const { return false; }
};

// psi(t) = exp(-t^(1/vartheta)), vartheta >= 1; vartheta = 1 is independence.
class GumbelGenerator final : public ArchimedeanGenerator {
public:
    explicit GumbelGenerator(double vartheta) : vt_(vartheta) {
        if (!(vartheta >= 1.0))
            throw std::invalid_argument("GumbelGenerator: vartheta must be >= 1");
    }
    double psi(double t) const override { return std::exp(-std::pow(t, 1.0 / vt_)); }
    double psi_inverse(double u) const override { return std::pow(-std::log(u), vt_); }
    double psi_prime(double t) const override {
        return -std::exp(-std::pow(t, 1.0 / vt_)) * std::pow(t, 1.0 / vt_ - 1.0) / vt_;
    }
    double psi_double_prime(double t) const override {
        const double r = std::pow(t, 1.0 / vt_);
        return std::exp(-r) * r * (r + vt_ - 1.0) / (vt_ * vt_ * t * t);
    }
    double parameter() const override { return vt_; }
    std::string name() const override { return "gumbel"; }
    bool is_independence() const override { return vt_ == 1.0; }

private:
    double vt_;
};

// psi(t) = (1 + t)^(-1/vartheta), vartheta > 0 (lower-tail dependence).
class ClaytonGenerator final : public ArchimedeanGenerator {
public:
    explicit ClaytonGenerator(double vartheta) : vt_(vartheta) {
        if (!(vartheta > 0.0))
            throw std::invalid_argument("ClaytonGenerator: vartheta must be > 0");
    }
    double psi(double t) const override { return std::pow(1.0 + t, -1.0 / vt_); }
    double psi_inverse(double u) const override { return std::pow(u, -vt_) - 1.0; }
    double psi_prime(double t) const override {
        return -std::pow(1.0 + t, -1.0 / vt_ - 1.0) / vt_;
    }
    double psi_double_prime(double t) const override {
        return (1.0 / vt_) * (1.0 / vt_ + 1.0) * std::pow(1.0 + t, -1.0 / vt_ - 2.0);
    }
    double parameter() const override { return vt_; }
    std::string name() const override { return "clayton"; }

private:
    double vt_;
};

// psi(t) = exp(-t): the product copula.
class IndependenceGenerator final : public ArchimedeanGenerator {
public:
    double psi(double t) const override { return std::exp(-t); }
    double psi_inverse(double u) const override { return -std::log(u); }
    double psi_prime(double t) const override { return -std::exp(-t); }
    double psi_double_prime(double t) const override { return std::exp(-t); }
    double parameter() const override { return 0.0; }
    std::string name() const override { return "independence"; }
    bool is_independence() const override { return true; }
};

class Copula2D {
public:
    virtual ~Copula2D() = default;
    virtual double cdf(double u1, double u2) const = 0;
    virtual double density(double u1, double u2) const = 0;
    // Conditional CDF of U2 given U1 = u1: the partial derivative of the
    // copula in its first argument, monotone increasing in u2.
    virtual double conditional_cdf(double u1, double u2) const = 0;
    virtual double conditional_quantile(double u1, double v) const = 0;
    virtual std::pair<double, double> sample(RngStream& rng) const = 0;
    virtual bool is_independence() const = 0;
    virtual std::string describe() const = 0;
};

namespace detail {
inline double clamp_unit(double u) {
    return std::clamp(u, kCopulaEps, 1.0 - kCopulaEps);
}
} // namespace detail

class ArchimedeanCopula2D final : public Copula2D {
public:
    explicit ArchimedeanCopula2D(std::shared_ptr<const ArchimedeanGenerator> gen)
        : gen_(std::move(gen)) {
        if (!gen_)
            throw std::invalid_argument("ArchimedeanCopula2D: null generator");
    }

    double cdf(double u1, double u2) const override {
        u1 = detail::clamp_unit(u1);
        u2 = detail::clamp_unit(u2);
        return gen_->psi(gen_->psi_inverse(u1) + gen_->psi_inverse(u2));
    }

    // c(u1,u2) = psi''(s) / (psi'(psi^{-1}(u1)) psi'(psi^{-1}(u2))),
    // s = psi^{-1}(u1) + psi^{-1}(u2); the chain rule applied to
    // d^2/du1 du2 of psi(s).
    double density(double u1, double u2) const override {
        u1 = detail::clamp_unit(u1);
        u2 = detail::clamp_unit(u2);
        const double t1 = gen_->psi_inverse(u1);
        const double t2 = gen_->psi_inverse(u2);
        return gen_->psi_double_prime(t1 + t2) /
               (gen_->psi_prime(t1) * gen_->psi_prime(t2));
    }

    double conditional_cdf(double u1, double u2) const override {
        u1 = detail::clamp_unit(u1);
        u2 = detail::clamp_unit(u2);
        const double t1 = gen_->psi_inverse(u1);
        const double t2 = gen_->psi_inverse(u2);
        const double v = gen_->psi_prime(t1 + t2) / gen_->psi_prime(t1);
        return std::clamp(v, 0.0, 1.0);
    }

    // Invert v -> u2 of the conditional CDF by bisection (the conditional
    // CDF is monotone in u2); absolute tolerance 1e-10.
    double conditional_quantile(double u1, double v) const override {
        u1 = detail::clamp_unit(u1);
        v = detail::clamp_unit(v);
        if (gen_->is_independence())
            return v;
        double lo = kCopulaEps;
        double hi = 1.0 - kCopulaEps;
        if (conditional_cdf(u1, lo) >= v)
            return lo;
        if (conditional_cdf(u1, hi) <= v)
            return hi;
        for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (conditional_cdf(u1, mid) < v)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::pair<double, double> sample(RngStream& rng) const override {
        const double u1 = detail::clamp_unit(rng.uniform01());
        const double v = detail::clamp_unit(rng.uniform01());
        return {u1, conditional_quantile(u1, v)};
    }

    bool is_independence() const override { return gen_->is_independence(); }

    std::string describe() const override {
        return "archimedean(" + gen_->name() + ", " + std::to_string(gen_->parameter()) + ")";
    }

    const ArchimedeanGenerator& generator() const { return *gen_; }

private:
    std::shared_ptr<const ArchimedeanGenerator> gen_;
};

inline std::shared_ptr<const Copula2D>
archimedean_copula(std::shared_ptr<const ArchimedeanGenerator> gen) {
    return std::make_shared<ArchimedeanCopula2D>(std::move(gen));
}

struct DensityCheck {
    double analytic;
    double numeric;
    double relative_error;
};

// Compare the closed-form copula density against a central second finite
// difference of the copula CDF (the mixed derivative d^2 C / du1 du2).
inline DensityCheck archimedean_density_check(const ArchimedeanGenerator& gen, double u1,
                                              double u2, double step = 1e-4) {
    const ArchimedeanCopula2D cop(
        std::shared_ptr<const ArchimedeanGenerator>(&gen, [](const ArchimedeanGenerator*) {}));
    const double analytic = cop.density(u1, u2);
    const double h = step;
    const double numeric = (cop.cdf(u1 + h, u2 + h) - cop.cdf(u1 + h, u2 - h) -
                            cop.cdf(u1 - h, u2 + h) + cop.cdf(u1 - h, u2 - h)) /
                           (4.0 * h * h);
    const double denom = std::max(std::abs(analytic), 1e-30);
    return {analytic, numeric, std::abs(analytic - numeric) / denom};
}

} // namespace lces
