#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "lces/copula.hpp"
#include "lces/marginals.hpp"
#include "lces/problem.hpp"
#include "lces/quadrature.hpp"
#include "lces/rng.hpp"
#include "lces/specfun.hpp"

// Step distributions: absolutely continuous laws of the raw mutation step M
// with a positive density on R^n. Everything the sampler and the density
// oracles need is expressed in the constraint-adapted frame z = Q^T x, whose
// first coordinate equals the constraint value g(x).

namespace lces {

class StepDistribution {
public:
    explicit StepDistribution(RotationFrame frame)
        : frame_(std::move(frame)), n_(frame_.dimension()), theta_(frame_.theta()) {}
    virtual ~StepDistribution() = default;

    int dimension() const { return n_; }
    double theta() const { return theta_; }
    const RotationFrame& frame() const { return frame_; }

    // Density of the raw step at an ambient-coordinates point.
    virtual double density(const Vec& x) const = 0;
    // Joint density of the first two frame coordinates (Z1, Z2).
    virtual double front_density(double z1, double z2) const = 0;
    virtual Vec sample(RngStream& rng) const = 0;

    // Marginal CDF/pdf of the k-th frame coordinate, k in 1..n.
    virtual double marginal_cdf_rotated(int k, double x) const = 0;
    virtual double marginal_pdf_rotated(int k, double x) const = 0;

    virtual double marginal_quantile_rotated(int k, double u) const {
        u = std::clamp(u, 1e-12, 1.0 - 1e-12);
        double lo = -1.0;
        double hi = 1.0;
        for (int i = 0; i < 400 && marginal_cdf_rotated(k, lo) > u; ++i) lo *= 2.0;
        for (int i = 0; i < 400 && marginal_cdf_rotated(k, hi) < u; ++i) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (hi - lo < 1e-10 * std::max(1.0, std::abs(mid)))
                break;
            if (marginal_cdf_rotated(k, mid) < u)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }

    // P(Z2 > z2_low | Z1 = z1). Generic quadrature fallback; concrete
    // distributions override with closed forms.
    virtual double front_conditional_survival(double z1, double z2_low) const {
        const double den = marginal_pdf_rotated(1, z1);
        if (den <= 1e-300)
            return 0.0;
        const double hi = marginal_quantile_rotated(2, 1.0 - 1e-12);
        if (z2_low >= hi)
            return 0.0;
        const double num = quad::integrate(
            [&](double z2) { return front_density(z1, z2); }, z2_low, hi,
            {1e-12, 1e-10, 5000});
        return std::clamp(num / den, 0.0, 1.0);
    }

    // Whether the frame coordinates (Z1,...,Zn) are mutually independent.
    virtual bool rotated_independent() const = 0;
    // Whether the law is invariant under all rotations of R^n.
    virtual bool isotropic() const = 0;

    // E[g(M*)] in the unconstrained limit delta -> infinity, when available
    // in closed/quadrature form (selection over lambda i.i.d. raw steps).
    virtual std::optional<double> unconstrained_selected_g_limit(int) const {
        return std::nullopt;
    }

    // Marginal of the first ambient coordinate (the objective direction),
    // when expressible as a Marginal1D; used by diagnostics.
    virtual std::shared_ptr<const Marginal1D> objective_marginal() const { return nullptr; }

    virtual std::string describe() const = 0;

protected:
    // Expected maximum of lambda i.i.d. draws from a marginal, by quadrature
    // of x * lambda * f(x) * F(x)^{lambda-1} over the bulk of the support.
    static double expected_max_iid(const Marginal1D& m, int lambda) {
        const double lo = m.quantile(1e-10);
        const double hi = m.quantile(1.0 - 1e-10);
        return quad::integrate(
            [&](double x) {
                return x * lambda * m.pdf(x) * std::pow(m.cdf(x), lambda - 1);
            },
            lo, hi, {1e-9, 1e-9, 5000});
    }

    RotationFrame frame_;
    int n_;
    double theta_;
};

// Centered multivariate Gaussian with SPD covariance C.
class GaussianStep final : public StepDistribution {
public:
    GaussianStep(const Mat& covariance, RotationFrame frame)
        : StepDistribution(std::move(frame)), cov_(covariance) {
        if (cov_.rows() != n_ || cov_.cols() != n_)
            throw std::invalid_argument("GaussianStep: covariance dimension mismatch");
        if (!cov_.isApprox(cov_.transpose(), 1e-12))
            throw std::invalid_argument("GaussianStep: covariance must be symmetric");
        llt_.compute(cov_);
        if (llt_.info() != Eigen::Success)
            throw std::invalid_argument("GaussianStep: covariance must be positive definite");
        chol_ = llt_.matrixL();
        double logdet = 0.0;
        for (int i = 0; i < n_; ++i)
            logdet += 2.0 * std::log(chol_(i, i));
        log_norm_ = -0.5 * (n_ * std::log(2.0 * specfun::kPi) + logdet);
        rotated_cov_ = frame_.matrix().transpose() * cov_ * frame_.matrix();
        rotated_sd_.resize(n_);
        for (int i = 0; i < n_; ++i)
            rotated_sd_[i] = std::sqrt(rotated_cov_(i, i));
    }

    double density(const Vec& x) const override {
        if (x.size() != n_)
            throw std::invalid_argument("GaussianStep::density: dimension mismatch");
        const double q = x.dot(llt_.solve(x));
        return std::exp(log_norm_ - 0.5 * q);
    }

    double front_density(double z1, double z2) const override {
        const double s11 = rotated_cov_(0, 0);
        const double s12 = rotated_cov_(0, 1);
        const double s22 = rotated_cov_(1, 1);
        const double det = s11 * s22 - s12 * s12;
        const double q = (s22 * z1 * z1 - 2.0 * s12 * z1 * z2 + s11 * z2 * z2) / det;
        return std::exp(-0.5 * q) / (2.0 * specfun::kPi * std::sqrt(det));
    }

    Vec sample(RngStream& rng) const override {
        Vec z(n_);
        for (int i = 0; i < n_; ++i)
            z[i] = rng.normal();
        return chol_ * z;
    }

    double marginal_cdf_rotated(int k, double x) const override {
        check_axis(k);
        return specfun::normal_cdf(x / rotated_sd_[k - 1]);
    }

    double marginal_pdf_rotated(int k, double x) const override {
        check_axis(k);
        const double sd = rotated_sd_[k - 1];
        return specfun::normal_pdf(x / sd) / sd;
    }

    double marginal_quantile_rotated(int k, double u) const override {
        check_axis(k);
        u = std::clamp(u, 1e-16, 1.0 - 1e-16);
        return rotated_sd_[k - 1] * specfun::normal_quantile(u);
    }

    double front_conditional_survival(double z1, double z2_low) const override {
        const double s11 = rotated_cov_(0, 0);
        const double s12 = rotated_cov_(0, 1);
        const double s22 = rotated_cov_(1, 1);
        const double mu = s12 / s11 * z1;
        const double sd = std::sqrt(s22 - s12 * s12 / s11);
        return specfun::normal_sf((z2_low - mu) / sd);
    }

    bool rotated_independent() const override {
        double off = 0.0;
        double diag = 0.0;
        for (int i = 0; i < n_; ++i) {
            diag = std::max(diag, rotated_cov_(i, i));
            for (int j = 0; j < n_; ++j)
                if (i != j)
                    off = std::max(off, std::abs(rotated_cov_(i, j)));
        }
        return off <= 1e-12 * diag;
    }

    bool isotropic() const override {
        const double c = cov_.trace() / n_;
        return (cov_ - c * Mat::Identity(n_, n_)).cwiseAbs().maxCoeff() <=
               1e-12 * std::abs(c);
    }

    std::optional<double> unconstrained_selected_g_limit(int lambda) const override {
        // Selection maximizes M1 ~ N(0, C11); E[M2 | M1] = (C12/C11) M1.
        const NormalMarginal std_normal(1.0);
        const double e_max = expected_max_iid(std_normal, lambda);
        const double sd1 = std::sqrt(cov_(0, 0));
        const double e1 = sd1 * e_max;
        const double e2 = cov_(0, 1) / cov_(0, 0) * e1;
        return std::cos(theta_) * e1 + std::sin(theta_) * e2;
    }

    std::shared_ptr<const Marginal1D> objective_marginal() const override {
        return std::make_shared<NormalMarginal>(std::sqrt(cov_(0, 0)));
    }

    std::string describe() const override { return "gaussian"; }

    const Mat& covariance() const { return cov_; }
    const Mat& rotated_covariance() const { return rotated_cov_; }

private:
    void check_axis(int k) const {
        if (k < 1 || k > n_)
            throw std::invalid_argument("GaussianStep: frame axis out of range");
    }

    Mat cov_;
    Eigen::LLT<Mat> llt_;
    Mat chol_;
    Mat rotated_cov_;
    std::vector<double> rotated_sd_;
    double log_norm_ = 0.0;
};

inline std::shared_ptr<const StepDistribution>
gaussian_step_distribution(int n, const Mat& covariance, double theta) {
    return std::make_shared<GaussianStep>(covariance, RotationFrame(n, theta));
}

// Step law assembled in the frame coordinates: (Z1, Z2) carries an
// Archimedean copula with prescribed marginals, the remaining frame
// coordinates are independent with their own marginals.
class CopulaStep final : public StepDistribution {
public:
    CopulaStep(std::shared_ptr<const Copula2D> copula,
               std::shared_ptr<const Marginal1D> marginal1,
               std::shared_ptr<const Marginal1D> marginal2,
               std::vector<std::shared_ptr<const Marginal1D>> tail_marginals,
               RotationFrame frame)
        : StepDistribution(std::move(frame)),
          copula_(std::move(copula)),
          m1_(std::move(marginal1)),
          m2_(std::move(marginal2)),
          tails_(std::move(tail_marginals)) {
        if (!copula_ || !m1_ || !m2_)
            throw std::invalid_argument("CopulaStep: null copula or marginal");
        if (static_cast<int>(tails_.size()) != n_ - 2)
            throw std::invalid_argument("CopulaStep: need dimension - 2 tail marginals");
        for (const auto& t : tails_)
            if (!t)
                throw std::invalid_argument("CopulaStep: null tail marginal");
        validate_marginal(*m1_);
        validate_marginal(*m2_);
        for (const auto& t : tails_)
            validate_marginal(*t);
    }

    double density(const Vec& x) const override {
        if (x.size() != n_)
            throw std::invalid_argument("CopulaStep::density: dimension mismatch");
        const Vec z = frame_.to_frame(x);
        double val = front_density(z[0], z[1]);
        for (int k = 2; k < n_; ++k)
            val *= tails_[k - 2]->pdf(z[k]);
        return val;
    }

    double front_density(double z1, double z2) const override {
        return copula_->density(m1_->cdf(z1), m2_->cdf(z2)) * m1_->pdf(z1) * m2_->pdf(z2);
    }

    Vec sample(RngStream& rng) const override {
        const auto [u1, u2] = copula_->sample(rng);
        Vec z(n_);
        z[0] = m1_->quantile(u1);
        z[1] = m2_->quantile(u2);
        for (int k = 2; k < n_; ++k)
            z[k] = tails_[k - 2]->sample(rng);
        return frame_.from_frame(z);
    }

    double marginal_cdf_rotated(int k, double x) const override {
        return axis_marginal(k).cdf(x);
    }

    double marginal_pdf_rotated(int k, double x) const override {
        return axis_marginal(k).pdf(x);
    }

    double marginal_quantile_rotated(int k, double u) const override {
        return axis_marginal(k).quantile(u);
    }

    double front_conditional_survival(double z1, double z2_low) const override {
        const double s = 1.0 - copula_->conditional_cdf(m1_->cdf(z1), m2_->cdf(z2_low));
        return std::clamp(s, 0.0, 1.0);
    }

    bool rotated_independent() const override { return copula_->is_independence(); }

    // Copula-assembled laws are anisotropic by construction (the frame axes
    // are distinguished), so no rotation-invariance claim is made.
    bool isotropic() const override { return false; }

    std::string describe() const override {
        return "copula{" + copula_->describe() + ", " + m1_->name() + ", " + m2_->name() + "}";
    }

    const Copula2D& copula() const { return *copula_; }
    const Marginal1D& marginal(int k) const { return axis_marginal(k); }

private:
    const Marginal1D& axis_marginal(int k) const {
        if (k < 1 || k > n_)
            throw std::invalid_argument("CopulaStep: frame axis out of range");
        if (k == 1) return *m1_;
        if (k == 2) return *m2_;
        return *tails_[static_cast<std::size_t>(k - 3)];
    }

    static void validate_marginal(const Marginal1D& m) {
        // The quantile must invert the CDF (continuous, strictly increasing
        // distribution function) for truncation and sampling to be exact.
        for (double x : {-2.5, -0.5, 0.0, 0.7, 3.1}) {
            const double u = m.cdf(x);
            if (!(u > 0.0 && u < 1.0))
                throw std::invalid_argument("CopulaStep: marginal CDF not strictly inside (0,1) on the bulk");
            if (std::abs(m.quantile(u) - x) > 1e-6 * std::max(1.0, std::abs(x)))
                throw std::invalid_argument("CopulaStep: marginal quantile does not invert its CDF");
        }
    }

    std::shared_ptr<const Copula2D> copula_;
    std::shared_ptr<const Marginal1D> m1_;
    std::shared_ptr<const Marginal1D> m2_;
    std::vector<std::shared_ptr<const Marginal1D>> tails_;
};

inline std::shared_ptr<const StepDistribution>
copula_marginal_distribution(std::shared_ptr<const Copula2D> copula,
                             std::shared_ptr<const Marginal1D> marginal1,
                             std::shared_ptr<const Marginal1D> marginal2,
                             std::vector<std::shared_ptr<const Marginal1D>> tails,
                             RotationFrame frame) {
    return std::make_shared<CopulaStep>(std::move(copula), std::move(marginal1),
                                        std::move(marginal2), std::move(tails),
                                        std::move(frame));
}

// Spherical multivariate Student-t: Z * sqrt(nu / chi^2_nu) with Z standard
// normal. Rotation-invariant, heavy-tailed, frame coordinates dependent.
class IsotropicStudentTStep final : public StepDistribution {
public:
    IsotropicStudentTStep(double nu, RotationFrame frame)
        : StepDistribution(std::move(frame)), nu_(nu), axis_marginal_(nu) {
        if (!(nu > 0.0))
            throw std::invalid_argument("IsotropicStudentTStep: nu must be positive");
    }

    double density(const Vec& x) const override {
        if (x.size() != n_)
            throw std::invalid_argument("IsotropicStudentTStep::density: dimension mismatch");
        return radial_density(x.squaredNorm(), n_);
    }

    double front_density(double z1, double z2) const override {
        return radial_density(z1 * z1 + z2 * z2, 2);
    }

    Vec sample(RngStream& rng) const override {
        Vec z(n_);
        for (int i = 0; i < n_; ++i)
            z[i] = rng.normal();
        const double s = rng.chi_square(nu_);
        return z * std::sqrt(nu_ / s);
    }

    double marginal_cdf_rotated(int k, double x) const override {
        check_axis(k);
        return specfun::student_t_cdf(x, nu_);
    }

    double marginal_pdf_rotated(int k, double x) const override {
        check_axis(k);
        return specfun::student_t_pdf(x, nu_);
    }

    // Z2 | Z1 = z1 is a scaled t(nu+1): scale^2 = (nu + z1^2) / (nu + 1).
    double front_conditional_survival(double z1, double z2_low) const override {
        const double scale = std::sqrt((nu_ + z1 * z1) / (nu_ + 1.0));
        return 1.0 - specfun::student_t_cdf(z2_low / scale, nu_ + 1.0);
    }

    bool rotated_independent() const override { return false; }
    bool isotropic() const override { return true; }

    std::optional<double> unconstrained_selected_g_limit(int lambda) const override {
        if (nu_ <= 1.0)
            return std::nullopt; // no finite mean
        // By spherical symmetry E[M2* ] = 0, so the limit is cos(theta) E[max M1].
        return std::cos(theta_) * expected_max_iid(axis_marginal_, lambda);
    }

    std::shared_ptr<const Marginal1D> objective_marginal() const override {
        return std::make_shared<StudentTMarginal>(nu_);
    }

    std::string describe() const override {
        return "student_t(" + std::to_string(nu_) + ")";
    }

    double dof() const { return nu_; }

private:
    void check_axis(int k) const {
        if (k < 1 || k > n_)
            throw std::invalid_argument("IsotropicStudentTStep: frame axis out of range");
    }

    double radial_density(double sq_norm, int d) const {
        const double lognorm = std::lgamma(0.5 * (nu_ + d)) - std::lgamma(0.5 * nu_) -
                               0.5 * d * std::log(nu_ * specfun::kPi);
        return std::exp(lognorm - 0.5 * (nu_ + d) * std::log1p(sq_norm / nu_));
    }

    double nu_;
    StudentTMarginal axis_marginal_;
};

} // namespace lces
