#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lces/distribution.hpp"
#include "lces/problem.hpp"

// Copula-based representation of the feasible step. When the frame
// coordinates of the raw step are independent, conditioning on the feasible
// set {z1 <= delta} only truncates the first frame marginal:
//   F_{1,delta}(x) = F_1(min(x, delta)) / F_1(delta),
// the other coordinates keep their marginals, and the dependence structure
// of the feasible step stays the product copula for every delta. The map
//   G(delta, u) = Q (F^{-1}_{1,delta}(u_1), F^{-1}_2(u_2), ..., F^{-1}_n(u_n))
// then turns independent uniforms into an exact feasible step.

namespace lces {

class TruncatedMarginalSet {
public:
    TruncatedMarginalSet(std::shared_ptr<const StepDistribution> dist, double delta)
        : dist_(std::move(dist)), delta_(delta) {
        if (!dist_)
            throw std::invalid_argument("TruncatedMarginalSet: null distribution");
        if (!dist_->rotated_independent())
            throw std::invalid_argument(
                "TruncatedMarginalSet: frame coordinates must be independent for the "
                "truncated-marginal representation to be exact");
        mass_ = dist_->marginal_cdf_rotated(1, delta_);
        if (!(mass_ > 0.0))
            throw std::invalid_argument("TruncatedMarginalSet: feasible set has zero mass");
    }

    int dimension() const { return dist_->dimension(); }
    double delta() const { return delta_; }
    const StepDistribution& distribution() const { return *dist_; }

    // CDF of the k-th feasible-step frame coordinate.
    double cdf(int k, double x) const {
        check_axis(k);
        if (k == 1)
            return dist_->marginal_cdf_rotated(1, std::min(x, delta_)) / mass_;
        return dist_->marginal_cdf_rotated(k, x);
    }

    // Quantile of the k-th feasible-step frame coordinate:
    // F^{-1}_{1,delta}(u) = F_1^{-1}(u F_1(delta)) for the first axis.
    double quantile(int k, double u) const {
        check_axis(k);
        if (k == 1)
            return dist_->marginal_quantile_rotated(1, u * mass_);
        return dist_->marginal_quantile_rotated(k, u);
    }

private:
    void check_axis(int k) const {
        if (k < 1 || k > dist_->dimension())
            throw std::invalid_argument("TruncatedMarginalSet: frame axis out of range");
    }

    std::shared_ptr<const StepDistribution> dist_;
    double delta_;
    double mass_;
};

inline TruncatedMarginalSet
build_truncated_marginals(std::shared_ptr<const StepDistribution> dist, double delta) {
    return TruncatedMarginalSet(std::move(dist), delta);
}

// Map a uniform vector u in (0,1)^n to a feasible step at distance delta.
inline Vec map_G(double delta, const Vec& u, const TruncatedMarginalSet& marginals,
                 const RotationFrame& frame) {
    const int n = frame.dimension();
    if (u.size() != n)
        throw std::invalid_argument("map_G: uniform vector dimension mismatch");
    if (std::abs(delta - marginals.delta()) > 1e-12)
        throw std::invalid_argument("map_G: marginal set was built for a different delta");
    Vec z(n);
    for (int k = 1; k <= n; ++k)
        z[k - 1] = marginals.quantile(k, std::clamp(u[k - 1], 1e-12, 1.0 - 1e-12));
    return frame.from_frame(z);
}

// Map lambda uniform vectors to feasible steps and keep the image with the
// largest first coordinate: the selected step, built from uniforms alone.
inline Vec map_G_star(double delta, const std::vector<Vec>& uniforms,
                      const TruncatedMarginalSet& marginals, const RotationFrame& frame) {
    if (uniforms.empty())
        throw std::invalid_argument("map_G_star: need at least one uniform vector");
    Vec best;
    double best_val = -std::numeric_limits<double>::infinity();
    for (const Vec& u : uniforms) {
        Vec x = map_G(delta, u, marginals, frame);
        if (x[0] > best_val) {
            best_val = x[0];
            best = std::move(x);
        }
    }
    return best;
}

} // namespace lces
