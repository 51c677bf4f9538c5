#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lces/distribution.hpp"
#include "lces/problem.hpp"
#include "lces/quadrature.hpp"
#include "lces/rng.hpp"

// Core of the (1,lambda) evolution strategy with resampling: feasible-step
// sampling, best-objective selection, one-iteration transition, and the
// exact densities of the feasible and selected steps at a given normalized
// distance delta = -g(X)/sigma.

namespace lces {

inline constexpr std::uint64_t kResampleCap = 1'000'000;

struct ResampleCapError : std::runtime_error {
    explicit ResampleCapError(std::uint64_t attempts_)
        : std::runtime_error("feasible-step resampling exceeded " +
                             std::to_string(attempts_) + " attempts"),
          attempts(attempts_) {}
    std::uint64_t attempts;
};

struct ESState {
    Vec parent;
    double delta = 0.0;
    long iteration = 0;
    std::uint64_t resample_count = 0;
};

inline ESState make_initial_state(const Problem& problem, const Vec& x0) {
    if (x0.size() != problem.n)
        throw std::invalid_argument("make_initial_state: dimension mismatch");
    const double delta = problem.normalized_distance(x0);
    if (delta < 0.0)
        throw std::invalid_argument("make_initial_state: x0 must be feasible (g(x0) <= 0)");
    return ESState{x0, delta, 0, 0};
}

struct FeasibleDraw {
    Vec step;
    double g_value = 0.0;
    std::uint64_t rejections = 0;
};

// Draw the raw step until g(step) <= delta, counting rejections; aborts with
// ResampleCapError after kResampleCap attempts (the feasible region always
// has positive mass for delta >= 0, so the cap only fires on misuse or on
// astronomically small acceptance probability).
inline FeasibleDraw sample_feasible_step(const StepDistribution& dist, double delta,
                                         RngStream& rng) {
    const double theta = dist.theta();
    std::uint64_t attempts = 0;
    while (attempts < kResampleCap) {
        Vec m = dist.sample(rng);
        ++attempts;
        const double g = constraint(m[0], m[1], theta);
        if (g <= delta)
            return FeasibleDraw{std::move(m), g, attempts - 1};
    }
    throw ResampleCapError(attempts);
}

struct SelectedStep {
    Vec step;
    double g_value = 0.0;
    int winner_index = 0; // index into the children array
    std::uint64_t rejections = 0;
};

// Pick the child with the largest first coordinate; ties resolved by the
// lowest index (ties have probability zero under a density anyway).
inline int select_index(const std::vector<Vec>& children) {
    if (children.empty())
        throw std::invalid_argument("select_index: no children");
    int best = 0;
    for (int i = 1; i < static_cast<int>(children.size()); ++i)
        if (children[i][0] > children[best][0])
            best = i;
    return best;
}

inline SelectedStep select_step(std::vector<FeasibleDraw> children) {
    if (children.empty())
        throw std::invalid_argument("select_step: no children");
    int best = 0;
    std::uint64_t rejections = 0;
    for (int i = 0; i < static_cast<int>(children.size()); ++i) {
        rejections += children[i].rejections;
        if (children[i].step[0] > children[best].step[0])
            best = i;
    }
    return SelectedStep{std::move(children[best].step), children[best].g_value, best,
                        rejections};
}

// Normalized-distance update: delta_{t+1} = delta_t - g(M*). Exact in
// floating point whenever g(M*) <= delta_t, hence the chain never leaves
// [0, infinity).
inline double delta_update(double delta, double g_selected) { return delta - g_selected; }

// One generation: sample lambda feasible children, select, move the parent.
inline std::pair<ESState, SelectedStep> es_iterate(const ESState& state,
                                                   const Problem& problem,
                                                   const StepDistribution& dist,
                                                   RngStream& rng) {
    if (dist.dimension() != problem.n)
        throw std::invalid_argument("es_iterate: distribution dimension mismatch");
    if (std::abs(dist.theta() - problem.theta) > 1e-12)
        throw std::invalid_argument("es_iterate: distribution frame angle differs from problem");
    std::vector<FeasibleDraw> children;
    children.reserve(problem.lambda);
    for (int i = 0; i < problem.lambda; ++i)
        children.push_back(sample_feasible_step(dist, state.delta, rng));
    SelectedStep chosen = select_step(std::move(children));
    ESState next;
    next.parent = state.parent + problem.sigma * chosen.step;
    next.delta = delta_update(state.delta, chosen.g_value);
    next.iteration = state.iteration + 1;
    next.resample_count = state.resample_count + chosen.rejections;
    return {std::move(next), std::move(chosen)};
}

enum class MassMethod { automatic, marginal, quadrature };

// F(L_delta) = P(g(M) <= delta): the CDF of the first frame coordinate, or
// an independent 2-D quadrature of the front density for cross-checking.
inline double mass_of_feasible_set(const StepDistribution& dist, double delta,
                                   MassMethod method = MassMethod::automatic) {
    if (method == MassMethod::quadrature) {
        const double lo1 = dist.marginal_quantile_rotated(1, 1e-11);
        const double lo2 = dist.marginal_quantile_rotated(2, 1e-11);
        const double hi2 = dist.marginal_quantile_rotated(2, 1.0 - 1e-11);
        if (delta <= lo1)
            return dist.marginal_cdf_rotated(1, delta);
        return quad::integrate_2d(
            [&](double z1, double z2) { return dist.front_density(z1, z2); }, lo1, delta,
            lo2, hi2, {1e-10, 1e-10, 5000});
    }
    return dist.marginal_cdf_rotated(1, delta);
}

// P([M]_1 < v and g(M) <= delta): the joint mass of the selection half-plane
// and the feasible set. Iterated adaptive quadrature of the front density,
// with the inner integral in closed form through the conditional survival:
//   integral over z1 <= delta of f_1(z1) P(Z2 > (cos t z1 - v)/sin t | Z1=z1).
inline double mass_of_truncated_halfplane(const StepDistribution& dist, double delta,
                                          double v, double abs_tol = 1e-8) {
    const double theta = dist.theta();
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    double lo = dist.marginal_quantile_rotated(1, 1e-11);
    if (delta <= lo) {
        const double width = dist.marginal_quantile_rotated(1, 1.0 - 1e-11) - lo;
        lo = delta - width;
    }
    const double hi = std::min(delta, dist.marginal_quantile_rotated(1, 1.0 - 1e-11));
    if (hi <= lo)
        return 0.0;
    return quad::integrate(
        [&](double z1) {
            const double z2_low = (cos_t * z1 - v) / sin_t;
            return dist.marginal_pdf_rotated(1, z1) *
                   dist.front_conditional_survival(z1, z2_low);
        },
        lo, hi, {abs_tol, 1e-12, 5000});
}

// Density of the feasible step: the raw density restricted to {g <= delta}
// and renormalized by F(L_delta).
inline double feasible_step_density(const StepDistribution& dist, double delta,
                                    const Vec& x) {
    if (constraint(x[0], x[1], dist.theta()) > delta)
        return 0.0;
    return dist.density(x) / mass_of_feasible_set(dist, delta);
}

// Density of the selected step among lambda feasible children:
//   lambda h(x) 1{g(x) <= delta} P([M]_1 < x_1, g <= delta)^{lambda-1}
//     / F(L_delta)^lambda.
inline double selected_step_density(const StepDistribution& dist, const Problem& problem,
                                    double delta, const Vec& x) {
    if (dist.dimension() != problem.n)
        throw std::invalid_argument("selected_step_density: dimension mismatch");
    if (std::abs(dist.theta() - problem.theta) > 1e-12)
        throw std::invalid_argument("selected_step_density: frame angle differs from problem");
    if (constraint(x[0], x[1], dist.theta()) > delta)
        return 0.0;
    const int lambda = problem.lambda;
    const double mass = mass_of_feasible_set(dist, delta);
    const double below = mass_of_truncated_halfplane(dist, delta, x[0]);
    return lambda * dist.density(x) *
           std::pow(std::clamp(below / mass, 0.0, 1.0), lambda - 1) / mass;
}

} // namespace lces
