#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "lces/specfun.hpp"

// Problem geometry: maximize f(x) = [x]_1 subject to the linear constraint
// g(x) = cos(theta) [x]_1 + sin(theta) [x]_2 <= 0, with theta the angle
// between the constraint normal and the objective gradient.

namespace lces {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double objective(const Vec& x) {
    if (x.size() < 1)
        throw std::invalid_argument("objective: empty vector");
    return x[0];
}

inline double constraint(const Vec& x, double theta) {
    if (x.size() < 2)
        throw std::invalid_argument("constraint: need dimension >= 2");
    return std::cos(theta) * x[0] + std::sin(theta) * x[1];
}

inline double constraint(double x1, double x2, double theta) {
    return std::cos(theta) * x1 + std::sin(theta) * x2;
}

// Orthonormal frame adapted to the constraint: first axis is the constraint
// normal (cos t, sin t, 0, ...), second its in-plane perpendicular
// (-sin t, cos t, 0, ...), remaining axes are untouched coordinate axes.
class RotationFrame {
public:
    RotationFrame(int n, double theta) : n_(n), theta_(theta), q_(Mat::Identity(n, n)) {
        if (n < 2)
            throw std::invalid_argument("RotationFrame: dimension must be >= 2");
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        q_(0, 0) = c;
        q_(1, 0) = s;
        q_(0, 1) = -s;
        q_(1, 1) = c;
    }

    int dimension() const { return n_; }
    double theta() const { return theta_; }
    const Mat& matrix() const { return q_; }

    // Coordinates of x in the frame: z = Q^T x; z_1 = g(x).
    Vec to_frame(const Vec& x) const { return q_.transpose() * x; }
    // Back to ambient coordinates: x = Q z.
    Vec from_frame(const Vec& z) const { return q_ * z; }

    // First ambient coordinate of Q z, i.e. the objective value of the
    // mapped point: cos(theta) z_1 - sin(theta) z_2.
    double objective_of_frame(double z1, double z2) const {
        return std::cos(theta_) * z1 - std::sin(theta_) * z2;
    }

private:
    int n_;
    double theta_;
    Mat q_;
};

struct Problem {
    int n;
    int lambda;
    double theta;
    double sigma;

    Problem(int n_, int lambda_, double theta_, double sigma_)
        : n(n_), lambda(lambda_), theta(theta_), sigma(sigma_) {
        if (n < 2)
            throw std::invalid_argument("Problem: dimension n must be >= 2");
        if (lambda < 2)
            throw std::invalid_argument("Problem: offspring count lambda must be >= 2");
        if (!(theta > 0.0 && theta < 0.5 * specfun::kPi))
            throw std::invalid_argument("Problem: theta must lie strictly in (0, pi/2)");
        if (!(sigma > 0.0))
            throw std::invalid_argument("Problem: step size sigma must be positive");
    }

    double objective(const Vec& x) const {
        if (x.size() != n)
            throw std::invalid_argument("Problem::objective: dimension mismatch");
        return x[0];
    }

    double constraint(const Vec& x) const {
        if (x.size() != n)
            throw std::invalid_argument("Problem::constraint: dimension mismatch");
        return lces::constraint(x, theta);
    }

    double constraint(double x1, double x2) const { return lces::constraint(x1, x2, theta); }

    RotationFrame frame() const { return RotationFrame(n, theta); }

    // Normalized distance to the constraint boundary, delta = -g(X)/sigma.
    double normalized_distance(const Vec& x) const { return -constraint(x) / sigma; }
};

} // namespace lces
