#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "attraj/errors.hpp"

namespace attraj {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class FdScheme { forward, central };

/// Finite-difference Jacobian of F: R^n -> R^m.
/// Step per coordinate: sqrt(eps)*max(1,|x_j|) forward,
/// eps^(1/3)*max(1,|x_j|) central. Scale-aware floor because state
/// components span several orders of magnitude.
/// `step_override` > 0 replaces the default relative step; shooting
/// residuals carry integrator noise far above machine epsilon, so their
/// Jacobians need a larger step than the sqrt(eps) default.
template <class F>
Mat jacobian_fd(F&& f, const Vec& x, FdScheme scheme = FdScheme::forward,
                double step_override = 0.0) {
    static const double eps = std::numeric_limits<double>::epsilon();
    const double h_fwd = step_override > 0.0 ? step_override : std::sqrt(eps);
    const double h_ctr = step_override > 0.0 ? step_override : std::cbrt(eps);

    Vec f0;
    if (scheme == FdScheme::forward) {
        f0 = f(x);
        if (!f0.allFinite()) throw NonFiniteEvaluation("jacobian_fd: F(x) not finite");
    }
    const Eigen::Index n = x.size();
    Mat J;
    Vec xp = x, xm = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        double scale = std::max(1.0, std::abs(x[j]));
        if (scheme == FdScheme::forward) {
            double h = h_fwd * scale;
            xp[j] = x[j] + h;
            Vec fp = f(xp);
            if (!fp.allFinite()) throw NonFiniteEvaluation("jacobian_fd: F not finite");
            if (J.size() == 0) J.resize(f0.size(), n);
            J.col(j) = (fp - f0) / h;
            xp[j] = x[j];
        } else {
            double h = h_ctr * scale;
            xp[j] = x[j] + h;
            xm[j] = x[j] - h;
            Vec fp = f(xp);
            Vec fm = f(xm);
            if (!fp.allFinite() || !fm.allFinite())
                throw NonFiniteEvaluation("jacobian_fd: F not finite");
            if (J.size() == 0) J.resize(fp.size(), n);
            J.col(j) = (fp - fm) / (2.0 * h);
            xp[j] = x[j];
            xm[j] = x[j];
        }
    }
    return J;
}

/// Lie derivative (X.c)(x) = grad(c)(x) . X(x), gradient by central
/// differences along coordinate axes.
template <class VField, class Scalar>
double lie_derivative(VField&& X, Scalar&& c, const Vec& x) {
    static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    Vec Xx = X(x);
    if (!Xx.allFinite()) throw NonFiniteEvaluation("lie_derivative: X(x) not finite");
    double acc = 0.0;
    Vec xp = x, xm = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        double h = h0 * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        double cp = c(xp), cm = c(xm);
        if (!std::isfinite(cp) || !std::isfinite(cm))
            throw NonFiniteEvaluation("lie_derivative: c not finite");
        acc += (cp - cm) / (2.0 * h) * Xx[j];
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return acc;
}

/// Numeric Lie bracket [X,Y](x) = DY(x) X(x) - DX(x) Y(x), Jacobians by
/// central differences (nested differentiation amplifies noise otherwise).
template <class VF1, class VF2>
Vec lie_bracket_num(VF1&& X, VF2&& Y, const Vec& x) {
    Mat DX = jacobian_fd(X, x, FdScheme::central);
    Mat DY = jacobian_fd(Y, x, FdScheme::central);
    return DY * X(x) - DX * Y(x);
}

}  // namespace attraj
