#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <vector>

#include "attraj/errors.hpp"

namespace attraj {

using Vec = Eigen::VectorXd;

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-2;
    int max_steps = 200000;
};

struct TrajectorySample {
    double t;  // normalized time in [0,1]
    Vec y;
};

struct IntegrationResult {
    Vec final_state;
    std::vector<TrajectorySample> samples;
    int steps = 0;
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // 4th-order embedded weights
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                            e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) over the fixed normalized interval [0,1]
/// with the Dormand-Prince 5(4) embedded pair and a standard step
/// controller (safety 0.9, step ratio clamped to [0.2, 5]).
///
/// `Rhs` is callable as rhs(double t, const Vec& y, Vec& dydt).
/// If `record` is true every accepted step is stored in `samples`
/// (first sample at t=0, last at t=1).
template <class Rhs>
IntegrationResult integrate_adaptive(Rhs&& rhs, const Vec& y0, const IntegratorOptions& opt,
                                     bool record) {
    using D = detail::Dopri5;
    const Eigen::Index n = y0.size();
    if (!y0.allFinite()) throw NonFiniteRhs("initial state not finite");

    IntegrationResult out;
    Vec y = y0, ynew(n), yerr(n);
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), work(n);
    double t = 0.0;
    double h = std::min(opt.initial_step, 1.0);
    if (h <= 0) h = 1e-2;

    if (record) out.samples.push_back({0.0, y});

    auto eval = [&](double tt, const Vec& yy, Vec& dy) {
        rhs(tt, yy, dy);
        if (!dy.allFinite()) throw NonFiniteRhs("vector field returned NaN/Inf");
    };

    eval(t, y, k1);  // FSAL seed
    int steps = 0;
    while (t < 1.0) {
        if (++steps > opt.max_steps)
            throw MaxStepsExceeded("integration exceeded max_steps");
        if (h > 1.0 - t) h = 1.0 - t;
        if (h < std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw StepUnderflow("integration step underflow at t=" + std::to_string(t));

        work = y + h * (D::a21 * k1);
        eval(t + D::c2 * h, work, k2);
        work = y + h * (D::a31 * k1 + D::a32 * k2);
        eval(t + D::c3 * h, work, k3);
        work = y + h * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3);
        eval(t + D::c4 * h, work, k4);
        work = y + h * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4);
        eval(t + D::c5 * h, work, k5);
        work = y + h * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 + D::a64 * k4 + D::a65 * k5);
        eval(t + h, work, k6);
        ynew = y + h * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
        eval(t + h, ynew, k7);
        yerr = ynew - (y + h * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 +
                                D::e6 * k6 + D::e7 * k7));

        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double e = yerr[i] / sc;
            err += e * e;
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            if (record) out.samples.push_back({t, y});
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
    }
    out.final_state = y;
    out.steps = steps;
    return out;
}

template <class Rhs>
IntegrationResult integrate(Rhs&& rhs, const Vec& y0, const IntegratorOptions& opt = {}) {
    return integrate_adaptive(std::forward<Rhs>(rhs), y0, opt, true);
}

/// Final state only; skips sample storage (hot path for shooting residuals).
template <class Rhs>
Vec integrate_final(Rhs&& rhs, const Vec& y0, const IntegratorOptions& opt = {}) {
    return integrate_adaptive(std::forward<Rhs>(rhs), y0, opt, false).final_state;
}

}  // namespace attraj
