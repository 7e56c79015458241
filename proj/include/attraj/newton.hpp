#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "attraj/errors.hpp"
#include "attraj/numdiff.hpp"

namespace attraj {

struct NewtonOptions {
    double residual_tol = 1e-8;
    int max_iters = 50;
    int max_halvings = 30;
    // relative FD step of the iteration Jacobian; 0 keeps the sqrt(eps)
    // default, residuals built on ODE propagation want ~1e-5
    double fd_step = 0.0;
    // central differences double the Jacobian cost but survive stiffer
    // stages of a continuation
    bool central_fd = false;
};

enum class NewtonFailure {
    none,
    singular_jacobian,
    no_descent,
    max_iters,
    non_finite,
};

struct NewtonReport {
    Vec root;
    int iterations = 0;
    double final_residual_norm = 0.0;
    bool converged = false;
    NewtonFailure failure = NewtonFailure::none;
};

inline const char* to_string(NewtonFailure f) {
    switch (f) {
        case NewtonFailure::none: return "none";
        case NewtonFailure::singular_jacobian: return "singular_jacobian";
        case NewtonFailure::no_descent: return "no_descent";
        case NewtonFailure::max_iters: return "max_iters";
        case NewtonFailure::non_finite: return "non_finite";
    }
    return "?";
}

/// Damped Newton on a square system F(x) = 0. Jacobian by forward finite
/// differences, refreshed every iteration; dense LU solve. The step is
/// halved until the residual norm decreases or max_halvings is reached.
/// Evaluation failures (attraj::Error) at trial points act as a rejected
/// step; at the base point they abort the solve.
template <class F>
NewtonReport newton_solve(F&& f, const Vec& x0, const NewtonOptions& opt = {}) {
    NewtonReport rep;
    rep.root = x0;

    Vec fx;
    try {
        fx = f(x0);
    } catch (const Error&) {
        rep.failure = NewtonFailure::non_finite;
        return rep;
    }
    if (!fx.allFinite()) {
        rep.failure = NewtonFailure::non_finite;
        return rep;
    }
    double nf = fx.lpNorm<Eigen::Infinity>();

    Vec x = x0;
    for (int it = 0; it < opt.max_iters; ++it) {
        if (nf < opt.residual_tol) {
            rep.root = x;
            rep.iterations = it;
            rep.final_residual_norm = nf;
            rep.converged = true;
            return rep;
        }

        Mat J;
        try {
            J = jacobian_fd(f, x,
                            opt.central_fd ? FdScheme::central : FdScheme::forward,
                            opt.fd_step);
        } catch (const Error&) {
            rep.root = x;
            rep.iterations = it;
            rep.final_residual_norm = nf;
            rep.failure = NewtonFailure::non_finite;
            return rep;
        }
        // row/column equilibration: shooting systems mix units spanning
        // several orders of magnitude, which otherwise wrecks the pivoting
        // and the rank test
        const Eigen::Index n = J.rows();
        Vec rs(n), cs(J.cols());
        for (Eigen::Index i = 0; i < n; ++i)
            rs[i] = 1.0 / std::max(J.row(i).template lpNorm<Eigen::Infinity>(), 1e-300);
        Mat Js = rs.asDiagonal() * J;
        for (Eigen::Index j = 0; j < J.cols(); ++j)
            cs[j] = 1.0 / std::max(Js.col(j).template lpNorm<Eigen::Infinity>(), 1e-300);
        Js = Js * cs.asDiagonal();
        Eigen::FullPivLU<Mat> lu(Js);
        if (!lu.isInvertible()) {
            rep.root = x;
            rep.iterations = it;
            rep.final_residual_norm = nf;
            rep.failure = NewtonFailure::singular_jacobian;
            return rep;
        }
        Vec d = cs.asDiagonal() * lu.solve(Vec(-(rs.asDiagonal() * fx)));

        // damping on the least-squares merit; convergence stays on the
        // max-norm
        double merit = fx.norm();
        double alpha = 1.0;
        bool accepted = false;
        Vec xn, fn;
        double nfn = 0.0;
        for (int k = 0; k <= opt.max_halvings; ++k) {
            xn = x + alpha * d;
            bool ok = true;
            try {
                fn = f(xn);
                if (!fn.allFinite()) ok = false;
            } catch (const Error&) {
                ok = false;
            }
            if (ok) {
                nfn = fn.lpNorm<Eigen::Infinity>();
                if (fn.norm() < merit) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            rep.root = x;
            rep.iterations = it;
            rep.final_residual_norm = nf;
            rep.failure = NewtonFailure::no_descent;
            return rep;
        }
        x = xn;
        fx = fn;
        nf = nfn;
    }

    rep.root = x;
    rep.iterations = opt.max_iters;
    rep.final_residual_norm = nf;
    if (nf < opt.residual_tol) {
        rep.converged = true;
    } else {
        rep.failure = NewtonFailure::max_iters;
    }
    return rep;
}

}  // namespace attraj
