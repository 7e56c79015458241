#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <vector>

#include "attraj/errors.hpp"
#include "attraj/newton.hpp"

namespace attraj {

struct ContinuationOptions {
    double dlambda_init = 0.1;
    double dlambda_min = 1e-4;
    double dlambda_max = 0.5;
    double growth = 2.0;   // step factor after a successful solve
    double shrink = 0.5;   // step factor after a failed solve
    int max_solves = 200;  // budget of corrector solves per stage
};

enum class ContinuationOutcome { completed, stalled };

struct ContinuationStep {
    double lambda;
    Vec unknowns;
    double residual_norm;
    int newton_iters;
};

struct ContinuationTrace {
    std::vector<ContinuationStep> steps;  // strictly increasing in lambda
    ContinuationOutcome outcome = ContinuationOutcome::stalled;
    int solves = 0;  // corrector solves spent (failures included)

    bool completed() const { return outcome == ContinuationOutcome::completed; }
    double last_lambda() const { return steps.empty() ? 0.0 : steps.back().lambda; }
    const Vec& last_unknowns() const { return steps.back().unknowns; }
};

namespace detail {

inline double clamp_target(double lambda, double dl) {
    double lt = lambda + dl;
    if (lt > 1.0 || 1.0 - lt < 1e-13) lt = 1.0;
    return lt;
}

}  // namespace detail

/// Discrete continuation: solve G(Z,lambda)=0 on a lambda grid adapted on
/// the fly. The step doubles after a success and halves after a failure;
/// the run stalls when the step falls below dlambda_min or the solve
/// budget is exhausted. Z0 must solve lambda=0 (refined by one corrector
/// solve; a failure there raises BadSeed).
///
/// `SolveAt` is callable as (const Vec& Z_guess, double lambda) -> NewtonReport.
template <class SolveAt>
ContinuationTrace discrete_continuation(SolveAt&& solve_at, const Vec& Z0,
                                        const ContinuationOptions& opt = {}) {
    ContinuationTrace trace;

    NewtonReport seed = solve_at(Z0, 0.0);
    if (!seed.converged)
        throw BadSeed("Z0 does not solve lambda=0 (failure: " +
                      std::string(to_string(seed.failure)) + ")");
    trace.steps.push_back({0.0, seed.root, seed.final_residual_norm, seed.iterations});

    double lambda = 0.0;
    double dl = opt.dlambda_init;
    Vec Z = seed.root;
    while (lambda < 1.0) {
        if (trace.solves >= opt.max_solves) return trace;
        dl = std::min(dl, 1.0 - lambda);
        double lt = detail::clamp_target(lambda, dl);
        NewtonReport rep = solve_at(Z, lt);
        ++trace.solves;
        if (rep.converged) {
            lambda = lt;
            Z = rep.root;
            trace.steps.push_back({lambda, Z, rep.final_residual_norm, rep.iterations});
            dl = std::min(dl * opt.growth, opt.dlambda_max);
        } else {
            dl *= opt.shrink;
            if (dl < opt.dlambda_min) return trace;
        }
    }
    trace.outcome = ContinuationOutcome::completed;
    return trace;
}

/// Secant approximation of the zero-path tangent from three consecutive
/// zeros (Z_{i-2},l_{i-2}), (Z_{i-1},l_{i-1}), (Z_i,l_i), each packed as
/// [Z; lambda]. With s1 = |c_{i-1}-c_{i-2}|, s2 = |c_i-c_{i-2}|,
/// s3 = |c_i-c_{i-1}| the tangent is (c_i-c_{i-1})/(s2-s1) * |s2-s1|/|s3|.
/// The formula is order-dependent: swapping the two oldest points changes
/// the result through the sign of s2-s1.
inline Vec secant_tangent(const Vec& c_im2, const Vec& c_im1, const Vec& c_i) {
    const double s1 = (c_im1 - c_im2).norm();
    const double s2 = (c_i - c_im2).norm();
    const double s3 = (c_i - c_im1).norm();
    if (s1 < 1e-300 || s3 < 1e-300 || std::abs(s2 - s1) < 1e-300)
        throw DegeneratePoints("secant_tangent: coincident zeros");
    return (c_i - c_im1) / (s2 - s1) * (std::abs(s2 - s1) / s3);
}

/// Predictor-corrector continuation. Until three zeros are known the
/// driver falls back to discrete stepping; afterwards it predicts along
/// the secant tangent with arc-length step h_s and corrects by a Newton
/// solve at the predicted lambda held fixed. h_s grows on success and
/// shrinks on failure; the run stalls when the lambda progress per
/// prediction falls below dlambda_min.
///
/// The tangent formula is evaluated in coordinates scaled by the deltas
/// of the two most recent steps: shooting unknowns mix units spanning
/// several orders of magnitude, and without this normalization the
/// lambda component of the raw tangent is meaningless.
template <class SolveAt>
ContinuationTrace pc_continuation(SolveAt&& solve_at, const Vec& Z0,
                                  const ContinuationOptions& opt = {}, double h_s = 1.0) {
    ContinuationTrace trace;

    NewtonReport seed = solve_at(Z0, 0.0);
    if (!seed.converged)
        throw BadSeed("Z0 does not solve lambda=0 (failure: " +
                      std::string(to_string(seed.failure)) + ")");
    trace.steps.push_back({0.0, seed.root, seed.final_residual_norm, seed.iterations});

    const Eigen::Index nz = Z0.size();
    auto pack_scaled = [nz](const ContinuationStep& s, const Vec& sZ, double sl) {
        Vec c(nz + 1);
        c << s.unknowns.cwiseQuotient(sZ), s.lambda / sl;
        return c;
    };

    double lambda = 0.0;
    double dl = opt.dlambda_init;
    Vec Z = seed.root;
    while (lambda < 1.0) {
        if (trace.solves >= opt.max_solves) return trace;

        Vec Zpred = Z;
        double lt;
        bool secant = trace.steps.size() >= 3;
        if (secant) {
            const auto& s = trace.steps;
            const auto& s0 = s[s.size() - 3];
            const auto& s1 = s[s.size() - 2];
            const auto& s2 = s[s.size() - 1];
            // per-coordinate scales from the trailing two deltas
            Vec sZ = (s2.unknowns - s1.unknowns)
                         .cwiseAbs()
                         .cwiseMax((s1.unknowns - s0.unknowns).cwiseAbs())
                         .cwiseMax(1e-12);
            double sl = std::max(s2.lambda - s1.lambda, s1.lambda - s0.lambda);
            Vec t = secant_tangent(pack_scaled(s0, sZ, sl), pack_scaled(s1, sZ, sl),
                                   pack_scaled(s2, sZ, sl));
            double tl = t[nz] * sl;  // lambda progress per unit h_s
            if (tl <= 0.0) {
                // monotone-lambda assumption violated by the prediction
                h_s *= opt.shrink;
                ++trace.solves;
                if (h_s < 1e-14) return trace;
                continue;
            }
            double step = h_s;
            if (step * tl > 1.0 - lambda) step = (1.0 - lambda) / tl;      // land on 1
            if (step * tl > opt.dlambda_max) step = opt.dlambda_max / tl;  // cap progress
            if (step * tl < opt.dlambda_min) return trace;                 // stalled
            Zpred = Z + step * t.head(nz).cwiseProduct(sZ);
            lt = detail::clamp_target(lambda, step * tl);
        } else {
            dl = std::min(dl, 1.0 - lambda);
            lt = detail::clamp_target(lambda, dl);
        }

        NewtonReport rep = solve_at(Zpred, lt);
        ++trace.solves;
        if (rep.converged) {
            lambda = lt;
            Z = rep.root;
            trace.steps.push_back({lambda, Z, rep.final_residual_norm, rep.iterations});
            if (secant)
                h_s = std::min(h_s * opt.growth, 16.0);
            else
                dl = std::min(dl * opt.growth, opt.dlambda_max);
        } else {
            if (secant) {
                h_s *= opt.shrink;
                if (h_s < 1e-14) return trace;
            } else {
                dl *= opt.shrink;
                if (dl < opt.dlambda_min) return trace;
            }
        }
    }
    trace.outcome = ContinuationOutcome::completed;
    return trace;
}

}  // namespace attraj
