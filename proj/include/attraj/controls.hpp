#pragma once

#include <Eigen/Core>
#include <cmath>

#include "attraj/errors.hpp"
#include "attraj/pa_model.hpp"
#include "attraj/vehicle.hpp"

namespace attraj {

using Vec2 = Eigen::Vector2d;

inline double sat(double lo, double v, double hi) { return std::min(hi, std::max(lo, v)); }

/// Energy-regularized control on the unit square (p0 = -1):
/// u1 = sat(-1, -b p_wy / (2 K p0), 1), u2 = sat(-1, b p_wx / (2 K p0), 1).
inline Vec2 control_pr(const Vec2& p_omega, double K, double b) {
    constexpr double p0 = -1.0;
    return {sat(-1.0, -b * p_omega[1] / (2.0 * K * p0), 1.0),
            sat(-1.0, b * p_omega[0] / (2.0 * K * p0), 1.0)};
}

/// lambda3-blended control on the unit square; reduces to control_pr at
/// lambda3 = 0 and to the minimum-time direction h/|h| at lambda3 = 1.
/// The denominator 2K(1-lambda3) + lambda3 |h| is bounded below by
/// 2K(1-lambda3), which keeps the law Lipschitz for lambda3 < 1 (no
/// switching accumulation); it vanishes only in the chattering-singular
/// configuration lambda3 = 1, p_omega = 0.
inline Vec2 control_lambda3(const Vec2& p_omega, double K, double b, double lambda3) {
    constexpr double p0 = -1.0;
    const double pnorm = p_omega.norm();
    const double den = -2.0 * p0 * K * (1.0 - lambda3) + b * lambda3 * pnorm;
    if (!(den > 0.0))
        throw VanishingDenominator("control_lambda3: lambda3 = 1 with p_omega = 0");
    return {sat(-1.0, b * p_omega[1] / den, 1.0), sat(-1.0, -b * p_omega[0] / den, 1.0)};
}

/// Disk-constrained control of the penalized problem: u = h/(2K) while
/// |h| <= 2K, saturating to h/|h| outside.
inline Vec2 control_pa(const Vec2& h, double K) {
    const double hnorm = h.norm();
    if (hnorm <= 2.0 * K) {
        if (K <= 0.0) return Vec2::Zero();  // h = 0 with K = 0
        return h / (2.0 * K);
    }
    return h / hnorm;
}

/// H of the 8-dim problem with the lambda3 cost blend, p0 explicit.
inline double hamiltonian_ps(const Vec& x, const Vec& p, const Vec2& u, double p0,
                             const VehicleParams& prm, const Vec3& g, double K,
                             double lambda3 = 0.0) {
    Vec dx;
    dynamics_ps(x, u[0], u[1], prm, g, dx);
    return p.dot(dx) + p0 * (1.0 + K * (1.0 - lambda3) * u.squaredNorm());
}

/// H of the 11-dim problem with the lambda3 cost blend and the lambda5
/// penalty term.
inline double hamiltonian_pa(const Vec& x, const Vec& p, const Vec2& u, double p0,
                             const VehicleParams& prm, const EnvironmentParams& env,
                             double K, double lambda3, double lambda4, double lambda5,
                             double Kp, const Vec3& r0) {
    Vec dx;
    dynamics_pa(x, u[0], u[1], prm, env, lambda4, r0, dx);
    const double rho = atmosphere_rho(x.segment<3>(pa::RX), lambda4, env, r0);
    const AeroForces af =
        aero_forces(x.segment<3>(pa::VX), x[pa::TH], x[pa::PS], prm, rho, env.g_std);
    const double P = penalty(af.nbar, af.qbar, prm);
    return p.dot(dx) +
           p0 * (1.0 + K * (1.0 - lambda3) * u.squaredNorm() + lambda5 * Kp * P);
}

}  // namespace attraj
