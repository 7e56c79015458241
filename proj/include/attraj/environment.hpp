#pragma once

#include <Eigen/Core>
#include <cmath>

#include "attraj/errors.hpp"
#include "attraj/vehicle.hpp"

namespace attraj {

namespace detail {

inline double geo_radius(const Vec3& r, double R_E) {
    return std::sqrt((R_E + r[0]) * (R_E + r[0]) + r[1] * r[1] + r[2] * r[2]);
}

}  // namespace detail

/// lambda4-blend of the constant release gravity and the radial
/// inverse-law field anchored at the release radius. The central part is
///   -g0 * (R(0)/R) * (cos l2, sin l1 sin l2, cos l1 sin l2),
/// with tan l1 = r_y/r_x and tan l2 = sqrt(r_y^2+r_z^2)/(r_x+R_E).
inline Vec3 gravity(const Vec3& r, double lambda4, const EnvironmentParams& env,
                    const Vec3& r0) {
    if (lambda4 == 0.0) return env.g_vec0;
    const double R = detail::geo_radius(r, env.R_E);
    if (!(R - env.R_E > 0.0)) throw NonPositiveRadius("gravity: altitude not positive");
    const double R0 = detail::geo_radius(r0, env.R_E);
    const double g0 = env.g_vec0.norm();
    const double l1 = std::atan2(r[1], r[0]);
    const double l2 = std::atan2(std::hypot(r[1], r[2]), env.R_E + r[0]);
    Vec3 dir(std::cos(l2), std::sin(l1) * std::sin(l2), std::cos(l1) * std::sin(l2));
    Vec3 gc = -g0 * (R0 / R) * dir;
    return (1.0 - lambda4) * env.g_vec0 + lambda4 * gc;
}

/// d(gravity)/dr of the blended field (the constant part drops out).
/// On the r_y = r_z = 0 axis the printed angles are degenerate; the
/// symmetric central-field limit is used there.
inline Mat3 gravity_jacobian(const Vec3& r, double lambda4, const EnvironmentParams& env,
                             const Vec3& r0) {
    if (lambda4 == 0.0) return Mat3::Zero();
    const double R = detail::geo_radius(r, env.R_E);
    if (!(R - env.R_E > 0.0))
        throw NonPositiveRadius("gravity_jacobian: altitude not positive");
    const double R0 = detail::geo_radius(r0, env.R_E);
    const double g0 = env.g_vec0.norm();
    const double X = env.R_E + r[0];
    const double ryz = std::hypot(r[1], r[2]);
    const double rxy2 = r[0] * r[0] + r[1] * r[1];

    Mat3 Jc;
    if (ryz < 1e-9 * R || rxy2 < 1e-18 * R * R) {
        Vec3 w(X, r[1], r[2]);
        Jc = -g0 * R0 * (Mat3::Identity() / (R * R) - 2.0 * w * w.transpose() / std::pow(R, 4));
    } else {
        const double l1 = std::atan2(r[1], r[0]);
        const double l2 = std::atan2(ryz, X);
        const double c1 = std::cos(l1), s1 = std::sin(l1);
        const double c2 = std::cos(l2), s2 = std::sin(l2);
        Vec3 dir(c2, s1 * s2, c1 * s2);
        Vec3 d_dl1(0.0, c1 * s2, -s1 * s2);
        Vec3 d_dl2(-s2, s1 * c2, c1 * c2);
        Vec3 grad_l1(-r[1] / rxy2, r[0] / rxy2, 0.0);
        Vec3 grad_l2 = (X * Vec3(0.0, r[1] / ryz, r[2] / ryz) - ryz * Vec3(1.0, 0.0, 0.0)) /
                       (R * R);
        Vec3 grad_R(X / R, r[1] / R, r[2] / R);
        Mat3 Jdir = d_dl1 * grad_l1.transpose() + d_dl2 * grad_l2.transpose();
        Jc = -g0 * R0 * (Jdir / R - dir * grad_R.transpose() / (R * R));
    }
    return lambda4 * Jc;
}

/// lambda4-blend of the frozen-altitude and true-altitude exponential
/// densities.
inline double atmosphere_rho(const Vec3& r, double lambda4, const EnvironmentParams& env,
                             const Vec3& r0) {
    const double R0 = detail::geo_radius(r0, env.R_E);
    const double frozen = std::exp(-(R0 - env.R_E) / env.h_s);
    if (lambda4 == 0.0) return env.rho0 * frozen;
    const double R = detail::geo_radius(r, env.R_E);
    const double live = std::exp(-(R - env.R_E) / env.h_s);
    return env.rho0 * ((1.0 - lambda4) * frozen + lambda4 * live);
}

inline Vec3 atmosphere_rho_grad(const Vec3& r, double lambda4, const EnvironmentParams& env,
                                const Vec3& /*r0*/) {
    if (lambda4 == 0.0) return Vec3::Zero();
    const double R = detail::geo_radius(r, env.R_E);
    const double live = std::exp(-(R - env.R_E) / env.h_s);
    Vec3 grad_R((env.R_E + r[0]) / R, r[1] / R, r[2] / R);
    return env.rho0 * lambda4 * live * (-1.0 / env.h_s) * grad_R;
}

}  // namespace attraj
