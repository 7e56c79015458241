#pragma once

#include <Eigen/Core>
#include <cmath>

#include "attraj/errors.hpp"
#include "attraj/euler.hpp"

namespace attraj {

/// Closed-form solution of the trajectory-only problem: steer
/// v' = a e + g with the unit thrust axis e as control until v(t_f) is
/// parallel to w, in minimum time.
struct OrderZeroSolution {
    Vec3 e_star = Vec3::Zero();  // optimal (constant) thrust axis, unit
    double t_f = 0.0;            // minimal transfer time, s
    Vec3 p_v = Vec3::Zero();     // velocity costate (p0 = -1)
    double theta_star = 0.0;     // rad
    double psi_star = 0.0;       // rad
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, k = 0.0;
};

inline OrderZeroSolution solve_p0(const Vec3& v0, const Vec3& w, const Vec3& g, double a) {
    constexpr double p0 = -1.0;
    OrderZeroSolution s;
    s.a1 = a * a - (g.dot(w) * w - g).squaredNorm();
    s.a2 = 2.0 * (v0.dot(w) * g.dot(w) - v0.dot(g));
    s.a3 = -(v0.dot(w) * w - v0).squaredNorm();
    if (s.a1 <= 0.0)
        throw WeakThrust("solve_p0: thrust does not dominate transverse gravity");
    const double disc = s.a2 * s.a2 - 4.0 * s.a1 * s.a3;
    if (disc < 0.0) throw NegativeDiscriminant("solve_p0: no real transfer time");
    s.t_f = (-s.a2 + std::sqrt(disc)) / (2.0 * s.a1);
    if (!(s.t_f > 1e-12 * std::max(1.0, v0.norm() / a)))
        throw DegenerateTransfer("solve_p0: v0 already parallel to w");
    s.k = v0.dot(w) + g.dot(w) * s.t_f;
    s.e_star = ((s.k * w - v0) / s.t_f - g) / a;
    s.p_v = -p0 * s.e_star / (a + s.e_star.dot(g));
    s.psi_star = std::asin(std::min(1.0, std::max(-1.0, -s.e_star[1])));
    s.theta_star = std::atan2(s.e_star[0], s.e_star[2]);
    return s;
}

}  // namespace attraj
