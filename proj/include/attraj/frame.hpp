#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "attraj/euler.hpp"

namespace attraj {

/// Inertial frame change by two successive rotations about the local
/// vertical (x) axis: beta1 aligns the trajectory plane (initial
/// horizontal velocity heading to +z), beta2 balances the terminal yaw
/// values so that psi'_f = -psi'_0 with the common magnitude minimal
/// over the admissible rotations.
struct FrameChange {
    double beta1 = 0.0;
    double beta2 = 0.0;
    Mat3 Q = Mat3::Identity();  // passive rotation: new coords = Q * old
    bool fallback_identity = false;
    double psi0_new = 0.0, psif_new = 0.0;
};

namespace detail {

// passive rotation about x by beta
inline Mat3 frame_rot(double beta) {
    Mat3 Q;
    Q << 1, 0, 0, 0, std::cos(beta), std::sin(beta), 0, -std::sin(beta), std::cos(beta);
    return Q;
}

inline double yaw_of(const Mat3& Q, const Vec3& axis) {
    double ey = (Q * axis)[1];
    return std::asin(std::min(1.0, std::max(-1.0, -ey)));
}

}  // namespace detail

inline FrameChange select_frame(const Vec3& v0, double theta0, double psi0, double theta_f,
                                double psi_f) {
    FrameChange fc;
    const Vec3 e0 = body_axis(theta0, psi0);
    const Vec3 ef = body_axis(theta_f, psi_f);

    double hvel = std::hypot(v0[1], v0[2]);
    fc.beta1 = (hvel > 1e-12 * std::max(1.0, v0.norm())) ? std::atan2(-v0[1], v0[2]) : 0.0;

    auto mismatch = [&](double b2) {
        Mat3 Q = detail::frame_rot(fc.beta1 + b2);
        return detail::yaw_of(Q, e0) + detail::yaw_of(Q, ef);
    };

    // scan for roots of psi'_0 + psi'_f, polish by bisection, keep the one
    // with the smallest |psi'_0| + |psi'_f| and, among ties, smallest |beta2|
    const int grid = 1440;
    double best_b2 = 0.0, best_cost = std::numeric_limits<double>::infinity();
    bool found = false;
    double prev_b = -M_PI, prev_f = mismatch(prev_b);
    for (int i = 1; i <= grid; ++i) {
        double b = -M_PI + 2.0 * M_PI * i / grid;
        double f = mismatch(b);
        if (prev_f == 0.0 || prev_f * f < 0.0) {
            double lo = prev_b, hi = b;
            double flo = prev_f;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = mismatch(mid);
                if (flo * fm <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = fm;
                }
            }
            double root = 0.5 * (lo + hi);
            Mat3 Q = detail::frame_rot(fc.beta1 + root);
            double cost =
                std::abs(detail::yaw_of(Q, e0)) + std::abs(detail::yaw_of(Q, ef));
            if (cost < best_cost - 1e-14 ||
                (std::abs(cost - best_cost) <= 1e-14 && std::abs(root) < std::abs(best_b2))) {
                best_cost = cost;
                best_b2 = root;
                found = true;
            }
        }
        prev_b = b;
        prev_f = f;
    }

    if (!found) {
        fc.fallback_identity = true;
        fc.beta1 = 0.0;
        fc.beta2 = 0.0;
        fc.Q = Mat3::Identity();
        fc.psi0_new = psi0;
        fc.psif_new = psi_f;
        return fc;
    }
    fc.beta2 = best_b2;
    fc.Q = detail::frame_rot(fc.beta1 + fc.beta2);
    fc.psi0_new = detail::yaw_of(fc.Q, e0);
    fc.psif_new = detail::yaw_of(fc.Q, ef);
    return fc;
}

/// Euler angles of the rotated attitude: C' = Q * C(theta,psi,phi).
inline EulerAngles rotate_euler(const Mat3& Q, double theta, double psi, double phi) {
    return euler_from_dcm(Q * dcm_from_euler(theta, psi, phi));
}

}  // namespace attraj
