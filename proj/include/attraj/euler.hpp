#pragma once

#include <Eigen/Core>
#include <cmath>

namespace attraj {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Half-width of the |cos(psi)| band inside which the smoothed attitude
/// equations replace the exact ones.
inline constexpr double kEpsSing = 1e-6;

/// Body longitudinal axis for pitch theta and yaw psi.
inline Vec3 body_axis(double theta, double psi) {
    return {std::sin(theta) * std::cos(psi), -std::sin(psi),
            std::cos(theta) * std::cos(psi)};
}

inline Vec3 body_axis_dtheta(double theta, double psi) {
    return {std::cos(theta) * std::cos(psi), 0.0, -std::sin(theta) * std::cos(psi)};
}

inline Vec3 body_axis_dpsi(double theta, double psi) {
    return {-std::sin(theta) * std::sin(psi), -std::cos(psi),
            -std::cos(theta) * std::sin(psi)};
}

inline Mat3 rot_x(double a) {
    Mat3 m;
    m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return m;
}
inline Mat3 rot_y(double a) {
    Mat3 m;
    m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return m;
}
inline Mat3 rot_z(double a) {
    Mat3 m;
    m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return m;
}

/// Body-to-inertial attitude matrix for the y-x-z Euler sequence
/// (theta about y, psi about x, phi about the body z). The third column
/// is body_axis(theta, psi); the attitude kinematics of the flight model
/// follow from this sequence with zero roll rate.
inline Mat3 dcm_from_euler(double theta, double psi, double phi) {
    return rot_y(theta) * rot_x(psi) * rot_z(phi);
}

struct EulerAngles {
    double theta, psi, phi;
};

/// Inverse of dcm_from_euler; psi is returned in [-pi/2, pi/2].
inline EulerAngles euler_from_dcm(const Mat3& C) {
    EulerAngles e;
    double s = -C(1, 2);
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    e.psi = std::asin(s);
    e.theta = std::atan2(C(0, 2), C(2, 2));
    e.phi = std::atan2(C(1, 0), C(1, 1));
    return e;
}

inline double wrap_pi(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0) a += 2.0 * M_PI;
    return a - M_PI;
}

}  // namespace attraj
