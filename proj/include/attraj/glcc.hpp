#pragma once

#include <Eigen/Core>
#include <cmath>

#include "attraj/errors.hpp"
#include "attraj/vehicle.hpp"

namespace attraj {

/// Generalized Legendre-Clebsch margin along a singular arc:
/// a + g_x sin(theta) cos(psi) - g_y sin(psi) + g_z cos(theta) cos(psi).
inline double glcc_margin(double theta, double psi, const Vec3& g, double a) {
    if (std::abs(std::cos(psi)) < kEpsSing)
        throw SingularityBand("glcc_margin: |cos(psi)| below the smoothing band");
    return a + g[0] * std::sin(theta) * std::cos(psi) - g[1] * std::sin(psi) +
           g[2] * std::cos(theta) * std::cos(psi);
}

/// Point of the singular surface: omega = 0, all attitude costates zero,
/// and the velocity costates pinned by the surface equations. Velocity
/// components are free on the surface and are passed through.
struct ExtremalPointPs {
    Vec x;  // 8-dim state
    Vec p;  // 8-dim costate
};

inline ExtremalPointPs singular_surface_point(double theta, double psi, double phi,
                                              const Vec3& g, double a, double p0,
                                              const Vec3& v = Vec3::Zero()) {
    const double cps = std::cos(psi);
    if (std::abs(cps) < kEpsSing)
        throw SingularityBand("singular_surface_point: |cos(psi)| below the band");
    const double denom = glcc_margin(theta, psi, g, a);
    ExtremalPointPs pt;
    pt.x = Vec::Zero(ps::NX);
    pt.x.segment<3>(ps::VX) = v;
    pt.x[ps::TH] = theta;
    pt.x[ps::PS] = psi;
    pt.x[ps::PH] = phi;

    pt.p = Vec::Zero(ps::NX);
    const double pvz = -p0 * std::cos(theta) * cps / denom;
    pt.p[ps::VZ] = pvz;
    pt.p[ps::VX] = std::tan(theta) * pvz;
    pt.p[ps::VY] = -std::tan(psi) / std::cos(theta) * pvz;
    return pt;
}

/// Residuals of all defining equations of the singular surface at a
/// state/costate pair (used to check that embedded order-zero solutions
/// lie on the surface).
inline Vec singular_surface_residuals(const Vec& x, const Vec& p, const Vec3& g, double a,
                                      double p0) {
    const double th = x[ps::TH], psi = x[ps::PS];
    const double denom = glcc_margin(th, psi, g, a);
    Vec r(10);
    r[0] = x[ps::WX];
    r[1] = x[ps::WY];
    r[2] = p[ps::TH];
    r[3] = p[ps::PS];
    r[4] = p[ps::PH];
    r[5] = p[ps::WX];
    r[6] = p[ps::WY];
    r[7] = p[ps::VX] - std::tan(th) * p[ps::VZ];
    r[8] = p[ps::VZ] - (-p0 * std::cos(th) * std::cos(psi) / denom);
    r[9] = p[ps::VY] - (-std::tan(psi) / std::cos(th) * p[ps::VZ]);
    return r;
}

}  // namespace attraj
