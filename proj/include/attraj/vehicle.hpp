#pragma once

#include <Eigen/Core>
#include <cmath>

#include "attraj/errors.hpp"
#include "attraj/euler.hpp"

namespace attraj {

using Vec = Eigen::VectorXd;

struct VehicleParams {
    double a = 0.0;      // thrust acceleration, m/s^2
    double b = 0.0;      // torque-to-inertia ratio, 1/s^2
    double m = 1.0;      // mass, kg
    double S = 0.0;      // reference area, m^2
    double Cx0 = 0.0;    // axial force coefficient at alpha = 0
    double Cxa = 0.0;    // axial force slope, 1/rad
    double Cz0 = 0.0;    // normal force coefficient at alpha = 0
    double Cza = 0.0;    // normal force slope, 1/rad
    double n_max = 0.0;  // load factor bound, g units
    double q_max = 0.0;  // dynamic pressure bound, Pa
};

struct EnvironmentParams {
    Vec3 g_vec0 = Vec3::Zero();  // constant gravity vector, m/s^2
    double R_E = 6378137.0;      // Earth radius, m
    double h_s = 7143.0;         // density scale height, m
    double rho0 = 1.225;         // sea-level density, kg/m^3
    double g_std = 9.80665;      // load-factor normalization, m/s^2
};

// State component indices for the 8-dim attitude-trajectory model.
namespace ps {
enum : int { VX = 0, VY, VZ, TH, PS, PH, WX, WY, NX };
}
// 11-dim model with position.
namespace pa {
enum : int { RX = 0, RY, RZ, VX, VY, VZ, TH, PS, PH, WX, WY, NX };
}

/// Right-hand sides of the 8-dim dynamics. Throws SingularityBand inside
/// the |cos(psi)| smoothing band; extremal fields switch to the smoothed
/// equations there instead.
inline void dynamics_ps(const Vec& x, double u1, double u2, const VehicleParams& prm,
                        const Vec3& g, Vec& dx) {
    const double th = x[ps::TH], psi = x[ps::PS], ph = x[ps::PH];
    const double wx = x[ps::WX], wy = x[ps::WY];
    const double cps = std::cos(psi), sps = std::sin(psi);
    if (std::abs(cps) < kEpsSing)
        throw SingularityBand("dynamics_ps: |cos(psi)| below the smoothing band");
    const double cth = std::cos(th), sth = std::sin(th);
    const double cph = std::cos(ph), sph = std::sin(ph);
    const double wsc = wx * sph + wy * cph;

    dx.resize(ps::NX);
    dx[ps::VX] = prm.a * sth * cps + g[0];
    dx[ps::VY] = -prm.a * sps + g[1];
    dx[ps::VZ] = prm.a * cth * cps + g[2];
    dx[ps::TH] = wsc / cps;
    dx[ps::PS] = wx * cph - wy * sph;
    dx[ps::PH] = wsc * sps / cps;
    dx[ps::WX] = -prm.b * u2;
    dx[ps::WY] = prm.b * u1;
}

/// Costate right-hand sides of the 8-dim model (-dH/dx); the velocity
/// costates are constant. The control enters H only through terms that do
/// not depend on x, so u does not appear here.
inline void adjoint_ps(const Vec& x, const Vec& p, double /*u1*/, double /*u2*/,
                       const VehicleParams& prm, const Vec3& /*g*/, Vec& dp) {
    const double th = x[ps::TH], psi = x[ps::PS], ph = x[ps::PH];
    const double wx = x[ps::WX], wy = x[ps::WY];
    const double cps = std::cos(psi), sps = std::sin(psi);
    if (std::abs(cps) < kEpsSing)
        throw SingularityBand("adjoint_ps: |cos(psi)| below the smoothing band");
    const double cth = std::cos(th), sth = std::sin(th);
    const double cph = std::cos(ph), sph = std::sin(ph);
    const double wsc = wx * sph + wy * cph;   // omega_x sin(phi) + omega_y cos(phi)
    const double wcc = wx * cph - wy * sph;   // omega_x cos(phi) - omega_y sin(phi)
    const double tps = sps / cps;
    const double a = prm.a;
    const double pvx = p[ps::VX], pvy = p[ps::VY], pvz = p[ps::VZ];
    const double pth = p[ps::TH], pps = p[ps::PS], pph = p[ps::PH];

    dp.resize(ps::NX);
    dp[ps::VX] = 0.0;
    dp[ps::VY] = 0.0;
    dp[ps::VZ] = 0.0;
    dp[ps::TH] = -a * cps * (pvx * cth - pvz * sth);
    dp[ps::PS] = a * sps * sth * pvx + a * cps * pvy + a * cth * sps * pvz -
                 sps * wsc / (cps * cps) * pth - wsc / (cps * cps) * pph;
    dp[ps::PH] = -wcc / cps * pth + wsc * pps - tps * wcc * pph;
    dp[ps::WX] = -sph / cps * pth - cph * pps - tps * sph * pph;
    dp[ps::WY] = -cph / cps * pth + sph * pps - tps * cph * pph;
}

/// Smoothed state and costate rates used inside |cos(psi)| < kEpsSing.
/// Velocity rows keep their exact form (the thrust direction is regular
/// there); the attitude block follows the limit equations.
inline void euler_smoothed(const Vec& x, const Vec& p, double u1, double u2,
                           const VehicleParams& prm, const Vec3& g, Vec& dx, Vec& dp) {
    const double th = x[ps::TH], psi = x[ps::PS], ph = x[ps::PH];
    const double wx = x[ps::WX], wy = x[ps::WY];
    const double cps = std::cos(psi), sps = std::sin(psi);
    const double cth = std::cos(th), sth = std::sin(th);
    const double cph = std::cos(ph), sph = std::sin(ph);
    const double a = prm.a;

    dx.resize(ps::NX);
    dx[ps::VX] = a * sth * cps + g[0];
    dx[ps::VY] = -a * sps + g[1];
    dx[ps::VZ] = a * cth * cps + g[2];
    dx[ps::TH] = 0.0;
    dx[ps::PS] = wx * cph - wy * sph;
    dx[ps::PH] = 0.0;
    dx[ps::WX] = -prm.b * u2;
    dx[ps::WY] = prm.b * u1;

    dp.resize(ps::NX);
    dp[ps::VX] = 0.0;
    dp[ps::VY] = 0.0;
    dp[ps::VZ] = 0.0;
    dp[ps::TH] = 0.0;
    dp[ps::PS] = a * sth * p[ps::VX] + a * cth * p[ps::VZ];
    dp[ps::PH] = 0.0;
    dp[ps::WX] = -p[ps::PS] * cph;
    dp[ps::WY] = p[ps::PS] * sph;
}

}  // namespace attraj
