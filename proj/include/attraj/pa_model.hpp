#pragma once

#include <Eigen/Core>
#include <cmath>

#include "attraj/aero.hpp"
#include "attraj/environment.hpp"
#include "attraj/errors.hpp"
#include "attraj/euler.hpp"
#include "attraj/vehicle.hpp"

namespace attraj {

/// 11-dim dynamics with the lambda4 homotopy on gravity, atmosphere and
/// aerodynamic forces.
inline void dynamics_pa(const Vec& x, double u1, double u2, const VehicleParams& prm,
                        const EnvironmentParams& env, double lambda4, const Vec3& r0,
                        Vec& dx) {
    const Vec3 r = x.segment<3>(pa::RX);
    const Vec3 v = x.segment<3>(pa::VX);
    const double th = x[pa::TH], psi = x[pa::PS], ph = x[pa::PH];
    const double wx = x[pa::WX], wy = x[pa::WY];
    const double cps = std::cos(psi), sps = std::sin(psi);
    if (std::abs(cps) < kEpsSing)
        throw SingularityBand("dynamics_pa: |cos(psi)| below the smoothing band");
    const double cph = std::cos(ph), sph = std::sin(ph);
    const double wsc = wx * sph + wy * cph;

    const Vec3 g = gravity(r, lambda4, env, r0);
    const double rho = atmosphere_rho(r, lambda4, env, r0);
    const AeroForces af = aero_forces(v, th, psi, prm, rho, env.g_std);

    dx.resize(pa::NX);
    dx.segment<3>(pa::RX) = v;
    dx.segment<3>(pa::VX) = prm.a * af.evec + g + (lambda4 / prm.m) * (af.drag + af.lift);
    dx[pa::TH] = wsc / cps;
    dx[pa::PS] = wx * cph - wy * sph;
    dx[pa::PH] = wsc * sps / cps;
    dx[pa::WX] = -prm.b * u2;
    dx[pa::WY] = prm.b * u1;
}

namespace detail {

/// Aerodynamic force and penalty partials shared by the costate assembly.
struct AeroPartials {
    Mat3 dF_dv = Mat3::Zero();   // d(D+L)/dv
    Vec3 dF_dth = Vec3::Zero();  // d(D+L)/dtheta
    Vec3 dF_dps = Vec3::Zero();  // d(D+L)/dpsi
    Vec3 dnbar_dv = Vec3::Zero();
    Vec3 dqbar_dv = Vec3::Zero();
    double dnbar_dth = 0.0, dnbar_dps = 0.0;
};

inline AeroPartials aero_partials(const AeroForces& af, double theta, double psi,
                                  const VehicleParams& prm, double rho, double g_std) {
    AeroPartials o;
    const double V = af.speed;
    const double hS = 0.5 * rho * prm.S;
    const Vec3 v = V * af.vhat;
    const Mat3 I = Mat3::Identity();
    const Mat3 dvhat_dv = (I - af.vhat * af.vhat.transpose()) / V;
    const bool regular = af.salpha > 1e-10;

    const Vec3 dalpha_dv = regular ? Vec3(-af.lhat / V) : Vec3::Zero();
    const Vec3 dc_dv = af.pvec / V;
    const Mat3 dpvec_dv = -(af.vhat * dc_dv.transpose() + af.calpha * dvhat_dv);

    // drag: D = -hS * CX(alpha) * V * v
    o.dF_dv = -hS * (af.CX * (V * I + v * af.vhat.transpose()) +
                     prm.Cxa * V * v * dalpha_dv.transpose());
    // lift: L = hS * V^2 * CL(alpha) * lhat
    if (regular) {
        const Mat3 dlhat_dv = (I - af.lhat * af.lhat.transpose()) * dpvec_dv / af.salpha;
        o.dF_dv +=
            hS * (af.lhat * (2.0 * af.CL * v + V * V * prm.Cza * dalpha_dv).transpose() +
                  V * V * af.CL * dlhat_dv);
    } else {
        // alpha ~ 0 limit of Cza * d(alpha * lhat); exact for Cz0 = 0
        o.dF_dv += hS * V * V * prm.Cza * dpvec_dv;
    }

    auto attitude_partial = [&](const Vec3& de, Vec3& dF, double& dnbar) {
        const double dc = af.vhat.dot(de);
        const Vec3 dpvec = de - dc * af.vhat;
        double dalpha;
        if (regular) {
            dalpha = -dc / af.salpha;
            const Vec3 dlhat = (dpvec - af.lhat * af.lhat.dot(dpvec)) / af.salpha;
            dF = -hS * prm.Cxa * dalpha * V * v +
                 hS * V * V * (prm.Cza * dalpha * af.lhat + af.CL * dlhat);
        } else {
            dalpha = 0.0;
            dF = hS * V * V * prm.Cza * dpvec;
        }
        dnbar = af.qbar * prm.S * prm.Cza * dalpha / (prm.m * g_std);
    };
    attitude_partial(body_axis_dtheta(theta, psi), o.dF_dth, o.dnbar_dth);
    attitude_partial(body_axis_dpsi(theta, psi), o.dF_dps, o.dnbar_dps);

    o.dqbar_dv = rho * v;
    o.dnbar_dv = prm.S / (prm.m * g_std) * (rho * af.CN * v + af.qbar * prm.Cza * dalpha_dv);
    return o;
}

/// -dH/dr and -dH/dv blocks of the 11-dim costate rates. These rows are
/// regular across the Euler singularity band and are shared by the exact
/// and the smoothed attitude variants. p0 = -1.
inline void pa_costate_rv(const Vec& x, const Vec& p, const VehicleParams& prm,
                          const EnvironmentParams& env, double lambda4, double lambda5,
                          double Kp, const Vec3& r0, Vec& dp) {
    constexpr double p0 = -1.0;
    const Vec3 r = x.segment<3>(pa::RX);
    const Vec3 v = x.segment<3>(pa::VX);
    const double th = x[pa::TH], psi = x[pa::PS];
    const Vec3 pr = p.segment<3>(pa::RX);
    const Vec3 pv = p.segment<3>(pa::VX);

    const double rho = atmosphere_rho(r, lambda4, env, r0);
    const Vec3 drho = atmosphere_rho_grad(r, lambda4, env, r0);
    const Mat3 Jg = gravity_jacobian(r, lambda4, env, r0);
    const AeroForces af = aero_forces(v, th, psi, prm, rho, env.g_std);
    const auto ap = aero_partials(af, th, psi, prm, rho, env.g_std);

    const double hn = std::max(0.0, af.nbar / prm.n_max - 1.0);
    const double hq = std::max(0.0, af.qbar / prm.q_max - 1.0);
    const double dP_dnbar = 2.0 * hn / prm.n_max;
    const double dP_dqbar = 2.0 * hq / prm.q_max;
    const double pen = p0 * lambda5 * Kp;

    const Vec3 F = af.drag + af.lift;
    const double am = lambda4 / prm.m;

    // Both nbar and qbar are proportional to rho, as are the forces.
    Vec3 dH_dr = Jg.transpose() * pv + am * (pv.dot(F) / rho) * drho +
                 pen * ((dP_dnbar * af.nbar + dP_dqbar * af.qbar) / rho) * drho;
    Vec3 dH_dv = pr + am * ap.dF_dv.transpose() * pv +
                 pen * (dP_dnbar * ap.dnbar_dv + dP_dqbar * ap.dqbar_dv);
    dp.segment<3>(pa::RX) = -dH_dr;
    dp.segment<3>(pa::VX) = -dH_dv;
}

}  // namespace detail

/// Costate right-hand sides -dH/dx of the 11-dim model, hand-assembled
/// from the gravity/atmosphere/aero partials. The control-cost term of H
/// carries no state dependence, so u enters only through the switching
/// rows of H and not here. p0 = -1 throughout.
inline void adjoint_pa(const Vec& x, const Vec& p, double /*u1*/, double /*u2*/,
                       const VehicleParams& prm, const EnvironmentParams& env,
                       double lambda4, double lambda5, double Kp, const Vec3& r0,
                       Vec& dp) {
    constexpr double p0 = -1.0;
    const Vec3 r = x.segment<3>(pa::RX);
    const Vec3 v = x.segment<3>(pa::VX);
    const double th = x[pa::TH], psi = x[pa::PS], ph = x[pa::PH];
    const double wx = x[pa::WX], wy = x[pa::WY];
    const double cps = std::cos(psi), sps = std::sin(psi);
    if (std::abs(cps) < kEpsSing)
        throw SingularityBand("adjoint_pa: |cos(psi)| below the smoothing band");
    const double cph = std::cos(ph), sph = std::sin(ph);
    const double wsc = wx * sph + wy * cph;
    const double wcc = wx * cph - wy * sph;
    const double tps = sps / cps;
    const double pth = p[pa::TH], pps = p[pa::PS], pph = p[pa::PH];
    const Vec3 pv = p.segment<3>(pa::VX);

    dp.resize(pa::NX);
    detail::pa_costate_rv(x, p, prm, env, lambda4, lambda5, Kp, r0, dp);

    const double rho = atmosphere_rho(r, lambda4, env, r0);
    const AeroForces af = aero_forces(v, th, psi, prm, rho, env.g_std);
    const auto ap = detail::aero_partials(af, th, psi, prm, rho, env.g_std);
    const double hn = std::max(0.0, af.nbar / prm.n_max - 1.0);
    const double dP_dnbar = 2.0 * hn / prm.n_max;
    const double pen = p0 * lambda5 * Kp;
    const double am = lambda4 / prm.m;

    const Vec3 de_dth = body_axis_dtheta(th, psi);
    const Vec3 de_dps = body_axis_dpsi(th, psi);
    double dH_dth =
        prm.a * pv.dot(de_dth) + am * pv.dot(ap.dF_dth) + pen * dP_dnbar * ap.dnbar_dth;
    double dH_dps = prm.a * pv.dot(de_dps) + am * pv.dot(ap.dF_dps) +
                    pen * dP_dnbar * ap.dnbar_dps + pth * wsc * sps / (cps * cps) +
                    pph * wsc / (cps * cps);
    double dH_dph = pth * wcc / cps - pps * wsc + pph * tps * wcc;
    double dH_dwx = pth * sph / cps + pps * cph + pph * tps * sph;
    double dH_dwy = pth * cph / cps - pps * sph + pph * tps * cph;

    dp[pa::TH] = -dH_dth;
    dp[pa::PS] = -dH_dps;
    dp[pa::PH] = -dH_dph;
    dp[pa::WX] = -dH_dwx;
    dp[pa::WY] = -dH_dwy;
}

/// Smoothed variant used inside |cos(psi)| < kEpsSing: the attitude rows
/// follow the limit equations while the position/velocity rows keep their
/// exact form.
inline void euler_smoothed_pa(const Vec& x, const Vec& p, double u1, double u2,
                              const VehicleParams& prm, const EnvironmentParams& env,
                              double lambda4, double lambda5, double Kp, const Vec3& r0,
                              Vec& dx, Vec& dp) {
    const Vec3 r = x.segment<3>(pa::RX);
    const Vec3 v = x.segment<3>(pa::VX);
    const double th = x[pa::TH], psi = x[pa::PS], ph = x[pa::PH];
    const double cph = std::cos(ph), sph = std::sin(ph);
    const double cth = std::cos(th), sth = std::sin(th);

    const Vec3 g = gravity(r, lambda4, env, r0);
    const double rho = atmosphere_rho(r, lambda4, env, r0);
    const AeroForces af = aero_forces(v, th, psi, prm, rho, env.g_std);

    dx.resize(pa::NX);
    dx.segment<3>(pa::RX) = v;
    dx.segment<3>(pa::VX) = prm.a * af.evec + g + (lambda4 / prm.m) * (af.drag + af.lift);
    dx[pa::TH] = 0.0;
    dx[pa::PS] = x[pa::WX] * cph - x[pa::WY] * sph;
    dx[pa::PH] = 0.0;
    dx[pa::WX] = -prm.b * u2;
    dx[pa::WY] = prm.b * u1;

    dp.resize(pa::NX);
    detail::pa_costate_rv(x, p, prm, env, lambda4, lambda5, Kp, r0, dp);
    dp[pa::TH] = 0.0;
    dp[pa::PS] = prm.a * sth * p[pa::VX] + prm.a * cth * p[pa::VZ];
    dp[pa::PH] = 0.0;
    dp[pa::WX] = -p[pa::PS] * cph;
    dp[pa::WY] = p[pa::PS] * sph;
}

}  // namespace attraj
