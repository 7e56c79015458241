#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "attraj/errors.hpp"
#include "attraj/euler.hpp"
#include "attraj/vehicle.hpp"

namespace attraj {

/// Aerodynamic force evaluation at one flight state. The drag is
/// antiparallel to the velocity; the lift lives in span{v, e}, orthogonal
/// to v and oriented toward the body axis e (zero when v is parallel
/// to e). The load factor is reported in g units.
struct AeroForces {
    Vec3 drag = Vec3::Zero();
    Vec3 lift = Vec3::Zero();
    double alpha = 0.0;  // angle of attack, rad
    double qbar = 0.0;   // dynamic pressure, Pa
    double nbar = 0.0;   // load factor, g units

    // shared intermediates consumed by the adjoint assembly
    Vec3 vhat = Vec3::Zero();
    Vec3 evec = Vec3::Zero();
    Vec3 pvec = Vec3::Zero();  // e - cos(alpha) vhat, norm sin(alpha)
    Vec3 lhat = Vec3::Zero();
    double speed = 0.0;
    double calpha = 1.0;
    double salpha = 0.0;
    double CX = 0.0, CL = 0.0, CN = 0.0;
};

inline AeroForces aero_forces(const Vec3& v, double theta, double psi,
                              const VehicleParams& prm, double rho, double g_std) {
    AeroForces out;
    out.speed = v.norm();
    if (!(out.speed > 0.0)) throw ZeroVelocity("aero_forces: |v| must be positive");
    out.vhat = v / out.speed;
    out.evec = body_axis(theta, psi);
    out.calpha = std::clamp(out.vhat.dot(out.evec), -1.0, 1.0);
    out.alpha = std::acos(out.calpha);
    out.qbar = 0.5 * rho * out.speed * out.speed;

    out.CX = prm.Cx0 + prm.Cxa * out.alpha;
    out.CL = prm.Cz0 + prm.Cza * out.alpha;
    out.CN = prm.Cz0 + prm.Cza * out.alpha;

    out.drag = -out.qbar * prm.S * out.CX * out.vhat;
    out.pvec = out.evec - out.calpha * out.vhat;
    out.salpha = out.pvec.norm();
    if (out.salpha > 1e-10) {
        out.lhat = out.pvec / out.salpha;
        out.lift = out.qbar * prm.S * out.CL * out.lhat;
    }
    out.nbar = out.qbar * prm.S * out.CN / (prm.m * g_std);
    return out;
}

/// Soft-constraint penalty: squared hinges of the nondimensional
/// violations (value/limit - 1, clamped at zero) of the load factor and
/// the dynamic pressure.
inline double penalty(double nbar, double qbar, const VehicleParams& prm) {
    double hn = std::max(0.0, nbar / prm.n_max - 1.0);
    double hq = std::max(0.0, qbar / prm.q_max - 1.0);
    return hn * hn + hq * hq;
}

}  // namespace attraj
