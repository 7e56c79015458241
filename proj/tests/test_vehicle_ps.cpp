#include <catch2/catch_amalgamated.hpp>

#include "attraj/controls.hpp"
#include "attraj/numdiff.hpp"
#include "attraj/vehicle.hpp"
#include "model_fixtures.hpp"

using attraj::Vec;
using attraj::Vec2;
using attraj::Vec3;
using namespace attraj::ps;

namespace {

const attraj::VehicleParams prm = [] {
    attraj::VehicleParams p;
    p.a = 20.0;
    p.b = 0.2;
    return p;
}();
const Vec3 grav(-9.5, 0.0, 0.0);

// drift and control fields implemented independently as the oracle for
// the control-affine decomposition
Vec drift_field(const Vec& x) {
    Vec f(NX);
    double th = x[TH], psi = x[PS], ph = x[PH];
    f[VX] = prm.a * std::sin(th) * std::cos(psi) + grav[0];
    f[VY] = -prm.a * std::sin(psi) + grav[1];
    f[VZ] = prm.a * std::cos(th) * std::cos(psi) + grav[2];
    double wsc = x[WX] * std::sin(ph) + x[WY] * std::cos(ph);
    f[TH] = wsc / std::cos(psi);
    f[PS] = x[WX] * std::cos(ph) - x[WY] * std::sin(ph);
    f[PH] = wsc * std::tan(psi);
    f[WX] = 0.0;
    f[WY] = 0.0;
    return f;
}
Vec g1_field() {
    Vec g = Vec::Zero(NX);
    g[WY] = prm.b;
    return g;
}
Vec g2_field() {
    Vec g = Vec::Zero(NX);
    g[WX] = -prm.b;
    return g;
}

}  // namespace

TEST_CASE("frozen attitude reduces to translational thrust", "[vehicle]") {
    fixtures::PaSampler smp(11);
    Vec x = smp.ps_state();
    x[WX] = x[WY] = 0.0;
    Vec dx;
    attraj::dynamics_ps(x, 0.0, 0.0, prm, grav, dx);
    REQUIRE(dx[TH] == 0.0);
    REQUIRE(dx[PS] == 0.0);
    REQUIRE(dx[PH] == 0.0);
    Vec3 e = attraj::body_axis(x[TH], x[PS]);
    REQUIRE(std::abs(dx[VX] - (prm.a * e[0] + grav[0])) < 1e-14);
    REQUIRE(std::abs(dx[VY] - (prm.a * e[1] + grav[1])) < 1e-14);
    REQUIRE(std::abs(dx[VZ] - (prm.a * e[2] + grav[2])) < 1e-14);
}

TEST_CASE("torque enters through the control fields only", "[vehicle]") {
    Vec x = Vec::Zero(NX);
    Vec dx;
    attraj::dynamics_ps(x, 1.0, 0.0, prm, Vec3::Zero(), dx);
    REQUIRE(dx[WY] == prm.b);
    REQUIRE(dx[WX] == 0.0);
    REQUIRE(dx[TH] == 0.0);
    REQUIRE(dx[PS] == 0.0);
    REQUIRE(dx[PH] == 0.0);
}

TEST_CASE("control-affine decomposition against independent fields", "[vehicle]") {
    fixtures::PaSampler smp(17);
    for (int i = 0; i < 50; ++i) {
        Vec x = smp.ps_state();
        double u1 = smp.uni(-1, 1), u2 = smp.uni(-1, 1);
        Vec dx;
        attraj::dynamics_ps(x, u1, u2, prm, grav, dx);
        Vec oracle = drift_field(x) + u1 * g1_field() + u2 * g2_field();
        REQUIRE((dx - oracle).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("adjoint is linear in p and vanishes at p=0", "[vehicle]") {
    fixtures::PaSampler smp(23);
    Vec x = smp.ps_state();
    Vec p = Vec::Zero(NX);
    Vec dp;
    attraj::adjoint_ps(x, p, 0.3, -0.2, prm, grav, dp);
    REQUIRE(dp.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("adjoint matches -dH/dx by central differences", "[vehicle]") {
    fixtures::PaSampler smp(31);
    for (int i = 0; i < 100; ++i) {
        Vec x = smp.ps_state();
        Vec p = smp.ps_costate();
        Vec2 u(smp.uni(-1, 1), smp.uni(-1, 1));
        auto H = [&](const Vec& xx) -> Vec {
            Vec r(1);
            r << attraj::hamiltonian_ps(xx, p, u, -1.0, prm, grav, 100.0, 0.0);
            return r;
        };
        attraj::Mat dHdx = attraj::jacobian_fd(H, x, attraj::FdScheme::central);
        Vec dp;
        attraj::adjoint_ps(x, p, u[0], u[1], prm, grav, dp);
        double scale = std::max(1.0, dHdx.row(0).lpNorm<Eigen::Infinity>());
        REQUIRE((dp.transpose() + dHdx.row(0)).lpNorm<Eigen::Infinity>() < 1e-6 * scale);
    }
}

TEST_CASE("printed pitch costate row", "[vehicle]") {
    fixtures::PaSampler smp(37);
    Vec x = smp.ps_state();
    x[WX] = x[WY] = 0.0;
    x[PH] = 0.0;
    Vec p = smp.ps_costate();
    Vec dp;
    attraj::adjoint_ps(x, p, 0.0, 0.0, prm, grav, dp);
    double expected = -prm.a * std::cos(x[PS]) *
                      (p[VX] * std::cos(x[TH]) - p[VZ] * std::sin(x[TH]));
    REQUIRE(std::abs(dp[TH] - expected) < 1e-14);
}

TEST_CASE("switching-function identity of the Hamiltonian", "[vehicle]") {
    fixtures::PaSampler smp(41);
    for (int i = 0; i < 100; ++i) {
        Vec x = smp.ps_state();
        Vec p = smp.ps_costate();
        double u1 = smp.uni(-1, 1), u2 = smp.uni(-1, 1);
        Vec dx;
        attraj::dynamics_ps(x, u1, u2, prm, grav, dx);
        double h0 = p.dot(drift_field(x));
        double h1 = prm.b * p[NX - 1];   // b p_wy
        double h2 = -prm.b * p[NX - 2];  // -b p_wx
        REQUIRE(std::abs(p.dot(dx) - (h0 + u1 * h1 + u2 * h2)) <
                1e-12 * std::max(1.0, std::abs(h0)));
    }
}

TEST_CASE("smoothed equations at the yaw singularity", "[vehicle]") {
    fixtures::PaSampler smp(43);
    Vec x = smp.ps_state();
    x[PS] = M_PI / 2.0;
    Vec p = smp.ps_costate();
    Vec dx, dp;
    attraj::euler_smoothed(x, p, 0.4, -0.7, prm, grav, dx, dp);
    REQUIRE(dx[TH] == 0.0);
    REQUIRE(dx[PH] == 0.0);
    double cph = std::cos(x[PH]), sph = std::sin(x[PH]);
    REQUIRE(std::abs(dx[PS] - (x[WX] * cph - x[WY] * sph)) < 1e-15);
    REQUIRE(dp[TH] == 0.0);
    REQUIRE(dp[PH] == 0.0);
    REQUIRE(std::abs(dp[PS] - (prm.a * std::sin(x[TH]) * p[VX] +
                               prm.a * std::cos(x[TH]) * p[VZ])) < 1e-14);
    REQUIRE(std::abs(dp[WX] - (-p[PS] * cph)) < 1e-15);
    REQUIRE(std::abs(dp[WY] - (p[PS] * sph)) < 1e-15);

    // raw equations refuse the band
    REQUIRE_THROWS_AS(attraj::dynamics_ps(x, 0.0, 0.0, prm, grav, dx),
                      attraj::SingularityBand);
    REQUIRE_THROWS_AS(attraj::adjoint_ps(x, p, 0.0, 0.0, prm, grav, dp),
                      attraj::SingularityBand);
}

TEST_CASE("smoothed and exact equations share the regular rows at the band edge",
          "[vehicle]") {
    fixtures::PaSampler smp(47);
    Vec x = smp.ps_state();
    x[PS] = std::acos(2.0 * attraj::kEpsSing);  // just outside the band
    Vec p = smp.ps_costate();
    Vec dx_s, dp_s, dx_e, dp_e;
    attraj::euler_smoothed(x, p, 0.2, 0.1, prm, grav, dx_s, dp_s);
    attraj::dynamics_ps(x, 0.2, 0.1, prm, grav, dx_e);
    attraj::adjoint_ps(x, p, 0.2, 0.1, prm, grav, dp_e);
    REQUIRE(dx_s[PS] == dx_e[PS]);
    REQUIRE(dx_s[WX] == dx_e[WX]);
    REQUIRE(dx_s[WY] == dx_e[WY]);
    REQUIRE(dx_s[VX] == dx_e[VX]);
    REQUIRE(dx_s[VY] == dx_e[VY]);
    REQUIRE(dx_s[VZ] == dx_e[VZ]);
}

TEST_CASE("pitch-roll rate product collapses near the singularity", "[vehicle]") {
    // states whose attitude rates stay bounded on approach: the in-plane
    // rate combination scales like cos^2(psi)
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 5; ++k) {
        double psi = M_PI / 2.0 - std::pow(10.0, -k);
        double c = std::cos(psi);
        Vec x = Vec::Zero(NX);
        x[PS] = psi;
        x[PH] = 0.3;
        // omega chosen so that wsc = cos^2(psi)
        x[WX] = c * c * std::sin(x[PH]);
        x[WY] = c * c * std::cos(x[PH]);
        Vec dx;
        attraj::dynamics_ps(x, 0.0, 0.0, prm, grav, dx);
        double prod = std::abs(dx[TH] * dx[PH]);
        REQUIRE(prod < prev);
        prev = prod;
    }
    REQUIRE(prev < 1e-6);
}
