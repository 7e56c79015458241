#include <catch2/catch_amalgamated.hpp>

#include "attraj/controls.hpp"
#include "attraj/numdiff.hpp"
#include "attraj/pa_model.hpp"
#include "model_fixtures.hpp"

using attraj::Vec;
using attraj::Vec2;
using attraj::Vec3;
using namespace attraj::pa;

namespace {
const attraj::VehicleParams veh = fixtures::pegasus_vehicle();
const attraj::EnvironmentParams env = fixtures::release_env(11.9e3);
const Vec3 r0ref(11.9e3, 0.0, 0.0);
}  // namespace

TEST_CASE("lambda4=0 with zero position costates recovers the 8-dim structure",
          "[pa_model]") {
    fixtures::PaSampler smp(61);
    Vec x = smp.state();
    Vec p = smp.costate();
    p.segment<3>(RX).setZero();
    Vec dp;
    attraj::adjoint_pa(x, p, 0.1, -0.3, veh, env, 0.0, 0.0, 0.0, r0ref, dp);
    // velocity costates constant, position costates stay zero
    REQUIRE(dp.segment<3>(VX).lpNorm<Eigen::Infinity>() < 1e-15);
    REQUIRE(dp.segment<3>(RX).lpNorm<Eigen::Infinity>() < 1e-15);

    Vec dx;
    attraj::dynamics_pa(x, 0.1, -0.3, veh, env, 0.0, r0ref, dx);
    Vec3 e = attraj::body_axis(x[TH], x[PS]);
    REQUIRE((dx.segment<3>(VX) - (veh.a * e + env.g_vec0)).norm() < 1e-12);
    REQUIRE((dx.segment<3>(RX) - x.segment<3>(VX)).norm() == 0.0);
}

TEST_CASE("adjoint matches -dH/dx by central differences at random points",
          "[pa_model]") {
    fixtures::PaSampler smp(67);
    const double K = 800.0, Kp = 10.0;
    int active_penalty_count = 0;
    for (int i = 0; i < 100; ++i) {
        Vec x = smp.state();
        Vec p = smp.costate();
        Vec2 u(smp.uni(-0.7, 0.7), smp.uni(-0.7, 0.7));
        double l3 = smp.uni(0.0, 0.8), l4 = smp.uni(0.1, 1.0), l5 = smp.uni(0.1, 1.0);

        auto H = [&](const Vec& xx) -> Vec {
            Vec r(1);
            r << attraj::hamiltonian_pa(xx, p, u, -1.0, veh, env, K, l3, l4, l5, Kp, r0ref);
            return r;
        };
        double rho = attraj::atmosphere_rho(x.segment<3>(RX), l4, env, r0ref);
        auto af = attraj::aero_forces(x.segment<3>(VX), x[TH], x[PS], veh, rho, env.g_std);
        if (af.nbar > veh.n_max || af.qbar > veh.q_max) ++active_penalty_count;

        attraj::Mat dHdx = attraj::jacobian_fd(H, x, attraj::FdScheme::central);
        Vec dp;
        attraj::adjoint_pa(x, p, u[0], u[1], veh, env, l4, l5, Kp, r0ref, dp);
        double scale = std::max(1.0, dHdx.row(0).lpNorm<Eigen::Infinity>());
        REQUIRE((dp.transpose() + dHdx.row(0)).lpNorm<Eigen::Infinity>() < 1e-6 * scale);
    }
    // the sample must exercise the penalty branch
    REQUIRE(active_penalty_count > 5);
}

TEST_CASE("adjoint is independent of Kp where the penalty is inactive", "[pa_model]") {
    fixtures::PaSampler smp(71);
    for (int i = 0; i < 20; ++i) {
        Vec x = smp.state();
        // shrink speed until both constraints are strictly satisfied
        for (int k = 0; k < 60; ++k) {
            double rho = attraj::atmosphere_rho(x.segment<3>(RX), 1.0, env, r0ref);
            auto af =
                attraj::aero_forces(x.segment<3>(VX), x[TH], x[PS], veh, rho, env.g_std);
            if (af.nbar < 0.95 * veh.n_max && af.qbar < 0.95 * veh.q_max) break;
            x.segment<3>(VX) *= 0.8;
        }
        Vec p = smp.costate();
        Vec dp1, dp2;
        attraj::adjoint_pa(x, p, 0.2, 0.1, veh, env, 1.0, 1.0, 0.1, r0ref, dp1);
        attraj::adjoint_pa(x, p, 0.2, 0.1, veh, env, 1.0, 1.0, 1000.0, r0ref, dp2);
        REQUIRE((dp1 - dp2).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("smoothed attitude rows at the yaw singularity (11-dim)", "[pa_model]") {
    fixtures::PaSampler smp(73);
    Vec x = smp.state();
    x[PS] = M_PI / 2.0;
    Vec p = smp.costate();
    Vec dx, dp;
    attraj::euler_smoothed_pa(x, p, 0.3, -0.4, veh, env, 0.0, 0.0, 0.0, r0ref, dx, dp);
    REQUIRE(dx[TH] == 0.0);
    REQUIRE(dx[PH] == 0.0);
    REQUIRE(dp[TH] == 0.0);
    REQUIRE(dp[PH] == 0.0);
    double cph = std::cos(x[PH]), sph = std::sin(x[PH]);
    REQUIRE(std::abs(dp[PS] - (veh.a * std::sin(x[TH]) * p[VX] +
                               veh.a * std::cos(x[TH]) * p[VZ])) < 1e-13);
    REQUIRE(std::abs(dp[WX] + p[PS] * cph) < 1e-15);
    REQUIRE(std::abs(dp[WY] - p[PS] * sph) < 1e-15);
    // regular rows keep the full model: with the homotopy at zero the
    // velocity costate row reduces to -p_r
    REQUIRE((dp.segment<3>(VX) + p.segment<3>(RX)).norm() < 1e-15);

    REQUIRE_THROWS_AS(attraj::dynamics_pa(x, 0.0, 0.0, veh, env, 0.5, r0ref, dx),
                      attraj::SingularityBand);
    REQUIRE_THROWS_AS(
        attraj::adjoint_pa(x, p, 0.0, 0.0, veh, env, 0.5, 0.5, 5.0, r0ref, dp),
        attraj::SingularityBand);
}

TEST_CASE("gravity and density blends enter the velocity rows", "[pa_model]") {
    fixtures::PaSampler smp(79);
    Vec x = smp.state();
    for (double lam4 : {0.0, 0.25, 0.75, 1.0}) {
        Vec dx;
        attraj::dynamics_pa(x, 0.0, 0.0, veh, env, lam4, r0ref, dx);
        Vec3 g = attraj::gravity(x.segment<3>(RX), lam4, env, r0ref);
        double rho = attraj::atmosphere_rho(x.segment<3>(RX), lam4, env, r0ref);
        auto af = attraj::aero_forces(x.segment<3>(VX), x[TH], x[PS], veh, rho, env.g_std);
        Vec3 expected =
            veh.a * af.evec + g + (lam4 / veh.m) * (af.drag + af.lift);
        REQUIRE((dx.segment<3>(VX) - expected).norm() < 1e-12 * expected.norm());
    }
}
