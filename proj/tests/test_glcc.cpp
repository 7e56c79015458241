#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "attraj/controls.hpp"
#include "attraj/glcc.hpp"
#include "attraj/integrate.hpp"
#include "attraj/p0.hpp"
#include "model_fixtures.hpp"

using attraj::Vec;
using attraj::Vec2;
using attraj::Vec3;
using namespace attraj::ps;

TEST_CASE("vacuum margin equals the thrust acceleration", "[glcc]") {
    std::mt19937 gen(97);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int i = 0; i < 50; ++i) {
        double th = u(gen), psi = 0.6 * u(gen);
        REQUIRE(attraj::glcc_margin(th, psi, Vec3::Zero(), 17.0) == 17.0);
    }
}

TEST_CASE("switching function and its derivatives vanish along the singular flow",
          "[glcc]") {
    attraj::VehicleParams prm;
    prm.a = 20.0;
    prm.b = 0.2;
    Vec3 g(-9.5, 0.3, 0.1);
    auto pt = attraj::singular_surface_point(0.7, -0.2, 0.4, g, prm.a, -1.0,
                                             Vec3(120.0, -30.0, 250.0));

    // the singular control is zero; integrate the extremal field with u=0
    Vec z(2 * NX);
    z << pt.x, pt.p;
    auto field = [&](double, const Vec& zz, Vec& dz) {
        Vec dx, dp;
        attraj::dynamics_ps(zz.head(NX), 0.0, 0.0, prm, g, dx);
        attraj::adjoint_ps(zz.head(NX), zz.tail(NX), 0.0, 0.0, prm, g, dp);
        dz.resize(2 * NX);
        dz << dx, dp;
        dz *= 3.0;  // short arc, 3 s
    };
    auto res = attraj::integrate(field, z);

    // Phi = (b p_wy, -b p_wx) sampled along the arc: the function itself
    // and difference-quotient derivatives up to third order stay at zero
    std::vector<double> phi1, phi2;
    const int M = 7;
    for (int k = 0; k < M; ++k) {
        Vec zk = attraj::integrate_final(
            [&](double, const Vec& zz, Vec& dz) {
                field(0, zz, dz);
                dz *= static_cast<double>(k) / (M - 1);
            },
            z);
        phi1.push_back(prm.b * zk[NX + WY]);
        phi2.push_back(-prm.b * zk[NX + WX]);
    }
    auto max_deriv = [&](std::vector<double> v) {
        double worst = 0.0;
        for (int order = 0; order < 4; ++order) {
            for (double x : v) worst = std::max(worst, std::abs(x));
            for (size_t i = 0; i + 1 < v.size(); ++i) v[i] = v[i + 1] - v[i];
            v.pop_back();
        }
        return worst;
    };
    REQUIRE(max_deriv(phi1) < 1e-9);
    REQUIRE(max_deriv(phi2) < 1e-9);
    REQUIRE(res.final_state.allFinite());
}

TEST_CASE("embedded order-zero solution lies on the singular surface", "[glcc]") {
    auto env = fixtures::release_env(100e3);
    const double a = 20.0;
    Vec3 v0 = 5000.0 * attraj::body_axis(0.5236, 0.0);
    Vec3 w = attraj::body_axis(1.0472, 0.1745);
    auto s = attraj::solve_p0(v0, w, env.g_vec0, a);

    Vec x = Vec::Zero(NX);
    x.segment<3>(VX) = v0;
    x[TH] = s.theta_star;
    x[PS] = s.psi_star;
    Vec p = Vec::Zero(NX);
    p.segment<3>(VX) = s.p_v;

    Vec r = attraj::singular_surface_residuals(x, p, env.g_vec0, a, -1.0);
    REQUIRE(r.lpNorm<Eigen::Infinity>() < 1e-10);

    // and the margin there is positive (strengthened condition)
    REQUIRE(attraj::glcc_margin(s.theta_star, s.psi_star, env.g_vec0, a) > 0.0);
}

TEST_CASE("surface construction rejects the smoothing band", "[glcc]") {
    REQUIRE_THROWS_AS(
        attraj::singular_surface_point(0.1, M_PI / 2.0, 0.0, Vec3::Zero(), 10.0, -1.0),
        attraj::SingularityBand);
}
