#include <catch2/catch_amalgamated.hpp>

#include "attraj/shooting.hpp"

using attraj::BvpSpec;
using attraj::Vec;

TEST_CASE("constant flow has identically zero matching residual", "[shooting]") {
    BvpSpec spec;
    spec.state_dim = 1;
    spec.costate_dim = 1;
    spec.boundary_dim = 2;
    spec.field = [](double, const Vec&, Vec& dz, double) { dz.setZero(2); };
    spec.boundary = [](const Vec& z0, const Vec& zf, double, double) -> Vec {
        return zf - z0;
    };
    Vec x0(1);
    x0 << 0.3;
    auto F = attraj::assemble_residual(spec, x0, 0.0);
    Vec Z(2);
    Z << -1.7, 2.5;  // any costate, any positive tf
    REQUIRE(F(Z).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("nodes on the true trajectory match by construction", "[shooting]") {
    // z' = A z on a 2-dim z (state_dim=1: x and p)
    Eigen::Matrix2d A;
    A << 0.1, 0.8, -0.4, -0.2;
    BvpSpec spec;
    spec.state_dim = 1;
    spec.costate_dim = 1;
    spec.boundary_dim = 2;
    spec.node_count = 2;
    spec.field = [A](double, const Vec& z, Vec& dz, double) { dz = A * z; };
    spec.boundary = [](const Vec& z0, const Vec& zf, double, double) -> Vec {
        Vec r(2);
        r << zf[0] - 1.0, zf[1] - z0[1];
        return r;
    };

    double tf = 2.0;
    Vec z0(2);
    z0 << 0.5, -0.3;
    // reference nodes from a single propagation
    auto ref = [&](double t) -> Vec {
        return attraj::integrate_final(
            [&](double s, const Vec& z, Vec& dz) { dz = t * (A * z); }, z0);
    };
    Vec n1 = ref(tf / 3.0), n2 = ref(2.0 * tf / 3.0);

    Vec Z(2 + 2 * 2);
    Z << z0[1], tf, n1[0], n1[1], n2[0], n2[1];
    Vec x0(1);
    x0 << z0[0];
    auto F = attraj::assemble_residual(spec, x0, 0.0);
    Vec r = F(Z);
    REQUIRE(r.segment(2, 4).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("straight-line two-point problem", "[shooting]") {
    // x'' = 0, x(0)=0, x(1)=1, recast with unknown slope p0 and pinned tf
    BvpSpec spec;
    spec.state_dim = 1;
    spec.costate_dim = 1;
    spec.boundary_dim = 2;
    spec.field = [](double, const Vec& z, Vec& dz, double) {
        dz.resize(2);
        dz[0] = z[1];
        dz[1] = 0.0;
    };
    spec.boundary = [](const Vec&, const Vec& zf, double tf, double) -> Vec {
        Vec r(2);
        r << zf[0] - 1.0, tf - 1.0;
        return r;
    };
    Vec x0(1);
    x0 << 0.0;
    Vec guess(2);
    guess << 0.4, 0.8;
    auto sol = attraj::solve_bvp(spec, x0, 0.0, guess);
    REQUIRE(sol.report.converged);
    REQUIRE(std::abs(sol.report.root[0] - 1.0) < 1e-8);
    REQUIRE(std::abs(sol.report.root[1] - 1.0) < 1e-8);
    REQUIRE_FALSE(sol.trajectory.empty());
}

TEST_CASE("energy-cost double integrator matches the hand LQ solution", "[shooting]") {
    // min int u^2 on [0,1], x1'=x2, x2'=u, x(0)=(1,0) -> x(1)=(0,0).
    // Extremals: u=p2/2, p1'=0, p2'=-p1. Hand solution: p(0)=(-24,-12).
    BvpSpec spec;
    spec.state_dim = 2;
    spec.costate_dim = 2;
    spec.boundary_dim = 3;
    spec.field = [](double, const Vec& z, Vec& dz, double) {
        dz.resize(4);
        double u = z[3] / 2.0;
        dz[0] = z[1];
        dz[1] = u;
        dz[2] = 0.0;
        dz[3] = -z[2];
    };
    spec.boundary = [](const Vec&, const Vec& zf, double tf, double) -> Vec {
        Vec r(3);
        r << zf[0], zf[1], tf - 1.0;
        return r;
    };
    Vec x0(2);
    x0 << 1.0, 0.0;
    Vec guess(3);
    guess << -20.0, -10.0, 0.9;
    auto sol = attraj::solve_bvp(spec, x0, 0.0, guess);
    REQUIRE(sol.report.converged);
    REQUIRE(std::abs(sol.report.root[0] - (-24.0)) < 1e-6);
    REQUIRE(std::abs(sol.report.root[1] - (-12.0)) < 1e-6);
}

TEST_CASE("single and multiple shooting agree pointwise", "[shooting]") {
    auto make_spec = [](int N) {
        BvpSpec spec;
        spec.state_dim = 2;
        spec.costate_dim = 2;
        spec.boundary_dim = 3;
        spec.node_count = N;
        spec.field = [](double, const Vec& z, Vec& dz, double) {
            dz.resize(4);
            double u = z[3] / 2.0;
            dz[0] = z[1];
            dz[1] = u;
            dz[2] = 0.0;
            dz[3] = -z[2];
        };
        spec.boundary = [](const Vec&, const Vec& zf, double tf, double) -> Vec {
            Vec r(3);
            r << zf[0], zf[1], tf - 1.0;
            return r;
        };
        return spec;
    };
    Vec x0(2);
    x0 << 1.0, 0.0;

    auto s0 = make_spec(0);
    Vec g0(3);
    g0 << -20.0, -10.0, 0.9;
    auto sol0 = attraj::solve_bvp(s0, x0, 0.0, g0);
    REQUIRE(sol0.report.converged);

    auto s2 = make_spec(2);
    Vec g2(3 + 2 * 4);
    g2.head(3) = g0;
    // node guesses: crude straight-line interpolation is enough
    g2.segment(3, 4) << 0.6, -0.8, -20.0, -5.0;
    g2.segment(7, 4) << 0.2, -0.9, -20.0, -2.0;
    auto sol2 = attraj::solve_bvp(s2, x0, 0.0, g2);
    REQUIRE(sol2.report.converged);

    auto t0 = attraj::integrate_dense(s0, x0, 0.0, sol0.report.root, 64);
    auto t2 = attraj::integrate_dense(s2, x0, 0.0, sol2.report.root, 64);
    REQUIRE(t0.size() == t2.size());
    for (size_t i = 0; i < t0.size(); ++i) {
        REQUIRE(std::abs(t0[i].t - t2[i].t) < 1e-12);
        REQUIRE((t0[i].y - t2[i].y).lpNorm<Eigen::Infinity>() <
                1e-6 * std::max(1.0, t0[i].y.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("infeasible guesses and malformed specs are rejected", "[shooting]") {
    BvpSpec spec;
    spec.state_dim = 1;
    spec.costate_dim = 1;
    spec.boundary_dim = 2;
    spec.field = [](double, const Vec&, Vec& dz, double) { dz.setZero(2); };
    spec.boundary = [](const Vec& z0, const Vec& zf, double, double) -> Vec {
        return zf - z0;
    };
    Vec x0(1);
    x0 << 0.0;
    auto F = attraj::assemble_residual(spec, x0, 0.0);
    Vec bad(2);
    bad << 1.0, -0.5;  // negative tf
    REQUIRE_THROWS_AS(F(bad), attraj::InfeasibleGuess);

    BvpSpec askew = spec;
    askew.boundary_dim = 3;
    REQUIRE_THROWS_AS(attraj::assemble_residual(askew, x0, 0.0), attraj::ValidationError);
}
