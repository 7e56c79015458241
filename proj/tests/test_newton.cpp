#include <catch2/catch_amalgamated.hpp>

#include "attraj/newton.hpp"

using attraj::NewtonFailure;
using attraj::NewtonOptions;
using attraj::Vec;

namespace {
Vec vec1(double a) {
    Vec v(1);
    v << a;
    return v;
}
}  // namespace

TEST_CASE("quadratic root with local quadratic convergence", "[newton]") {
    auto f = [](const Vec& x) -> Vec { return vec1(x[0] * x[0] - 4.0); };
    auto rep = attraj::newton_solve(f, vec1(3.0));
    REQUIRE(rep.converged);
    REQUIRE(std::abs(rep.root[0] - 2.0) < 1e-8);
    REQUIRE(rep.iterations <= 8);
}

TEST_CASE("already at a root converges in zero iterations", "[newton]") {
    auto f = [](const Vec& x) -> Vec { return x; };
    auto rep = attraj::newton_solve(f, vec1(0.0));
    REQUIRE(rep.converged);
    REQUIRE(rep.iterations == 0);
}

TEST_CASE("two-dimensional hand-factored system", "[newton]") {
    // x+y=3, xy=2  ->  roots (2,1) and (1,2)
    auto f = [](const Vec& v) -> Vec {
        Vec r(2);
        r << v[0] + v[1] - 3.0, v[0] * v[1] - 2.0;
        return r;
    };
    Vec x0(2);
    x0 << 2.5, 0.9;
    auto rep = attraj::newton_solve(f, x0);
    REQUIRE(rep.converged);
    bool root_a = std::abs(rep.root[0] - 2.0) < 1e-8 && std::abs(rep.root[1] - 1.0) < 1e-8;
    bool root_b = std::abs(rep.root[0] - 1.0) < 1e-8 && std::abs(rep.root[1] - 2.0) < 1e-8;
    REQUIRE((root_a || root_b));

    double n0 = f(x0).lpNorm<Eigen::Infinity>();
    REQUIRE(rep.final_residual_norm <= n0);
}

TEST_CASE("singular Jacobian is detected", "[newton]") {
    auto f = [](const Vec& v) -> Vec {
        Vec r(2);
        r << v[0] + v[1], v[0] + v[1];
        return r;
    };
    Vec x0(2);
    x0 << 1.0, 1.0;
    auto rep = attraj::newton_solve(f, x0);
    REQUIRE_FALSE(rep.converged);
    REQUIRE(rep.failure == NewtonFailure::singular_jacobian);
}

TEST_CASE("no descent when halvings are exhausted", "[newton]") {
    auto f = [](const Vec& x) -> Vec { return vec1(std::atan(10.0 * x[0])); };
    NewtonOptions opt;
    opt.max_halvings = 0;  // full Newton overshoots atan from far away
    auto rep = attraj::newton_solve(f, vec1(2.0), opt);
    REQUIRE_FALSE(rep.converged);
    REQUIRE(rep.failure == NewtonFailure::no_descent);
}

TEST_CASE("evaluation failure at the start point", "[newton]") {
    auto f = [](const Vec&) -> Vec {
        throw attraj::NonFiniteEvaluation("boom");
        return Vec();
    };
    auto rep = attraj::newton_solve(f, vec1(1.0));
    REQUIRE_FALSE(rep.converged);
    REQUIRE(rep.failure == NewtonFailure::non_finite);
}

TEST_CASE("max iterations reported", "[newton]") {
    // flat-ish function, slow progress with a tight budget
    auto f = [](const Vec& x) -> Vec { return vec1(std::atan(10.0 * x[0])); };
    NewtonOptions opt;
    opt.max_iters = 2;
    auto rep = attraj::newton_solve(f, vec1(50.0), opt);
    REQUIRE_FALSE(rep.converged);
    REQUIRE(rep.failure == NewtonFailure::max_iters);
}
