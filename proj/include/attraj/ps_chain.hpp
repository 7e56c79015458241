#pragma once

#include <chrono>
#include <cmath>

#include "attraj/chain.hpp"
#include "attraj/controls.hpp"
#include "attraj/scenario.hpp"
#include "attraj/vehicle.hpp"

namespace attraj {

/// Continuation stages of the 8-dim maneuver problem. The shooting system
/// is kept square by confining the velocity costate to the plane
/// orthogonal to the target direction w, which enforces the velocity
/// transversality row exactly (the order-zero embedding satisfies it with
/// <e*, w> = 0). Unknowns: (xi1, xi2, p_theta, p_psi, p_phi, p_wx, p_wy, tf).
class PsChainProblem {
  public:
    enum class Stage { lambda1, lambda2, lambda3 };

    PsChainProblem(const Scenario& scn)
        : scn_(scn), g_(scn.env.g_vec0), w_(scn.w()) {
        std::tie(d1_, d2_) = detail::orthonormal_complement(w_);
        try {
            p0_ = solve_p0(scn.v0(), w_, g_, scn.vehicle.a);
        } catch (const DegenerateTransfer&) {
            // v0 already along w: seed with the target-aligned attitude and
            // a short positive time; the lambda1 corrector takes over.
            p0_degenerate_ = true;
            p0_.e_star = w_;
            p0_.t_f = 1.0;
            p0_.p_v = Vec3::Zero();
            p0_.psi_star = std::asin(std::clamp(-w_[1], -1.0, 1.0));
            p0_.theta_star = std::atan2(w_[0], w_[2]);
        }
    }

    const OrderZeroSolution& order_zero() const { return p0_; }
    bool p0_degenerate() const { return p0_degenerate_; }

    Vec seed_unknowns() const {
        Vec Z(8);
        Z << p0_.p_v.dot(d1_), p0_.p_v.dot(d2_), 0.0, 0.0, 0.0, 0.0, 0.0, p0_.t_f;
        return Z;
    }

    /// Initial state of the lambda1 blend (lambda1=1 gives the scenario state).
    Vec initial_state(double lambda1) const {
        Vec x0(ps::NX);
        x0.segment<3>(ps::VX) = scn_.v0();
        auto blend = [lambda1](double star, double val) {
            return star * (1.0 - lambda1) + val * lambda1;
        };
        x0[ps::TH] = blend(p0_.theta_star, scn_.theta0);
        x0[ps::PS] = blend(p0_.psi_star, scn_.psi0);
        x0[ps::PH] = blend(0.0, scn_.phi0);
        x0[ps::WX] = blend(0.0, scn_.wx0);
        x0[ps::WY] = blend(0.0, scn_.wy0);
        return x0;
    }

    /// The final stage walks a log-uniform grid in the effective control
    /// weight (1-lambda3)K: the deformation concentrates near lambda3 = 1,
    /// where uniform lambda steps starve.
    double lambda3_of(double s) const { return 1.0 - std::pow(kL3Floor, s); }

    /// lambda1/lambda2 use the square-constrained energy law; the final
    /// stage interpolates toward minimum time through the exact
    /// disk-constrained maximizer with weight K(1-lambda3), whose flow
    /// keeps the autonomous Hamiltonian at zero (the smooth-blend variant
    /// control_lambda3 drifts H by O(K(1-lambda3) log |Phi|max/|Phi|min)
    /// and never meets the free-time condition). Both laws agree at the
    /// stage seam while the control is unsaturated, and both tend to
    /// Phi/|Phi| as lambda3 -> 1.
    Vec2 control(const Vec& z, double lambda3) const {
        Vec2 p_omega(z[ps::NX + ps::WX], z[ps::NX + ps::WY]);
        if (lambda3 == 0.0) return control_pr(p_omega, scn_.solver.K, scn_.vehicle.b);
        Vec2 h(scn_.vehicle.b * p_omega[1], -scn_.vehicle.b * p_omega[0]);
        return control_pa(h, scn_.solver.K * (1.0 - lambda3));
    }

    double hamiltonian(const Vec& z, double lambda3) const {
        Vec2 u = control(z, lambda3);
        return hamiltonian_ps(z.head(ps::NX), z.tail(ps::NX), u, -1.0, scn_.vehicle, g_,
                              scn_.solver.K, lambda3);
    }

    /// Extremal field dz/dt; lambda3 = 0 outside the final stage.
    void extremal_field(const Vec& z, Vec& dz, double lambda3) const {
        Vec2 u = control(z, lambda3);
        const Vec x = z.head(ps::NX);
        const Vec p = z.tail(ps::NX);
        Vec dx(ps::NX), dp(ps::NX);
        if (std::abs(std::cos(x[ps::PS])) < kEpsSing) {
            euler_smoothed(x, p, u[0], u[1], scn_.vehicle, g_, dx, dp);
        } else {
            dynamics_ps(x, u[0], u[1], scn_.vehicle, g_, dx);
            adjoint_ps(x, p, u[0], u[1], scn_.vehicle, g_, dp);
        }
        dz.resize(2 * ps::NX);
        dz << dx, dp;
    }

    /// lambda1/lambda2 use single shooting; the final cost-blend stage
    /// needs interior nodes, whose conditioning carries the developing
    /// singular arc much further toward the minimum-time limit.
    BvpSpec make_spec(Stage stage, const Vec3& exit_euler, const Vec2& exit_omega) const {
        BvpSpec spec;
        spec.state_dim = ps::NX;
        spec.costate_dim = 7;
        spec.boundary_dim = 8;
        spec.node_count = (stage == Stage::lambda3) ? scn_.solver.N : 0;
        spec.integ = scn_.solver.integ;
        spec.tf_min = 0.05 * p0_.t_f;
        spec.tf_max = 5.0 * p0_.t_f;
        Vec3 d1 = d1_, d2 = d2_;
        spec.costate_map = [d1, d2](const Vec& q) -> Vec {
            Vec p0v(ps::NX);
            p0v.segment<3>(ps::VX) = q[0] * d1 + q[1] * d2;
            p0v.segment<5>(ps::TH) = q.segment<5>(2);
            return p0v;
        };
        const PsChainProblem* self = this;
        spec.field = [self, stage](double, const Vec& z, Vec& dz, double lambda) {
            self->extremal_field(z, dz,
                                 stage == Stage::lambda3 ? self->lambda3_of(lambda) : 0.0);
        };
        spec.boundary = [self, stage, exit_euler, exit_omega](const Vec&, const Vec& zf,
                                                              double, double lambda) -> Vec {
            return self->boundary_rows(stage, zf, lambda, exit_euler, exit_omega);
        };
        return spec;
    }

    Vec boundary_rows(Stage stage, const Vec& zf, double lambda, const Vec3& exit_euler,
                      const Vec2& exit_omega) const {
        const double thf = scn_.theta_f, psf = scn_.psi_f;
        // velocity-direction rows nondimensionalized by the release speed
        // so all residual rows carry comparable units
        const double vs = scn_.v0_mag;
        const double vel1 = (zf[ps::VZ] * std::sin(psf) +
                             zf[ps::VY] * std::cos(thf) * std::cos(psf)) / vs;
        const double vel2 = (zf[ps::VZ] * std::sin(thf) - zf[ps::VX] * std::cos(thf)) / vs;
        Vec r(8);
        if (stage == Stage::lambda1) {
            r << zf[ps::NX + ps::WX], zf[ps::NX + ps::WY], zf[ps::NX + ps::TH],
                zf[ps::NX + ps::PS], zf[ps::NX + ps::PH], hamiltonian(zf, 0.0), vel1, vel2;
            return r;
        }
        double lam2 = (stage == Stage::lambda2) ? lambda : 1.0;
        double lam3 = (stage == Stage::lambda3) ? lambda3_of(lambda) : 0.0;
        Vec3 Et = (1.0 - lam2) * exit_euler +
                  lam2 * Vec3(scn_.theta_f, scn_.psi_f, scn_.phi_f);
        Vec2 wt = (1.0 - lam2) * exit_omega + lam2 * Vec2(scn_.wxf, scn_.wyf);
        r << zf[ps::WX] - wt[0], zf[ps::WY] - wt[1], zf[ps::TH] - Et[0],
            zf[ps::PS] - Et[1], zf[ps::PH] - Et[2], vel1, vel2, hamiltonian(zf, lam3);
        return r;
    }

    const Scenario& scenario() const { return scn_; }
    const Vec3& gravity_vec() const { return g_; }

  private:
    static constexpr double kL3Floor = 3e-5;  // (1-lambda3) at stage end

    Scenario scn_;
    Vec3 g_, w_, d1_, d2_;
    OrderZeroSolution p0_;
    bool p0_degenerate_ = false;
};

/// Runs the lambda1 -> lambda2 -> (lambda3) continuation chain with single
/// shooting. A lambda3 stall is reported as a suboptimal but valid
/// solution; lambda1/lambda2 must complete.
inline ChainResult run_ps_chain(const Scenario& scn) {
    using Stage = PsChainProblem::Stage;
    using clock = std::chrono::steady_clock;
    PsChainProblem prob(scn);

    ChainResult out;
    out.p0 = prob.order_zero();
    out.p0_degenerate = prob.p0_degenerate();

    const NewtonOptions nopt = scn.solver.newton;
    const ContinuationOptions copt = scn.solver.cont;
    Vec3 exit_E = Vec3::Zero();
    Vec2 exit_w = Vec2::Zero();
    Vec Z = prob.seed_unknowns();
    double lam3_ctx = 0.0;

    auto run_stage = [&](Stage stage, const std::string& id) -> bool {
        BvpSpec spec = prob.make_spec(stage, exit_E, exit_w);
        auto solve_at = [&](const Vec& Zg, double lambda) {
            Vec x0 = prob.initial_state(stage == Stage::lambda1 ? lambda : 1.0);
            auto F = assemble_residual(spec, x0, lambda);
            return newton_solve(F, Zg, nopt);
        };
        StageResult sr;
        sr.id = id;
        auto t0 = clock::now();
        bool ok = false;
        try {
            sr.trace = (stage == Stage::lambda3)
                           ? pc_continuation(solve_at, Z, copt, scn.solver.hs)
                           : discrete_continuation(solve_at, Z, copt);
            ok = sr.trace.completed();
            if (!sr.trace.steps.empty()) Z = sr.trace.last_unknowns();
        } catch (const BadSeed&) {
            ok = false;
        }
        sr.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();

        if (ok && stage == Stage::lambda1) {
            // free-endpoint attitude seeds the lambda2 target blend
            auto traj = integrate_dense(spec, prob.initial_state(1.0), 1.0, Z);
            const Vec& zf = traj.back().y;
            exit_E = Vec3(zf[ps::TH], zf[ps::PS], zf[ps::PH]);
            exit_w = Vec2(zf[ps::WX], zf[ps::WY]);
            sr.exit_euler = exit_E;
            sr.exit_omega = exit_w;
        }
        if (stage == Stage::lambda3) {
            double s_reached = sr.trace.steps.empty() ? 0.0 : sr.trace.last_lambda();
            out.lambda3_reached = prob.lambda3_of(s_reached);
            lam3_ctx = s_reached;
            out.suboptimal = !ok;
            ok = !sr.trace.steps.empty();  // stall keeps the last good solution
        }
        out.stages.push_back(std::move(sr));
        return ok;
    };

    if (!run_stage(Stage::lambda1, "lambda1")) {
        out.failure_stage = "lambda1";
        return out;
    }
    if (!run_stage(Stage::lambda2, "lambda2")) {
        out.failure_stage = "lambda2";
        return out;
    }
    if (scn.solver.lambda3) {
        // seed the interior nodes of the final stage on the lambda2 root flow
        if (scn.solver.N > 0) {
            const int N = scn.solver.N;
            BvpSpec s2 = prob.make_spec(Stage::lambda2, exit_E, exit_w);
            Vec Zm(8 + 16 * N);
            Zm.head(8) = Z;
            Vec z(16);
            z << prob.initial_state(1.0), s2.costate_map(Z.head(7));
            for (int i = 0; i < N; ++i) {
                const double dt = Z[7] / (N + 1);
                z = integrate_final(
                    [&](double, const Vec& zz, Vec& dz) {
                        s2.field(0.0, zz, dz, 1.0);
                        dz *= dt;
                    },
                    z, scn.solver.integ);
                Zm.segment(8 + 16 * i, 16) = z;
            }
            Z = Zm;
        }
        if (!run_stage(Stage::lambda3, "lambda3")) {
            out.failure_stage = "lambda3";
            return out;
        }
    }

    out.converged = true;
    out.unknowns = Z;
    out.tf = Z[7];

    BvpSpec final_spec = prob.make_spec(scn.solver.lambda3 ? Stage::lambda3 : Stage::lambda2,
                                        exit_E, exit_w);
    // lam3_ctx is the driver parameter of the final stage; the physical
    // cost-blend value is lambda3_reached
    out.trajectory =
        integrate_dense(final_spec, prob.initial_state(1.0), lam3_ctx, Z, 512);
    const double l3_phys = scn.solver.lambda3 ? out.lambda3_reached : 0.0;
    for (const auto& s : out.trajectory)
        out.max_abs_H = std::max(out.max_abs_H, std::abs(prob.hamiltonian(s.y, l3_phys)));
    return out;
}

}  // namespace attraj
