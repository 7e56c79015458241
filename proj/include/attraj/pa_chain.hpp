#pragma once

#include <chrono>
#include <cmath>

#include "attraj/chain.hpp"
#include "attraj/controls.hpp"
#include "attraj/scenario.hpp"

namespace attraj {

/// Continuation stages of the 11-dim pull-up problem with multiple
/// shooting. Unknowns: (p(0) in R^11, tf, N interior nodes of dim 22);
/// residual: 11 boundary rows + H + 22N matching rows.
class PaChainProblem {
  public:
    enum class Stage { lambda1, lambda2, lambda4, lambda5, Kp, lambda3 };

    struct Ctx {
        double l3 = 0.0, l4 = 0.0, l5 = 0.0, Kp = 0.0;
    };

    /// The scenario must already be expressed in the solve frame.
    explicit PaChainProblem(const Scenario& scn)
        : scn_(scn), g_(scn.env.g_vec0), w_(scn.w()), r0_(scn.r0) {
        try {
            p0_ = solve_p0(scn.v0(), w_, g_, scn.vehicle.a);
        } catch (const DegenerateTransfer&) {
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

    Vec initial_state(double lambda1) const {
        Vec x0(pa::NX);
        x0.segment<3>(pa::RX) = r0_;
        x0.segment<3>(pa::VX) = scn_.v0();
        x0[pa::TH] = p0_.theta_star * (1.0 - lambda1) + scn_.theta0 * lambda1;
        x0[pa::PS] = p0_.psi_star * (1.0 - lambda1) + scn_.psi0 * lambda1;
        x0[pa::PH] = scn_.phi0 * lambda1;
        x0[pa::WX] = scn_.wx0 * lambda1;
        x0[pa::WY] = scn_.wy0 * lambda1;
        return x0;
    }

    Vec2 control(const Vec& z, const Ctx& c) const {
        Vec2 h(scn_.vehicle.b * z[pa::NX + pa::WY], -scn_.vehicle.b * z[pa::NX + pa::WX]);
        return control_pa(h, (1.0 - c.l3) * scn_.solver.K);
    }

    double hamiltonian(const Vec& z, const Ctx& c) const {
        Vec2 u = control(z, c);
        return hamiltonian_pa(z.head(pa::NX), z.tail(pa::NX), u, -1.0, scn_.vehicle,
                              scn_.env, scn_.solver.K, c.l3, c.l4, c.l5, c.Kp, r0_);
    }

    void extremal_field(const Vec& z, Vec& dz, const Ctx& c) const {
        Vec2 u = control(z, c);
        const Vec x = z.head(pa::NX);
        const Vec p = z.tail(pa::NX);
        Vec dx(pa::NX), dp(pa::NX);
        if (std::abs(std::cos(x[pa::PS])) < kEpsSing) {
            euler_smoothed_pa(x, p, u[0], u[1], scn_.vehicle, scn_.env, c.l4, c.l5, c.Kp,
                              r0_, dx, dp);
        } else {
            dynamics_pa(x, u[0], u[1], scn_.vehicle, scn_.env, c.l4, r0_, dx);
            adjoint_pa(x, p, u[0], u[1], scn_.vehicle, scn_.env, c.l4, c.l5, c.Kp, r0_, dp);
        }
        dz.resize(2 * pa::NX);
        dz << dx, dp;
    }

    /// Log-uniform internal grid of the final cost-blend stage (the
    /// deformation concentrates near lambda3 = 1).
    double lambda3_of(double s) const { return 1.0 - std::pow(kL3Floor, s); }

    Ctx stage_ctx(Stage stage, double lambda, double Kp_cur) const {
        Ctx c;
        c.Kp = Kp_cur;
        switch (stage) {
            case Stage::lambda1:
            case Stage::lambda2: break;
            case Stage::lambda4: c.l4 = lambda; break;
            case Stage::lambda5: c.l4 = 1.0; c.l5 = lambda; break;
            case Stage::Kp:
            case Stage::lambda3: c.l4 = 1.0; c.l5 = 1.0; break;
        }
        if (stage == Stage::lambda3) c.l3 = lambda3_of(lambda);
        return c;
    }

    BvpSpec make_spec(Stage stage, const Vec3& exit_euler, const Vec2& exit_omega,
                      double Kp_cur) const {
        BvpSpec spec;
        spec.state_dim = pa::NX;
        spec.costate_dim = pa::NX;
        spec.boundary_dim = pa::NX + 1;
        spec.node_count = scn_.solver.N;
        spec.integ = scn_.solver.integ;
        spec.tf_min = 0.05 * p0_.t_f;
        spec.tf_max = 5.0 * p0_.t_f;
        const PaChainProblem* self = this;
        spec.field = [self, stage, Kp_cur](double, const Vec& z, Vec& dz, double lambda) {
            self->extremal_field(z, dz, self->stage_ctx(stage, lambda, Kp_cur));
        };
        spec.boundary = [self, stage, Kp_cur, exit_euler, exit_omega](
                            const Vec&, const Vec& zf, double, double lambda) -> Vec {
            return self->boundary_rows(stage, zf, lambda, exit_euler, exit_omega, Kp_cur);
        };
        return spec;
    }

    Vec boundary_rows(Stage stage, const Vec& zf, double lambda, const Vec3& exit_euler,
                      const Vec2& exit_omega, double Kp_cur) const {
        const double thf = scn_.theta_f, psf = scn_.psi_f;
        const double vs = scn_.v0_mag;
        const double vel1 =
            (zf[pa::VZ] * std::sin(psf) + zf[pa::VY] * std::cos(thf) * std::cos(psf)) / vs;
        const double vel2 = (zf[pa::VZ] * std::sin(thf) - zf[pa::VX] * std::cos(thf)) / vs;
        const double trc =
            zf[pa::NX + pa::VY] * std::sin(psf) -
            (zf[pa::NX + pa::VX] * std::sin(thf) * std::cos(psf) +
             zf[pa::NX + pa::VZ] * std::cos(thf) * std::cos(psf));
        const Ctx c = stage_ctx(stage, lambda, Kp_cur);
        Vec r(pa::NX + 1);
        if (stage == Stage::lambda1) {
            r << vel1, vel2, trc,
                zf[pa::NX + pa::RX], zf[pa::NX + pa::RY], zf[pa::NX + pa::RZ],
                zf[pa::NX + pa::WX], zf[pa::NX + pa::WY],
                zf[pa::NX + pa::TH], zf[pa::NX + pa::PS], zf[pa::NX + pa::PH],
                hamiltonian(zf, c);
            return r;
        }
        const double lam2 = (stage == Stage::lambda2) ? lambda : 1.0;
        Vec3 Et = (1.0 - lam2) * exit_euler +
                  lam2 * Vec3(scn_.theta_f, scn_.psi_f, scn_.phi_f);
        Vec2 wt = (1.0 - lam2) * exit_omega + lam2 * Vec2(scn_.wxf, scn_.wyf);
        r << vel1, vel2, trc,
            zf[pa::TH] - Et[0], zf[pa::PS] - Et[1], zf[pa::PH] - Et[2],
            zf[pa::WX] - wt[0], zf[pa::WY] - wt[1],
            zf[pa::NX + pa::RX], zf[pa::NX + pa::RY], zf[pa::NX + pa::RZ],
            hamiltonian(zf, c);
        return r;
    }

    /// Seed unknowns at the order-zero embedding: zero attitude/position
    /// costates, p_v from the closed form, nodes on the embedded flow.
    Vec seed_unknowns() const {
        const int nz = 2 * pa::NX;
        const int N = scn_.solver.N;
        Vec Z(pa::NX + 1 + N * nz);
        Vec p0c = Vec::Zero(pa::NX);
        p0c.segment<3>(pa::VX) = p0_.p_v;
        Z.head(pa::NX) = p0c;
        Z[pa::NX] = p0_.t_f;

        Vec z(nz);
        z << initial_state(0.0), p0c;
        Ctx c0;  // all homotopy parameters at zero
        for (int i = 0; i < N; ++i) {
            const double dt = p0_.t_f / (N + 1);
            z = integrate_final(
                [&](double, const Vec& zz, Vec& dz) {
                    extremal_field(zz, dz, c0);
                    dz *= dt;
                },
                z, scn_.solver.integ);
            Z.segment(pa::NX + 1 + i * nz, nz) = z;
        }
        return Z;
    }

    /// Max nondimensional constraint violation along a trajectory at the
    /// fully blended dynamics (lambda4 = 1).
    double max_violation(const std::vector<TrajectorySample>& traj, double* max_nbar = nullptr,
                         double* max_qbar = nullptr, double* arc_fraction = nullptr) const {
        double viol = 0.0, mn = 0.0, mq = 0.0;
        int arc = 0, tot = 0;
        for (const auto& s : traj) {
            const Vec3 r = s.y.segment<3>(pa::RX);
            const Vec3 v = s.y.segment<3>(pa::VX);
            double rho = atmosphere_rho(r, 1.0, scn_.env, r0_);
            AeroForces af =
                aero_forces(v, s.y[pa::TH], s.y[pa::PS], scn_.vehicle, rho, scn_.env.g_std);
            mn = std::max(mn, af.nbar);
            mq = std::max(mq, af.qbar);
            viol = std::max({viol, af.nbar / scn_.vehicle.n_max - 1.0,
                             af.qbar / scn_.vehicle.q_max - 1.0});
            ++tot;
            if (af.nbar > 0.95 * scn_.vehicle.n_max) ++arc;
        }
        if (max_nbar) *max_nbar = mn;
        if (max_qbar) *max_qbar = mq;
        if (arc_fraction) *arc_fraction = tot ? static_cast<double>(arc) / tot : 0.0;
        return viol;
    }

    const Scenario& scenario() const { return scn_; }

  private:
    static constexpr double kL3Floor = 3e-5;  // (1-lambda3) at stage end

    Scenario scn_;
    Vec3 g_, w_, r0_;
    OrderZeroSolution p0_;
    bool p0_degenerate_ = false;
};

/// Transforms a scenario into the frame selected by the yaw-balancing
/// criterion (rotations about the local vertical leave gravity and the
/// release position invariant in direction; all vectors and Euler angles
/// are rotated consistently).
inline Scenario apply_frame(const Scenario& scn, const FrameChange& fc) {
    Scenario out = scn;
    const Mat3& Q = fc.Q;
    Vec3 v0n = Q * scn.v0();
    out.v0_mag = v0n.norm();
    out.psi_v0 = std::asin(std::clamp(-v0n[1] / out.v0_mag, -1.0, 1.0));
    out.theta_v0 = std::atan2(v0n[0], v0n[2]);
    out.r0 = Q * scn.r0;
    out.env.g_vec0 = Q * scn.env.g_vec0;
    EulerAngles e0 = rotate_euler(Q, scn.theta0, scn.psi0, scn.phi0);
    out.theta0 = e0.theta;
    out.psi0 = e0.psi;
    out.phi0 = e0.phi;
    EulerAngles ef = rotate_euler(Q, scn.theta_f, scn.psi_f, scn.phi_f);
    out.theta_f = ef.theta;
    out.psi_f = ef.psi;
    out.phi_f = ef.phi;
    return out;
}

/// Full solve of the 11-dim problem: frame preconditioning, order-zero
/// embedding, PC continuation over lambda1, lambda2, lambda4, lambda5,
/// the multiplicative Kp ramp (stopped once the constraint violation
/// drops below eps_c), and the optional final cost blend.
inline ChainResult run_pa_chain(const Scenario& raw_scn) {
    using Stage = PaChainProblem::Stage;
    using clock = std::chrono::steady_clock;

    ChainResult out;
    out.frame = select_frame(raw_scn.v0(), raw_scn.theta0, raw_scn.psi0, raw_scn.theta_f,
                             raw_scn.psi_f);
    Scenario scn = apply_frame(raw_scn, out.frame);
    PaChainProblem prob(scn);
    out.p0 = prob.order_zero();
    out.p0_degenerate = prob.p0_degenerate();

    const NewtonOptions nopt = scn.solver.newton;
    const ContinuationOptions copt = scn.solver.cont;
    Vec3 exit_E = Vec3::Zero();
    Vec2 exit_w = Vec2::Zero();
    Vec Z = prob.seed_unknowns();
    double Kp_cur = scn.solver.Kp0;
    double lam3_ctx = 0.0;

    auto stage_solver = [&](Stage stage) {
        BvpSpec spec = prob.make_spec(stage, exit_E, exit_w, Kp_cur);
        return [&prob, spec = std::move(spec), stage, nopt](const Vec& Zg, double lambda) {
            Vec x0 = prob.initial_state(stage == Stage::lambda1 ? lambda : 1.0);
            auto F = assemble_residual(spec, x0, lambda);
            return newton_solve(F, Zg, nopt);
        };
    };

    auto run_stage = [&](Stage stage, const std::string& id) -> bool {
        auto solve_at = stage_solver(stage);
        StageResult sr;
        sr.id = id;
        auto t0 = clock::now();
        bool ok = false;
        try {
            sr.trace = pc_continuation(solve_at, Z, copt, scn.solver.hs);
            ok = sr.trace.completed();
            if (!sr.trace.steps.empty()) Z = sr.trace.last_unknowns();
        } catch (const BadSeed&) {
            ok = false;
        }
        sr.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();

        if (ok && stage == Stage::lambda1) {
            BvpSpec spec = prob.make_spec(stage, exit_E, exit_w, Kp_cur);
            auto traj = integrate_dense(spec, prob.initial_state(1.0), 1.0, Z);
            const Vec& zf = traj.back().y;
            exit_E = Vec3(zf[pa::TH], zf[pa::PS], zf[pa::PH]);
            exit_w = Vec2(zf[pa::WX], zf[pa::WY]);
            sr.exit_euler = exit_E;
            sr.exit_omega = exit_w;
        }
        if (stage == Stage::lambda3) {
            double s_reached = sr.trace.steps.empty() ? 0.0 : sr.trace.last_lambda();
            out.lambda3_reached = prob.lambda3_of(s_reached);
            lam3_ctx = s_reached;
            out.suboptimal = !ok;
            ok = !sr.trace.steps.empty();
        }
        out.stages.push_back(std::move(sr));
        return ok;
    };

    for (auto [stage, id] : {std::pair{Stage::lambda1, "lambda1"},
                             std::pair{Stage::lambda2, "lambda2"},
                             std::pair{Stage::lambda4, "lambda4"},
                             std::pair{Stage::lambda5, "lambda5"}}) {
        if (!run_stage(stage, id)) {
            out.failure_stage = id;
            return out;
        }
    }

    // Multiplicative Kp ramp embedded as a sub-continuation in
    // mu = log(Kp/Kp0)/log(Kp1/Kp0); a factor-2 step is the base grid.
    {
        StageResult sr;
        sr.id = "Kp";
        auto t0 = clock::now();
        const double ratio = scn.solver.Kp1 / scn.solver.Kp0;
        const double dmu0 = std::min(1.0, std::log(2.0) / std::log(ratio));
        auto Kp_of = [&](double mu) { return scn.solver.Kp0 * std::pow(ratio, mu); };

        auto violation_at = [&](const Vec& Zc, double Kp_val) {
            BvpSpec spec = prob.make_spec(Stage::Kp, exit_E, exit_w, Kp_val);
            auto traj = integrate_dense(spec, prob.initial_state(1.0), 1.0, Zc, 200);
            return prob.max_violation(traj);
        };

        double mu = 0.0, dmu = dmu0;
        bool feasible = violation_at(Z, Kp_cur) < scn.solver.eps_c;
        sr.trace.steps.push_back({0.0, Z, 0.0, 0});
        bool stalled = false;
        while (!feasible && mu < 1.0) {
            if (sr.trace.solves >= copt.max_solves) { stalled = true; break; }
            dmu = std::min(dmu, 1.0 - mu);
            double mt = (1.0 - (mu + dmu) < 1e-13) ? 1.0 : mu + dmu;
            double Kp_try = Kp_of(mt);
            BvpSpec spec = prob.make_spec(Stage::Kp, exit_E, exit_w, Kp_try);
            auto F = assemble_residual(spec, prob.initial_state(1.0), 0.0);
            NewtonReport rep = newton_solve(F, Z, nopt);
            ++sr.trace.solves;
            if (rep.converged) {
                mu = mt;
                Z = rep.root;
                Kp_cur = Kp_try;
                sr.trace.steps.push_back({mu, Z, rep.final_residual_norm, rep.iterations});
                feasible = violation_at(Z, Kp_cur) < scn.solver.eps_c;
                dmu = std::min(dmu * copt.growth, dmu0);
            } else {
                dmu *= copt.shrink;
                if (dmu < 1e-3 * dmu0) { stalled = true; break; }
            }
        }
        sr.trace.outcome =
            feasible ? ContinuationOutcome::completed : ContinuationOutcome::stalled;
        sr.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
        out.stages.push_back(std::move(sr));
        out.Kp_reached = Kp_cur;
        if (!feasible) {
            out.failure_stage = "Kp";
            (void)stalled;
            return out;
        }
    }

    if (scn.solver.lambda3) {
        if (!run_stage(Stage::lambda3, "lambda3")) {
            out.failure_stage = "lambda3";
            return out;
        }
    }

    out.converged = true;
    out.unknowns = Z;
    out.tf = Z[pa::NX];

    BvpSpec final_spec = prob.make_spec(scn.solver.lambda3 ? Stage::lambda3 : Stage::Kp,
                                        exit_E, exit_w, Kp_cur);
    out.trajectory = integrate_dense(final_spec, prob.initial_state(1.0), lam3_ctx, Z, 512);
    PaChainProblem::Ctx cf = prob.stage_ctx(
        scn.solver.lambda3 ? Stage::lambda3 : Stage::Kp, lam3_ctx, Kp_cur);  // maps s itself
    for (const auto& s : out.trajectory)
        out.max_abs_H = std::max(out.max_abs_H, std::abs(prob.hamiltonian(s.y, cf)));
    out.max_violation = prob.max_violation(out.trajectory, &out.max_nbar, &out.max_qbar,
                                           &out.boundary_arc_fraction);
    return out;
}

}  // namespace attraj
