#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "attraj/errors.hpp"
#include "attraj/integrate.hpp"
#include "attraj/newton.hpp"

namespace attraj {

/// Boundary value problem in extremal form. The flow variable is
/// z = (x,p) of size 2*state_dim, propagated in physical time by `field`.
/// Unknowns are a costate parameter block q (mapped to p(0) by
/// `costate_map`), the free final time t_f, and node_count interior full
/// states. Squareness requires boundary_dim == costate_dim + 1 so that
/// boundary rows + matching rows == unknowns.
struct BvpSpec {
    int state_dim = 0;    // dimension of x (z is twice this)
    int costate_dim = 0;  // dimension of the unknown block q
    int boundary_dim = 0; // rows returned by `boundary`
    int node_count = 0;   // N interior nodes (N matching blocks)

    // dz/dt in physical time; lambda is the continuation context
    std::function<void(double t, const Vec& z, Vec& dz, double lambda)> field;
    // boundary + transversality residual rows
    std::function<Vec(const Vec& z0, const Vec& zf, double tf, double lambda)> boundary;
    // q -> p(0); identity when empty
    std::function<Vec(const Vec& q)> costate_map;

    // admissible final-time window; trial points outside are rejected as
    // infeasible so line searches cannot wander onto pathological arcs
    double tf_min = 0.0;
    double tf_max = std::numeric_limits<double>::infinity();

    IntegratorOptions integ;

    int unknown_dim() const { return costate_dim + 1 + 2 * state_dim * node_count; }
    int residual_dim() const { return boundary_dim + 2 * state_dim * node_count; }
};

/// Flat layout of the shooting unknowns: [q; t_f; z_1; ...; z_N].
/// Node i sits at t_i = i/(N+1) * t_f (uniform placement).
struct ShootingUnknowns {
    Vec q;
    double tf = 0.0;
    std::vector<Vec> nodes;

    static ShootingUnknowns unpack(const BvpSpec& spec, const Vec& Z) {
        ShootingUnknowns u;
        u.q = Z.head(spec.costate_dim);
        u.tf = Z[spec.costate_dim];
        const int nz = 2 * spec.state_dim;
        for (int i = 0; i < spec.node_count; ++i)
            u.nodes.push_back(Z.segment(spec.costate_dim + 1 + i * nz, nz));
        return u;
    }

    Vec pack(const BvpSpec& spec) const {
        Vec Z(spec.unknown_dim());
        Z.head(spec.costate_dim) = q;
        Z[spec.costate_dim] = tf;
        const int nz = 2 * spec.state_dim;
        for (int i = 0; i < spec.node_count; ++i)
            Z.segment(spec.costate_dim + 1 + i * nz, nz) = nodes[i];
        return Z;
    }
};

namespace detail {

template <class FieldFn>
Vec propagate_segment(FieldFn&& field, const Vec& z_start, double t0, double t1,
                      const IntegratorOptions& integ, int segment) {
    const double dt = t1 - t0;
    try {
        return integrate_final(
            [&](double s, const Vec& z, Vec& dz) {
                field(t0 + s * dt, z, dz);
                dz *= dt;
            },
            z_start, integ);
    } catch (const Error& e) {
        throw PropagationError(segment, e.what());
    }
}

}  // namespace detail

/// Builds the square residual map for the given spec at fixed initial
/// state and continuation parameter. Residual layout: boundary rows
/// first, then one matching block per interior node (propagated end of
/// the previous segment minus the node unknowns).
inline std::function<Vec(const Vec&)> assemble_residual(const BvpSpec& spec, const Vec& x0,
                                                        double lambda) {
    if (spec.boundary_dim != spec.costate_dim + 1)
        throw ValidationError("BvpSpec not square: boundary_dim must equal costate_dim+1");
    if (static_cast<int>(x0.size()) != spec.state_dim)
        throw ValidationError("fixed initial state has wrong dimension");

    return [spec, x0, lambda](const Vec& Z) -> Vec {
        auto u = ShootingUnknowns::unpack(spec, Z);
        if (!(u.tf > 0.0) || !Z.allFinite())
            throw InfeasibleGuess("non-positive final time or non-finite unknowns");
        if (u.tf < spec.tf_min || u.tf > spec.tf_max)
            throw InfeasibleGuess("final time outside the admissible window");

        const int nz = 2 * spec.state_dim;
        const int nseg = spec.node_count + 1;
        Vec p0 = spec.costate_map ? spec.costate_map(u.q) : u.q;
        Vec z0(nz);
        z0 << x0, p0;

        auto fld = [&](double t, const Vec& z, Vec& dz) { dz.resize(nz); spec.field(t, z, dz, lambda); };

        Vec res(spec.residual_dim());
        Vec z_start = z0;
        Vec z_end;
        for (int i = 0; i < nseg; ++i) {
            double t0 = u.tf * static_cast<double>(i) / nseg;
            double t1 = u.tf * static_cast<double>(i + 1) / nseg;
            z_end = detail::propagate_segment(fld, z_start, t0, t1, spec.integ, i);
            if (i < spec.node_count) {
                res.segment(spec.boundary_dim + i * nz, nz) = z_end - u.nodes[i];
                z_start = u.nodes[i];
            }
        }
        res.head(spec.boundary_dim) = spec.boundary(z0, z_end, u.tf, lambda);
        return res;
    };
}

struct BvpSolution {
    NewtonReport report;
    std::vector<TrajectorySample> trajectory;  // physical time, all segments chained
};

/// Re-integrates the converged unknowns densely (at least min_samples
/// points, uniformly refined by restarting the integrator sample to
/// sample inside each shooting segment).
inline std::vector<TrajectorySample> integrate_dense(const BvpSpec& spec, const Vec& x0,
                                                     double lambda, const Vec& Z,
                                                     int min_samples = 0) {
    auto u = ShootingUnknowns::unpack(spec, Z);
    const int nz = 2 * spec.state_dim;
    const int nseg = spec.node_count + 1;
    Vec p0 = spec.costate_map ? spec.costate_map(u.q) : u.q;
    Vec z0(nz);
    z0 << x0, p0;

    auto fld = [&](double t, const Vec& z, Vec& dz) { spec.field(t, z, dz, lambda); };

    std::vector<TrajectorySample> traj;
    Vec z_start = z0;
    if (min_samples <= 0) {
        for (int i = 0; i < nseg; ++i) {
            double t0 = u.tf * static_cast<double>(i) / nseg;
            double t1 = u.tf * static_cast<double>(i + 1) / nseg;
            double dt = t1 - t0;
            auto r = integrate(
                [&](double s, const Vec& z, Vec& dz) {
                    fld(t0 + s * dt, z, dz);
                    dz *= dt;
                },
                z_start, spec.integ);
            for (const auto& s : r.samples) {
                if (!traj.empty() && s.t == 0.0) continue;  // skip duplicated joint
                traj.push_back({t0 + s.t * dt, s.y});
            }
            z_start = (i < spec.node_count) ? u.nodes[i] : r.final_state;
        }
        return traj;
    }

    // Fixed sample count: globally uniform sample times independent of the
    // node layout; shooting joints inside a sample interval restart the
    // propagation from the node unknowns.
    auto advance = [&](Vec z, double ta, double tb) {
        if (tb - ta < 1e-15 * u.tf) return z;
        return integrate_final(
            [&](double s, const Vec& z_, Vec& dz) {
                fld(ta + s * (tb - ta), z_, dz);
                dz *= (tb - ta);
            },
            z, spec.integ);
    };
    traj.push_back({0.0, z_start});
    int next_node = 0;
    for (int k = 0; k < min_samples; ++k) {
        double ta = u.tf * static_cast<double>(k) / min_samples;
        double tb = u.tf * static_cast<double>(k + 1) / min_samples;
        while (next_node < spec.node_count) {
            double tn = u.tf * static_cast<double>(next_node + 1) / nseg;
            if (tn <= ta + 1e-15 * u.tf) {
                z_start = u.nodes[next_node++];
            } else if (tn < tb - 1e-15 * u.tf) {
                z_start = advance(z_start, ta, tn);
                z_start = u.nodes[next_node++];
                ta = tn;
            } else {
                break;
            }
        }
        z_start = advance(z_start, ta, tb);
        traj.push_back({tb, z_start});
    }
    return traj;
}

/// Assembles the residual and runs damped Newton from the guess; on
/// success the dense trajectory at the root is attached.
inline BvpSolution solve_bvp(const BvpSpec& spec, const Vec& x0, double lambda,
                             const Vec& guess, const NewtonOptions& nopt = {}) {
    if (static_cast<int>(guess.size()) != spec.unknown_dim())
        throw ValidationError("shooting guess has wrong dimension");
    auto F = assemble_residual(spec, x0, lambda);
    BvpSolution sol;
    sol.report = newton_solve(F, guess, nopt);
    if (sol.report.converged)
        sol.trajectory = integrate_dense(spec, x0, lambda, sol.report.root);
    return sol;
}

}  // namespace attraj
