#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "attraj/continuation.hpp"
#include "attraj/frame.hpp"
#include "attraj/p0.hpp"
#include "attraj/shooting.hpp"

namespace attraj {

struct StageResult {
    std::string id;  // lambda1 | lambda2 | lambda3 | lambda4 | lambda5 | Kp
    ContinuationTrace trace;
    double wall_time_s = 0.0;
    // free-endpoint attitude recorded when the initial-condition stage exits
    std::optional<Eigen::Vector3d> exit_euler;
    std::optional<Eigen::Vector2d> exit_omega;
};

struct ChainResult {
    bool converged = false;
    bool suboptimal = false;        // final cost-blend stage stalled short of 1
    std::string failure_stage;      // first failing stage id ("" if none)
    double tf = 0.0;
    double lambda3_reached = 0.0;
    double Kp_reached = 0.0;
    double max_violation = 0.0;     // max nondimensional constraint violation
    double max_nbar = 0.0;          // g units
    double max_qbar = 0.0;          // Pa
    double boundary_arc_fraction = 0.0;  // time share with nbar > 0.95 n_max
    double max_abs_H = 0.0;         // free-time condition along the trajectory
    bool p0_degenerate = false;     // order-zero transfer was degenerate
    OrderZeroSolution p0;
    FrameChange frame;
    std::vector<StageResult> stages;
    std::vector<TrajectorySample> trajectory;  // physical time
    Vec unknowns;

    int exit_code() const {
        if (!converged) return 1;
        return suboptimal ? 2 : 0;
    }
};

namespace detail {

/// Orthonormal basis of the plane orthogonal to w.
inline std::pair<Vec3, Vec3> orthonormal_complement(const Vec3& w) {
    Vec3 seed = (std::abs(w[1]) < 0.9) ? Vec3(0, 1, 0) : Vec3(1, 0, 0);
    Vec3 d1 = w.cross(seed).normalized();
    Vec3 d2 = w.cross(d1).normalized();
    return {d1, d2};
}

}  // namespace detail

}  // namespace attraj
