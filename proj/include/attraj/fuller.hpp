#pragma once

#include <cmath>
#include <vector>

#include "attraj/errors.hpp"

namespace attraj {

struct FullerState {
    double x1 = 0.0;
    double x2 = 0.0;
    double norm() const { return std::hypot(x1, x2); }
};

struct SwitchLog {
    std::vector<double> times;   // strictly increasing switching times
    std::vector<int> signs;      // control sign after each switch (alternating)
    double termination_time = 0.0;
    int first_control = 0;
};

struct FullerTrajectory {
    std::vector<double> t;
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<int> u;
};

/// Unique positive root of xi^4 + xi^2/12 - 1/18 = 0.
inline double fuller_xi() { return std::sqrt((std::sqrt(33.0) - 1.0) / 24.0); }

namespace detail {

// Signed distance-like switching indicator: zero on the curves Gamma+-,
// negative on R+, positive on R-.
inline double fuller_sigma(double x1, double x2, double xi) {
    double s = (x2 > 0.0) ? 1.0 : (x2 < 0.0 ? -1.0 : 0.0);
    return x1 + s * xi * x2 * x2;
}

}  // namespace detail

/// Optimal synthesis feedback: +1 on R+ and Gamma+, -1 on R- and Gamma-.
inline int fuller_feedback(const FullerState& s) {
    if (s.x1 == 0.0 && s.x2 == 0.0) throw AtOrigin("feedback undefined at the origin");
    const double xi = fuller_xi();
    double sigma = detail::fuller_sigma(s.x1, s.x2, xi);
    if (sigma < 0.0) return +1;  // R+
    if (sigma > 0.0) return -1;  // R-
    return (s.x2 < 0.0) ? +1 : -1;  // Gamma+ : Gamma-
}

/// Simulates x1' = x2, x2' = u under the synthesis feedback. Between
/// switches the flow is the exact double-integrator parabola; crossings of
/// Gamma+- are located by bisection on the switching indicator to 1e-12 in
/// time. Terminates when |x| < stop_radius; each switch is logged.
inline SwitchLog fuller_simulate(const FullerState& s0, double stop_radius,
                                 FullerTrajectory* traj = nullptr, int max_switches = 200) {
    if (!(stop_radius > 0.0)) throw ValidationError("stop_radius must be positive");
    const double xi = fuller_xi();

    SwitchLog log;
    FullerState s = s0;
    double t = 0.0;
    int u = fuller_feedback(s);
    log.first_control = u;

    auto flow = [](const FullerState& a, int uu, double dt) {
        FullerState b;
        b.x1 = a.x1 + a.x2 * dt + 0.5 * uu * dt * dt;
        b.x2 = a.x2 + uu * dt;
        return b;
    };
    auto record = [&](double tt, const FullerState& st) {
        if (traj) {
            traj->t.push_back(tt);
            traj->x1.push_back(st.x1);
            traj->x2.push_back(st.x2);
            traj->u.push_back(u);
        }
    };
    record(t, s);

    // Scale-aware probe step: the arc duration shrinks with the state.
    while (s.norm() >= stop_radius) {
        if (static_cast<int>(log.times.size()) >= max_switches)
            throw MaxSwitchesExceeded("switch cap reached before the stop radius");

        double sig0 = detail::fuller_sigma(s.x1, s.x2, xi);
        double dt = std::max(1e-14, 0.05 * std::sqrt(s.norm()));
        // bracket the next sigma sign change (control is constant meanwhile)
        double a = 0.0, b = dt;
        int guard = 0;
        for (;;) {
            FullerState sb = flow(s, u, b);
            double sigb = detail::fuller_sigma(sb.x1, sb.x2, xi);
            if (sig0 == 0.0) {  // started on the curve: step off first
                sig0 = sigb;
                a = b;
                b *= 2.0;
                continue;
            }
            if (sigb * sig0 < 0.0) break;
            if (sb.norm() < 0.5 * stop_radius && sigb * sig0 > 0.0) {
                // the arc reaches the target ball before switching
                s = sb;
                t += b;
                record(t, s);
                log.termination_time = t;
                return log;
            }
            a = b;
            b *= 2.0;
            if (++guard > 200) throw MaxStepsExceeded("switch bracketing failed");
        }
        // bisection to 1e-12 in time
        while (b - a > 1e-12) {
            double m = 0.5 * (a + b);
            FullerState sm = flow(s, u, m);
            double sigm = detail::fuller_sigma(sm.x1, sm.x2, xi);
            if (sigm * sig0 < 0.0)
                b = m;
            else
                a = m;
        }
        s = flow(s, u, b);
        t += b;
        u = -u;
        log.times.push_back(t);
        log.signs.push_back(u);
        record(t, s);
    }
    log.termination_time = t;
    return log;
}

}  // namespace attraj
