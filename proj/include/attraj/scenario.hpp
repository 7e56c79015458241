#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "attraj/continuation.hpp"
#include "attraj/errors.hpp"
#include "attraj/euler.hpp"
#include "attraj/integrate.hpp"
#include "attraj/newton.hpp"
#include "attraj/vehicle.hpp"

namespace attraj {

enum class ProblemKind { p0, ps, pa, fuller };

inline const char* to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::p0: return "p0";
        case ProblemKind::ps: return "ps";
        case ProblemKind::pa: return "pa";
        case ProblemKind::fuller: return "fuller";
    }
    return "?";
}

struct SolverConfig {
    int N = 2;  // interior shooting nodes for the 11-dim chain
    double K = 800.0;
    double Kp0 = 0.1, Kp1 = 100.0;
    double eps_c = 1e-3;    // constraint tolerance ending the Kp ramp
    bool lambda3 = false;   // run the final cost-blend stage
    NewtonOptions newton;
    IntegratorOptions integ;
    ContinuationOptions cont;
    double hs = 1.0;  // initial arc-length step of the PC driver (scaled units)
};

struct Scenario {
    std::string name = "unnamed";
    ProblemKind kind = ProblemKind::ps;
    VehicleParams vehicle;
    EnvironmentParams env;

    // initial state (radians internally; files carry degrees)
    Vec3 r0 = Vec3::Zero();
    double v0_mag = 0.0;
    double theta_v0 = 0.0, psi_v0 = 0.0;
    double theta0 = 0.0, psi0 = 0.0, phi0 = 0.0;
    double wx0 = 0.0, wy0 = 0.0;

    // target attitude / velocity direction
    double theta_f = 0.0, psi_f = 0.0, phi_f = 0.0;
    double wxf = 0.0, wyf = 0.0;

    SolverConfig solver;

    // fuller testbed
    double fuller_x1 = 1.0, fuller_x2 = 0.0, fuller_stop = 1e-4;

    Vec3 v0() const { return v0_mag * body_axis(theta_v0, psi_v0); }
    Vec3 w() const { return body_axis(theta_f, psi_f); }
};

namespace detail {

struct ScnEntry {
    std::vector<double> values;
    std::string raw;
    int line = 0;
    mutable bool used = false;
};

struct ScnDoc {
    std::map<std::string, ScnEntry> entries;  // "section.key" or "key"
    std::string path;
};

inline ScnDoc parse_scn(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open scenario file");
    ScnDoc doc;
    doc.path = path;
    std::string line, section;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        if (tok.front() == '[') {
            if (tok.back() != ']')
                throw ParseError(path + ":" + std::to_string(ln) + ": malformed section header");
            section = tok.substr(1, tok.size() - 2);
            continue;
        }
        ScnEntry e;
        e.line = ln;
        std::string v;
        while (ss >> v) {
            if (!e.raw.empty()) e.raw += " ";
            e.raw += v;
            try {
                size_t pos = 0;
                double d = std::stod(v, &pos);
                if (pos == v.size()) e.values.push_back(d);
            } catch (...) {
                // non-numeric token kept in raw only
            }
        }
        std::string key = section.empty() ? tok : section + "." + tok;
        if (doc.entries.count(key))
            throw ParseError(path + ":" + std::to_string(ln) + ": duplicate key '" + key + "'");
        doc.entries[key] = e;
    }
    return doc;
}

inline const ScnEntry* find(const ScnDoc& d, const std::string& key) {
    auto it = d.entries.find(key);
    if (it == d.entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

inline double need_num(const ScnDoc& d, const std::string& key) {
    const ScnEntry* e = find(d, key);
    if (!e || e->values.empty())
        throw ValidationError(d.path + ": missing required field '" + key + "'");
    return e->values[0];
}

inline double opt_num(const ScnDoc& d, const std::string& key, double fallback) {
    const ScnEntry* e = find(d, key);
    if (!e || e->values.empty()) return fallback;
    return e->values[0];
}

inline std::string opt_str(const ScnDoc& d, const std::string& key, const std::string& fb) {
    const ScnEntry* e = find(d, key);
    return e ? e->raw : fb;
}

constexpr double kDeg = M_PI / 180.0;

}  // namespace detail

/// Loads and validates a scenario file. Angles are converted from degrees
/// to radians; the release gravity vector is derived from the release
/// altitude unless [environment] g0 overrides its magnitude.
inline Scenario load_scenario(const std::string& path) {
    using namespace detail;
    ScnDoc doc = parse_scn(path);
    Scenario s;
    s.name = opt_str(doc, "name", "unnamed");
    std::string kind = opt_str(doc, "kind", "");
    if (kind == "p0")
        s.kind = ProblemKind::p0;
    else if (kind == "ps")
        s.kind = ProblemKind::ps;
    else if (kind == "pa")
        s.kind = ProblemKind::pa;
    else if (kind == "fuller")
        s.kind = ProblemKind::fuller;
    else
        throw ValidationError(path + ": kind must be one of p0|ps|pa|fuller, got '" + kind +
                              "'");

    std::vector<std::string> violations;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) violations.push_back(msg);
    };

    if (s.kind == ProblemKind::fuller) {
        s.fuller_x1 = opt_num(doc, "fuller.x1", 1.0);
        s.fuller_x2 = opt_num(doc, "fuller.x2", 0.0);
        s.fuller_stop = opt_num(doc, "fuller.stop_radius", 1e-4);
        check(s.fuller_stop > 0, "fuller.stop_radius must be positive");
        if (!violations.empty()) {
            std::string msg = path + ": invalid scenario:";
            for (auto& v : violations) msg += "\n  - " + v;
            throw ValidationError(msg);
        }
        return s;
    }

    s.vehicle.a = need_num(doc, "vehicle.a");
    s.vehicle.b = need_num(doc, "vehicle.b");
    s.vehicle.m = opt_num(doc, "vehicle.mass", 1.0);
    s.vehicle.S = opt_num(doc, "vehicle.S", 0.0);
    s.vehicle.Cx0 = opt_num(doc, "vehicle.Cx0", 0.0);
    s.vehicle.Cxa = opt_num(doc, "vehicle.Cxa", 0.0);
    s.vehicle.Cz0 = opt_num(doc, "vehicle.Cz0", 0.0);
    s.vehicle.Cza = opt_num(doc, "vehicle.Cza", 0.0);
    s.vehicle.n_max = opt_num(doc, "vehicle.n_max", 0.0);
    s.vehicle.q_max = opt_num(doc, "vehicle.q_max", 0.0);

    const ScnEntry* r = find(doc, "initial.r");
    if (r && r->values.size() == 3)
        s.r0 = Vec3(r->values[0], r->values[1], r->values[2]);
    else if (s.kind == ProblemKind::pa)
        throw ValidationError(path + ": missing required field 'initial.r' (3 components)");

    s.v0_mag = need_num(doc, "initial.v");
    s.theta_v0 = need_num(doc, "initial.theta_v") * kDeg;
    s.psi_v0 = opt_num(doc, "initial.psi_v", 0.0) * kDeg;
    s.theta0 = opt_num(doc, "initial.theta", 0.0) * kDeg;
    s.psi0 = opt_num(doc, "initial.psi", 0.0) * kDeg;
    s.phi0 = opt_num(doc, "initial.phi", 0.0) * kDeg;
    s.wx0 = opt_num(doc, "initial.omega_x", 0.0) * kDeg;
    s.wy0 = opt_num(doc, "initial.omega_y", 0.0) * kDeg;

    s.theta_f = need_num(doc, "target.theta") * kDeg;
    s.psi_f = opt_num(doc, "target.psi", 0.0) * kDeg;
    s.phi_f = opt_num(doc, "target.phi", 0.0) * kDeg;
    s.wxf = opt_num(doc, "target.omega_x", 0.0) * kDeg;
    s.wyf = opt_num(doc, "target.omega_y", 0.0) * kDeg;

    // environment: release gravity from the release altitude unless pinned
    s.env.R_E = opt_num(doc, "environment.R_E", 6378137.0);
    s.env.h_s = opt_num(doc, "environment.h_s", 7143.0);
    s.env.rho0 = opt_num(doc, "environment.rho0", 1.225);
    double h_release = std::sqrt((s.env.R_E + s.r0[0]) * (s.env.R_E + s.r0[0]) +
                                 s.r0[1] * s.r0[1] + s.r0[2] * s.r0[2]) -
                       s.env.R_E;
    double g_rel = s.env.g_std * (s.env.R_E / (s.env.R_E + h_release)) *
                   (s.env.R_E / (s.env.R_E + h_release));
    double g0 = opt_num(doc, "environment.g0", g_rel);
    s.env.g_vec0 = Vec3(-g0, 0.0, 0.0);

    s.solver.N = static_cast<int>(opt_num(doc, "solver.N", s.kind == ProblemKind::pa ? 2 : 4));
    s.solver.K = opt_num(doc, "solver.K", 800.0);
    s.solver.Kp0 = opt_num(doc, "solver.Kp0", 0.1);
    s.solver.Kp1 = opt_num(doc, "solver.Kp1", 100.0);
    s.solver.eps_c = opt_num(doc, "solver.eps_c", 1e-3);
    std::string l3 = opt_str(doc, "solver.lambda3", "off");
    s.solver.lambda3 = (l3 == "on" || l3 == "true" || l3 == "1");
    s.solver.newton.residual_tol = opt_num(doc, "solver.newton_tol", 1e-8);
    s.solver.newton.max_iters = static_cast<int>(opt_num(doc, "solver.max_iters", 50));
    s.solver.newton.max_halvings =
        static_cast<int>(opt_num(doc, "solver.max_halvings", 30));
    s.solver.newton.fd_step = opt_num(doc, "solver.fd_step", 1e-5);
    s.solver.integ.rel_tol = opt_num(doc, "solver.rel_tol", 1e-10);
    s.solver.integ.abs_tol = opt_num(doc, "solver.abs_tol", 1e-12);
    s.solver.integ.max_steps = static_cast<int>(opt_num(doc, "solver.max_steps", 200000));
    s.solver.cont.dlambda_init = opt_num(doc, "solver.dl_init", 0.1);
    s.solver.cont.dlambda_min = opt_num(doc, "solver.dl_min", 1e-4);
    s.solver.cont.dlambda_max = opt_num(doc, "solver.dl_max", 0.5);
    s.solver.cont.max_solves = static_cast<int>(opt_num(doc, "solver.max_solves", 200));
    s.solver.hs = opt_num(doc, "solver.hs", 1.0);

    check(s.vehicle.a > 0, "vehicle.a must be positive");
    check(s.vehicle.b > 0, "vehicle.b must be positive");
    check(s.vehicle.m > 0, "vehicle.mass must be positive");
    check(s.vehicle.S >= 0, "vehicle.S must be non-negative");
    check(s.v0_mag > 0, "initial.v must be positive");
    auto deg_in = [&](double rad, double lo, double hi) {
        double d = rad / kDeg;
        return d > lo && d <= hi;
    };
    check(deg_in(s.theta0, -180.0, 180.0), "initial.theta out of (-180,180]");
    check(deg_in(s.theta_f, -180.0, 180.0), "target.theta out of (-180,180]");
    check(std::abs(s.psi0 / kDeg) < 90.0, "initial.psi out of (-90,90)");
    check(std::abs(s.psi_f / kDeg) < 90.0, "target.psi out of (-90,90)");
    check(std::abs(s.psi_v0 / kDeg) < 90.0, "initial.psi_v out of (-90,90)");
    if (s.kind == ProblemKind::pa) {
        check(s.vehicle.n_max > 0, "vehicle.n_max must be positive for kind pa");
        check(s.vehicle.q_max > 0, "vehicle.q_max must be positive for kind pa");
        check(h_release > 0, "initial.r must give positive altitude");
        check(s.solver.N >= 0, "solver.N must be non-negative");
    }
    check(s.solver.K > 0, "solver.K must be positive");
    check(s.solver.cont.dlambda_min > 0 &&
              s.solver.cont.dlambda_min <= s.solver.cont.dlambda_init &&
              s.solver.cont.dlambda_init <= s.solver.cont.dlambda_max &&
              s.solver.cont.dlambda_max <= 1.0,
          "solver dl options must satisfy 0 < dl_min <= dl_init <= dl_max <= 1");

    if (!violations.empty()) {
        std::string msg = path + ": invalid scenario:";
        for (auto& v : violations) msg += "\n  - " + v;
        throw ValidationError(msg);
    }
    return s;
}

}  // namespace attraj
