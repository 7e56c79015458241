#pragma once

#include <random>

#include "attraj/scenario.hpp"
#include "attraj/vehicle.hpp"

namespace fixtures {

using attraj::Vec;
using attraj::Vec3;

inline attraj::VehicleParams pegasus_vehicle() {
    attraj::VehicleParams p;
    p.a = 15.8;
    p.b = 0.2;
    p.m = 23000.0;
    p.S = 14.0;
    p.Cx0 = 0.06;
    p.Cxa = 0.0;
    p.Cz0 = 0.0;
    p.Cza = 4.7;
    p.n_max = 2.2;
    p.q_max = 47000.0;
    return p;
}

inline attraj::EnvironmentParams release_env(double altitude_m) {
    attraj::EnvironmentParams e;
    double k = e.R_E / (e.R_E + altitude_m);
    e.g_vec0 = Vec3(-e.g_std * k * k, 0.0, 0.0);
    return e;
}

/// Physically scaled random 11-dim states keeping |cos(psi)| and the angle
/// of attack away from the degenerate sets.
struct PaSampler {
    std::mt19937 gen;
    explicit PaSampler(unsigned seed) : gen(seed) {}

    double uni(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }

    Vec state() {
        Vec x(attraj::pa::NX);
        x[attraj::pa::RX] = uni(8e3, 3e4);
        x[attraj::pa::RY] = uni(-2e3, 2e3);
        x[attraj::pa::RZ] = uni(5e2, 1e4);
        double th = uni(-1.0, 1.2), psv = uni(-0.5, 0.5);
        double speed = uni(150.0, 600.0);
        // velocity direction offset from the body axis keeps alpha in
        // (0.05, ~0.7) so the lift direction is well defined
        double thv = th + uni(0.05, 0.5) * (uni(0, 1) < 0.5 ? -1.0 : 1.0);
        double psvv = psv + uni(0.05, 0.3) * (uni(0, 1) < 0.5 ? -1.0 : 1.0);
        x.segment<3>(attraj::pa::VX) = speed * attraj::body_axis(thv, psvv);
        x[attraj::pa::TH] = th;
        x[attraj::pa::PS] = psv;
        x[attraj::pa::PH] = uni(-1.0, 1.0);
        x[attraj::pa::WX] = uni(-0.2, 0.2);
        x[attraj::pa::WY] = uni(-0.2, 0.2);
        return x;
    }

    Vec costate() {
        Vec p(attraj::pa::NX);
        for (int i = 0; i < attraj::pa::NX; ++i) p[i] = uni(-1.0, 1.0);
        p.segment<3>(attraj::pa::RX) *= 1e-3;  // position costates are small
        return p;
    }

    Vec ps_state() {
        Vec x11 = state();
        Vec x(attraj::ps::NX);
        x << x11.segment<8>(attraj::pa::VX);
        return x;
    }

    Vec ps_costate() {
        Vec p(attraj::ps::NX);
        for (int i = 0; i < attraj::ps::NX; ++i) p[i] = uni(-1.0, 1.0);
        return p;
    }
};

}  // namespace fixtures
