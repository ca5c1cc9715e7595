#pragma once

#include <cmath>
#include <random>

#include "alioth/types.hpp"

namespace alioth::testing {

// Valid, nondegenerate parameter draws for property tests. Draws are
// rejected until the surge/pitch and sway/roll mass blocks are comfortably
// positive definite so factorizations stay well conditioned.
inline VehicleParams random_params(std::mt19937_64& rng) {
    auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    for (;;) {
        VehicleParams p;
        p.m = uni(1.0, 8.0);
        p.z_g = uni(-0.05, 0.05);
        p.z_t = uni(-0.1, 0.1);
        p.l = uni(0.05, 0.5);
        p.k_t = uni(1e-6, 1e-4);
        p.k_m = uni(1e-8, 1e-6);
        p.i_xx = uni(0.005, 0.2);
        p.i_yy = uni(0.005, 0.2);
        p.i_zz = uni(0.005, 0.2);
        p.x_udot = uni(-3.0, 0.0);
        p.y_vdot = uni(-3.0, 0.0);
        p.z_wdot = uni(-3.0, 0.0);
        p.k_pdot = uni(-0.05, 0.0);
        p.m_qdot = uni(-0.05, 0.0);
        p.n_rdot = uni(-0.05, 0.0);
        p.x_qdot = uni(-0.2, 0.2);
        p.y_pdot = uni(-0.2, 0.2);
        p.x_u = uni(0.5, 10.0);
        p.y_v = uni(0.5, 10.0);
        p.z_w = uni(0.5, 10.0);
        p.k_p = uni(0.02, 0.5);
        p.m_q = uni(0.02, 0.5);
        p.n_r = uni(0.02, 0.5);
        p.g = uni(10.0, 60.0);
        p.b = uni(10.0, 60.0);
        if (p.m15() * p.m15() <= 0.5 * p.m11() * p.m55() &&
            p.m14() * p.m14() <= 0.5 * p.m22() * p.m44())
            return p;
    }
}

inline Vec6 random_vec6(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    Vec6 v;
    for (int i = 0; i < 6; ++i) v(i) = d(rng);
    return v;
}

// Closed-form solution of the zero-tilt heave equation
// (m - z_wdot) dv/dt + z_w v = (g - b) from rest.
struct HeaveSolution {
    double v_inf;
    double tau;

    HeaveSolution(const VehicleParams& p)
        : v_inf((p.g - p.b) / p.z_w), tau((p.m - p.z_wdot) / p.z_w) {}

    double velocity(double t) const { return v_inf * (1.0 - std::exp(-t / tau)); }
    double position(double t, double z0 = 0.0) const {
        return z0 + v_inf * (t - tau * (1.0 - std::exp(-t / tau)));
    }
};

}  // namespace alioth::testing
