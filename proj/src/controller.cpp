#include "alioth/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alioth/dynamics.hpp"

namespace alioth {

std::string to_string(Channel c) {
    return c == Channel::Pitch ? "pitch" : "roll";
}

double nussbaum_value(double zeta, double sat_bound) {
    const double c = std::cos(kPi * zeta / 2.0);
    double raw;
    if (zeta * zeta > 700.0) {
        raw = c > 0.0 ? std::numeric_limits<double>::infinity()
              : c < 0.0 ? -std::numeric_limits<double>::infinity()
                        : 0.0;
    } else {
        raw = c * std::exp(zeta * zeta);
    }
    return std::clamp(raw, -sat_bound, sat_bound);
}

double nussbaum_update(double zeta, double omega_aux, double u_aux,
                       double k_zeta, double dt) {
    return zeta + k_zeta * std::abs(omega_aux) * std::abs(u_aux) * dt;
}

Vec2 aux_moment(const NussbaumState& ns, const Vec2& u_aux) {
    return {nussbaum_value(ns.zeta_phi, ns.sat_bound) * u_aux(0),
            nussbaum_value(ns.zeta_theta, ns.sat_bound) * u_aux(1)};
}

ChannelSelection primary_aux_switch(const Vec2& delta,
                                    const std::optional<ChannelSelection>& prev,
                                    double hysteresis) {
    const double ax = std::abs(delta(0)), ay = std::abs(delta(1));
    Channel primary;
    if (ax > ay + hysteresis) {
        primary = Channel::Pitch;
    } else if (ay > ax + hysteresis) {
        primary = Channel::Roll;
    } else if (prev) {
        primary = prev->primary;
    } else {
        primary = ax > ay ? Channel::Pitch : Channel::Roll;
    }
    ChannelSelection sel;
    sel.primary = primary;
    sel.auxiliary = primary == Channel::Pitch ? Channel::Roll : Channel::Pitch;
    sel.beta_source = primary;
    return sel;
}

namespace {

double pid_negative_feedback(const PidGains& g, PidState& state, double x,
                             double x_dot, double dt) {
    state.integral = std::clamp(state.integral + x * dt, -g.integral_limit,
                                g.integral_limit);
    return -(g.kp * x + g.kd * x_dot + g.ki * state.integral);
}

}  // namespace

double beta_pid_step(const PidGains& g, PidState& state, double x, double x_dot,
                     double delta_axis, double dt, double deadband) {
    double sgn = state.prev_sign;
    if (std::abs(delta_axis) >= deadband)
        sgn = delta_axis > 0.0 ? 1.0 : -1.0;
    state.prev_sign = sgn;

    state.integral = std::clamp(state.integral + x * dt, -g.integral_limit,
                                g.integral_limit);
    const double beta =
        -sgn * (g.kp * x + g.kd * x_dot + g.ki * state.integral);
    return std::clamp(beta, -kPi / 2.0, kPi / 2.0);
}

MixerResult mixer(const Vec2& delta, double m_b_aux, const ChannelSelection& sel,
                  const VehicleParams& p, double beta, const AllocationVectors& e,
                  double u_max) {
    (void)delta;
    MixerResult out;

    const double sb = std::sin(beta);
    const double net = p.g - p.b;
    double base = 0.0;
    if (net != 0.0) base = net / (4.0 * sb * p.k_t);
    if (!(base >= 0.0)) base = 0.0;
    if (base > u_max) {
        base = u_max;
        out.saturated = true;
    }

    Vec4 diff = Vec4::Zero();
    if (m_b_aux != 0.0) {
        const auto k = moment_coeffs(p, beta);
        const double k_aux = sel.auxiliary == Channel::Roll ? k.k1 : k.k2;
        const double k_scale = std::max(std::abs(p.k_t * p.l), 1e-30);
        if (std::abs(k_aux) < 1e-6 * k_scale)
            throw DegenerateParameterError(
                "auxiliary moment coefficient vanishes at this tilt angle; "
                "the auxiliary channel has no motor authority");
        const RowVec4& e_aux =
            sel.auxiliary == Channel::Roll ? e.e_phi : e.e_theta;
        const double c = std::sqrt(2.0) / 2.0;
        diff = e_aux.transpose() * (m_b_aux / (4.0 * k_aux * c));
    }

    double scale = 1.0;
    for (int i = 0; i < 4; ++i) {
        if (diff(i) > 0.0 && base + diff(i) > u_max)
            scale = std::min(scale, (u_max - base) / diff(i));
        else if (diff(i) < 0.0 && base + diff(i) < 0.0)
            scale = std::min(scale, base / -diff(i));
    }
    if (scale < 1.0) out.saturated = true;

    out.motor_sq = (Vec4::Constant(base) + scale * diff)
                       .cwiseMax(0.0)
                       .cwiseMin(u_max);
    return out;
}

void ControllerConfig::validate() const {
    auto gains_ok = [](const PidGains& g) {
        return g.kp >= 0.0 && g.ki >= 0.0 && g.kd >= 0.0 && g.integral_limit > 0.0;
    };
    if (!gains_ok(beta_pid) || !gains_ok(aux_pid))
        throw ConfigError("PID gains must be nonnegative with a positive integral limit");
    if (!(k_zeta.array() >= 0.0).all())
        throw ConfigError("k_zeta entries must be nonnegative");
    if (!(sat_bound > 0.0)) throw ConfigError("sat_bound must be positive");
    if (sgn_deadband < 0.0) throw ConfigError("sgn_deadband must be nonnegative");
    if (hysteresis_rel < 0.0 || hysteresis_abs < 0.0)
        throw ConfigError("hysteresis terms must be nonnegative");
    if (!(u_max > 0.0)) throw ConfigError("u_max must be positive");
    if (!(rate_hz > 0.0)) throw ConfigError("controller rate must be positive");
}

std::pair<ControllerOutput, ControllerState> controller_step(
    const ControllerConfig& cfg, ControllerState state, const RigidState& measured,
    const Vec2& delta, double dt, const VehicleParams& p,
    const AllocationVectors& e) {
    state.nussbaum.k_zeta = cfg.k_zeta;
    state.nussbaum.sat_bound = cfg.sat_bound;

    const double h = std::max(
        cfg.hysteresis_rel * std::max(std::abs(delta(0)), std::abs(delta(1))),
        cfg.hysteresis_abs);
    const std::optional<ChannelSelection> prev =
        state.initialized ? std::optional<ChannelSelection>(state.sel)
                          : std::nullopt;
    state.sel = primary_aux_switch(delta, prev, h);
    state.initialized = true;

    const double phi = measured.eta(3);
    const double theta = measured.eta(4);
    const Vec3 euler_rates =
        transform(measured.eta).bottomRightCorner<3, 3>() * measured.nu.tail<3>();
    const double phi_dot = euler_rates(0);
    const double theta_dot = euler_rates(1);

    const bool pitch_primary = state.sel.primary == Channel::Pitch;
    PidState& beta_state =
        pitch_primary ? state.beta_pid_pitch : state.beta_pid_roll;
    const double x_primary = pitch_primary ? theta : phi;
    const double xd_primary = pitch_primary ? theta_dot : phi_dot;
    const double delta_axis = pitch_primary ? delta(0) : delta(1);
    const double beta_cmd = beta_pid_step(cfg.beta_pid, beta_state, x_primary,
                                          xd_primary, delta_axis, dt,
                                          cfg.sgn_deadband);

    PidState& aux_state =
        pitch_primary ? state.aux_pid_roll : state.aux_pid_pitch;
    const double x_aux = pitch_primary ? phi : theta;
    const double xd_aux = pitch_primary ? phi_dot : theta_dot;
    const double omega_aux = pitch_primary ? measured.nu(3) : measured.nu(4);
    const double u_aux =
        pid_negative_feedback(cfg.aux_pid, aux_state, x_aux, xd_aux, dt);

    double gain = 1.0;
    if (cfg.nussbaum_enabled) {
        double& zeta = pitch_primary ? state.nussbaum.zeta_phi
                                     : state.nussbaum.zeta_theta;
        const double kz = pitch_primary ? cfg.k_zeta(0) : cfg.k_zeta(1);
        zeta = nussbaum_update(zeta, omega_aux, u_aux, kz, dt);
        gain = nussbaum_value(zeta, cfg.sat_bound);
    }
    const double m_b = gain * u_aux;
    const double applied = cfg.flip_aux_sign ? -m_b : m_b;

    ControllerOutput out;
    const MixerResult mix =
        mixer(delta, applied, state.sel, p, beta_cmd, e, cfg.u_max);
    out.beta_cmd = beta_cmd;
    out.motor_sq = mix.motor_sq;
    out.saturated = mix.saturated;
    out.diagnostics.nussbaum_gain_phi =
        nussbaum_value(state.nussbaum.zeta_phi, cfg.sat_bound);
    out.diagnostics.nussbaum_gain_theta =
        nussbaum_value(state.nussbaum.zeta_theta, cfg.sat_bound);
    out.diagnostics.aux_moment = applied;
    out.diagnostics.active_channel = state.sel.primary;
    return {out, state};
}

}  // namespace alioth
