#pragma once

#include <optional>
#include <string>
#include <utility>

#include "alioth/types.hpp"

namespace alioth {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double integral_limit = 1.0;
};

enum class Channel { Pitch, Roll };

std::string to_string(Channel c);

struct ChannelSelection {
    Channel primary = Channel::Roll;
    Channel auxiliary = Channel::Pitch;
    Channel beta_source = Channel::Roll;  // matches primary
};

// Monotone Nussbaum arguments for both attitude channels plus the shared
// gain and saturation bound.
struct NussbaumState {
    double zeta_phi = 0.0;
    double zeta_theta = 0.0;
    Vec2 k_zeta = Vec2::Ones();
    double sat_bound = 2.0;
};

// Sat(cos(pi zeta / 2) * exp(zeta^2)) with overflow guarded by returning the
// cosine sign times the bound once exp dominates.
double nussbaum_value(double zeta, double sat_bound);

// zeta' = zeta + k_zeta |omega_aux| |u_aux| dt; never decreases.
double nussbaum_update(double zeta, double omega_aux, double u_aux,
                       double k_zeta, double dt);

// Componentwise gain application: M_b = diag(N(zeta_phi), N(zeta_theta)) u.
Vec2 aux_moment(const NussbaumState& ns, const Vec2& u_aux);

// Pitch leads when |dx| exceeds |dy| by the hysteresis margin and vice
// versa; otherwise the previous selection is retained. Without a previous
// selection a strict comparison decides (ties go to roll).
ChannelSelection primary_aux_switch(const Vec2& delta,
                                    const std::optional<ChannelSelection>& prev,
                                    double hysteresis);

struct PidState {
    double integral = 0.0;
    double prev_sign = 1.0;  // sign held through the command deadband
};

// beta = -sgn(delta_axis) (kp x + kd x_dot + ki int x), integral clamped to
// +/- integral_limit, output clamped to [-pi/2, pi/2]. |delta_axis| below
// the deadband keeps the previous sign.
double beta_pid_step(const PidGains& g, PidState& state, double x, double x_dot,
                     double delta_axis, double dt, double deadband = 0.01);

struct MixerResult {
    Vec4 motor_sq = Vec4::Zero();
    bool saturated = false;
};

// Collective (G - B)/(4 sin(beta) K_T) per motor plus the auxiliary-channel
// differential e_aux * M_b_aux / (4 k_aux(beta) c), c = sqrt(2)/2. delta is
// carried for interface symmetry; planar demand rides on beta and the sign
// logic upstream. Clamping sheds the differential uniformly, preserving the
// collective. Throws DegenerateParameterError when k_aux(beta) ~ 0.
MixerResult mixer(const Vec2& delta, double m_b_aux, const ChannelSelection& sel,
                  const VehicleParams& p, double beta, const AllocationVectors& e,
                  double u_max);

struct ControllerConfig {
    PidGains beta_pid{3.0, 2.0, 0.8, 0.03};
    PidGains aux_pid{2.0, 0.2, 0.5, 0.5};
    Vec2 k_zeta = Vec2::Ones();
    double sat_bound = 2.0;
    double sgn_deadband = 0.01;       // N
    double hysteresis_rel = 0.05;
    double hysteresis_abs = 0.01;     // N
    double u_max = 2e5;               // squared-speed ceiling
    double rate_hz = 500.0;
    bool nussbaum_enabled = true;
    bool flip_aux_sign = false;

    void validate() const;
};

struct ControllerState {
    bool initialized = false;
    ChannelSelection sel;
    PidState beta_pid_pitch;
    PidState beta_pid_roll;
    PidState aux_pid_pitch;
    PidState aux_pid_roll;
    NussbaumState nussbaum;
};

struct ControllerDiagnostics {
    double nussbaum_gain_phi = 1.0;
    double nussbaum_gain_theta = 1.0;
    double aux_moment = 0.0;
    Channel active_channel = Channel::Roll;  // primary
};

struct ControllerOutput {
    double beta_cmd = 0.0;
    Vec4 motor_sq = Vec4::Zero();
    bool saturated = false;
    ControllerDiagnostics diagnostics;
};

// One control tick: channel switch, beta PID on the primary attitude,
// auxiliary PID + Nussbaum moment on the other channel, then mixing.
// Returns the command and the advanced state. Propagates mixer errors.
std::pair<ControllerOutput, ControllerState> controller_step(
    const ControllerConfig& cfg, ControllerState state, const RigidState& measured,
    const Vec2& delta, double dt, const VehicleParams& p,
    const AllocationVectors& e);

}  // namespace alioth
