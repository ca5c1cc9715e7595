#include "alioth/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "alioth/logging.hpp"
#include "alioth/stta.hpp"

namespace alioth {

void Disturbance::validate() const {
    if (!constant_wrench.allFinite())
        throw ConfigError("constant wrench must be finite");
    if (!noise_std.allFinite() || (noise_std.array() < 0.0).any())
        throw ConfigError("noise std entries must be finite and nonnegative");
    if (!(noise_bandwidth_hz > 0.0))
        throw ConfigError("noise bandwidth must be positive");
    if (!(noise_rate_hz > 0.0)) throw ConfigError("noise rate must be positive");
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double unit_open(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

double gaussian_draw(std::uint64_t seed, std::int64_t bin, int channel) {
    const std::uint64_t base =
        mix64(seed ^ mix64(static_cast<std::uint64_t>(bin) ^
                           mix64(static_cast<std::uint64_t>(channel) + 17ull)));
    const std::uint64_t h1 = mix64(base);
    const std::uint64_t h2 = mix64(base ^ 0xD1B54A32D192ED03ull);
    const double u1 = unit_open(h1);
    const double u2 = unit_open(h2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace

NoiseFilter::NoiseFilter(const Disturbance& d, std::uint64_t seed)
    : d_(d), seed_(seed) {
    const double dt_bin = 1.0 / d_.noise_rate_hz;
    alpha_ = std::exp(-2.0 * kPi * d_.noise_bandwidth_hz * dt_bin);
    comp_ = std::sqrt((1.0 + alpha_) / (1.0 - alpha_));
}

void NoiseFilter::advance_to(std::int64_t bin) {
    for (std::int64_t b = last_bin_ + 1; b <= bin; ++b) {
        for (int c = 0; c < 6; ++c) {
            if (d_.noise_std(c) <= 0.0) continue;
            const double white = gaussian_draw(seed_, b, c) * d_.noise_std(c) * comp_;
            state_(c) = alpha_ * state_(c) + (1.0 - alpha_) * white;
        }
    }
    last_bin_ = std::max(last_bin_, bin);
}

Vec6 NoiseFilter::sample(double t) {
    if (!d_.any_noise()) return Vec6::Zero();
    const auto bin =
        static_cast<std::int64_t>(std::floor(t * d_.noise_rate_hz + 1e-6));
    advance_to(bin);
    return state_;
}

Vec6 apply_disturbance(NoiseFilter& filter, double t) { return filter.sample(t); }

void SimConfig::validate() const {
    params.validate();
    alloc.validate();
    disturbance.validate();
    controller.validate();
    if (!initial_state.finite()) throw ConfigError("initial state must be finite");
    if (!(dt_physics > 0.0)) throw ConfigError("dt_physics must be positive");
    if (!(duration > 0.0)) throw ConfigError("duration must be positive");
    if (log_stride < 1) throw ConfigError("log_stride must be at least 1");
    if (!(limits.u_max > 0.0)) throw ConfigError("u_max must be positive");
    if (!(limits.divergence_threshold_deg > 0.0))
        throw ConfigError("divergence threshold must be positive");
    if (!(limits.theta_max_deg > 0.0 && limits.theta_max_deg < 90.0))
        throw ConfigError("theta_max must lie in (0, 90) degrees");
    if (actuators.tau_motor < 0.0 || actuators.tau_servo < 0.0)
        throw ConfigError("actuator time constants must be nonnegative");

    const double period = 1.0 / controller.rate_hz;
    const double ratio = period / dt_physics;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 * std::max(1.0, ratio) ||
        std::round(ratio) < 1.0)
        throw ConfigError(
            "controller period must be an integer multiple of dt_physics");

    for (std::size_t i = 1; i < delta_schedule.size(); ++i)
        if (delta_schedule[i].t < delta_schedule[i - 1].t)
            throw ConfigError("delta schedule times must be nondecreasing");

    if (mode == SimMode::OpenLoop) {
        if (open_loop.pattern < 1 || open_loop.pattern > 4)
            throw ConfigError("open-loop pattern index must be in 1..4");
        if (std::abs(open_loop.beta) > kPi / 2.0)
            throw ConfigError("open-loop tilt angle must be within [-pi/2, pi/2]");
        for (std::size_t i = 1; i < open_loop.schedule.size(); ++i)
            if (open_loop.schedule[i].t < open_loop.schedule[i - 1].t)
                throw ConfigError("open-loop schedule times must be nondecreasing");
    }
}

RigidState rk4_step(const VehicleModel& model, const RigidState& s,
                    const ActuatorCommand& cmd, const Vec6& wrench_ext, double dt,
                    double theta_max) {
    const Vec6 tau =
        generalized_force(model.params(), cmd.beta, cmd.u, model.alloc()) +
        wrench_ext;

    auto deriv = [&](const RigidState& x) -> std::pair<Vec6, Vec6> {
        return {transform(x.eta, theta_max) * x.nu, model.acceleration(x, tau)};
    };
    auto advance = [](const RigidState& x, const std::pair<Vec6, Vec6>& k,
                      double h) {
        RigidState y;
        y.eta = x.eta + h * k.first;
        y.nu = x.nu + h * k.second;
        return y;
    };

    const auto k1 = deriv(s);
    const auto k2 = deriv(advance(s, k1, dt / 2.0));
    const auto k3 = deriv(advance(s, k2, dt / 2.0));
    const auto k4 = deriv(advance(s, k3, dt));

    RigidState out;
    out.eta = s.eta + dt / 6.0 *
                          (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
    out.nu = s.nu + dt / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second +
                                k4.second);
    if (!out.finite()) throw NonFiniteStateError("integration produced NaN/Inf");
    return out;
}

ScenarioMetrics metrics(const TrajectoryLog& log, double divergence_threshold_deg,
                        double settle_band_deg) {
    ScenarioMetrics m;
    m.settling_time = -1.0;
    if (log.size() == 0) return m;

    const double z0 = log.eta.front()(2);
    for (std::size_t i = 0; i < log.size(); ++i) {
        const double roll = std::abs(rad2deg(log.eta[i](3)));
        const double pitch = std::abs(rad2deg(log.eta[i](4)));
        if (!log.eta[i].allFinite() || !log.nu[i].allFinite()) {
            m.diverged = true;
            continue;
        }
        m.max_abs_roll = std::max(m.max_abs_roll, roll);
        m.max_abs_pitch = std::max(m.max_abs_pitch, pitch);
        if (roll > divergence_threshold_deg || pitch > divergence_threshold_deg)
            m.diverged = true;
        m.heave_drift =
            std::max(m.heave_drift, std::abs(log.eta[i](2) - z0));
    }

    std::size_t idx = log.size();
    while (idx > 0) {
        const double roll = std::abs(rad2deg(log.eta[idx - 1](3)));
        const double pitch = std::abs(rad2deg(log.eta[idx - 1](4)));
        if (!log.eta[idx - 1].allFinite() || roll > settle_band_deg ||
            pitch > settle_band_deg)
            break;
        --idx;
    }
    if (idx < log.size()) m.settling_time = log.t[idx];
    return m;
}

namespace {

Vec2 delta_at(const std::vector<DeltaSegment>& schedule, double t) {
    Vec2 d = Vec2::Zero();
    for (const auto& seg : schedule) {
        if (seg.t <= t + 1e-12) d = seg.delta;
        else break;
    }
    return d;
}

Vec4 open_loop_input_at(const OpenLoopInput& ol, double t) {
    double sum = 0.0, diff = 0.0;
    bool found = false;
    for (const auto& seg : ol.schedule) {
        if (seg.t <= t + 1e-12) {
            sum = seg.omega_sq_sum;
            diff = seg.differential;
            found = true;
        } else {
            break;
        }
    }
    if (!found) return Vec4::Zero();
    return apply_input_pattern(static_cast<InputPattern>(ol.pattern), sum, diff);
}

double lag_step(double current, double target, double tau, double dt) {
    if (tau <= 0.0) return target;
    return target + (current - target) * std::exp(-dt / tau);
}

double kinetic_energy(const Mat6& mass, const Vec6& nu) {
    return 0.5 * nu.dot(mass * nu);
}

}  // namespace

SimResult simulate(const SimConfig& cfg) {
    cfg.validate();

    ControllerConfig ctl_cfg = cfg.controller;
    ctl_cfg.nussbaum_enabled = cfg.flags.nussbaum_enabled;
    ctl_cfg.flip_aux_sign = cfg.flags.flip_aux_sign;
    ctl_cfg.u_max = cfg.limits.u_max;

    const VehicleModel model(cfg.params, cfg.alloc);
    const double theta_max = deg2rad(cfg.limits.theta_max_deg);
    const double div_rad = deg2rad(cfg.limits.divergence_threshold_deg);

    const auto steps_per_ctl = static_cast<std::int64_t>(
        std::round(1.0 / ctl_cfg.rate_hz / cfg.dt_physics));
    const auto n_steps =
        static_cast<std::int64_t>(std::llround(cfg.duration / cfg.dt_physics));

    NoiseFilter noise(cfg.disturbance, cfg.seed);

    SimResult res;
    RigidState state = cfg.initial_state;
    ControllerState ctl_state;
    ControllerOutput ctl_out;
    bool diverged = false;

    ActuatorCommand actual;
    const double ke_tol = 1e-10;
    double prev_ke = kinetic_energy(model.mass(), state.nu);

    auto log_row = [&](double t) {
        res.log.t.push_back(t);
        res.log.eta.push_back(state.eta);
        res.log.nu.push_back(state.nu);
        res.log.beta_cmd.push_back(ctl_out.beta_cmd);
        res.log.motor_sq.push_back(actual.u);
        res.log.zeta_phi.push_back(ctl_state.nussbaum.zeta_phi);
        res.log.zeta_theta.push_back(ctl_state.nussbaum.zeta_theta);
        res.log.n_phi.push_back(ctl_out.diagnostics.nussbaum_gain_phi);
        res.log.n_theta.push_back(ctl_out.diagnostics.nussbaum_gain_theta);
        res.log.channel.push_back(ctl_out.diagnostics.active_channel);
        Vec6 tau_ctl = Vec6::Zero();
        if (state.finite() && std::abs(state.eta(4)) < theta_max)
            tau_ctl = generalized_force(cfg.params, actual.beta, actual.u, cfg.alloc);
        res.log.tau.push_back(tau_ctl);
    };

    for (std::int64_t i = 0; i <= n_steps && !diverged; ++i) {
        const double t = static_cast<double>(i) * cfg.dt_physics;

        if (i < n_steps && cfg.mode == SimMode::ClosedLoop &&
            i % steps_per_ctl == 0) {
            const Channel before = ctl_state.sel.primary;
            const bool was_init = ctl_state.initialized;
            try {
                auto [out, next] = controller_step(
                    ctl_cfg, ctl_state, state, delta_at(cfg.delta_schedule, t),
                    static_cast<double>(steps_per_ctl) * cfg.dt_physics,
                    cfg.params, cfg.alloc);
                ctl_out = out;
                ctl_state = next;
                if (was_init && ctl_state.sel.primary != before)
                    ++res.handover_count;
            } catch (const ModelError& err) {
                if (i == 0) throw;
                res.step_errors.push_back("t=" + std::to_string(t) + ": " +
                                          err.what());
            }
        }

        if (cfg.mode == SimMode::OpenLoop) {
            ctl_out.beta_cmd = cfg.open_loop.beta;
            ctl_out.motor_sq = open_loop_input_at(cfg.open_loop, t);
        }

        if (i == 0) {
            actual.beta = ctl_out.beta_cmd;
            actual.u = ctl_out.motor_sq;
        }

        if (i % cfg.log_stride == 0 || i == n_steps) log_row(t);
        if (i == n_steps) break;

        actual.beta = lag_step(actual.beta, ctl_out.beta_cmd,
                               cfg.actuators.tau_servo, cfg.dt_physics);
        for (int k = 0; k < 4; ++k)
            actual.u(k) = lag_step(actual.u(k), ctl_out.motor_sq(k),
                                   cfg.actuators.tau_motor, cfg.dt_physics);

        const Vec6 wrench_ext =
            cfg.disturbance.constant_wrench + noise.sample(t);

        try {
            state = rk4_step(model, state, actual, wrench_ext, cfg.dt_physics,
                             theta_max);
        } catch (const ModelError& err) {
            if (i == 0) throw;
            res.step_errors.push_back("t=" + std::to_string(t) + ": " +
                                      err.what());
            diverged = true;
            break;
        }

        if (cfg.checks.energy_monotonic) {
            const double ke = kinetic_energy(model.mass(), state.nu);
            if (ke > prev_ke * (1.0 + ke_tol) + 1e-15) res.energy_violated = true;
            prev_ke = ke;
        }

        if (!state.finite()) {
            diverged = true;
            break;
        }
        if (std::abs(state.eta(3)) > div_rad || std::abs(state.eta(4)) > div_rad) {
            diverged = true;
            log_row(static_cast<double>(i + 1) * cfg.dt_physics);
            break;
        }
    }

    res.metrics = metrics(res.log, cfg.limits.divergence_threshold_deg);
    res.metrics.diverged = res.metrics.diverged || diverged;
    return res;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

}  // namespace

std::string csv_string(const TrajectoryLog& log) {
    std::string out =
        "t,x,y,z,phi,theta,psi,u,v,w,p,q,r,beta_cmd,w1_sq,w2_sq,w3_sq,w4_sq,"
        "zeta_phi,zeta_theta,n_phi,n_theta,channel,tau_1,tau_2,tau_3,tau_4,"
        "tau_5,tau_6\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
        out += fmt(log.t[i]);
        for (int k = 0; k < 6; ++k) out += "," + fmt(log.eta[i](k));
        for (int k = 0; k < 6; ++k) out += "," + fmt(log.nu[i](k));
        out += "," + fmt(log.beta_cmd[i]);
        for (int k = 0; k < 4; ++k) out += "," + fmt(log.motor_sq[i](k));
        out += "," + fmt(log.zeta_phi[i]);
        out += "," + fmt(log.zeta_theta[i]);
        out += "," + fmt(log.n_phi[i]);
        out += "," + fmt(log.n_theta[i]);
        out += "," + to_string(log.channel[i]);
        for (int k = 0; k < 6; ++k) out += "," + fmt(log.tau[i](k));
        out += "\n";
    }
    return out;
}

void write_csv(const TrajectoryLog& log, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << csv_string(log);
    if (!f) throw ConfigError("failed writing " + path);
}

}  // namespace alioth
