#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alioth/controller.hpp"
#include "alioth/dynamics.hpp"
#include "alioth/types.hpp"

namespace alioth {

// Constant wrench plus band-limited noise: white Gaussian samples drawn per
// fixed time bin from a counter-based generator, shaped by a first-order
// low-pass at noise_bandwidth_hz and variance-compensated so the long-run
// standard deviation matches noise_std.
struct Disturbance {
    Vec6 constant_wrench = Vec6::Zero();
    Vec6 noise_std = Vec6::Zero();
    double noise_bandwidth_hz = 2.0;
    double noise_rate_hz = 1000.0;

    bool any_noise() const { return noise_std.cwiseAbs().maxCoeff() > 0.0; }
    void validate() const;
};

// Deterministic per-bin Gaussian stream; the same seed and bin index always
// produce the same value regardless of the physics step size.
class NoiseFilter {
  public:
    NoiseFilter(const Disturbance& d, std::uint64_t seed);

    // Disturbance wrench at time t; advances the filter over any newly
    // entered bins.
    Vec6 sample(double t);

  private:
    Disturbance d_;
    std::uint64_t seed_;
    double alpha_ = 0.0;
    double comp_ = 1.0;  // variance compensation for the low-pass
    std::int64_t last_bin_ = -1;
    Vec6 state_ = Vec6::Zero();

    void advance_to(std::int64_t bin);
};

struct DeltaSegment {
    double t = 0.0;
    Vec2 delta = Vec2::Zero();
};

struct ActuatorLags {
    double tau_motor = 0.02;  // s; zero disables
    double tau_servo = 0.08;  // s; zero disables
};

enum class SimMode { ClosedLoop, OpenLoop };

struct OpenLoopSegment {
    double t = 0.0;
    double omega_sq_sum = 0.0;
    double differential = 0.0;
};

struct OpenLoopInput {
    double beta = 0.0;
    int pattern = 4;  // subsystem index, default heave
    std::vector<OpenLoopSegment> schedule;
};

struct SimFlags {
    bool nussbaum_enabled = true;
    bool flip_aux_sign = false;
};

struct SimLimits {
    double u_max = 2e5;
    double divergence_threshold_deg = 45.0;
    double theta_max_deg = 80.0;
};

struct SimChecks {
    bool energy_monotonic = false;
};

struct SimConfig {
    VehicleParams params;
    AllocationVectors alloc = AllocationVectors::standard();
    RigidState initial_state;
    double dt_physics = 1e-3;
    double duration = 10.0;
    std::vector<DeltaSegment> delta_schedule;
    Disturbance disturbance;
    ControllerConfig controller;
    ActuatorLags actuators;
    SimFlags flags;
    SimLimits limits;
    SimChecks checks;
    SimMode mode = SimMode::ClosedLoop;
    OpenLoopInput open_loop;
    std::uint64_t seed = 1;
    int log_stride = 2;  // physics steps per log row

    void validate() const;
};

// One row per logged step; columns mirror the CSV layout.
struct TrajectoryLog {
    std::vector<double> t;
    std::vector<Vec6> eta;
    std::vector<Vec6> nu;
    std::vector<double> beta_cmd;
    std::vector<Vec4> motor_sq;
    std::vector<double> zeta_phi;
    std::vector<double> zeta_theta;
    std::vector<double> n_phi;
    std::vector<double> n_theta;
    std::vector<Channel> channel;
    std::vector<Vec6> tau;

    std::size_t size() const { return t.size(); }
};

struct ScenarioMetrics {
    double max_abs_roll = 0.0;   // deg
    double max_abs_pitch = 0.0;  // deg
    bool diverged = false;
    double heave_drift = 0.0;    // m
    double settling_time = 0.0;  // s; -1 when the band is never reached
};

struct SimResult {
    TrajectoryLog log;
    ScenarioMetrics metrics;
    std::vector<std::string> step_errors;
    int handover_count = 0;
    bool energy_violated = false;
};

// Fourth-order Runge-Kutta step of the 12-state rigid-body ODE with the
// actuator wrench and external disturbance held constant over the step.
RigidState rk4_step(const VehicleModel& model, const RigidState& s,
                    const ActuatorCommand& cmd, const Vec6& wrench_ext, double dt,
                    double theta_max = kDefaultThetaMaxRad);

Vec6 apply_disturbance(NoiseFilter& filter, double t);

ScenarioMetrics metrics(const TrajectoryLog& log,
                        double divergence_threshold_deg = 45.0,
                        double settle_band_deg = 1.0);

SimResult simulate(const SimConfig& cfg);

// Emits the log as CSV with shortest round-trip number formatting.
void write_csv(const TrajectoryLog& log, const std::string& path);
std::string csv_string(const TrajectoryLog& log);

}  // namespace alioth
