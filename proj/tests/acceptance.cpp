// Acceptance gate: one pass/fail line per criterion, exit code = number of
// failures. Tolerances are pinned here, next to the checks they guard.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "alioth/config.hpp"
#include "alioth/controller.hpp"
#include "alioth/dynamics.hpp"
#include "alioth/simulator.hpp"
#include "alioth/stta.hpp"
#include "alioth/types.hpp"
#include "support/oracles.hpp"

#ifndef ALIOTH_CONFIG_DIR
#error "ALIOTH_CONFIG_DIR must point at the bundled config directory"
#endif

namespace {

using namespace alioth;
using alioth::testing::HeaveSolution;
using alioth::testing::random_params;
using alioth::testing::random_vec6;

constexpr double kAttitudeBoundDeg = 5.0;

struct Outcome {
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

double max_row_norm(const Eigen::MatrixXd& m) {
    double r = 0.0;
    for (int i = 0; i < m.rows(); ++i) r = std::max(r, m.row(i).norm());
    return r;
}

std::string config_path(const char* name) {
    return std::string(ALIOTH_CONFIG_DIR) + "/" + name;
}

// 1. M symmetric (exact), C skew-symmetric (exact), and no power extracted
//    from the Coriolis term, over random valid parameter sets.
Outcome matrix_structure() {
    Outcome o;
    o.budget = 1.0;
    std::mt19937_64 rng(101);
    double worst_sym = 0.0, worst_skew = 0.0, worst_power = 0.0;
    for (int k = 0; k < 100; ++k) {
        const VehicleParams p = random_params(rng);
        const VehicleModel model(p);
        const Mat6& m = model.mass();
        const Vec6 nu = random_vec6(rng, 1.0);
        const Mat6 c = coriolis_matrix(p, nu);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                worst_sym = std::max(worst_sym, std::abs(m(i, j) - m(j, i)));
                worst_skew = std::max(worst_skew, std::abs(c(i, j) + c(j, i)));
            }
        worst_power = std::max(worst_power, std::abs(nu.dot(c * nu)));
    }
    o.pass = worst_sym == 0.0 && worst_skew == 0.0 && worst_power < 1e-12;
    o.detail = fmt("100 sets: max asym %.1e, max skew defect %.1e, max power %.1e",
                   worst_sym, worst_skew, worst_power);
    return o;
}

// 2. Each singular tilt angle nulls its allocation artifact: heave and yaw
//    rows of the body allocation, the pitch row of the longitudinal
//    subsystem allocation, and the transverse (roll) residual.
Outcome singular_tilt_nulls() {
    Outcome o;
    o.budget = 1.0;
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const VehicleParams p = random_params(rng);
        const SttaSet s = stta_set(p);

        const Mat64 b0 = cem(p, s.beta_heave);
        worst = std::max(worst, b0.row(2).norm() / max_row_norm(b0));

        const Mat64 byaw = cem(p, s.beta_psi);
        worst = std::max(worst, byaw.row(5).norm() / max_row_norm(byaw));

        const Mat34 blon = longitudinal_allocation(p, 0.2, s.beta_theta);
        worst = std::max(worst, blon.row(2).norm() / max_row_norm(blon));

        const double res = transverse_singularity_residual(p, s.beta_phi);
        const double scale = std::abs(p.m14() * p.k_t) + p.l * p.k_t * p.m22();
        worst = std::max(worst, std::abs(res) / scale);
    }
    o.pass = worst < 1e-9;
    o.detail = fmt("100 sets, 4 artifacts each: worst relative norm %.1e", worst);
    return o;
}

// 3. At a singular tilt the affected state evolves identically for
//    different motor input patterns: z at zero tilt, psi at the yaw null.
Outcome input_independence() {
    Outcome o;
    o.budget = 10.0;
    SimConfig base;
    base.mode = SimMode::OpenLoop;
    base.duration = 10.0;
    base.dt_physics = 1e-3;
    base.log_stride = 1;
    base.actuators = {0.0, 0.0};

    auto run = [&](double beta, int pattern, double sum, double diff) {
        SimConfig c = base;
        c.open_loop.beta = beta;
        c.open_loop.pattern = pattern;
        c.open_loop.schedule = {{0.0, sum, diff}};
        return simulate(c);
    };

    const SimResult za = run(0.0, 4, 1.0e5, 0.0);
    const SimResult zb = run(0.0, 3, 1.0e5, 8000.0);
    double dz = 0.0;
    for (std::size_t i = 0; i < za.log.size(); ++i)
        dz = std::max(dz, std::abs(za.log.eta[i](2) - zb.log.eta[i](2)));

    const SttaSet s = stta_set(base.params);
    const SimResult pa = run(s.beta_psi, 3, 4.3e4, 6000.0);
    const SimResult pb = run(s.beta_psi, 4, 4.3e4, 0.0);
    double dpsi = 0.0;
    for (std::size_t i = 0; i < pa.log.size(); ++i)
        dpsi = std::max(dpsi, std::abs(pa.log.eta[i](5) - pb.log.eta[i](5)));

    o.pass = dz < 1e-9 && dpsi < 1e-9;
    o.detail = fmt("10 s, patterns 4 vs 3: max |dz| %.1e m, max |dpsi| %.1e rad",
                   dz, dpsi);
    return o;
}

// 4. Level translation at the pitch-null tilt: collective balancing net
//    weight with a longitudinal differential produces surge with no pitch
//    and no heave. Uses the bundled open-loop config.
Outcome level_translation() {
    Outcome o;
    o.budget = 10.0;
    const SimConfig cfg = load_config(config_path("leveling_open_loop.json"));
    const LevelingConstraints lc = leveling_constraints(cfg.params);

    const double beta_err = std::abs(cfg.open_loop.beta - lc.beta_star);
    const double sum_err =
        std::abs(cfg.open_loop.schedule.at(0).omega_sq_sum - lc.omega_sq_sum) /
        lc.omega_sq_sum;
    const double zg_res = std::abs(lc.zg_residual);

    const SimResult r = simulate(cfg);
    double max_theta = 0.0, max_zdot = 0.0;
    for (std::size_t i = 0; i < r.log.size(); ++i) {
        max_theta = std::max(max_theta, std::abs(r.log.eta[i](4)));
        const Vec6 eta_dot = transform(r.log.eta[i]) * r.log.nu[i];
        max_zdot = std::max(max_zdot, std::abs(eta_dot(2)));
    }
    const double u0 = std::abs(r.log.nu.front()(0));
    const double u_end = std::abs(r.log.nu.back()(0));

    o.pass = beta_err < 1e-12 && sum_err < 1e-12 && zg_res < 1e-15 &&
             max_theta < 1e-6 && max_zdot < 1e-6 && u0 == 0.0 && u_end > 1e-3;
    o.detail = fmt("max |theta| %.1e rad, max |z_dot| %.1e m/s, |surge| 0 -> %.4f m/s",
                   max_theta, max_zdot, u_end);
    return o;
}

// 5. With zero thrust, neutral buoyancy, and collocated CoG/CoB the kinetic
//    energy never increases: Coriolis does no work, damping only dissipates.
Outcome energy_dissipation() {
    Outcome o;
    o.budget = 5.0;
    std::mt19937_64 rng(505);
    double worst_gain = 0.0;
    bool flagged = false;
    for (int k = 0; k < 5; ++k) {
        SimConfig cfg;
        cfg.params.b = cfg.params.g;
        cfg.params.z_g = 0.0;
        cfg.mode = SimMode::OpenLoop;
        cfg.open_loop.schedule.clear();
        cfg.duration = 3.0;
        cfg.dt_physics = 1e-3;
        cfg.log_stride = 1;
        cfg.actuators = {0.0, 0.0};
        cfg.checks.energy_monotonic = true;
        cfg.initial_state.nu = random_vec6(rng, 0.6);

        const SimResult r = simulate(cfg);
        flagged = flagged || r.energy_violated || !r.step_errors.empty();
        const VehicleModel model(cfg.params);
        double prev = 0.5 * cfg.initial_state.nu.dot(model.mass() * cfg.initial_state.nu);
        for (std::size_t i = 1; i < r.log.size(); ++i) {
            const double ke = 0.5 * r.log.nu[i].dot(model.mass() * r.log.nu[i]);
            worst_gain = std::max(worst_gain, ke - prev);
            prev = ke;
        }
    }
    o.pass = !flagged && worst_gain < 1e-10;
    o.detail = fmt("5 random coasts, 3 s each: worst per-step energy gain %.1e J",
                   worst_gain);
    return o;
}

// 6. Integrator convergence order on the decoupled heave equation against
//    its closed form.
Outcome integrator_order() {
    Outcome o;
    o.budget = 5.0;
    VehicleParams p;
    p.z_g = 0.0;
    p.x_qdot = 0.0;
    p.y_pdot = 0.0;
    p.b = p.g - 3.0;
    const VehicleModel model(p);
    const HeaveSolution sol(p);

    auto err_at = [&](double dt) {
        RigidState s;
        const int n = static_cast<int>(std::lround(1.0 / dt));
        for (int i = 0; i < n; ++i)
            s = rk4_step(model, s, ActuatorCommand{}, Vec6::Zero(), dt);
        return std::abs(s.nu(2) - sol.velocity(1.0));
    };

    const double e1 = err_at(0.04);
    const double e2 = err_at(0.02);
    const double order = std::log2(e1 / e2);
    o.pass = order >= 3.9;
    o.detail = fmt("err(0.04)/err(0.02) = %.3e/%.3e, order %.2f", e1, e2, order);
    return o;
}

// 7. Bundled closed-loop scenario: slip, turn, channel transition, slip,
//    turn, with disturbance and actuator lags. Both attitudes stay under
//    5 degrees and exactly one channel handover occurs at the transition.
Outcome closed_loop_bound() {
    Outcome o;
    o.budget = 60.0;
    const SimConfig cfg = load_config(config_path("leveling.json"));
    const SimResult r = simulate(cfg);

    double t_hand = -1.0;
    for (std::size_t i = 1; i < r.log.size(); ++i)
        if (r.log.channel[i] != r.log.channel[i - 1]) {
            t_hand = r.log.t[i];
            break;
        }

    o.pass = r.metrics.max_abs_roll < kAttitudeBoundDeg &&
             r.metrics.max_abs_pitch < kAttitudeBoundDeg &&
             !r.metrics.diverged && r.handover_count == 1 && t_hand > 5.5 &&
             t_hand < 6.5;
    o.detail = fmt("max |roll| %.2f deg, max |pitch| %.2f deg, handover at %.3f s",
                   r.metrics.max_abs_roll, r.metrics.max_abs_pitch, t_hand);
    return o;
}

struct AblationRuns {
    bool pass = false;
    std::string detail;
    SimResult first_enabled;
};

// 8. Flipped auxiliary sign: with the adaptive gain the bundled scenario
//    stays inside the criterion-7 bound; without it the run diverges.
//    Verdicts must agree across every bundled seed.
AblationRuns ablation_runs() {
    AblationRuns a;
    std::ifstream in(config_path("ablation.json"));
    nlohmann::json j = nlohmann::json::parse(in);
    const SimConfig base = config_from_json(j);
    const AblationSpec spec = ablation_from_json(j);

    bool pass = base.flags.flip_aux_sign && !spec.seeds.empty();
    double worst_on = 0.0;
    bool first = true;
    for (const auto seed : spec.seeds) {
        SimConfig on = base;
        on.seed = seed;
        on.flags.nussbaum_enabled = true;
        SimConfig off = base;
        off.seed = seed;
        off.flags.nussbaum_enabled = false;

        const SimResult ron = simulate(on);
        const SimResult roff = simulate(off);
        worst_on = std::max({worst_on, ron.metrics.max_abs_roll,
                             ron.metrics.max_abs_pitch});
        pass = pass && ron.metrics.max_abs_roll < kAttitudeBoundDeg &&
               ron.metrics.max_abs_pitch < kAttitudeBoundDeg &&
               !ron.metrics.diverged && roff.metrics.diverged;
        if (first) {
            a.first_enabled = ron;
            first = false;
        }
    }
    a.pass = pass;
    a.detail = fmt("%.0f seeds: enabled worst attitude %.2f deg, disabled diverged",
                   static_cast<double>(spec.seeds.size()), worst_on);
    return a;
}

// 9. The active auxiliary channel's adaptive gain takes both signs during
//    the flipped-sign enabled run.
Outcome gain_sign_traversal(const SimResult& enabled) {
    Outcome o;
    o.budget = 60.0;
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < enabled.log.size(); ++i) {
        const double g = enabled.log.channel[i] == Channel::Pitch
                             ? enabled.log.n_phi[i]
                             : enabled.log.n_theta[i];
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    o.pass = lo < 0.0 && hi > 0.0;
    o.detail = fmt("auxiliary gain range [%.2f, %.2f]", lo, hi);
    return o;
}

// 10. Mixer round trip: the motor solution reproduces the commanded
//     auxiliary moment through the allocation matrix and leaves the primary
//     axis free of differential moment.
Outcome mixer_round_trip() {
    Outcome o;
    o.budget = 1.0;
    std::mt19937_64 rng(1010);
    const VehicleParams p;
    const AllocationVectors e = AllocationVectors::standard();
    const double u_max = 2e5;
    const double c = std::sqrt(2.0) / 2.0;

    auto uni = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    double worst_aux = 0.0, worst_primary = 0.0;
    bool clean = true;
    for (int k = 0; k < 1000; ++k) {
        const bool pitch_aux = (k % 2) == 0;
        ChannelSelection sel;
        sel.primary = pitch_aux ? Channel::Roll : Channel::Pitch;
        sel.auxiliary = pitch_aux ? Channel::Pitch : Channel::Roll;
        sel.beta_source = sel.primary;

        const double beta = uni(0.065, pitch_aux ? 0.25 : 0.15);
        const MomentCoeffs mc = moment_coeffs(p, beta);
        const double k_aux = pitch_aux ? mc.k2 : mc.k1;
        const double base = (p.g - p.b) / (4.0 * std::sin(beta) * p.k_t);
        const double cap =
            0.9 * std::min(base, u_max - base) * 4.0 * std::abs(k_aux) * c;
        const double m_b = uni(-cap, cap);

        const MixerResult mr = mixer(Vec2::Zero(), m_b, sel, p, beta, e, u_max);
        clean = clean && !mr.saturated;
        const Vec6 tau = generalized_force(p, beta, mr.motor_sq, e);
        const int aux_row = pitch_aux ? 4 : 3;
        const int primary_row = pitch_aux ? 3 : 4;
        worst_aux = std::max(worst_aux, std::abs(tau(aux_row) - m_b));
        worst_primary = std::max(worst_primary, std::abs(tau(primary_row)));
    }
    o.pass = clean && worst_aux < 1e-9 && worst_primary < 1e-9;
    o.detail = fmt("1000 moments: worst aux error %.1e N m, worst primary leak %.1e N m",
                   worst_aux, worst_primary);
    return o;
}

template <typename F>
Outcome timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = f();
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count();
    if (o.budget > 0.0 && o.seconds >= o.budget) {
        o.pass = false;
        o.detail += fmt(" [over %.0f s budget]", o.budget);
    }
    return o;
}

const char* const kNames[10] = {
    "matrix structure",         "singular tilt null rows",
    "input independence",       "level translation",
    "energy dissipation",       "integrator order",
    "closed-loop 5 deg bound",  "ablation stable/diverged",
    "adaptive gain sign sweep", "mixer round trip",
};

}  // namespace

int main() {
    Outcome results[10];
    results[0] = timed(matrix_structure);
    results[1] = timed(singular_tilt_nulls);
    results[2] = timed(input_independence);
    results[3] = timed(level_translation);
    results[4] = timed(energy_dissipation);
    results[5] = timed(integrator_order);
    results[6] = timed(closed_loop_bound);

    AblationRuns abl;
    const auto t0 = std::chrono::steady_clock::now();
    abl = ablation_runs();
    const double abl_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results[7] = {abl.pass, abl.detail, abl_s, 60.0};
    if (abl_s >= 60.0) results[7].pass = false;

    results[8] = timed([&] { return gain_sign_traversal(abl.first_enabled); });
    results[9] = timed(mixer_round_trip);

    int failures = 0;
    for (int i = 0; i < 10; ++i) {
        const Outcome& o = results[i];
        std::printf("criterion %2d: %s  %-26s %s (%.2f s)\n", i + 1,
                    o.pass ? "PASS" : "FAIL", kNames[i], o.detail.c_str(),
                    o.seconds);
        if (!o.pass) ++failures;
    }
    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures;
}
