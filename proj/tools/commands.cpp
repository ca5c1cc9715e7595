#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "alioth/config.hpp"
#include "alioth/dynamics.hpp"
#include "alioth/logging.hpp"
#include "alioth/simulator.hpp"
#include "alioth/stta.hpp"
#include "alioth/svg.hpp"

namespace alioth::cli {

namespace {

using nlohmann::json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fixed(double v, int prec, int width = 0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%*.*f", width, prec, v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

// File config (or built-in defaults) merged into a complete document, with
// --set overrides and --seed applied. sweep/ablation sections ride along.
json merged_document(const CommonOptions& opt) {
    const json raw = opt.config_path.empty() ? default_config_json()
                                             : read_json_file(opt.config_path);
    json doc = config_to_json(config_from_json(raw));
    if (raw.contains("sweep")) doc["sweep"] = raw.at("sweep");
    if (raw.contains("ablation")) doc["ablation"] = raw.at("ablation");
    for (const auto& ov : opt.overrides) apply_override(doc, ov);
    if (opt.seed_set) doc["seed"] = opt.seed;
    return doc;
}

std::filesystem::path ensure_out_dir(const CommonOptions& opt) {
    const std::filesystem::path dir(opt.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + dir.string() +
                          ": " + ec.message());
    return dir;
}

void write_text_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << body;
}

json metrics_to_json(const ScenarioMetrics& m) {
    return {{"max_abs_roll", m.max_abs_roll},
            {"max_abs_pitch", m.max_abs_pitch},
            {"diverged", m.diverged},
            {"heave_drift", m.heave_drift},
            {"settling_time", m.settling_time}};
}

std::vector<double> column_deg(const TrajectoryLog& log, int idx) {
    std::vector<double> out;
    out.reserve(log.size());
    for (const Vec6& eta : log.eta) out.push_back(eta(idx) * kDegPerRad);
    return out;
}

void write_attitude_chart(const std::filesystem::path& path,
                          const std::string& title, const TrajectoryLog& log) {
    write_svg_chart(path.string(), title, "time [s]", "angle [deg]",
                    {{"roll", "#1f77b4", log.t, column_deg(log, 3)},
                     {"pitch", "#d62728", log.t, column_deg(log, 4)}});
}

}  // namespace

int cmd_stta(const CommonOptions& opt) {
    const json doc = merged_document(opt);
    const SimConfig cfg = config_from_json(doc);
    const VehicleParams& p = cfg.params;
    const auto out = ensure_out_dir(opt);

    const SttaSet set = stta_set(p);

    const RankReport heave = rank_deficiency(cem(p, set.beta_heave, cfg.alloc));
    const RankReport yaw = rank_deficiency(cem(p, set.beta_psi, cfg.alloc));
    const RankReport pitch =
        rank_deficiency(longitudinal_allocation(p, 0.0, set.beta_theta, cfg.alloc));
    const double roll_res = transverse_singularity_residual(p, set.beta_phi);
    const double roll_scale =
        std::abs(p.m14() * p.k_t) + p.l * p.k_t * p.m22();
    const double roll_rel = std::abs(roll_res) / roll_scale;

    auto rows_text = [](const RankReport& r) {
        std::string s = "null rows {";
        for (std::size_t i = 0; i < r.null_rows.size(); ++i) {
            if (i) s += ", ";
            s += std::to_string(r.null_rows[i]);
        }
        s += "}, rank " + std::to_string(r.rank);
        return s;
    };

    std::ostringstream text;
    text << "singular tilt angles\n";
    text << "  channel   rad           deg           verification\n";
    const auto line = [&](const char* name, double beta, const std::string& v) {
        text << "  " << name << std::string(10 - std::strlen(name), ' ')
             << fixed(beta, 9, 11) << "  " << fixed(beta * kDegPerRad, 7, 12)
             << "  " << v << "\n";
    };
    line("roll", set.beta_phi, "moment residual " + fmt(roll_rel) + " (relative)");
    line("pitch", set.beta_theta, rows_text(pitch));
    line("yaw", set.beta_psi, rows_text(yaw));
    line("heave", set.beta_heave, rows_text(heave));

    bool degenerate = !set.degeneracies.empty();
    json leveling = nullptr;
    text << "leveling constraints\n";
    try {
        const LevelingConstraints lc = leveling_constraints(p);
        text << "  tilt          " << fixed(lc.beta_star, 9) << " rad ("
             << fixed(lc.beta_star * kDegPerRad, 6) << " deg)\n";
        text << "  collective    " << fmt(lc.omega_sq_sum)
             << " (sum of squared rotor speeds)\n";
        text << "  cog residual  " << fmt(lc.zg_residual) << " m\n";
        leveling = {{"beta_star", lc.beta_star},
                    {"beta_star_deg", lc.beta_star * kDegPerRad},
                    {"omega_sq_sum", lc.omega_sq_sum},
                    {"zg_residual", lc.zg_residual}};
    } catch (const DegenerateParameterError& e) {
        degenerate = true;
        text << "  unavailable: " << e.what() << "\n";
        log_warn(std::string("leveling constraints: ") + e.what());
    }

    std::cout << text.str();
    for (const auto& d : set.degeneracies) log_warn("degenerate: " + d);
    if (set.near_coincident)
        log_warn("roll and pitch singular tilts coincide within 1e-6 rad");

    const json j = {
        {"beta_phi", set.beta_phi},
        {"beta_phi_deg", set.beta_phi * kDegPerRad},
        {"beta_theta", set.beta_theta},
        {"beta_theta_deg", set.beta_theta * kDegPerRad},
        {"beta_psi", set.beta_psi},
        {"beta_psi_deg", set.beta_psi * kDegPerRad},
        {"beta_heave", set.beta_heave},
        {"beta_heave_deg", set.beta_heave * kDegPerRad},
        {"near_coincident", set.near_coincident},
        {"degeneracies", set.degeneracies},
        {"verification",
         {{"heave", {{"null_rows", heave.null_rows}, {"rank", heave.rank}}},
          {"yaw", {{"null_rows", yaw.null_rows}, {"rank", yaw.rank}}},
          {"pitch", {{"null_rows", pitch.null_rows}, {"rank", pitch.rank}}},
          {"roll_residual_rel", roll_rel}}},
        {"leveling", leveling},
    };
    write_text_file(out / "stta.json", j.dump(2) + "\n");
    std::cout << "wrote " << (out / "stta.json").string() << "\n";

    return degenerate ? 2 : 0;
}

int cmd_simulate(const CommonOptions& opt) {
    const json doc = merged_document(opt);
    const SimConfig cfg = config_from_json(doc);
    const auto out = ensure_out_dir(opt);

    const SimResult res = simulate(cfg);
    const ScenarioMetrics& m = res.metrics;

    write_csv(res.log, (out / "trajectory.csv").string());
    write_text_file(out / "metrics.json", metrics_to_json(m).dump(2) + "\n");
    write_attitude_chart(out / "attitude.svg", "attitude angles", res.log);
    write_svg_chart((out / "nussbaum.svg").string(), "auxiliary channel gains",
                    "time [s]", "gain",
                    {{"N(zeta_phi)", "#2ca02c", res.log.t, res.log.n_phi},
                     {"N(zeta_theta)", "#9467bd", res.log.t, res.log.n_theta}});

    for (const auto& e : res.step_errors) log_warn(e);

    std::cout << "rows " << res.log.size() << ", simulated "
              << fmt(res.log.t.empty() ? 0.0 : res.log.t.back()) << " s\n";
    std::cout << "max |roll| " << fixed(m.max_abs_roll, 4) << " deg, max |pitch| "
              << fixed(m.max_abs_pitch, 4) << " deg\n";
    std::cout << "heave drift " << fixed(m.heave_drift, 4) << " m, settling "
              << (m.settling_time < 0.0 ? std::string("never")
                                        : fixed(m.settling_time, 3) + " s")
              << ", handovers " << res.handover_count << "\n";
    if (res.energy_violated) log_warn("kinetic energy increased during coast");
    std::cout << "wrote " << (out / "trajectory.csv").string() << ", metrics.json, "
              << "attitude.svg, nussbaum.svg\n";

    if (m.diverged) {
        log_warn("attitude crossed the divergence threshold");
        if (!opt.allow_divergence) return 3;
    }
    return 0;
}

int cmd_sweep(const CommonOptions& opt) {
    const json doc = merged_document(opt);
    const SweepSpec spec = sweep_from_json(doc);
    const auto out = ensure_out_dir(opt);
    if (opt.jobs < 0) throw ConfigError("--jobs must be positive");

    {
        // Fail fast on a bad parameter path before spawning workers.
        json probe = doc;
        apply_override(probe, spec.parameter + "=" + fmt(spec.values.front()));
        (void)config_from_json(probe);
    }

    struct Row {
        double value = 0.0;
        ScenarioMetrics m;
        std::string error;
        bool failed = false;
    };
    std::vector<Row> rows(spec.values.size());

    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers =
        std::min<std::size_t>(opt.jobs > 0 ? static_cast<unsigned>(opt.jobs)
                                           : (hw ? hw : 1u),
                              rows.size());

    std::atomic<std::size_t> next{0};
    auto run_rows = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= rows.size()) return;
            rows[i].value = spec.values[i];
            try {
                json run = doc;
                apply_override(run, spec.parameter + "=" + fmt(spec.values[i]));
                rows[i].m = simulate(config_from_json(run)).metrics;
            } catch (const std::exception& e) {
                rows[i].failed = true;
                rows[i].error = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(run_rows);
    run_rows();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << csv_field(spec.parameter)
        << ",max_abs_roll,max_abs_pitch,diverged,heave_drift,settling_time,error\n";
    std::size_t failures = 0;
    for (const Row& r : rows) {
        if (r.failed) {
            ++failures;
            csv << fmt(r.value) << ",,,,,," << csv_field(r.error) << "\n";
        } else {
            csv << fmt(r.value) << ',' << fmt(r.m.max_abs_roll) << ','
                << fmt(r.m.max_abs_pitch) << ',' << (r.m.diverged ? 1 : 0) << ','
                << fmt(r.m.heave_drift) << ',' << fmt(r.m.settling_time) << ",\n";
        }
    }
    write_text_file(out / "sweep.csv", csv.str());

    std::cout << spec.parameter << " swept over " << rows.size() << " values, "
              << workers << " worker(s)\n";
    for (const Row& r : rows) {
        std::cout << "  " << fmt(r.value) << ": ";
        if (r.failed)
            std::cout << "failed: " << r.error << "\n";
        else
            std::cout << "max |roll| " << fixed(r.m.max_abs_roll, 4)
                      << " deg, max |pitch| " << fixed(r.m.max_abs_pitch, 4)
                      << " deg" << (r.m.diverged ? ", diverged" : "") << "\n";
    }
    std::cout << "wrote " << (out / "sweep.csv").string() << "\n";

    if (failures == rows.size()) {
        log_error("every sweep row failed");
        return 1;
    }
    return 0;
}

int cmd_ablation(const CommonOptions& opt) {
    const json doc = merged_document(opt);
    const AblationSpec spec = ablation_from_json(doc);
    const auto out = ensure_out_dir(opt);

    std::vector<std::uint64_t> seeds = spec.seeds;
    if (opt.seed_set) seeds = {opt.seed};

    json cases = json::array();
    bool regression = false;
    std::optional<SimResult> plot_on, plot_off;

    for (const std::uint64_t seed : seeds) {
        json run = doc;
        run["seed"] = seed;
        json on_doc = run;
        on_doc["flags"]["nussbaum_enabled"] = true;
        json off_doc = run;
        off_doc["flags"]["nussbaum_enabled"] = false;

        const SimResult on = simulate(config_from_json(on_doc));
        const SimResult off = simulate(config_from_json(off_doc));
        if (on.metrics.diverged) regression = true;

        const auto range = [](const std::vector<double>& v) {
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return json::array({*lo, *hi});
        };
        json enabled = metrics_to_json(on.metrics);
        enabled["nussbaum_gain_range"] = {{"phi", range(on.log.n_phi)},
                                          {"theta", range(on.log.n_theta)}};
        cases.push_back({{"seed", seed},
                         {"enabled", enabled},
                         {"disabled", metrics_to_json(off.metrics)}});

        std::cout << "seed " << seed << ": enabled "
                  << (on.metrics.diverged ? "DIVERGED" : "stable") << " (max "
                  << fixed(std::max(on.metrics.max_abs_roll,
                                    on.metrics.max_abs_pitch),
                           3)
                  << " deg), disabled "
                  << (off.metrics.diverged ? "diverged" : "STABLE") << " (max "
                  << fixed(std::max(off.metrics.max_abs_roll,
                                    off.metrics.max_abs_pitch),
                           3)
                  << " deg)\n";

        if (!plot_on) {
            plot_on = on;
            plot_off = off;
        }
    }

    const SimConfig base_cfg = config_from_json(doc);
    const json summary = {{"flip_aux_sign", base_cfg.flags.flip_aux_sign},
                          {"seeds", seeds},
                          {"cases", cases},
                          {"regression", regression}};
    write_text_file(out / "ablation.json", summary.dump(2) + "\n");

    if (plot_on) {
        write_svg_chart(
            (out / "ablation.svg").string(), "attitude with and without adaptation",
            "time [s]", "angle [deg]",
            {{"enabled roll", "#1f77b4", plot_on->log.t, column_deg(plot_on->log, 3)},
             {"enabled pitch", "#d62728", plot_on->log.t,
              column_deg(plot_on->log, 4)},
             {"disabled roll", "#17becf", plot_off->log.t,
              column_deg(plot_off->log, 3)},
             {"disabled pitch", "#ff7f0e", plot_off->log.t,
              column_deg(plot_off->log, 4)}});
    }
    std::cout << "wrote " << (out / "ablation.json").string() << ", ablation.svg\n";

    if (regression) {
        log_error("adaptive-gain run diverged");
        return 4;
    }
    return 0;
}

int cmd_validate(const CommonOptions& opt) {
    const json doc = merged_document(opt);
    const SimConfig cfg = config_from_json(doc);
    const VehicleParams& p = cfg.params;

    struct Line {
        std::string name;
        bool pass;
        std::string note;
    };
    std::vector<Line> lines;
    const auto check = [&](const std::string& name, auto&& fn) {
        try {
            auto [ok, note] = fn();
            lines.push_back({name, ok, note});
        } catch (const std::exception& e) {
            lines.push_back({name, false, e.what()});
        }
    };

    check("model construction", [&]() {
        const VehicleModel model(p, cfg.alloc);
        return std::pair(true, "mass rcond " + fmt(model.mass_rcond()));
    });

    check("mass matrix symmetry", [&]() {
        const Mat6 mm = mass_matrix(p);
        const double asym = (mm - mm.transpose()).cwiseAbs().maxCoeff();
        return std::pair(asym == 0.0, "max asymmetry " + fmt(asym));
    });

    check("coriolis skew symmetry", [&]() {
        std::mt19937_64 rng(12345);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double worst_skew = 0.0, worst_power = 0.0;
        for (int i = 0; i < 100; ++i) {
            Vec6 nu;
            for (int k = 0; k < 6; ++k) nu(k) = u(rng);
            const Mat6 c = coriolis_matrix(p, nu);
            worst_skew =
                std::max(worst_skew, (c + c.transpose()).cwiseAbs().maxCoeff());
            worst_power = std::max(worst_power, std::abs(nu.dot(c * nu)));
        }
        return std::pair(worst_skew == 0.0 && worst_power < 1e-12,
                         "max power leak " + fmt(worst_power));
    });

    check("allocation row independence", [&]() {
        Eigen::MatrixXd stack(4, 4);
        stack.row(0) = cfg.alloc.e_z;
        stack.row(1) = cfg.alloc.e_phi;
        stack.row(2) = cfg.alloc.e_theta;
        stack.row(3) = cfg.alloc.e_psi;
        const RankReport r = rank_deficiency(stack);
        return std::pair(r.rank == 4, "stack rank " + std::to_string(r.rank));
    });

    check("tilt singularity null rows", [&]() {
        const SttaSet set = stta_set(p);
        const auto has_row = [](const RankReport& r, int row) {
            return std::find(r.null_rows.begin(), r.null_rows.end(), row) !=
                   r.null_rows.end();
        };
        const bool heave_ok =
            has_row(rank_deficiency(cem(p, set.beta_heave, cfg.alloc)), 3);
        const bool yaw_ok =
            has_row(rank_deficiency(cem(p, set.beta_psi, cfg.alloc)), 6);
        const bool pitch_ok = has_row(
            rank_deficiency(longitudinal_allocation(p, 0.0, set.beta_theta,
                                                    cfg.alloc)),
            3);
        const double roll_rel =
            std::abs(transverse_singularity_residual(p, set.beta_phi)) /
            (std::abs(p.m14() * p.k_t) + p.l * p.k_t * p.m22());
        const bool roll_ok = roll_rel < 1e-9;
        std::string note;
        if (heave_ok && yaw_ok && pitch_ok && roll_ok)
            note = "all four channels vanish at their tilt";
        else
            note = std::string("heave ") + (heave_ok ? "ok" : "FAIL") + ", yaw " +
                   (yaw_ok ? "ok" : "FAIL") + ", pitch " +
                   (pitch_ok ? "ok" : "FAIL") + ", roll " +
                   (roll_ok ? "ok" : "FAIL");
        return std::pair(heave_ok && yaw_ok && pitch_ok && roll_ok, note);
    });

    check("energy dissipation", [&]() {
        SimConfig ec;
        ec.params = p;
        ec.params.b = ec.params.g;  // neutral buoyancy
        ec.params.z_g = 0.0;
        ec.mode = SimMode::OpenLoop;
        ec.actuators.tau_motor = 0.0;
        ec.actuators.tau_servo = 0.0;
        ec.duration = 2.0;
        ec.dt_physics = 1e-3;
        ec.checks.energy_monotonic = true;
        ec.initial_state.nu << 0.3, -0.2, 0.25, 0.4, -0.3, 0.35;
        const SimResult r = simulate(ec);
        return std::pair(!r.energy_violated && r.step_errors.empty(),
                         r.energy_violated ? "kinetic energy increased"
                                           : "non-increasing over coast");
    });

    check("integrator convergence order", [&]() {
        VehicleParams hp = p;
        hp.z_g = 0.0;
        hp.x_qdot = 0.0;
        hp.y_pdot = 0.0;
        if (std::abs(hp.g - hp.b) < 0.5) hp.b = hp.g - 3.0;
        const auto err_at = [&](double dt) {
            const VehicleModel model(hp);
            RigidState s;
            const int n = static_cast<int>(std::lround(1.0 / dt));
            for (int i = 0; i < n; ++i)
                s = rk4_step(model, s, ActuatorCommand{}, Vec6::Zero(), dt);
            const double v_inf = (hp.g - hp.b) / hp.z_w;
            const double tau = (hp.m - hp.z_wdot) / hp.z_w;
            const double vT = v_inf * (1.0 - std::exp(-1.0 / tau));
            const double zT = v_inf * (1.0 - tau * (1.0 - std::exp(-1.0 / tau)));
            return std::max(std::abs(s.nu(2) - vT), std::abs(s.eta(2) - zT));
        };
        const double order = std::log2(err_at(0.04) / err_at(0.02));
        return std::pair(order >= 3.9, "measured order " + fixed(order, 3));
    });

    bool all = true;
    for (const Line& l : lines) {
        all = all && l.pass;
        std::cout << l.name << std::string(30 - l.name.size(), ' ')
                  << (l.pass ? "pass" : "FAIL") << "   " << l.note << "\n";
    }
    std::cout << (all ? "all invariants hold" : "INVARIANT FAILURE") << "\n";
    return all ? 0 : 1;
}

}  // namespace alioth::cli
