#include "alioth/config.hpp"

#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace alioth {

namespace {

using nlohmann::json;

const std::vector<std::pair<std::string, double VehicleParams::*>>& param_fields() {
    static const std::vector<std::pair<std::string, double VehicleParams::*>> f = {
        {"m", &VehicleParams::m},         {"z_g", &VehicleParams::z_g},
        {"z_t", &VehicleParams::z_t},     {"l", &VehicleParams::l},
        {"k_t", &VehicleParams::k_t},     {"k_m", &VehicleParams::k_m},
        {"i_xx", &VehicleParams::i_xx},   {"i_yy", &VehicleParams::i_yy},
        {"i_zz", &VehicleParams::i_zz},   {"x_udot", &VehicleParams::x_udot},
        {"y_vdot", &VehicleParams::y_vdot}, {"z_wdot", &VehicleParams::z_wdot},
        {"k_pdot", &VehicleParams::k_pdot}, {"m_qdot", &VehicleParams::m_qdot},
        {"n_rdot", &VehicleParams::n_rdot}, {"x_qdot", &VehicleParams::x_qdot},
        {"y_pdot", &VehicleParams::y_pdot}, {"x_u", &VehicleParams::x_u},
        {"y_v", &VehicleParams::y_v},     {"z_w", &VehicleParams::z_w},
        {"k_p", &VehicleParams::k_p},     {"m_q", &VehicleParams::m_q},
        {"n_r", &VehicleParams::n_r},     {"g", &VehicleParams::g},
        {"b", &VehicleParams::b},
    };
    return f;
}

// Tracks which keys of a JSON object were consumed; leftovers are errors.
class StrictObject {
  public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw ConfigError(path_ + " must be a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            (void)value;
            if (!seen_.count(key))
                throw ConfigError("unknown key '" + path_ + key + "'");
        }
    }

    const std::string& path() const { return path_; }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

double as_double(const json& j, const std::string& path) {
    if (!j.is_number())
        throw ConfigError(path + " must be a number");
    return j.get<double>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path + " must be a boolean");
    return j.get<bool>();
}

template <typename VecT>
VecT as_vec(const json& j, const std::string& path) {
    VecT v;
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != v.size())
        throw ConfigError(path + " must be an array of " +
                          std::to_string(v.size()) + " numbers");
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = as_double(j[static_cast<std::size_t>(i)],
                         path + "[" + std::to_string(i) + "]");
    return v;
}

void get_double(StrictObject& o, const std::string& key, double& out) {
    if (o.has(key)) out = as_double(o.at(key), o.path() + key);
}

void get_bool(StrictObject& o, const std::string& key, bool& out) {
    if (o.has(key)) out = as_bool(o.at(key), o.path() + key);
}

template <typename VecT>
void get_vec(StrictObject& o, const std::string& key, VecT& out) {
    if (o.has(key)) out = as_vec<VecT>(o.at(key), o.path() + key);
}

PidGains pid_from_json(const json& j, const std::string& path, PidGains defaults) {
    StrictObject o(j, path + ".");
    get_double(o, "kp", defaults.kp);
    get_double(o, "ki", defaults.ki);
    get_double(o, "kd", defaults.kd);
    get_double(o, "integral_limit", defaults.integral_limit);
    o.finish();
    return defaults;
}

json pid_to_json(const PidGains& g) {
    return {{"kp", g.kp},
            {"ki", g.ki},
            {"kd", g.kd},
            {"integral_limit", g.integral_limit}};
}

json vec_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json rowvec_to_json(const RowVec4& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < 4; ++i) a.push_back(v(i));
    return a;
}

}  // namespace

VehicleParams params_from_json(const json& j) {
    VehicleParams p;
    StrictObject o(j, "params.");
    for (const auto& [name, member] : param_fields())
        if (o.has(name)) p.*member = as_double(o.at(name), "params." + name);
    o.finish();
    return p;
}

SimConfig config_from_json(const json& j) {
    SimConfig cfg;
    StrictObject top(j, "");

    if (!top.has("schema_version"))
        throw ConfigError("missing required key 'schema_version'");
    const json& sv = top.at("schema_version");
    if (!sv.is_number_integer() || sv.get<int>() != kSchemaVersion)
        throw ConfigError("schema_version must be the integer " +
                          std::to_string(kSchemaVersion));

    if (top.has("params")) cfg.params = params_from_json(top.at("params"));

    if (top.has("alloc")) {
        StrictObject o(top.at("alloc"), "alloc.");
        get_vec(o, "e_x", cfg.alloc.e_x);
        get_vec(o, "e_y", cfg.alloc.e_y);
        get_vec(o, "e_z", cfg.alloc.e_z);
        get_vec(o, "e_phi", cfg.alloc.e_phi);
        get_vec(o, "e_theta", cfg.alloc.e_theta);
        get_vec(o, "e_psi", cfg.alloc.e_psi);
        o.finish();
    }

    if (top.has("initial_state")) {
        StrictObject o(top.at("initial_state"), "initial_state.");
        get_vec(o, "eta", cfg.initial_state.eta);
        get_vec(o, "nu", cfg.initial_state.nu);
        o.finish();
    }

    get_double(top, "dt_physics", cfg.dt_physics);
    get_double(top, "duration", cfg.duration);

    if (top.has("delta_schedule")) {
        const json& arr = top.at("delta_schedule");
        if (!arr.is_array())
            throw ConfigError("delta_schedule must be an array");
        cfg.delta_schedule.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path =
                "delta_schedule[" + std::to_string(i) + "].";
            StrictObject o(arr[i], path);
            DeltaSegment seg;
            get_double(o, "t", seg.t);
            get_vec(o, "delta", seg.delta);
            o.finish();
            cfg.delta_schedule.push_back(seg);
        }
    }

    if (top.has("disturbance")) {
        StrictObject o(top.at("disturbance"), "disturbance.");
        get_vec(o, "constant_wrench", cfg.disturbance.constant_wrench);
        get_vec(o, "noise_std", cfg.disturbance.noise_std);
        get_double(o, "noise_bandwidth_hz", cfg.disturbance.noise_bandwidth_hz);
        get_double(o, "noise_rate_hz", cfg.disturbance.noise_rate_hz);
        o.finish();
    }

    if (top.has("controller")) {
        StrictObject o(top.at("controller"), "controller.");
        if (o.has("beta_pid"))
            cfg.controller.beta_pid = pid_from_json(
                o.at("beta_pid"), "controller.beta_pid", cfg.controller.beta_pid);
        if (o.has("aux_pid"))
            cfg.controller.aux_pid = pid_from_json(
                o.at("aux_pid"), "controller.aux_pid", cfg.controller.aux_pid);
        get_vec(o, "k_zeta", cfg.controller.k_zeta);
        get_double(o, "sat_bound", cfg.controller.sat_bound);
        get_double(o, "sgn_deadband", cfg.controller.sgn_deadband);
        get_double(o, "hysteresis_rel", cfg.controller.hysteresis_rel);
        get_double(o, "hysteresis_abs", cfg.controller.hysteresis_abs);
        get_double(o, "rate_hz", cfg.controller.rate_hz);
        o.finish();
    }

    if (top.has("actuators")) {
        StrictObject o(top.at("actuators"), "actuators.");
        get_double(o, "tau_motor", cfg.actuators.tau_motor);
        get_double(o, "tau_servo", cfg.actuators.tau_servo);
        o.finish();
    }

    if (top.has("flags")) {
        StrictObject o(top.at("flags"), "flags.");
        get_bool(o, "nussbaum_enabled", cfg.flags.nussbaum_enabled);
        get_bool(o, "flip_aux_sign", cfg.flags.flip_aux_sign);
        o.finish();
    }

    if (top.has("limits")) {
        StrictObject o(top.at("limits"), "limits.");
        get_double(o, "u_max", cfg.limits.u_max);
        get_double(o, "divergence_threshold_deg",
                   cfg.limits.divergence_threshold_deg);
        get_double(o, "theta_max_deg", cfg.limits.theta_max_deg);
        o.finish();
    }

    if (top.has("checks")) {
        StrictObject o(top.at("checks"), "checks.");
        get_bool(o, "energy_monotonic", cfg.checks.energy_monotonic);
        o.finish();
    }

    if (top.has("mode")) {
        const json& m = top.at("mode");
        if (!m.is_string()) throw ConfigError("mode must be a string");
        const std::string s = m.get<std::string>();
        if (s == "closed_loop") cfg.mode = SimMode::ClosedLoop;
        else if (s == "open_loop") cfg.mode = SimMode::OpenLoop;
        else throw ConfigError("mode must be 'closed_loop' or 'open_loop'");
    }

    if (top.has("open_loop")) {
        StrictObject o(top.at("open_loop"), "open_loop.");
        get_double(o, "beta", cfg.open_loop.beta);
        if (o.has("pattern")) {
            const json& p = o.at("pattern");
            if (!p.is_number_integer())
                throw ConfigError("open_loop.pattern must be an integer");
            cfg.open_loop.pattern = p.get<int>();
        }
        if (o.has("schedule")) {
            const json& arr = o.at("schedule");
            if (!arr.is_array())
                throw ConfigError("open_loop.schedule must be an array");
            cfg.open_loop.schedule.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path =
                    "open_loop.schedule[" + std::to_string(i) + "].";
                StrictObject so(arr[i], path);
                OpenLoopSegment seg;
                get_double(so, "t", seg.t);
                get_double(so, "omega_sq_sum", seg.omega_sq_sum);
                get_double(so, "differential", seg.differential);
                so.finish();
                cfg.open_loop.schedule.push_back(seg);
            }
        }
        o.finish();
    }

    if (top.has("seed")) {
        const json& s = top.at("seed");
        if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
            throw ConfigError("seed must be a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (top.has("log_stride")) {
        const json& s = top.at("log_stride");
        if (!s.is_number_integer())
            throw ConfigError("log_stride must be an integer");
        cfg.log_stride = s.get<int>();
    }

    if (top.has("sweep")) (void)top.at("sweep");
    if (top.has("ablation")) (void)top.at("ablation");

    top.finish();
    return cfg;
}

json config_to_json(const SimConfig& cfg) {
    json jp;
    for (const auto& [name, member] : param_fields()) jp[name] = cfg.params.*member;

    json sched = json::array();
    for (const auto& seg : cfg.delta_schedule)
        sched.push_back({{"t", seg.t}, {"delta", vec_to_json(seg.delta)}});

    json ol_sched = json::array();
    for (const auto& seg : cfg.open_loop.schedule)
        ol_sched.push_back({{"t", seg.t},
                            {"omega_sq_sum", seg.omega_sq_sum},
                            {"differential", seg.differential}});

    return {
        {"schema_version", kSchemaVersion},
        {"params", jp},
        {"alloc",
         {{"e_x", rowvec_to_json(cfg.alloc.e_x)},
          {"e_y", rowvec_to_json(cfg.alloc.e_y)},
          {"e_z", rowvec_to_json(cfg.alloc.e_z)},
          {"e_phi", rowvec_to_json(cfg.alloc.e_phi)},
          {"e_theta", rowvec_to_json(cfg.alloc.e_theta)},
          {"e_psi", rowvec_to_json(cfg.alloc.e_psi)}}},
        {"initial_state",
         {{"eta", vec_to_json(cfg.initial_state.eta)},
          {"nu", vec_to_json(cfg.initial_state.nu)}}},
        {"dt_physics", cfg.dt_physics},
        {"duration", cfg.duration},
        {"delta_schedule", sched},
        {"disturbance",
         {{"constant_wrench", vec_to_json(cfg.disturbance.constant_wrench)},
          {"noise_std", vec_to_json(cfg.disturbance.noise_std)},
          {"noise_bandwidth_hz", cfg.disturbance.noise_bandwidth_hz},
          {"noise_rate_hz", cfg.disturbance.noise_rate_hz}}},
        {"controller",
         {{"beta_pid", pid_to_json(cfg.controller.beta_pid)},
          {"aux_pid", pid_to_json(cfg.controller.aux_pid)},
          {"k_zeta", vec_to_json(cfg.controller.k_zeta)},
          {"sat_bound", cfg.controller.sat_bound},
          {"sgn_deadband", cfg.controller.sgn_deadband},
          {"hysteresis_rel", cfg.controller.hysteresis_rel},
          {"hysteresis_abs", cfg.controller.hysteresis_abs},
          {"rate_hz", cfg.controller.rate_hz}}},
        {"actuators",
         {{"tau_motor", cfg.actuators.tau_motor},
          {"tau_servo", cfg.actuators.tau_servo}}},
        {"flags",
         {{"nussbaum_enabled", cfg.flags.nussbaum_enabled},
          {"flip_aux_sign", cfg.flags.flip_aux_sign}}},
        {"limits",
         {{"u_max", cfg.limits.u_max},
          {"divergence_threshold_deg", cfg.limits.divergence_threshold_deg},
          {"theta_max_deg", cfg.limits.theta_max_deg}}},
        {"checks", {{"energy_monotonic", cfg.checks.energy_monotonic}}},
        {"mode", cfg.mode == SimMode::ClosedLoop ? "closed_loop" : "open_loop"},
        {"open_loop",
         {{"beta", cfg.open_loop.beta},
          {"pattern", cfg.open_loop.pattern},
          {"schedule", ol_sched}}},
        {"seed", cfg.seed},
        {"log_stride", cfg.log_stride},
    };
}

json default_config_json() { return config_to_json(SimConfig{}); }

SimConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings allowed unquoted
    }

    json* node = &j;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty())
            throw ConfigError("empty path component in override: " + path);

        const bool last = dot == std::string::npos;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(key);
            } catch (const std::exception&) {
                throw ConfigError("array index expected at '" + key +
                                  "' in override: " + path);
            }
            if (idx >= node->size())
                throw ConfigError("array index out of range in override: " + path);
            node = &(*node)[idx];
        } else if (node->is_object()) {
            if (!node->contains(key))
                throw ConfigError("override key matches no field: " + path);
            node = &(*node)[key];
        } else {
            throw ConfigError("override path descends into a scalar: " + path);
        }

        if (last) break;
        pos = dot + 1;
    }
    if (node->is_object() || node->is_array()) {
        if (!value.is_array() && !value.is_object())
            throw ConfigError("override target '" + path +
                              "' is structured; provide a JSON value");
    }
    *node = value;
}

SweepSpec sweep_from_json(const json& root) {
    if (!root.is_object() || !root.contains("sweep"))
        throw ConfigError("config has no 'sweep' section");
    StrictObject o(root.at("sweep"), "sweep.");
    SweepSpec spec;
    if (!o.has("parameter"))
        throw ConfigError("sweep.parameter is required");
    const json& p = o.at("parameter");
    if (!p.is_string()) throw ConfigError("sweep.parameter must be a string");
    spec.parameter = p.get<std::string>();
    if (!o.has("values")) throw ConfigError("sweep.values is required");
    const json& vals = o.at("values");
    if (!vals.is_array() || vals.empty())
        throw ConfigError("sweep.values must be a nonempty array of numbers");
    for (std::size_t i = 0; i < vals.size(); ++i)
        spec.values.push_back(
            as_double(vals[i], "sweep.values[" + std::to_string(i) + "]"));
    o.finish();
    return spec;
}

AblationSpec ablation_from_json(const json& root) {
    AblationSpec spec;
    if (!root.is_object() || !root.contains("ablation")) return spec;
    StrictObject o(root.at("ablation"), "ablation.");
    if (o.has("seeds")) {
        const json& s = o.at("seeds");
        if (!s.is_array() || s.empty())
            throw ConfigError("ablation.seeds must be a nonempty array");
        spec.seeds.clear();
        for (const auto& v : s) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                throw ConfigError("ablation.seeds entries must be nonnegative integers");
            spec.seeds.push_back(v.get<std::uint64_t>());
        }
    }
    o.finish();
    return spec;
}

}  // namespace alioth
