// Python module exposing the main operations: vehicle parameters, dynamics
// matrices, tilt-singularity analysis, the allocation matrix, and the full
// scenario simulator driven by the same JSON config schema as the CLI.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "alioth/config.hpp"
#include "alioth/controller.hpp"
#include "alioth/dynamics.hpp"
#include "alioth/simulator.hpp"
#include "alioth/stta.hpp"
#include "alioth/types.hpp"

namespace py = pybind11;
using namespace alioth;

namespace {

py::dict simulate_json(const std::string& config_text) {
    const nlohmann::json j = nlohmann::json::parse(config_text);
    const SimConfig cfg = config_from_json(j);
    const SimResult r = simulate(cfg);

    const auto n = static_cast<Eigen::Index>(r.log.size());
    Eigen::VectorXd t(n), beta(n);
    Eigen::MatrixXd eta(n, 6), nu(n, 6), motor_sq(n, 4), tau(n, 6);
    Eigen::MatrixXd nussbaum(n, 4);
    py::list channel;
    for (Eigen::Index i = 0; i < n; ++i) {
        t(i) = r.log.t[i];
        beta(i) = r.log.beta_cmd[i];
        eta.row(i) = r.log.eta[i];
        nu.row(i) = r.log.nu[i];
        motor_sq.row(i) = r.log.motor_sq[i];
        tau.row(i) = r.log.tau[i];
        nussbaum(i, 0) = r.log.zeta_phi[i];
        nussbaum(i, 1) = r.log.zeta_theta[i];
        nussbaum(i, 2) = r.log.n_phi[i];
        nussbaum(i, 3) = r.log.n_theta[i];
        channel.append(to_string(r.log.channel[i]));
    }

    py::dict metrics;
    metrics["max_abs_roll"] = r.metrics.max_abs_roll;
    metrics["max_abs_pitch"] = r.metrics.max_abs_pitch;
    metrics["diverged"] = r.metrics.diverged;
    metrics["heave_drift"] = r.metrics.heave_drift;
    metrics["settling_time"] = r.metrics.settling_time;

    py::dict out;
    out["t"] = t;
    out["eta"] = eta;
    out["nu"] = nu;
    out["beta_cmd"] = beta;
    out["motor_sq"] = motor_sq;
    out["tau"] = tau;
    out["nussbaum"] = nussbaum;
    out["channel"] = channel;
    out["metrics"] = metrics;
    out["handover_count"] = r.handover_count;
    out["energy_violated"] = r.energy_violated;
    out["step_errors"] = r.step_errors;
    return out;
}

std::string default_config_text() { return default_config_json().dump(2); }

}  // namespace

PYBIND11_MODULE(_alioth, m) {
    m.doc() = "Coupling-tiltable underwater quadrotor: dynamics, tilt "
              "singularities, leveling control";

    py::register_exception<ModelError>(m, "ModelError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<VehicleParams>(m, "VehicleParams")
        .def(py::init<>())
        .def_readwrite("m", &VehicleParams::m)
        .def_readwrite("z_g", &VehicleParams::z_g)
        .def_readwrite("z_t", &VehicleParams::z_t)
        .def_readwrite("l", &VehicleParams::l)
        .def_readwrite("k_t", &VehicleParams::k_t)
        .def_readwrite("k_m", &VehicleParams::k_m)
        .def_readwrite("i_xx", &VehicleParams::i_xx)
        .def_readwrite("i_yy", &VehicleParams::i_yy)
        .def_readwrite("i_zz", &VehicleParams::i_zz)
        .def_readwrite("x_udot", &VehicleParams::x_udot)
        .def_readwrite("y_vdot", &VehicleParams::y_vdot)
        .def_readwrite("z_wdot", &VehicleParams::z_wdot)
        .def_readwrite("k_pdot", &VehicleParams::k_pdot)
        .def_readwrite("m_qdot", &VehicleParams::m_qdot)
        .def_readwrite("n_rdot", &VehicleParams::n_rdot)
        .def_readwrite("x_qdot", &VehicleParams::x_qdot)
        .def_readwrite("y_pdot", &VehicleParams::y_pdot)
        .def_readwrite("x_u", &VehicleParams::x_u)
        .def_readwrite("y_v", &VehicleParams::y_v)
        .def_readwrite("z_w", &VehicleParams::z_w)
        .def_readwrite("k_p", &VehicleParams::k_p)
        .def_readwrite("m_q", &VehicleParams::m_q)
        .def_readwrite("n_r", &VehicleParams::n_r)
        .def_readwrite("g", &VehicleParams::g)
        .def_readwrite("b", &VehicleParams::b)
        .def("m11", &VehicleParams::m11)
        .def("m22", &VehicleParams::m22)
        .def("m33", &VehicleParams::m33)
        .def("m44", &VehicleParams::m44)
        .def("m55", &VehicleParams::m55)
        .def("m66", &VehicleParams::m66)
        .def("m14", &VehicleParams::m14)
        .def("m15", &VehicleParams::m15);

    py::class_<SttaSet>(m, "SttaSet")
        .def_readonly("beta_phi", &SttaSet::beta_phi)
        .def_readonly("beta_theta", &SttaSet::beta_theta)
        .def_readonly("beta_psi", &SttaSet::beta_psi)
        .def_readonly("beta_heave", &SttaSet::beta_heave)
        .def_readonly("near_coincident", &SttaSet::near_coincident)
        .def_readonly("degeneracies", &SttaSet::degeneracies)
        .def("__repr__", [](const SttaSet& s) {
            return "SttaSet(beta_phi=" + std::to_string(s.beta_phi) +
                   ", beta_theta=" + std::to_string(s.beta_theta) +
                   ", beta_psi=" + std::to_string(s.beta_psi) + ")";
        });

    py::class_<LevelingConstraints>(m, "LevelingConstraints")
        .def_readonly("beta_star", &LevelingConstraints::beta_star)
        .def_readonly("omega_sq_sum", &LevelingConstraints::omega_sq_sum)
        .def_readonly("zg_residual", &LevelingConstraints::zg_residual);

    m.def("stta_set", &stta_set, py::arg("params"),
          "Four singular thrust tilt angles for the given parameters");
    m.def("leveling_constraints", &leveling_constraints, py::arg("params"),
          "Tilt, collective and CoG constraints for level translation");
    m.def(
        "cem",
        [](const VehicleParams& p, double beta) -> Eigen::MatrixXd {
            return cem(p, beta);
        },
        py::arg("params"), py::arg("beta"),
        "6x4 control effectiveness matrix at tilt beta");
    m.def(
        "moment_coeffs",
        [](const VehicleParams& p, double beta) {
            const MomentCoeffs k = moment_coeffs(p, beta);
            return py::make_tuple(k.k1, k.k2, k.k3);
        },
        py::arg("params"), py::arg("beta"),
        "Roll, pitch, yaw moment coefficients (k1, k2, k3) at tilt beta");
    m.def(
        "mass_matrix",
        [](const VehicleParams& p) -> Eigen::MatrixXd { return mass_matrix(p); },
        py::arg("params"));
    m.def(
        "damping_matrix",
        [](const VehicleParams& p) -> Eigen::MatrixXd {
            return damping_matrix(p);
        },
        py::arg("params"));
    m.def(
        "coriolis_matrix",
        [](const VehicleParams& p, const Vec6& nu) -> Eigen::MatrixXd {
            return coriolis_matrix(p, nu);
        },
        py::arg("params"), py::arg("nu"));
    m.def(
        "restoring_vector",
        [](const VehicleParams& p, const Vec6& eta) -> Eigen::VectorXd {
            return restoring_vector(p, eta);
        },
        py::arg("params"), py::arg("eta"));
    m.def("nussbaum_value", &nussbaum_value, py::arg("zeta"),
          py::arg("sat_bound") = 2.0,
          "Saturated cos(pi zeta / 2) exp(zeta^2) gain");
    m.def(
        "apply_input_pattern",
        [](int pattern, double omega_sq_sum, double differential) -> Vec4 {
            return apply_input_pattern(static_cast<InputPattern>(pattern),
                                       omega_sq_sum, differential);
        },
        py::arg("pattern"), py::arg("omega_sq_sum"), py::arg("differential"),
        "Squared motor speeds for subsystem pattern 1..4");

    m.def("default_config", &default_config_text,
          "Default scenario config as a JSON string");
    m.def("simulate", &simulate_json, py::arg("config_json"),
          "Run a scenario from a JSON config string; returns trajectory "
          "arrays and metrics");
}
