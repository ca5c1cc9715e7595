#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alioth/dynamics.hpp"
#include "alioth/types.hpp"

namespace alioth {

// The four tilt angles at which one wrench channel loses authority:
// roll, pitch, yaw moment nulls and the zero-tilt heave null.
struct SttaSet {
    double beta_phi;
    double beta_theta;
    double beta_psi;
    double beta_heave;
    // Set when beta_phi and beta_theta coincide within 1e-6 rad.
    bool near_coincident = false;
    // Nonempty when a formula denominator vanished and a limit value was
    // substituted (k_m = 0 -> beta_psi = pi/2).
    std::vector<std::string> degeneracies;
};

SttaSet stta_set(const VehicleParams& p);

// 3x4 earth-frame allocation of the longitudinal (x, z, pitch) subsystem.
Mat34 longitudinal_allocation(const VehicleParams& p, double theta, double beta,
                              const AllocationVectors& e = AllocationVectors::standard());

struct RankReport {
    bool deficient = false;          // rank < row count
    int rank = 0;
    std::vector<int> null_rows;      // 1-indexed rows with vanishing norm
};

// SVD rank with relative tolerance; null rows flagged against the largest
// row norm.
RankReport rank_deficiency(const Eigen::MatrixXd& mat, double tol = 1e-9);

// k1(beta)*M22 - M14*cos(beta)*K_T; zero exactly at beta_phi.
double transverse_singularity_residual(const VehicleParams& p, double beta);

struct HeaveSample {
    double z;
    double z_dot;
    double z_ddot;
};

// (m - Z_wdot) z_ddot + Z_w z_dot - (G - B); zero along zero-tilt heave.
double reduced_heave_residual(const VehicleParams& p, const HeaveSample& s);

// (I_zz - N_rdot) psi_ddot + N_r psi_dot; zero along yaw coast at beta_psi.
double reduced_heading_residual(const VehicleParams& p, double psi_dot,
                                double psi_ddot);

enum class MotionClass { Ascending, Descending, Hover, Insufficient };

std::string to_string(MotionClass c);

struct ConstraintReport {
    bool satisfied = false;
    MotionClass classification = MotionClass::Insufficient;
    double thrust_term = 0.0;   // sin(beta) * omega_sq per motor, signed
    double threshold = 0.0;     // (G - B) / (4 K_T), signed
    double margin = 0.0;        // |thrust_term| - |threshold|
};

// Vertical-motion feasibility for uniform squared speed omega_sq per motor
// at tilt beta. Equality within rel_tol classifies as Hover.
ConstraintReport vertical_motion_check(const VehicleParams& p, double beta,
                                       double omega_sq, double rel_tol = 1e-9);

struct LevelingConstraints {
    double beta_star;      // pitch-null tilt angle
    double omega_sq_sum;   // total squared speed balancing G - B
    double zg_residual;    // z_g + x_qdot / m
};

// Operating constraints for level translation: tilt at the pitch null,
// collective balancing net weight, and the CoG placement residual.
// Throws DegenerateParameterError when G != B while sin(beta_star) = 0.
LevelingConstraints leveling_constraints(const VehicleParams& p);

struct SurgePitchCoeffs {
    double k_z0;      // C18 * M11
    double k_theta0;  // M15 * C12 - M_q * M11
};

// Literal coefficient products of the constrained pitch equation, evaluated
// at the given body velocity.
SurgePitchCoeffs surge_pitch_coeffs(const VehicleParams& p, const Vec6& nu);

// Input equality patterns of the four decoupled subsystems.
enum class InputPattern { Longitudinal = 1, Transverse = 2, Heading = 3, Heave = 4 };

struct SubsystemModel {
    int index;                         // 1..4
    InputPattern pattern;
    std::string name;
    std::vector<std::string> states;
};

const SubsystemModel& subsystem(int index);

// Builds [sum/4 +/- d] motor squared speeds matching the given pattern.
Vec4 apply_input_pattern(InputPattern pattern, double omega_sq_sum,
                         double differential);

bool matches_pattern(const Vec4& u, InputPattern pattern, double tol = 1e-9);

}  // namespace alioth
