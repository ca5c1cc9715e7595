#pragma once

#include "alioth/types.hpp"

namespace alioth {

// 6x6 rigid-body-plus-added-mass matrix. Symmetric; sparsity limited to the
// diagonal and the surge/pitch-rate and sway/roll-rate couplings.
Mat6 mass_matrix(const VehicleParams& p);

// Diagonal linear damping, positive dissipation magnitudes on the diagonal.
Mat6 damping_matrix(const VehicleParams& p);

// Velocity-dependent Coriolis/centripetal matrix. Skew-symmetric by
// construction: the lower triangle mirrors the upper with negated sign.
// The v/p mix in the surge-yaw entry and the p (not q) term in the
// heave-pitch entry follow the vehicle model definition verbatim.
Mat6 coriolis_matrix(const VehicleParams& p, const Vec6& nu);

// Hydrostatic restoring vector for an origin at the center of buoyancy with
// the center of gravity offset z_g along body z.
Vec6 restoring_vector(const VehicleParams& p, const Vec6& eta);

// Block-diagonal kinematic transform J = diag(R, S^-1) for ZYX Euler angles;
// eta_dot = J(eta) nu. Throws AttitudeSingularityError for |theta| beyond
// theta_max.
Mat6 transform(const Vec6& eta, double theta_max = kDefaultThetaMaxRad);

// Analytic d/dt of transform() along (eta, nu): Rdot = R*skew(omega) and the
// closed-form Euler-rate-matrix derivative.
Mat6 transform_derivative(const Vec6& eta, const Vec6& nu,
                          double theta_max = kDefaultThetaMaxRad);

struct MomentCoeffs {
    double k1;  // roll moment per tilted squared speed
    double k2;  // pitch moment per tilted squared speed
    double k3;  // yaw moment per tilted squared speed
};

MomentCoeffs moment_coeffs(const VehicleParams& p, double beta);

// 6x4 control effectiveness matrix B(beta) mapping squared rotor speeds to
// the body wrench. Rows: x, y, z forces then roll, pitch, yaw moments.
Mat64 cem(const VehicleParams& p, double beta,
          const AllocationVectors& e = AllocationVectors::standard());

// tau = B(beta) u. Throws ConfigError for negative squared speeds.
Vec6 generalized_force(const VehicleParams& p, double beta, const Vec4& u,
                       const AllocationVectors& e = AllocationVectors::standard());

struct EframeDynamics {
    Mat64 b_e;  // earth-frame input matrix J M^-1 B
    Vec6 f;     // drift term; eta_ddot = b_e u + f
};

// Caches the mass-matrix factorization for one parameter set.
class VehicleModel {
  public:
    explicit VehicleModel(const VehicleParams& p,
                          AllocationVectors e = AllocationVectors::standard());

    const VehicleParams& params() const { return p_; }
    const AllocationVectors& alloc() const { return e_; }
    const Mat6& mass() const { return mass_; }
    double mass_rcond() const { return rcond_; }

    Vec6 solve_mass(const Vec6& rhs) const { return llt_.solve(rhs); }

    // nu_dot = M^-1 (tau - C(nu) nu - D nu - g(eta))
    Vec6 acceleration(const RigidState& s, const Vec6& tau) const;

    // Earth-frame form: eta_ddot = B_e u + f with
    // B_e = J M^-1 B(beta) and f = (Jdot - J M^-1 C - J M^-1 D) J^-1 eta_dot
    // - J M^-1 g.
    EframeDynamics eframe_dynamics(const RigidState& s, double beta,
                                   double theta_max = kDefaultThetaMaxRad) const;

  private:
    VehicleParams p_;
    AllocationVectors e_;
    Mat6 mass_;
    Mat6 damping_;
    Eigen::LDLT<Mat6> llt_;
    double rcond_;
};

}  // namespace alioth
