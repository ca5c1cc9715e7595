#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace alioth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat64 = Eigen::Matrix<double, 6, 4>;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using RowVec4 = Eigen::Matrix<double, 1, 4>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrixError : ModelError {
    using ModelError::ModelError;
};

struct AttitudeSingularityError : ModelError {
    using ModelError::ModelError;
};

struct DegenerateParameterError : ModelError {
    using ModelError::ModelError;
};

struct NonFiniteStateError : ModelError {
    using ModelError::ModelError;
};

// Rigid-body, added-mass, damping and restoring parameters of the vehicle.
// Added-mass coefficients follow the marine convention: stored with their
// native (usually negative) sign and subtracted when assembling the mass
// matrix. Damping coefficients are positive dissipation magnitudes placed
// directly on the diagonal. g and b are the gravity and buoyancy force
// magnitudes in newtons.
struct VehicleParams {
    double m = 3.0;
    double z_g = 0.02;
    double z_t = 0.05;
    double l = 0.2;
    double k_t = 1e-5;
    double k_m = 1e-7;
    double i_xx = 0.03;
    double i_yy = 0.03;
    double i_zz = 0.05;
    double x_udot = -1.0;
    double y_vdot = -1.0;
    double z_wdot = -2.0;
    double k_pdot = -0.01;
    double m_qdot = -0.01;
    double n_rdot = -0.02;
    double x_qdot = -0.05;
    double y_pdot = -0.05;
    double x_u = 5.0;
    double y_v = 5.0;
    double z_w = 5.0;
    double k_p = 0.1;
    double m_q = 0.1;
    double n_r = 0.1;
    double g = 29.43;
    double b = 29.0;

    double m11() const { return m - x_udot; }
    double m22() const { return m - y_vdot; }
    double m33() const { return m - z_wdot; }
    double m44() const { return i_xx - k_pdot; }
    double m55() const { return i_yy - m_qdot; }
    double m66() const { return i_zz - n_rdot; }
    double m15() const { return m * z_g - x_qdot; }
    double m14() const { return -m * z_g - y_pdot; }

    // Throws ConfigError on non-positive mass/inertia/thrust coefficients,
    // non-positive damping or negative force magnitudes.
    void validate() const;
};

// eta = [x y z phi theta psi] in the earth frame,
// nu  = [u v w p q r] in the body frame.
struct RigidState {
    Vec6 eta = Vec6::Zero();
    Vec6 nu = Vec6::Zero();

    bool finite() const { return eta.allFinite() && nu.allFinite(); }
};

// Tilt angle plus the four squared rotor speeds.
struct ActuatorCommand {
    double beta = 0.0;
    Vec4 u = Vec4::Zero();
};

// Unit direction rows mapping the four squared rotor speeds onto force and
// moment channels. Entries are +/-1; e_phi mirrors e_y and e_theta mirrors
// -e_x, and the stack [e_z; e_phi; e_theta; e_psi] must have rank 4.
struct AllocationVectors {
    RowVec4 e_x;
    RowVec4 e_y;
    RowVec4 e_z;
    RowVec4 e_phi;
    RowVec4 e_theta;
    RowVec4 e_psi;

    static AllocationVectors standard();

    // Throws ConfigError when entries are not +/-1, the e_phi/e_y or
    // e_theta/-e_x relations are broken, or the moment stack is singular.
    void validate() const;
};

inline constexpr double kDefaultThetaMaxRad = 80.0 * kPi / 180.0;

}  // namespace alioth
