#include "alioth/dynamics.hpp"

#include <cmath>

namespace alioth {

Mat6 mass_matrix(const VehicleParams& p) {
    Mat6 m = Mat6::Zero();
    m(0, 0) = p.m11();
    m(1, 1) = p.m22();
    m(2, 2) = p.m33();
    m(3, 3) = p.m44();
    m(4, 4) = p.m55();
    m(5, 5) = p.m66();
    m(0, 4) = m(4, 0) = p.m15();
    m(1, 3) = m(3, 1) = p.m14();
    return m;
}

Mat6 damping_matrix(const VehicleParams& p) {
    Vec6 d;
    d << p.x_u, p.y_v, p.z_w, p.k_p, p.m_q, p.n_r;
    return d.asDiagonal();
}

Mat6 coriolis_matrix(const VehicleParams& p, const Vec6& nu) {
    const double u = nu(0), v = nu(1), w = nu(2);
    const double pr = nu(3), q = nu(4), r = nu(5);

    const double c11 = p.m * p.z_g * r;
    const double c12 = (p.m - p.z_wdot) * w;
    const double c13 = -p.m * v + p.y_vdot * v + p.y_pdot * pr;
    const double c14 = -c12;
    const double c15 = c11;
    const double c16 = p.m * u - p.x_udot * u - p.x_qdot * q;
    const double c17 = -p.m * (p.z_g * pr - v) - p.y_vdot * v - p.y_pdot * pr;
    const double c18 = -p.m * (p.z_g * pr + u) + p.x_udot * u + p.x_qdot * q;

    const double c21 = (p.i_zz - p.n_rdot) * r;
    const double c22 = -(p.i_yy - p.m_qdot) * q;
    const double c23 = -c21;
    const double c24 = (p.i_xx - p.k_pdot) * pr;
    const double c25 = -c22;
    const double c26 = -c24;

    Mat3 ur;
    ur << c11, c12, c13,
          c14, c15, c16,
          c17, c18, 0.0;
    Mat3 lr;
    lr << 0.0, c21, c22,
          c23, 0.0, c24,
          c25, c26, 0.0;

    Mat6 c = Mat6::Zero();
    c.topRightCorner<3, 3>() = ur;
    c.bottomLeftCorner<3, 3>() = -ur.transpose();
    c.bottomRightCorner<3, 3>() = lr;
    return c;
}

Vec6 restoring_vector(const VehicleParams& p, const Vec6& eta) {
    const double phi = eta(3), theta = eta(4);
    const double sphi = std::sin(phi), cphi = std::cos(phi);
    const double sth = std::sin(theta), cth = std::cos(theta);
    const double net = p.g - p.b;

    Vec6 g;
    g << net * sth,
        -net * cth * sphi,
        -net * cth * cphi,
        p.z_g * p.g * cth * sphi,
        p.z_g * p.g * sth,
        0.0;
    return g;
}

namespace {

Mat3 rotation_zyx(double phi, double theta, double psi) {
    const double sphi = std::sin(phi), cphi = std::cos(phi);
    const double sth = std::sin(theta), cth = std::cos(theta);
    const double spsi = std::sin(psi), cpsi = std::cos(psi);
    Mat3 r;
    r << cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi,
         spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi,
         -sth, cth * sphi, cth * cphi;
    return r;
}

Mat3 euler_rate_matrix(double phi, double theta) {
    const double sphi = std::sin(phi), cphi = std::cos(phi);
    const double tth = std::tan(theta), cth = std::cos(theta);
    Mat3 t;
    t << 1.0, sphi * tth, cphi * tth,
         0.0, cphi, -sphi,
         0.0, sphi / cth, cphi / cth;
    return t;
}

void check_theta(double theta, double theta_max) {
    if (!(std::abs(theta) < theta_max))
        throw AttitudeSingularityError("pitch magnitude " + std::to_string(theta) +
                                       " rad reaches the transform limit " +
                                       std::to_string(theta_max) + " rad");
}

Mat3 skew(const Vec3& v) {
    Mat3 s;
    s << 0.0, -v(2), v(1),
         v(2), 0.0, -v(0),
         -v(1), v(0), 0.0;
    return s;
}

}  // namespace

Mat6 transform(const Vec6& eta, double theta_max) {
    check_theta(eta(4), theta_max);
    Mat6 j = Mat6::Zero();
    j.topLeftCorner<3, 3>() = rotation_zyx(eta(3), eta(4), eta(5));
    j.bottomRightCorner<3, 3>() = euler_rate_matrix(eta(3), eta(4));
    return j;
}

Mat6 transform_derivative(const Vec6& eta, const Vec6& nu, double theta_max) {
    check_theta(eta(4), theta_max);
    const double phi = eta(3), theta = eta(4);
    const Mat3 r = rotation_zyx(phi, theta, eta(5));
    const Mat3 t = euler_rate_matrix(phi, theta);

    const Vec3 omega = nu.tail<3>();
    const Vec3 euler_rates = t * omega;
    const double dphi = euler_rates(0), dtheta = euler_rates(1);

    const double sphi = std::sin(phi), cphi = std::cos(phi);
    const double sth = std::sin(theta), cth = std::cos(theta);
    const double tth = sth / cth;
    const double sec2 = 1.0 / (cth * cth);

    Mat3 tdot;
    tdot << 0.0,
        cphi * dphi * tth + sphi * sec2 * dtheta,
        -sphi * dphi * tth + cphi * sec2 * dtheta,
        0.0, -sphi * dphi, -cphi * dphi,
        0.0,
        cphi * dphi / cth + sphi * tth * dtheta / cth,
        -sphi * dphi / cth + cphi * tth * dtheta / cth;

    Mat6 jdot = Mat6::Zero();
    jdot.topLeftCorner<3, 3>() = r * skew(omega);
    jdot.bottomRightCorner<3, 3>() = tdot;
    return jdot;
}

MomentCoeffs moment_coeffs(const VehicleParams& p, double beta) {
    const double sb = std::sin(beta), cb = std::cos(beta);
    return {
        p.l * sb * p.k_t + cb * (p.k_m - p.z_t * p.k_t),
        -p.l * sb * p.k_t + cb * (p.k_m + p.z_t * p.k_t),
        p.k_t * p.l * cb - sb * p.k_m,
    };
}

Mat64 cem(const VehicleParams& p, double beta, const AllocationVectors& e) {
    const double sb = std::sin(beta), cb = std::cos(beta);
    const double half_rt2 = std::sqrt(2.0) / 2.0;
    const auto [k1, k2, k3] = moment_coeffs(p, beta);

    Mat64 b;
    b.row(0) = half_rt2 * cb * p.k_t * e.e_x;
    b.row(1) = half_rt2 * cb * p.k_t * e.e_y;
    b.row(2) = -sb * p.k_t * e.e_z;
    b.row(3) = half_rt2 * k1 * e.e_phi;
    b.row(4) = half_rt2 * k2 * e.e_theta;
    b.row(5) = k3 * e.e_psi;
    return b;
}

Vec6 generalized_force(const VehicleParams& p, double beta, const Vec4& u,
                       const AllocationVectors& e) {
    if ((u.array() < 0.0).any())
        throw ConfigError("squared rotor speeds must be nonnegative");
    return cem(p, beta, e) * u;
}

VehicleModel::VehicleModel(const VehicleParams& p, AllocationVectors e)
    : p_(p), e_(e) {
    p_.validate();
    e_.validate();
    mass_ = mass_matrix(p_);
    damping_ = damping_matrix(p_);
    llt_.compute(mass_);
    const Eigen::JacobiSVD<Mat6> svd(mass_);
    rcond_ = svd.singularValues()(5) / svd.singularValues()(0);
    if (!(rcond_ > 1e-12) || llt_.info() != Eigen::Success)
        throw SingularMatrixError("mass matrix is numerically singular (rcond " +
                                  std::to_string(rcond_) + ")");
    if (!(llt_.vectorD().minCoeff() > 0.0))
        throw SingularMatrixError("mass matrix is not positive definite");
}

Vec6 VehicleModel::acceleration(const RigidState& s, const Vec6& tau) const {
    if (!s.finite() || !tau.allFinite())
        throw NonFiniteStateError("non-finite state or wrench in acceleration");
    const Vec6 rhs = tau - coriolis_matrix(p_, s.nu) * s.nu - damping_ * s.nu -
                     restoring_vector(p_, s.eta);
    return llt_.solve(rhs);
}

EframeDynamics VehicleModel::eframe_dynamics(const RigidState& s, double beta,
                                             double theta_max) const {
    const Mat6 j = transform(s.eta, theta_max);
    const Mat6 jdot = transform_derivative(s.eta, s.nu, theta_max);
    const Mat64 b = cem(p_, beta, e_);

    EframeDynamics out;
    out.b_e = j * llt_.solve(b);
    out.f = jdot * s.nu -
            j * llt_.solve((coriolis_matrix(p_, s.nu) * s.nu + damping_ * s.nu +
                            restoring_vector(p_, s.eta))
                               .eval());
    return out;
}

}  // namespace alioth
