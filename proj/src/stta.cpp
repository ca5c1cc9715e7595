#include "alioth/stta.hpp"

#include <cmath>

namespace alioth {

SttaSet stta_set(const VehicleParams& p) {
    SttaSet s{};
    s.beta_heave = 0.0;

    const double den_phi = p.l * p.k_t * p.m22();
    const double den_theta = p.l * p.k_t * p.m11();
    if (den_phi == 0.0 || den_theta == 0.0)
        throw DegenerateParameterError("l*K_T*M11 and l*K_T*M22 must be nonzero");

    s.beta_phi = std::atan(
        (p.m14() * p.k_t - p.k_m * p.m22() + p.z_t * p.k_t * p.m22()) / den_phi);
    s.beta_theta = std::atan(
        (-p.m15() * p.k_t + p.k_m * p.m11() + p.z_t * p.k_t * p.m11()) / den_theta);

    if (p.k_m == 0.0) {
        s.beta_psi = kPi / 2.0;
        s.degeneracies.push_back(
            "k_m = 0: yaw-null tilt saturates at pi/2 (limit substituted)");
    } else {
        s.beta_psi = std::atan(p.k_t * p.l / p.k_m);
    }

    if (std::abs(s.beta_phi - s.beta_theta) < 1e-6) {
        s.near_coincident = true;
        s.degeneracies.push_back(
            "roll-null and pitch-null tilt angles coincide within 1e-6 rad; "
            "channel switching assumes they differ");
    }
    return s;
}

Mat34 longitudinal_allocation(const VehicleParams& p, double theta, double beta,
                              const AllocationVectors& e) {
    const double sth = std::sin(theta), cth = std::cos(theta);
    const double sb = std::sin(beta), cb = std::cos(beta);
    const double half_rt2 = std::sqrt(2.0) / 2.0;
    const double k2 = moment_coeffs(p, beta).k2;
    const double m51 = p.m15();
    const double m_k = (p.m11() * p.m55() - m51 * p.m15()) / p.m33();
    const double a = -p.m55() * cb * p.k_t - k2 * m51;

    Mat34 b;
    b.row(0) = half_rt2 * (cth * a * e.e_theta - sth * sb * m_k * p.k_t * e.e_z);
    b.row(1) = -(sth * a * e.e_theta - cth * sb * m_k * p.k_t * e.e_z);
    b.row(2) = half_rt2 * (k2 * p.m11() - p.m15() * cb * p.k_t) * e.e_theta;
    return b;
}

RankReport rank_deficiency(const Eigen::MatrixXd& mat, double tol) {
    RankReport r;
    double max_row_norm = 0.0;
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        max_row_norm = std::max(max_row_norm, mat.row(i).norm());
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        if (mat.row(i).norm() < tol * max_row_norm || max_row_norm == 0.0)
            r.null_rows.push_back(static_cast<int>(i) + 1);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? tol * sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff && sv(i) > 0.0) ++r.rank;
    r.deficient = r.rank < static_cast<int>(mat.rows());
    return r;
}

double transverse_singularity_residual(const VehicleParams& p, double beta) {
    const double k1 = moment_coeffs(p, beta).k1;
    return k1 * p.m22() - p.m14() * std::cos(beta) * p.k_t;
}

double reduced_heave_residual(const VehicleParams& p, const HeaveSample& s) {
    return (p.m - p.z_wdot) * s.z_ddot + p.z_w * s.z_dot - (p.g - p.b);
}

double reduced_heading_residual(const VehicleParams& p, double psi_dot,
                                double psi_ddot) {
    return (p.i_zz - p.n_rdot) * psi_ddot + p.n_r * psi_dot;
}

std::string to_string(MotionClass c) {
    switch (c) {
        case MotionClass::Ascending: return "ascending";
        case MotionClass::Descending: return "descending";
        case MotionClass::Hover: return "hover";
        case MotionClass::Insufficient: return "insufficient";
    }
    return "unknown";
}

ConstraintReport vertical_motion_check(const VehicleParams& p, double beta,
                                       double omega_sq, double rel_tol) {
    if (omega_sq < 0.0)
        throw ConfigError("squared rotor speed must be nonnegative");

    ConstraintReport r;
    r.thrust_term = std::sin(beta) * omega_sq;
    r.threshold = (p.g - p.b) / (4.0 * p.k_t);
    r.margin = std::abs(r.thrust_term) - std::abs(r.threshold);

    const double tol =
        rel_tol * std::max({1.0, std::abs(r.thrust_term), std::abs(r.threshold)});
    if (std::abs(r.thrust_term - r.threshold) <= tol) {
        r.classification = MotionClass::Hover;
        r.satisfied = true;
    } else if (r.margin < 0.0) {
        r.classification = MotionClass::Insufficient;
        r.satisfied = false;
    } else {
        r.classification =
            beta > 0.0 ? MotionClass::Ascending : MotionClass::Descending;
        r.satisfied = true;
    }
    return r;
}

LevelingConstraints leveling_constraints(const VehicleParams& p) {
    LevelingConstraints c{};
    c.beta_star = stta_set(p).beta_theta;
    c.zg_residual = p.z_g + p.x_qdot / p.m;

    const double sb = std::sin(c.beta_star);
    const double net = p.g - p.b;
    if (net == 0.0) {
        c.omega_sq_sum = 0.0;
    } else if (sb == 0.0) {
        throw DegenerateParameterError(
            "pitch-null tilt is zero while net weight is nonzero; "
            "no collective speed can balance it");
    } else {
        c.omega_sq_sum = net / (sb * p.k_t);
    }
    return c;
}

SurgePitchCoeffs surge_pitch_coeffs(const VehicleParams& p, const Vec6& nu) {
    const double u = nu(0), w = nu(2), pr = nu(3), q = nu(4);
    const double c12 = (p.m - p.z_wdot) * w;
    const double c18 =
        -p.m * (p.z_g * pr + u) + p.x_udot * u + p.x_qdot * q;
    return {c18 * p.m11(), p.m15() * c12 - p.m_q * p.m11()};
}

const SubsystemModel& subsystem(int index) {
    static const std::vector<SubsystemModel> kTable = {
        {1, InputPattern::Longitudinal, "longitudinal", {"x", "z", "theta"}},
        {2, InputPattern::Transverse, "transverse", {"y", "z", "phi"}},
        {3, InputPattern::Heading, "heading", {"psi"}},
        {4, InputPattern::Heave, "heave", {"z"}},
    };
    if (index < 1 || index > 4)
        throw ConfigError("subsystem index must be in 1..4");
    return kTable[static_cast<std::size_t>(index - 1)];
}

Vec4 apply_input_pattern(InputPattern pattern, double omega_sq_sum,
                         double differential) {
    const double base = omega_sq_sum / 4.0;
    const double a = base - differential;
    const double b = base + differential;
    Vec4 u;
    switch (pattern) {
        case InputPattern::Longitudinal: u << a, b, a, b; break;
        case InputPattern::Transverse: u << a, b, b, a; break;
        case InputPattern::Heading: u << b, b, a, a; break;
        case InputPattern::Heave: u << base, base, base, base; break;
    }
    if ((u.array() < 0.0).any())
        throw ConfigError("input pattern produced a negative squared speed");
    return u;
}

bool matches_pattern(const Vec4& u, InputPattern pattern, double tol) {
    auto eq = [&](int i, int j) { return std::abs(u(i) - u(j)) <= tol; };
    switch (pattern) {
        case InputPattern::Longitudinal: return eq(0, 2) && eq(1, 3);
        case InputPattern::Transverse: return eq(0, 3) && eq(1, 2);
        case InputPattern::Heading: return eq(0, 1) && eq(2, 3);
        case InputPattern::Heave: return eq(0, 1) && eq(1, 2) && eq(2, 3);
    }
    return false;
}

}  // namespace alioth
