#include "alioth/types.hpp"

#include <cmath>
#include <sstream>

namespace alioth {

void VehicleParams::validate() const {
    std::ostringstream bad;
    auto require = [&](bool ok, const char* what) {
        if (!ok) bad << (bad.tellp() > 0 ? ", " : "") << what;
    };
    require(std::isfinite(m) && m > 0.0, "m > 0");
    require(std::isfinite(i_xx) && i_xx > 0.0, "i_xx > 0");
    require(std::isfinite(i_yy) && i_yy > 0.0, "i_yy > 0");
    require(std::isfinite(i_zz) && i_zz > 0.0, "i_zz > 0");
    require(std::isfinite(k_t) && k_t > 0.0, "k_t > 0");
    require(std::isfinite(l) && l > 0.0, "l > 0");
    require(std::isfinite(z_t), "z_t finite");
    require(std::isfinite(z_g), "z_g finite");
    require(std::isfinite(k_m), "k_m finite");
    require(std::isfinite(x_u) && x_u >= 0.0, "x_u >= 0");
    require(std::isfinite(y_v) && y_v >= 0.0, "y_v >= 0");
    require(std::isfinite(z_w) && z_w >= 0.0, "z_w >= 0");
    require(std::isfinite(k_p) && k_p >= 0.0, "k_p >= 0");
    require(std::isfinite(m_q) && m_q >= 0.0, "m_q >= 0");
    require(std::isfinite(n_r) && n_r >= 0.0, "n_r >= 0");
    require(std::isfinite(g) && g >= 0.0, "g >= 0");
    require(std::isfinite(b) && b >= 0.0, "b >= 0");
    for (double v : {x_udot, y_vdot, z_wdot, k_pdot, m_qdot, n_rdot, x_qdot, y_pdot})
        require(std::isfinite(v), "added-mass coefficients finite");
    if (bad.tellp() > 0)
        throw ConfigError("invalid vehicle parameters: " + bad.str());
}

AllocationVectors AllocationVectors::standard() {
    AllocationVectors e;
    e.e_x << 1, -1, 1, -1;
    e.e_y << -1, 1, 1, -1;
    e.e_z << 1, 1, 1, 1;
    e.e_phi = e.e_y;
    e.e_theta = -e.e_x;
    e.e_psi << 1, 1, -1, -1;
    return e;
}

void AllocationVectors::validate() const {
    auto unit_entries = [](const RowVec4& v) {
        for (int i = 0; i < 4; ++i)
            if (v(i) != 1.0 && v(i) != -1.0) return false;
        return true;
    };
    for (const auto* v : {&e_x, &e_y, &e_z, &e_phi, &e_theta, &e_psi})
        if (!unit_entries(*v))
            throw ConfigError("allocation vector entries must be +1 or -1");
    if (e_phi != e_y) throw ConfigError("allocation requires e_phi = e_y");
    if (e_theta != (-e_x).eval()) throw ConfigError("allocation requires e_theta = -e_x");
    Eigen::Matrix4d stack;
    stack.row(0) = e_z;
    stack.row(1) = e_phi;
    stack.row(2) = e_theta;
    stack.row(3) = e_psi;
    if (std::abs(stack.determinant()) < 1e-9)
        throw ConfigError("allocation stack [e_z; e_phi; e_theta; e_psi] is singular");
}

}  // namespace alioth
