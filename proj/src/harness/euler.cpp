#include "lgmpsp/harness/euler.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

namespace lgmpsp {

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;
}

Mat3 euler_to_rotation(double phi_deg, double theta_deg, double psi_deg) {
    using Eigen::AngleAxisd;
    return (AngleAxisd(psi_deg * kDeg, Vec3::UnitZ()) * AngleAxisd(theta_deg * kDeg, Vec3::UnitY()) *
            AngleAxisd(phi_deg * kDeg, Vec3::UnitX()))
        .toRotationMatrix();
}

Vec3 rotation_to_euler(const Mat3& R) {
    const double theta = std::atan2(-R(2, 0), std::hypot(R(0, 0), R(1, 0)));
    if (std::abs(R(2, 0)) > 1.0 - 1e-12) {
        const double phi = std::atan2(-R(1, 2), R(1, 1));
        return Vec3(phi, theta, 0.0) / kDeg;
    }
    const double phi = std::atan2(R(2, 1), R(2, 2));
    const double psi = std::atan2(R(1, 0), R(0, 0));
    return Vec3(phi, theta, psi) / kDeg;
}

}  // namespace lgmpsp
