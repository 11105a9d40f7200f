#pragma once

#include "lgmpsp/lie_core.hpp"

namespace lgmpsp {

/// ZYX (yaw-pitch-roll) angles in degrees: R = Rz(psi) Ry(theta) Rx(phi).
Mat3 euler_to_rotation(double phi_deg, double theta_deg, double psi_deg);
inline Mat3 euler_to_rotation(const Vec3& rpy_deg) { return euler_to_rotation(rpy_deg.x(), rpy_deg.y(), rpy_deg.z()); }

/// Inverse of euler_to_rotation with theta in [-90, 90]. At gimbal lock
/// (|theta| = 90) the yaw is set to zero and the rotation is carried by phi.
Vec3 rotation_to_euler(const Mat3& R);

inline constexpr const char* kEulerConvention = "ZYX (R = Rz(psi) Ry(theta) Rx(phi)), degrees";

}  // namespace lgmpsp
