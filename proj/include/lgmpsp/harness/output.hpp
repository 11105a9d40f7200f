#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lgmpsp/mech_models.hpp"
#include "lgmpsp/report.hpp"

namespace lgmpsp {

/// %.15g, with negative zero printed as 0.
std::string format_number(double x);

/// t, phi, theta, psi, p, q, r [, l, m, n], u1, u2, u3. Angles in degrees
/// (ZYX), rates in rad/s. The final row has empty control fields.
std::string trajectory_csv(const Trajectory<VehicleState>& traj);

/// iter, dev_norm, J_du, J_u, wall_ms
std::string convergence_csv(const IterationReport& report);

nlohmann::json report_json(const IterationReport& report);

void write_text(const std::string& path, const std::string& text);

}  // namespace lgmpsp
