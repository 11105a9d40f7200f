#pragma once

#include <Eigen/Core>

#include "lgmpsp/mech_models.hpp"

namespace lgmpsp {

enum class LinearizationForm {
    exact_discrete,  // Jacobian of the Lie-Euler step map
    first_order,     // I - h hat(w0) and h I in the attitude row
    paper_printed,   // first order with the printed velocity and SMRH coupling blocks
};

/// Sign of the ad term in the attitude variation: eta_dot = -+ hat(w) eta + d_omega.
enum class VariationSign { minus, plus };

struct LinearizationOptions {
    LinearizationForm form = LinearizationForm::exact_discrete;
    VariationSign sign = VariationSign::minus;
};

/// dX_{k+1} = A dX_k + B du_k, deviations ordered (eta, d_omega[, d_moment]).
struct StepLinearization {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
};

StepLinearization linearize_vpq(const VpqParams& params, const VehicleState& nominal, double h,
                                const LinearizationOptions& options = {});
StepLinearization linearize_smrh(const SmrhParams& params, const VehicleState& nominal, double h,
                                 const LinearizationOptions& options = {});

/// Jacobian of omega -> -J^-1 (omega x J omega).
Mat3 rigid_body_rate_jacobian(const Mat3& J, const Vec3& omega);

}  // namespace lgmpsp
