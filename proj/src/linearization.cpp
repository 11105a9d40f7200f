#include "lgmpsp/linearization.hpp"

#include <Eigen/Cholesky>

namespace lgmpsp {

namespace {

struct AttitudeBlocks {
    Mat3 eta_eta;
    Mat3 eta_omega;
};

AttitudeBlocks attitude_blocks(const Vec3& omega, double h, const LinearizationOptions& options) {
    const double s = options.sign == VariationSign::minus ? -1.0 : 1.0;
    if (options.form == LinearizationForm::exact_discrete) {
        return {exp_so3(s * h * omega), h * right_jacobian_so3(h * omega)};
    }
    return {Mat3::Identity() + s * h * hat(omega), h * Mat3::Identity()};
}

Mat3 velocity_block(const Mat3& J, const Vec3& omega, double h, const LinearizationOptions& options) {
    if (options.form == LinearizationForm::paper_printed) {
        return Mat3::Identity() + h * (-J.ldlt().solve(hat(omega) * J) + hat(omega));
    }
    return Mat3::Identity() + h * rigid_body_rate_jacobian(J, omega);
}

}  // namespace

Mat3 rigid_body_rate_jacobian(const Mat3& J, const Vec3& omega) {
    return J.ldlt().solve(hat(J * omega) - hat(omega) * J);
}

StepLinearization linearize_vpq(const VpqParams& params, const VehicleState& nominal, double h,
                                const LinearizationOptions& options) {
    const AttitudeBlocks att = attitude_blocks(nominal.omega, h, options);
    StepLinearization lin;
    lin.A = Eigen::MatrixXd::Zero(6, 6);
    lin.A.block<3, 3>(0, 0) = att.eta_eta;
    lin.A.block<3, 3>(0, 3) = att.eta_omega;
    lin.A.block<3, 3>(3, 3) = velocity_block(params.J, nominal.omega, h, options);
    lin.B = Eigen::MatrixXd::Zero(6, 3);
    lin.B.block<3, 3>(3, 0) = h * params.J.inverse();
    return lin;
}

StepLinearization linearize_smrh(const SmrhParams& params, const VehicleState& nominal, double h,
                                 const LinearizationOptions& options) {
    const AttitudeBlocks att = attitude_blocks(nominal.omega, h, options);
    const Mat3 Jinv = params.J.inverse();
    StepLinearization lin;
    lin.A = Eigen::MatrixXd::Zero(9, 9);
    lin.A.block<3, 3>(0, 0) = att.eta_eta;
    lin.A.block<3, 3>(0, 3) = att.eta_omega;
    lin.A.block<3, 3>(3, 3) = velocity_block(params.J, nominal.omega, h, options);
    lin.A.block<3, 3>(3, 6) = h * Jinv;
    if (options.form == LinearizationForm::paper_printed) {
        lin.A.block<3, 3>(6, 3) = Mat3::Identity() - h * params.K();
    } else {
        lin.A.block<3, 3>(6, 3) = -h * params.K();
    }
    lin.A.block<3, 3>(6, 6) = Mat3::Identity() + h * params.A();
    lin.B = Eigen::MatrixXd::Zero(9, 3);
    lin.B.block<3, 3>(6, 0) = h * params.B();
    return lin;
}

}  // namespace lgmpsp
