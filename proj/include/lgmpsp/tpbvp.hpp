#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "lgmpsp/mech_models.hpp"

namespace lgmpsp {

/// `derived` keeps every coupling produced by the adjoint of the linearized
/// dynamics; `printed` drops the -J^-1 lambda_R term (VPQ) and flips the sign
/// of the J^-1 K^T lambda_M term (SMRH).
enum class CostateForm { derived, printed };

enum class Vehicle { vpq, smrh };

struct CostateState {
    Vec3 lambda_R = Vec3::Zero();
    Vec3 lambda_omega = Vec3::Zero();
    std::optional<Vec3> lambda_M;
};

/// u = -Q^-1 lambda_omega
Vec3 optimal_control_vpq(const Mat3& Q, const Vec3& lambda_omega);

/// u = -Q^-1 B^T lambda_M
Vec3 optimal_control_smrh(const Mat3& Q, const Mat3& B, const Vec3& lambda_M);

CostateState costate_rhs_vpq(const VpqParams& params, const VehicleState& state, const CostateState& lambda,
                             CostateForm form = CostateForm::derived);
CostateState costate_rhs_smrh(const SmrhParams& params, const VehicleState& state, const CostateState& lambda,
                              CostateForm form = CostateForm::derived);

struct ShootingProblem {
    Vehicle vehicle = Vehicle::vpq;
    VpqParams vpq;
    SmrhParams smrh;
    VehicleState x0;
    VehicleState target;
    double h = 0.001;     // output grid spacing, s
    int steps = 0;        // grid intervals; t_f = steps * h
    int substeps = 2;     // RK4 substeps per grid interval
    Mat3 Q = Mat3::Identity();
    CostateForm form = CostateForm::derived;

    double t_f() const { return steps * h; }
    int unknowns() const { return vehicle == Vehicle::vpq ? 6 : 9; }
    void validate() const;
};

/// State and costate sampled on the grid t_k = k h.
struct Extremal {
    std::vector<VehicleState> states;      // steps + 1
    std::vector<CostateState> costates;    // steps + 1
    std::vector<Vec3> controls;            // steps + 1, u(t_k)
    Eigen::VectorXd residual;              // terminal boundary residual
};

/// RK4 integration of state and costate under the optimal-control law.
/// Raises ErrorCode::extremal_diverged on blow-up.
Extremal integrate_extremal(const ShootingProblem& problem, const CostateState& lambda0);

/// (log(R_F^T R(t_f)), omega(t_f) - omega_F [, M(t_f) - M_F]).
Eigen::VectorXd shoot(const ShootingProblem& problem, const CostateState& lambda0);

Eigen::VectorXd pack_costate(const CostateState& lambda);
CostateState unpack_costate(const Eigen::VectorXd& z, Vehicle vehicle);

/// Inverts the control law at t = 0: lambda_omega = -Q u0 (VPQ) or
/// B^T lambda_M = -Q u0 (SMRH); the remaining multipliers start at zero.
CostateState seed_from_control(const ShootingProblem& problem, const Vec3& u0);

/// Maps a discrete costate p_0 (dual to (eta, d_omega[, d_moment]) with
/// control weight R = Q) to the continuous multipliers:
/// lambda_R = h p_eta, lambda_omega = h J^-1 p_omega, lambda_M = h p_M.
CostateState seed_from_discrete_costate(const ShootingProblem& problem, const Eigen::VectorXd& p0);

struct TpbvpOptions {
    int max_iterations = 100;
    double tolerance = 1e-6;
    double initial_damping = 1e-3;
    double fd_step = 1e-6;
};

struct TpbvpResult {
    Extremal extremal;
    CostateState lambda0;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;  // residual norm entering each iteration
    bool converged = false;
    std::string message;
};

/// Levenberg-Marquardt on the shooting residual with a forward-difference
/// Jacobian over the initial costates.
TpbvpResult solve_tpbvp(const ShootingProblem& problem, const CostateState& guess, const TpbvpOptions& options = {});

}  // namespace lgmpsp
