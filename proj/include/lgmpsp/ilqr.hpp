#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "lgmpsp/mpsp.hpp"

namespace lgmpsp {

struct IlqrConfig {
    Eigen::MatrixXd Q_N;                     // terminal weight; 1e4 I when empty
    std::optional<ControlWeights> weights;   // running R_k; identity when empty
    double c1 = 0.1;
    std::vector<double> alphas = {1.0, 0.5, 0.25, 0.125, 0.0625};
    int max_iterations = 100;
    double cost_tolerance = 1e-9;            // stop once the predicted full-step decrease drops below this
    bool timing = true;

    void validate(int p) const;
};

/// du_k = K dX_k + d.
struct PolicyStep {
    Eigen::MatrixXd K;
    Eigen::VectorXd d;
    Eigen::MatrixXd Q_uu;
    Eigen::VectorXd Q_u;
};

struct BackwardPassResult {
    std::vector<PolicyStep> policy;
    std::vector<Eigen::MatrixXd> P;  // P_0 .. P_N
    std::vector<Eigen::VectorXd> p;
    double linear_term = 0.0;        // sum d^T Q_u
    double quadratic_term = 0.0;     // sum d^T Q_uu d

    /// Predicted cost decrease -alpha sum d^T Q_u - alpha^2/2 sum d^T Q_uu d.
    double expected_decrease(double alpha) const { return -alpha * linear_term - 0.5 * alpha * alpha * quadratic_term; }
};

BackwardPassResult backward_pass(const std::vector<StepLinearization>& linearizations,
                                 const std::vector<Eigen::VectorXd>& u_nominal, const Eigen::VectorXd& dXN0,
                                 const Eigen::MatrixXd& Q_N, const ControlWeights& weights);

/// 1/2 dX_N^T Q_N dX_N + 1/2 sum u^T R u.
double ilqr_cost(const Eigen::VectorXd& dXN, const std::vector<Eigen::VectorXd>& u, const Eigen::MatrixXd& Q_N,
                 const ControlWeights& weights);

template <class State>
struct RolloutResult {
    Trajectory<State> trajectory;
    Eigen::VectorXd terminal_deviation;
    double cost = 0.0;
};

/// u_new = u0 + K dX_new + alpha d along the nonlinear dynamics, with dX_new
/// measured intrinsically against the nominal.
template <DiscreteSystem S>
RolloutResult<typename S::State> forward_rollout(const S& system, const Trajectory<typename S::State>& nominal,
                                                 const std::vector<PolicyStep>& policy, double alpha,
                                                 const typename S::State& target, const Eigen::MatrixXd& Q_N,
                                                 const ControlWeights& weights) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "forward_rollout: alpha must lie in [0, 1]");
    }
    RolloutResult<typename S::State> out;
    auto& traj = out.trajectory;
    traj.h = nominal.h;
    traj.states.reserve(nominal.states.size());
    traj.controls.reserve(nominal.controls.size());
    traj.states.push_back(nominal.states.front());
    for (std::size_t k = 0; k < nominal.controls.size(); ++k) {
        const Eigen::VectorXd dx = system.deviation_resolved(traj.states[k], nominal.states[k]);
        Eigen::VectorXd u = nominal.controls[k] + policy[k].K * dx + alpha * policy[k].d;
        traj.states.push_back(system.step(traj.states[k], u, traj.h));
        traj.controls.push_back(std::move(u));
    }
    out.terminal_deviation = system.deviation_resolved(traj.states.back(), target);
    out.cost = ilqr_cost(out.terminal_deviation, traj.controls, Q_N, weights);
    return out;
}

/// Backward Riccati sweep plus line-searched nonlinear forward pass. The
/// terminal condition is soft. A step is accepted when the realized decrease
/// is at least c1 times the predicted decrease.
template <DiscreteSystem S>
SolveResult<typename S::State> ilqr_solve(const S& system, const OptimalControlProblem<typename S::State>& problem,
                                          const IlqrConfig& config = {}) {
    const int m = system.control_dim();
    const int p = system.deviation_dim();
    config.validate(p);
    const Eigen::MatrixXd Q_N = config.Q_N.size() ? config.Q_N : Eigen::MatrixXd(1e4 * Eigen::MatrixXd::Identity(p, p));
    const ControlWeights weights = config.weights.value_or(ControlWeights::identity(m));
    std::vector<Eigen::VectorXd> u0 = detail::initial_controls(problem, m);
    weights.validate(u0.size(), m);

    SolveResult<typename S::State> result;
    result.trajectory = rollout(system, problem.x0, u0, problem.h);
    Eigen::VectorXd dXN = system.deviation_resolved(result.trajectory.states.back(), problem.target);
    double cost = ilqr_cost(dXN, u0, Q_N, weights);

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        const auto start = std::chrono::steady_clock::now();
        const BackwardPassResult bp =
            backward_pass(linearize_along(system, result.trajectory), result.trajectory.controls, dXN, Q_N, weights);

        IterationRecord rec;
        rec.iteration = iter;
        rec.deviation_norm = dXN.norm();
        rec.effort_cost = effort_cost(result.trajectory.controls, weights);
        rec.total_cost = cost;
        rec.step_size = 0.0;

        const double predicted_full = bp.expected_decrease(1.0);
        if (predicted_full < config.cost_tolerance) {
            rec.wall_ms = config.timing ? detail::elapsed_ms(start) : 0.0;
            result.report.records.push_back(rec);
            result.report.converged = true;
            return result;
        }

        bool accepted = false;
        for (double alpha : config.alphas) {
            auto trial = forward_rollout(system, result.trajectory, bp.policy, alpha, problem.target, Q_N, weights);
            const double predicted = bp.expected_decrease(alpha);
            if (std::isfinite(trial.cost) && cost - trial.cost >= config.c1 * predicted) {
                double increment = 0.0;
                for (std::size_t k = 0; k < trial.trajectory.controls.size(); ++k) {
                    const Eigen::VectorXd du = trial.trajectory.controls[k] - result.trajectory.controls[k];
                    increment += 0.5 * du.dot(weights.at(k) * du);
                }
                rec.increment_cost = increment;
                rec.step_size = alpha;
                result.trajectory = std::move(trial.trajectory);
                dXN = trial.terminal_deviation;
                cost = trial.cost;
                accepted = true;
                break;
            }
        }
        rec.wall_ms = config.timing ? detail::elapsed_ms(start) : 0.0;
        result.report.records.push_back(rec);
        if (!accepted) {
            std::ostringstream os;
            os << "line search exhausted at iteration " << iter << " (predicted decrease " << predicted_full << ")";
            result.report.message = os.str();
            result.report.failure = ErrorCode::line_search_exhausted;
            return result;
        }
    }
    result.report.message = "iteration limit reached";
    result.report.failure = ErrorCode::did_not_converge;
    return result;
}

}  // namespace lgmpsp
