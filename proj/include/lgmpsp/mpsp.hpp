#pragma once

#include <Eigen/Core>
#include <chrono>
#include <optional>
#include <vector>

#include "lgmpsp/report.hpp"
#include "lgmpsp/systems.hpp"

namespace lgmpsp {

/// Terminal sensitivities G_k = A_{N-1} ... A_{k+1} B_k, stored 0-based:
/// G[k] maps du_k to dX_N for k = 0 .. N-2.
struct SensitivityChain {
    std::vector<Eigen::MatrixXd> G;

    int steps() const { return static_cast<int>(G.size()); }
    int rows() const { return G.empty() ? 0 : static_cast<int>(G.front().rows()); }
    int cols() const { return G.empty() ? 0 : static_cast<int>(G.front().cols()); }
};

SensitivityChain build_chain(const std::vector<StepLinearization>& linearizations);

struct RankCertificate {
    bool full_rank = false;
    int rank = 0;
    int required_rank = 0;
    int blocks = 0;             // trailing sensitivity blocks stacked
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::optional<double> determinant;  // only when the stacked matrix is square
};

/// Rank of the stacked trailing blocks [G_{N-b} ... G_{N-1}] by SVD. With
/// blocks = 0 the smallest count that can reach full row rank is used,
/// ceil(p / m), capped at the number of available steps.
RankCertificate rank_certificate(const SensitivityChain& chain, int blocks = 0);

/// h^{3n} (det I#)^2: determinant of [G_{N-2} G_{N-1}] for a fully actuated
/// simple mechanical system linearized at rest.
double rest_determinant(double h, const Eigen::MatrixXd& sharp);

/// Control weights R_k, either one shared matrix or one per step.
struct ControlWeights {
    std::vector<Eigen::MatrixXd> R;

    static ControlWeights identity(int m) { return {{Eigen::MatrixXd::Identity(m, m)}}; }
    static ControlWeights shared(Eigen::MatrixXd r) { return {{std::move(r)}}; }
    const Eigen::MatrixXd& at(std::size_t k) const { return R.size() == 1 ? R.front() : R.at(k); }
    void validate(std::size_t steps, int m) const;
};

struct MpspUpdate {
    std::vector<Eigen::VectorXd> controls;    // u_new
    std::vector<Eigen::VectorXd> correction;  // du, with u_new = u_prev - du
    double increment_cost = 0.0;              // 1/2 sum du^T R du
};

/// min 1/2 sum du^T R du  s.t.  sum G_k du_k = dX_N.
MpspUpdate mpsp_update_increment(const std::vector<Eigen::VectorXd>& u_prev, const SensitivityChain& chain,
                                 const ControlWeights& weights, const Eigen::VectorXd& dXN);

/// min 1/2 sum u_new^T R u_new  s.t.  sum G_k (u_prev - u_new) = dX_N.
MpspUpdate mpsp_update_effort(const std::vector<Eigen::VectorXd>& u_prev, const SensitivityChain& chain,
                              const ControlWeights& weights, const Eigen::VectorXd& dXN);

double effort_cost(const std::vector<Eigen::VectorXd>& u, const ControlWeights& weights);

/// Terminal multiplier mu of a minimum-effort sequence u_k = -R_k^-1 G_k^T mu,
/// recovered as mu = -W^-1 sum G_k u_k with W = sum G_k R_k^-1 G_k^T.
Eigen::VectorXd terminal_multiplier(const SensitivityChain& chain, const ControlWeights& weights,
                                    const std::vector<Eigen::VectorXd>& u);

/// Discrete costate at state 0: (A_{N-2} ... A_0)^T mu.
Eigen::VectorXd initial_costate(const std::vector<StepLinearization>& linearizations, const Eigen::VectorXd& mu);

enum class MpspVariant { effort, increment };

struct MpspConfig {
    std::optional<ControlWeights> weights;    // identity when empty
    int max_iterations = 50;
    double tolerance = 1e-8;
    double increment_tolerance = 1e-10;       // effort variant: J_du must also fall below this
    MpspVariant variant = MpspVariant::increment;
    std::optional<Eigen::VectorXd> norm_scaling;  // diagonal weights on ||dX_N|| only
    bool timing = true;
};

template <class State>
struct OptimalControlProblem {
    State x0;
    State target;
    int N = 0;  // number of states; N - 1 controls
    double h = 0.0;
    std::vector<Eigen::VectorXd> initial_guess;  // zeros when empty
};

template <class State>
struct SolveResult {
    Trajectory<State> trajectory;
    IterationReport report;
};

namespace detail {

template <class State>
std::vector<Eigen::VectorXd> initial_controls(const OptimalControlProblem<State>& problem, int m) {
    if (problem.N < 2) {
        throw Error(ErrorCode::invalid_argument, "problem needs at least two states");
    }
    if (!(problem.h > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "step h must be positive");
    }
    const auto steps = static_cast<std::size_t>(problem.N - 1);
    if (problem.initial_guess.empty()) {
        return std::vector<Eigen::VectorXd>(steps, Eigen::VectorXd::Zero(m));
    }
    if (problem.initial_guess.size() != steps) {
        throw Error(ErrorCode::dimension_mismatch, "initial guess must have N - 1 controls");
    }
    return problem.initial_guess;
}

inline double scaled_norm(const Eigen::VectorXd& dx, const std::optional<Eigen::VectorXd>& scaling) {
    if (!scaling) return dx.norm();
    if (scaling->size() != dx.size()) {
        throw Error(ErrorCode::dimension_mismatch, "norm scaling has the wrong length");
    }
    return scaling->cwiseProduct(dx).norm();
}

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace detail

/// Iterate rollout -> terminal deviation -> linearize -> sensitivity chain ->
/// closed-form update until ||dX_N|| < tolerance (effort form: and J_du <
/// increment_tolerance). Non-convergence is reported
/// through report.converged, not thrown.
template <DiscreteSystem S>
SolveResult<typename S::State> mpsp_solve(const S& system, const OptimalControlProblem<typename S::State>& problem,
                                          const MpspConfig& config = {}) {
    const int m = system.control_dim();
    const ControlWeights weights = config.weights.value_or(ControlWeights::identity(m));
    std::vector<Eigen::VectorXd> u = detail::initial_controls(problem, m);
    weights.validate(u.size(), m);
    system.validate(problem.target);

    SolveResult<typename S::State> result;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        const auto start = std::chrono::steady_clock::now();
        result.trajectory = rollout(system, problem.x0, u, problem.h);
        const Eigen::VectorXd dXN = system.deviation_resolved(result.trajectory.states.back(), problem.target);

        IterationRecord rec;
        rec.iteration = iter;
        rec.deviation_norm = detail::scaled_norm(dXN, config.norm_scaling);
        rec.effort_cost = effort_cost(u, weights);
        rec.total_cost = rec.effort_cost;
        const SensitivityChain chain = build_chain(linearize_along(system, result.trajectory));
        MpspUpdate update = config.variant == MpspVariant::increment
                                ? mpsp_update_increment(u, chain, weights, dXN)
                                : mpsp_update_effort(u, chain, weights, dXN);
        rec.increment_cost = update.increment_cost;
        const bool done = rec.deviation_norm < config.tolerance &&
                          (config.variant == MpspVariant::increment || rec.increment_cost < config.increment_tolerance);
        if (!done) u = std::move(update.controls);
        rec.wall_ms = config.timing ? detail::elapsed_ms(start) : 0.0;
        result.report.records.push_back(rec);
        if (done) {
            result.report.converged = true;
            return result;
        }
    }
    result.report.message = "terminal deviation above tolerance after max_iterations";
    result.report.failure = ErrorCode::did_not_converge;
    return result;
}

}  // namespace lgmpsp
