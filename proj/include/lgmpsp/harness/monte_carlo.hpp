#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgmpsp/harness/runner.hpp"

namespace lgmpsp {

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Uniform [0, 1) draw number `draw` of trial `trial`; independent of how
/// trials are scheduled.
double trial_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t draw);

struct TrialResult {
    int trial = 0;
    bool ok = false;
    bool converged = false;
    int iterations = 0;
    double final_deviation = 0.0;
    double control_effort = 0.0;
    std::vector<double> deviation_curve;
    std::string error;
};

struct MonteCarloSummary {
    std::vector<TrialResult> trials;
    int converged = 0;
    double convergence_rate = 0.0;
    int max_iterations = 0;                  // over converged trials
    std::map<int, int> iteration_histogram;  // iterations -> converged trial count
    double J_u_q1 = 0.0;
    double J_u_median = 0.0;
    double J_u_q3 = 0.0;
    double iqr_over_median = 0.0;
    double wall_ms = 0.0;
};

/// Perturbed problem of one trial: the initial state and control guess.
struct TrialProblem {
    VehicleState x0;
    std::vector<Eigen::VectorXd> guess;
};

TrialProblem make_trial(const ExperimentConfig& config, int trial);

TrialResult run_trial(const ExperimentConfig& config, int trial);

/// Runs config.monte_carlo.trials trials of config.solver on a thread pool.
MonteCarloSummary run_monte_carlo(const ExperimentConfig& config);

/// Linear-interpolation quantile of `values` (copied and sorted).
double quantile(std::vector<double> values, double q);

nlohmann::json monte_carlo_json(const MonteCarloSummary& summary);

RunOutcome run_monte_carlo_command(const ExperimentConfig& config);

}  // namespace lgmpsp
