#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lgmpsp/harness/config.hpp"
#include "lgmpsp/ilqr.hpp"
#include "lgmpsp/mpsp.hpp"
#include "lgmpsp/systems.hpp"

namespace lgmpsp {

enum ExitCode : int { exit_ok = 0, exit_not_converged = 2, exit_config_error = 3 };

using VehicleSystem = std::variant<VpqSystem, SmrhSystem>;

VehicleSystem make_system(const ExperimentConfig& config);
MpspConfig make_mpsp_config(const ExperimentConfig& config, MpspVariant variant);
IlqrConfig make_ilqr_config(const ExperimentConfig& config, int deviation_dim);

struct SolverRun {
    SolverKind solver = SolverKind::mpsp_increment;
    bool ok = false;          // solver ran to completion without raising
    bool converged = false;
    Trajectory<VehicleState> trajectory;
    IterationReport report;
    double terminal_deviation = 0.0;
    double control_effort = 0.0;  // J_u = 1/2 sum u^T R u with the MPSP weights
    double wall_ms = 0.0;
    std::optional<double> shooting_residual;
    std::string error;
};

/// Runs one solver on the configured problem. `x0` and `guess` override the
/// configured initial state and the zero control guess.
SolverRun run_solver(const ExperimentConfig& config, SolverKind solver, const std::optional<VehicleState>& x0 = {},
                     const std::vector<Eigen::VectorXd>& guess = {});

struct PairMetrics {
    double control_rms_relative = 0.0;  // RMS ||u_a - u_b|| / RMS ||u_b||
    double attitude_rms_deg = 0.0;
    double terminal_attitude_deg = 0.0;
};

PairMetrics compare_trajectories(const Trajectory<VehicleState>& a, const Trajectory<VehicleState>& b);

struct ComparisonResult {
    SolverRun mpsp;
    SolverRun ilqr;
    SolverRun tpbvp;
    std::optional<PairMetrics> mpsp_vs_tpbvp;
    std::optional<PairMetrics> mpsp_vs_ilqr;
    std::optional<PairMetrics> ilqr_vs_tpbvp;
};

/// MPSP (effort form), iLQR and TPBVP on the same problem; TPBVP is seeded
/// from the MPSP solution unless the configuration says otherwise.
ComparisonResult compare_solvers(const ExperimentConfig& config);

struct CertificateRow {
    std::string vehicle;
    int N = 0;
    std::string nominal;  // "rest" or "flip"
    RankCertificate certificate;
    std::optional<double> expected_determinant;
    std::optional<double> determinant_relative_error;
    RankCertificate two_block;  // [G_{N-2} G_{N-1}] regardless of p
};

/// Rank certificates for both vehicles over `horizons`, at rest and along
/// the configured flip's converged MPSP nominal where available.
std::vector<CertificateRow> certify(const ExperimentConfig& config, const std::vector<int>& horizons);

struct RunOutcome {
    nlohmann::json report;
    int exit_code = exit_ok;
};

/// Each writes its files under config.output_dir and returns the JSON report.
RunOutcome run_maneuver(const ExperimentConfig& config);
RunOutcome run_comparison(const ExperimentConfig& config);
RunOutcome run_certify(const ExperimentConfig& config);

nlohmann::json solver_run_json(const SolverRun& run);

}  // namespace lgmpsp
