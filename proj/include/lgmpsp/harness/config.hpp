#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lgmpsp/linearization.hpp"
#include "lgmpsp/mech_models.hpp"
#include "lgmpsp/tpbvp.hpp"

namespace lgmpsp {

enum class SolverKind { mpsp_effort, mpsp_increment, ilqr, tpbvp };
enum class MonteCarloMode { random_control_guess, random_initial_condition };

struct BoundaryConfig {
    Vec3 euler_deg = Vec3::Zero();
    Vec3 rate_deg_s = Vec3::Zero();
    Vec3 moment = Vec3::Zero();  // N m, SMRH only
};

struct MpspSection {
    int max_iterations = 50;
    double tolerance = 1e-8;
    Vec3 R_diag = Vec3::Ones();
    std::vector<double> norm_scaling;  // empty: plain Euclidean norm
};

struct IlqrSection {
    int max_iterations = 100;
    double Q_N = 1e4;                  // Q_N = Q_N * I
    Vec3 R_diag = Vec3::Ones();
    double c1 = 0.1;
    std::vector<double> alphas = {1.0, 0.5, 0.25, 0.125, 0.0625};
    double cost_tolerance = 1e-9;
};

struct TpbvpSection {
    Vec3 Q_diag = Vec3::Ones();
    int substeps = 2;
    int max_iterations = 50;
    double tolerance = 1e-6;
    std::string seed = "from_mpsp";    // or "from_mpsp_control", "zero"
};

struct MonteCarloConfig {
    int trials = 25;
    MonteCarloMode mode = MonteCarloMode::random_initial_condition;
    double attitude_deg = 10.0;
    double rate_deg_s = 10.0;
    double moment = 0.1;
    double control_range = 0.05;
    int threads = 0;                   // 0: hardware concurrency
};

struct ExperimentConfig {
    Vehicle vehicle = Vehicle::vpq;
    SolverKind solver = SolverKind::mpsp_increment;
    double t_f = 0.6;
    double h = 0.001;
    BoundaryConfig initial;
    BoundaryConfig target{Vec3(180.0, 0.0, 0.0), Vec3::Zero(), Vec3::Zero()};
    VpqParams vpq;
    SmrhParams smrh;
    std::map<std::string, std::string> provenance;  // parameter name -> paper | shipped_default | user
    LinearizationOptions linearization;
    CostateForm costate_form = CostateForm::derived;
    MpspSection mpsp;
    IlqrSection ilqr;
    TpbvpSection tpbvp;
    MonteCarloConfig monte_carlo;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    bool timing = true;

    /// Number of grid states, round(t_f / h).
    int N() const;
    VehicleState initial_state() const;
    VehicleState target_state() const;
};

/// Parses a configuration document. Unknown keys, wrong types and invalid
/// values raise Error(config_error) naming the offending path. Relative
/// parameter-file paths are resolved against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Applies "a.b.c=value" to a configuration document; the value is read as
/// JSON when possible, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Full configuration, including defaults, as a document parse_config accepts.
nlohmann::json to_json(const ExperimentConfig& config);

/// Switches every printed-formula variant on (linearization and costates).
void enable_paper_matrices(ExperimentConfig& config);

/// Vehicle parameter files: flat objects with the field names used by to_json.
void load_vehicle_params(ExperimentConfig& config, const nlohmann::json& params, const std::string& where);

std::string to_string(SolverKind kind);
std::string to_string(Vehicle vehicle);

}  // namespace lgmpsp
