#include "lgmpsp/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "lgmpsp/harness/euler.hpp"
#include "lgmpsp/harness/output.hpp"
#include "lgmpsp/ilqr.hpp"
#include "lgmpsp/tpbvp.hpp"

namespace lgmpsp {

using nlohmann::json;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

double rotation_angle_deg(const Mat3& a, const Mat3& b) {
    return log_so3_resolved(a.transpose() * b).norm() * 180.0 / std::numbers::pi;
}

ShootingProblem shooting_problem(const ExperimentConfig& c, const VehicleState& x0) {
    ShootingProblem sp;
    sp.vehicle = c.vehicle;
    sp.vpq = c.vpq;
    sp.smrh = c.smrh;
    sp.x0 = x0;
    sp.target = c.target_state();
    sp.h = c.h;
    sp.steps = c.N() - 1;
    sp.substeps = c.tpbvp.substeps;
    sp.Q = c.tpbvp.Q_diag.asDiagonal();
    sp.form = c.costate_form;
    return sp;
}

// Costate seed from an MPSP solution: the discrete terminal multiplier
// propagated back to t = 0, or only the first control sample.
CostateState mpsp_seed(const ExperimentConfig& c, const ShootingProblem& sp, const Trajectory<VehicleState>& traj) {
    if (c.tpbvp.seed == "from_mpsp_control") return seed_from_control(sp, traj.controls.front());
    return std::visit(
        [&](const auto& sys) {
            const auto lin = linearize_along(sys, traj);
            const ControlWeights weights = ControlWeights::shared(Eigen::MatrixXd(c.mpsp.R_diag.asDiagonal()));
            const Eigen::VectorXd mu = terminal_multiplier(build_chain(lin), weights, traj.controls);
            return seed_from_discrete_costate(sp, initial_costate(lin, mu));
        },
        make_system(c));
}

void run_tpbvp(const ExperimentConfig& c, const VehicleState& x0, const Trajectory<VehicleState>* seed_run,
               SolverRun& run) {
    const ShootingProblem sp = shooting_problem(c, x0);
    CostateState seed;
    if (c.vehicle == Vehicle::smrh) seed.lambda_M = Vec3::Zero();
    if (seed_run && !seed_run->controls.empty()) seed = mpsp_seed(c, sp, *seed_run);

    TpbvpOptions opts;
    opts.max_iterations = c.tpbvp.max_iterations;
    opts.tolerance = c.tpbvp.tolerance;
    const TpbvpResult r = solve_tpbvp(sp, seed, opts);

    run.trajectory.h = c.h;
    run.trajectory.states = r.extremal.states;
    run.trajectory.controls.clear();
    for (int k = 0; k < sp.steps; ++k) run.trajectory.controls.emplace_back(r.extremal.controls[static_cast<std::size_t>(k)]);
    run.converged = r.converged;
    run.shooting_residual = r.residual_norm;
    run.report.converged = r.converged;
    run.report.message = r.message;
    if (!r.converged) run.report.failure = ErrorCode::shooting_failed;
    for (std::size_t i = 0; i < r.residual_history.size(); ++i) {
        IterationRecord rec;
        rec.iteration = static_cast<int>(i) + 1;
        rec.deviation_norm = r.residual_history[i];
        run.report.records.push_back(rec);
    }
}

}  // namespace

VehicleSystem make_system(const ExperimentConfig& c) {
    if (c.vehicle == Vehicle::vpq) return VpqSystem(c.vpq, c.linearization);
    return SmrhSystem(c.smrh, c.linearization);
}

MpspConfig make_mpsp_config(const ExperimentConfig& c, MpspVariant variant) {
    MpspConfig m;
    m.weights = ControlWeights::shared(Eigen::MatrixXd(c.mpsp.R_diag.asDiagonal()));
    m.max_iterations = c.mpsp.max_iterations;
    m.tolerance = c.mpsp.tolerance;
    m.variant = variant;
    if (!c.mpsp.norm_scaling.empty()) {
        m.norm_scaling = Eigen::Map<const Eigen::VectorXd>(c.mpsp.norm_scaling.data(),
                                                           static_cast<Eigen::Index>(c.mpsp.norm_scaling.size()));
    }
    m.timing = c.timing;
    return m;
}

IlqrConfig make_ilqr_config(const ExperimentConfig& c, int p) {
    IlqrConfig cfg;
    cfg.Q_N = c.ilqr.Q_N * Eigen::MatrixXd::Identity(p, p);
    cfg.weights = ControlWeights::shared(Eigen::MatrixXd(c.ilqr.R_diag.asDiagonal()));
    cfg.c1 = c.ilqr.c1;
    cfg.alphas = c.ilqr.alphas;
    cfg.max_iterations = c.ilqr.max_iterations;
    cfg.cost_tolerance = c.ilqr.cost_tolerance;
    cfg.timing = c.timing;
    return cfg;
}

SolverRun run_solver(const ExperimentConfig& c, SolverKind solver, const std::optional<VehicleState>& x0_override,
                     const std::vector<Eigen::VectorXd>& guess) {
    SolverRun run;
    run.solver = solver;
    const auto t0 = std::chrono::steady_clock::now();
    const VehicleState x0 = x0_override.value_or(c.initial_state());
    const VehicleState target = c.target_state();
    try {
        const VehicleSystem system = make_system(c);
        if (solver == SolverKind::tpbvp) {
            std::optional<SolverRun> seed;
            if (c.tpbvp.seed != "zero") {
                seed = run_solver(c, SolverKind::mpsp_effort, x0, guess);
                if (!seed->ok) throw Error(ErrorCode::shooting_failed, "MPSP seed failed: " + seed->error);
            }
            run_tpbvp(c, x0, seed ? &seed->trajectory : nullptr, run);
        } else {
            std::visit(
                [&](const auto& sys) {
                    const OptimalControlProblem<VehicleState> problem{x0, target, c.N(), c.h, guess};
                    SolveResult<VehicleState> res;
                    if (solver == SolverKind::ilqr) {
                        res = ilqr_solve(sys, problem, make_ilqr_config(c, sys.deviation_dim()));
                    } else {
                        const MpspVariant variant =
                            solver == SolverKind::mpsp_effort ? MpspVariant::effort : MpspVariant::increment;
                        res = mpsp_solve(sys, problem, make_mpsp_config(c, variant));
                    }
                    run.trajectory = std::move(res.trajectory);
                    run.report = std::move(res.report);
                    run.converged = run.report.converged;
                },
                system);
        }
        std::visit([&](const auto& sys) {
            run.terminal_deviation = sys.deviation_resolved(run.trajectory.states.back(), target).norm();
        }, system);
        run.ok = true;
    } catch (const Error& e) {
        run.error = e.what();
        run.report.failure = e.code();
        run.report.message = e.what();
    }
    run.control_effort =
        effort_cost(run.trajectory.controls, ControlWeights::shared(Eigen::MatrixXd(c.mpsp.R_diag.asDiagonal())));
    run.wall_ms = c.timing ? ms_since(t0) : 0.0;
    return run;
}

PairMetrics compare_trajectories(const Trajectory<VehicleState>& a, const Trajectory<VehicleState>& b) {
    if (a.states.size() != b.states.size() || a.controls.size() != b.controls.size()) {
        throw Error(ErrorCode::dimension_mismatch, "trajectories are on different grids");
    }
    PairMetrics m;
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < a.controls.size(); ++k) {
        diff += (a.controls[k] - b.controls[k]).squaredNorm();
        ref += b.controls[k].squaredNorm();
    }
    m.control_rms_relative = ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
    double att = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        const double d = rotation_angle_deg(a.states[k].attitude, b.states[k].attitude);
        att += d * d;
    }
    m.attitude_rms_deg = std::sqrt(att / static_cast<double>(a.states.size()));
    m.terminal_attitude_deg = rotation_angle_deg(a.states.back().attitude, b.states.back().attitude);
    return m;
}

ComparisonResult compare_solvers(const ExperimentConfig& c) {
    ComparisonResult out;
    out.mpsp = run_solver(c, SolverKind::mpsp_effort);
    out.ilqr = run_solver(c, SolverKind::ilqr);

    out.tpbvp.solver = SolverKind::tpbvp;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const bool seeded = c.tpbvp.seed != "zero" && out.mpsp.ok;
        run_tpbvp(c, c.initial_state(), seeded ? &out.mpsp.trajectory : nullptr, out.tpbvp);
        out.tpbvp.terminal_deviation = std::visit(
            [&](const auto& sys) { return sys.deviation_resolved(out.tpbvp.trajectory.states.back(), c.target_state()).norm(); },
            make_system(c));
        out.tpbvp.control_effort =
            effort_cost(out.tpbvp.trajectory.controls, ControlWeights::shared(Eigen::MatrixXd(c.mpsp.R_diag.asDiagonal())));
        out.tpbvp.ok = true;
    } catch (const Error& e) {
        out.tpbvp.error = e.what();
        out.tpbvp.report.failure = e.code();
    }
    out.tpbvp.wall_ms = c.timing ? ms_since(t0) : 0.0;

    auto pair = [](const SolverRun& a, const SolverRun& b) -> std::optional<PairMetrics> {
        if (!a.ok || !b.ok) return std::nullopt;
        return compare_trajectories(a.trajectory, b.trajectory);
    };
    out.mpsp_vs_tpbvp = pair(out.mpsp, out.tpbvp);
    out.mpsp_vs_ilqr = pair(out.mpsp, out.ilqr);
    out.ilqr_vs_tpbvp = pair(out.ilqr, out.tpbvp);
    return out;
}

std::vector<CertificateRow> certify(const ExperimentConfig& base, const std::vector<int>& horizons) {
    std::vector<CertificateRow> rows;
    for (Vehicle vehicle : {Vehicle::vpq, Vehicle::smrh}) {
        ExperimentConfig c = base;
        c.vehicle = vehicle;
        const VehicleSystem system = make_system(c);
        for (int N : horizons) {
            for (const char* nominal : {"rest", "tumbling"}) {
                VehicleState x0;
                std::vector<Eigen::VectorXd> controls(static_cast<std::size_t>(std::max(N - 1, 0)), Eigen::VectorXd::Zero(3));
                if (std::string(nominal) == "tumbling") {
                    x0.omega = Vec3(1.0, -2.0, 3.0);
                    for (auto& u : controls) u = Eigen::Vector3d(0.1, 0.2, -0.1);
                }
                if (vehicle == Vehicle::smrh) x0.moment = Vec3::Zero();
                CertificateRow row;
                row.vehicle = to_string(vehicle);
                row.N = N;
                row.nominal = nominal;
                std::visit(
                    [&](const auto& sys) {
                        const auto traj = rollout(sys, x0, controls, c.h);
                        const SensitivityChain chain = build_chain(linearize_along(sys, traj));
                        row.certificate = rank_certificate(chain);
                        row.two_block = rank_certificate(chain, 2);
                    },
                    system);
                if (vehicle == Vehicle::vpq && row.nominal == "rest" && row.two_block.determinant) {
                    row.expected_determinant = rest_determinant(c.h, c.vpq.J.inverse());
                    row.determinant_relative_error =
                        std::abs(*row.two_block.determinant - *row.expected_determinant) / std::abs(*row.expected_determinant);
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

json solver_run_json(const SolverRun& run) {
    json j{{"solver", to_string(run.solver)},
           {"ok", run.ok},
           {"converged", run.converged},
           {"iterations", run.report.iterations()},
           {"terminal_deviation", run.terminal_deviation},
           {"J_u", run.control_effort},
           {"wall_ms", run.wall_ms},
           {"iteration_report", report_json(run.report)}};
    if (run.report.iterations() > 0) j["ms_per_iteration"] = run.report.total_wall_ms() / run.report.iterations();
    if (run.shooting_residual) j["shooting_residual"] = *run.shooting_residual;
    if (!run.error.empty()) j["error"] = run.error;
    return j;
}

namespace {

json run_header(const ExperimentConfig& c, const std::string& command) {
    return {{"command", command},
            {"euler_convention", kEulerConvention},
            {"config", to_json(c)},
            {"parameter_provenance", c.provenance}};
}

std::string out_path(const ExperimentConfig& c, const std::string& name) {
    return (std::filesystem::path(c.output_dir) / name).string();
}

json pair_json(const std::optional<PairMetrics>& m) {
    if (!m) return nullptr;
    return {{"control_rms_relative", m->control_rms_relative},
            {"attitude_rms_deg", m->attitude_rms_deg},
            {"terminal_attitude_deg", m->terminal_attitude_deg}};
}

}  // namespace

RunOutcome run_maneuver(const ExperimentConfig& c) {
    const SolverRun run = run_solver(c, c.solver);
    RunOutcome out;
    out.report = run_header(c, "maneuver");
    out.report["result"] = solver_run_json(run);
    json files = json::object();
    if (!run.trajectory.states.empty()) {
        files["trajectory"] = out_path(c, "trajectory.csv");
        write_text(files["trajectory"], trajectory_csv(run.trajectory));
    }
    files["convergence"] = out_path(c, "convergence.csv");
    write_text(files["convergence"], convergence_csv(run.report));
    files["report"] = out_path(c, "report.json");
    out.report["files"] = files;
    write_text(files["report"], out.report.dump(2) + "\n");
    out.exit_code = run.ok && run.converged ? exit_ok : exit_not_converged;
    return out;
}

RunOutcome run_comparison(const ExperimentConfig& c) {
    const ComparisonResult r = compare_solvers(c);
    RunOutcome out;
    out.report = run_header(c, "compare");
    json files = json::object();
    json solvers = json::array();
    for (const SolverRun* run : {&r.mpsp, &r.ilqr, &r.tpbvp}) {
        const std::string name = to_string(run->solver);
        if (!run->trajectory.states.empty()) {
            files["trajectory_" + name] = out_path(c, "trajectory_" + name + ".csv");
            write_text(files["trajectory_" + name], trajectory_csv(run->trajectory));
        }
        files["convergence_" + name] = out_path(c, "convergence_" + name + ".csv");
        write_text(files["convergence_" + name], convergence_csv(run->report));
        solvers.push_back(solver_run_json(*run));
    }
    out.report["solvers"] = solvers;
    out.report["pairs"] = {{"mpsp_vs_tpbvp", pair_json(r.mpsp_vs_tpbvp)},
                           {"mpsp_vs_ilqr", pair_json(r.mpsp_vs_ilqr)},
                           {"ilqr_vs_tpbvp", pair_json(r.ilqr_vs_tpbvp)}};
    files["report"] = out_path(c, "comparison.json");
    out.report["files"] = files;
    write_text(files["report"], out.report.dump(2) + "\n");
    out.exit_code = r.mpsp.converged && r.tpbvp.converged ? exit_ok : exit_not_converged;
    return out;
}

RunOutcome run_certify(const ExperimentConfig& c) {
    const std::vector<CertificateRow> rows = certify(c, {3, 10, 600});
    RunOutcome out;
    out.report = run_header(c, "certify");
    json list = json::array();
    bool all = true;
    for (const auto& row : rows) {
        json j{{"vehicle", row.vehicle},
               {"N", row.N},
               {"nominal", row.nominal},
               {"full_rank", row.certificate.full_rank},
               {"rank", row.certificate.rank},
               {"required_rank", row.certificate.required_rank},
               {"blocks", row.certificate.blocks},
               {"sigma_min", row.certificate.sigma_min},
               {"two_block_rank", row.two_block.rank}};
        if (row.determinant_relative_error) {
            j["determinant"] = *row.two_block.determinant;
            j["expected_determinant"] = *row.expected_determinant;
            j["determinant_relative_error"] = *row.determinant_relative_error;
            all = all && *row.determinant_relative_error < 1e-6;
        }
        all = all && row.certificate.full_rank;
        list.push_back(j);
    }
    out.report["certificates"] = list;
    out.report["all_pass"] = all;
    const std::string path = out_path(c, "certify.json");
    out.report["files"] = {{"report", path}};
    write_text(path, out.report.dump(2) + "\n");
    out.exit_code = all ? exit_ok : exit_not_converged;
    return out;
}

}  // namespace lgmpsp
