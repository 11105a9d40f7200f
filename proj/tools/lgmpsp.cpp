// Command-line front end: maneuver, compare, monte-carlo, certify.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lgmpsp/harness/config.hpp"
#include "lgmpsp/harness/monte_carlo.hpp"
#include "lgmpsp/harness/runner.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string solver;
    bool compat = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--solver", o.solver, "mpsp_effort | mpsp_increment | ilqr | tpbvp");
    cmd->add_flag("--compat-paper-matrices", o.compat, "use the printed linearization and costate formulas");
    cmd->add_option("--set", o.overrides, "override a config leaf, e.g. --set mpsp.tolerance=1e-6");
}

lgmpsp::ExperimentConfig build_config(const CommonOptions& o) {
    nlohmann::json doc = nlohmann::json::object();
    std::string base_dir = ".";
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw lgmpsp::Error(lgmpsp::ErrorCode::config_error, "cannot open config file " + o.config_path);
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw lgmpsp::Error(lgmpsp::ErrorCode::config_error, o.config_path + ": invalid JSON: " + e.what());
        }
        base_dir = std::filesystem::path(o.config_path).parent_path().string();
        if (base_dir.empty()) base_dir = ".";
    }
    for (const auto& s : o.overrides) lgmpsp::apply_override(doc, s);
    if (o.seed) doc["seed"] = *o.seed;
    if (!o.out.empty()) doc["output_dir"] = o.out;
    if (!o.solver.empty()) doc["solver"] = o.solver;
    lgmpsp::ExperimentConfig cfg = lgmpsp::parse_config(doc, base_dir);
    if (o.compat) lgmpsp::enable_paper_matrices(cfg);
    return cfg;
}

void print_summary(const std::string& command, const nlohmann::json& report) {
    if (command == "maneuver") {
        const auto& r = report["result"];
        std::cout << r["solver"].get<std::string>() << ": converged=" << r["converged"] << " iterations="
                  << r["iterations"] << " |dX_N|=" << r["terminal_deviation"] << " J_u=" << r["J_u"] << "\n";
    } else if (command == "compare") {
        for (const auto& r : report["solvers"]) {
            std::cout << r["solver"].get<std::string>() << ": converged=" << r["converged"] << " iterations="
                      << r["iterations"] << " |dX_N|=" << r["terminal_deviation"] << " J_u=" << r["J_u"]
                      << " wall_ms=" << r["wall_ms"] << "\n";
        }
        for (const auto& [name, m] : report["pairs"].items()) {
            std::cout << name << ": " << (m.is_null() ? std::string("n/a") : m.dump()) << "\n";
        }
    } else if (command == "monte-carlo") {
        const auto& s = report["summary"];
        std::cout << "converged " << s["converged"] << "/" << s["trials"] << ", max iterations "
                  << s["max_iterations"] << ", J_u quartiles " << s["J_u_quartiles"].dump() << "\n";
    } else if (command == "certify") {
        for (const auto& c : report["certificates"]) {
            std::cout << c["vehicle"].get<std::string>() << " N=" << c["N"] << " " << c["nominal"].get<std::string>()
                      << ": rank " << c["rank"] << "/" << c["required_rank"] << " (" << c["blocks"]
                      << " blocks), sigma_min " << c["sigma_min"];
            if (c.contains("determinant_relative_error")) std::cout << ", det rel err " << c["determinant_relative_error"];
            std::cout << "\n";
        }
    }
    if (report.contains("files") && report["files"].contains("report")) {
        std::cout << "report: " << report["files"]["report"].get<std::string>() << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lie-group MPSP toolkit: attitude flips with MPSP, iLQR and TPBVP"};
    app.require_subcommand(1);
    CommonOptions opts;
    const std::vector<std::string> commands = {"maneuver", "compare", "monte-carlo", "certify"};
    const std::vector<std::string> help = {"solve one maneuver with the selected solver",
                                           "run MPSP, iLQR and TPBVP on the same problem",
                                           "Monte Carlo sweep over perturbed guesses or initial conditions",
                                           "sensitivity rank certificates for both vehicles"};
    for (std::size_t i = 0; i < commands.size(); ++i) add_common(app.add_subcommand(commands[i], help[i]), opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lgmpsp::exit_config_error;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const lgmpsp::ExperimentConfig cfg = build_config(opts);
        lgmpsp::RunOutcome outcome;
        if (command == "maneuver") {
            outcome = lgmpsp::run_maneuver(cfg);
        } else if (command == "compare") {
            outcome = lgmpsp::run_comparison(cfg);
        } else if (command == "monte-carlo") {
            outcome = lgmpsp::run_monte_carlo_command(cfg);
        } else {
            outcome = lgmpsp::run_certify(cfg);
        }
        print_summary(command, outcome.report);
        return outcome.exit_code;
    } catch (const lgmpsp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == lgmpsp::ErrorCode::config_error ? lgmpsp::exit_config_error : lgmpsp::exit_not_converged;
    }
}
