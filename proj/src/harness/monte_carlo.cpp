#include "lgmpsp/harness/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <thread>

#include "lgmpsp/harness/euler.hpp"
#include "lgmpsp/harness/output.hpp"

namespace lgmpsp {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double trial_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t draw) {
    const std::uint64_t stream = splitmix64(splitmix64(seed) ^ (trial * 0xD1B54A32D192ED03ULL));
    const std::uint64_t bits = splitmix64(stream + draw * 0x9E3779B97F4A7C15ULL);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

TrialProblem make_trial(const ExperimentConfig& c, int trial) {
    const MonteCarloConfig& mc = c.monte_carlo;
    std::uint64_t draw = 0;
    auto symmetric = [&](double range) { return range * (2.0 * trial_uniform(c.seed, static_cast<std::uint64_t>(trial), draw++) - 1.0); };

    TrialProblem p;
    p.x0 = c.initial_state();
    if (mc.mode == MonteCarloMode::random_initial_condition) {
        BoundaryConfig b = c.initial;
        for (int i = 0; i < 3; ++i) b.euler_deg(i) += symmetric(mc.attitude_deg);
        for (int i = 0; i < 3; ++i) b.rate_deg_s(i) += symmetric(mc.rate_deg_s);
        for (int i = 0; i < 3; ++i) b.moment(i) += symmetric(mc.moment);
        p.x0.attitude = euler_to_rotation(b.euler_deg);
        p.x0.omega = b.rate_deg_s * (std::numbers::pi / 180.0);
        if (c.vehicle == Vehicle::smrh) p.x0.moment = b.moment;
    } else {
        p.guess.resize(static_cast<std::size_t>(c.N() - 1));
        for (auto& u : p.guess) {
            u.resize(3);
            for (int i = 0; i < 3; ++i) u(i) = symmetric(mc.control_range);
        }
    }
    return p;
}

TrialResult run_trial(const ExperimentConfig& c, int trial) {
    TrialResult r;
    r.trial = trial;
    try {
        const TrialProblem p = make_trial(c, trial);
        const SolverRun run = run_solver(c, c.solver, p.x0, p.guess);
        r.ok = run.ok;
        r.converged = run.converged;
        r.iterations = run.report.iterations();
        r.final_deviation = run.terminal_deviation;
        r.control_effort = run.control_effort;
        for (const auto& rec : run.report.records) r.deviation_curve.push_back(rec.deviation_norm);
        r.error = run.error;
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

MonteCarloSummary run_monte_carlo(const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const int trials = c.monte_carlo.trials;
    MonteCarloSummary s;
    s.trials.resize(static_cast<std::size_t>(trials));

    unsigned workers = c.monte_carlo.threads > 0 ? static_cast<unsigned>(c.monte_carlo.threads)
                                                 : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < trials; i = next++) s.trials[static_cast<std::size_t>(i)] = run_trial(c, i);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::vector<double> efforts;
    for (const auto& t : s.trials) {
        if (!t.converged) continue;
        ++s.converged;
        ++s.iteration_histogram[t.iterations];
        s.max_iterations = std::max(s.max_iterations, t.iterations);
        efforts.push_back(t.control_effort);
    }
    s.convergence_rate = static_cast<double>(s.converged) / trials;
    s.J_u_q1 = quantile(efforts, 0.25);
    s.J_u_median = quantile(efforts, 0.5);
    s.J_u_q3 = quantile(efforts, 0.75);
    s.iqr_over_median = s.J_u_median > 0.0 ? (s.J_u_q3 - s.J_u_q1) / s.J_u_median : 0.0;
    s.wall_ms = c.timing ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() : 0.0;
    return s;
}

json monte_carlo_json(const MonteCarloSummary& s) {
    json hist = json::object();
    for (const auto& [iters, count] : s.iteration_histogram) hist[std::to_string(iters)] = count;
    json trials = json::array();
    for (const auto& t : s.trials) {
        json j{{"trial", t.trial},
               {"converged", t.converged},
               {"iterations", t.iterations},
               {"final_deviation", t.final_deviation},
               {"J_u", t.control_effort}};
        if (!t.error.empty()) j["error"] = t.error;
        trials.push_back(j);
    }
    return {{"trials", static_cast<int>(s.trials.size())},
            {"converged", s.converged},
            {"convergence_rate", s.convergence_rate},
            {"max_iterations", s.max_iterations},
            {"iteration_histogram", hist},
            {"J_u_quartiles", {s.J_u_q1, s.J_u_median, s.J_u_q3}},
            {"J_u_iqr_over_median", s.iqr_over_median},
            {"wall_ms", s.wall_ms},
            {"per_trial", trials}};
}

RunOutcome run_monte_carlo_command(const ExperimentConfig& c) {
    const MonteCarloSummary s = run_monte_carlo(c);
    RunOutcome out;
    out.report = {{"command", "monte-carlo"},
                  {"euler_convention", kEulerConvention},
                  {"config", to_json(c)},
                  {"parameter_provenance", c.provenance},
                  {"summary", monte_carlo_json(s)}};

    std::ostringstream trials_csv;
    trials_csv << "trial,converged,iterations,final_deviation,J_u\n";
    std::ostringstream curves_csv;
    curves_csv << "trial,iter,dev_norm\n";
    for (const auto& t : s.trials) {
        trials_csv << t.trial << ',' << (t.converged ? 1 : 0) << ',' << t.iterations << ','
                   << format_number(t.final_deviation) << ',' << format_number(t.control_effort) << '\n';
        for (std::size_t i = 0; i < t.deviation_curve.size(); ++i) {
            curves_csv << t.trial << ',' << i << ',' << format_number(t.deviation_curve[i]) << '\n';
        }
    }
    const auto dir = std::filesystem::path(c.output_dir);
    const std::string trials_path = (dir / "mc_trials.csv").string();
    const std::string curves_path = (dir / "mc_curves.csv").string();
    const std::string report_path = (dir / "mc_report.json").string();
    write_text(trials_path, trials_csv.str());
    write_text(curves_path, curves_csv.str());
    out.report["files"] = {{"trials", trials_path}, {"curves", curves_path}, {"report", report_path}};
    write_text(report_path, out.report.dump(2) + "\n");
    out.exit_code = s.converged == static_cast<int>(s.trials.size()) ? exit_ok : exit_not_converged;
    return out;
}

}  // namespace lgmpsp
