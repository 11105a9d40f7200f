#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "lgmpsp/harness/config.hpp"
#include "lgmpsp/harness/euler.hpp"
#include "lgmpsp/harness/monte_carlo.hpp"
#include "lgmpsp/harness/runner.hpp"
#include "lgmpsp/lie_core.hpp"
#include "lgmpsp/mech_models.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

lgmpsp::ExperimentConfig config_from(const std::string& text, const std::string& base_dir, bool paper_matrices) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw lgmpsp::Error(lgmpsp::ErrorCode::config_error, std::string("invalid JSON: ") + e.what());
    }
    lgmpsp::ExperimentConfig c = lgmpsp::parse_config(doc, base_dir);
    if (paper_matrices) lgmpsp::enable_paper_matrices(c);
    return c;
}

json trajectory_json(const lgmpsp::Trajectory<lgmpsp::VehicleState>& t) {
    json euler = json::array();
    json omega = json::array();
    json moment = json::array();
    json controls = json::array();
    for (const auto& x : t.states) {
        const lgmpsp::Vec3 e = lgmpsp::rotation_to_euler(x.attitude);
        euler.push_back({e.x(), e.y(), e.z()});
        omega.push_back({x.omega.x(), x.omega.y(), x.omega.z()});
        if (x.moment) moment.push_back({x.moment->x(), x.moment->y(), x.moment->z()});
    }
    for (const auto& u : t.controls) controls.push_back(std::vector<double>(u.data(), u.data() + u.size()));
    json j{{"h", t.h}, {"euler_deg", euler}, {"omega", omega}, {"controls", controls}};
    if (!moment.empty()) j["moment"] = moment;
    return j;
}

std::string solve(const std::string& text, const std::string& base_dir, bool paper_matrices) {
    const lgmpsp::ExperimentConfig c = config_from(text, base_dir, paper_matrices);
    const lgmpsp::SolverRun run = lgmpsp::run_solver(c, c.solver);
    json j = lgmpsp::solver_run_json(run);
    j["trajectory"] = trajectory_json(run.trajectory);
    return j.dump();
}

template <class Fn>
py::tuple command(const std::string& text, const std::string& base_dir, bool paper_matrices, Fn fn) {
    const lgmpsp::ExperimentConfig c = config_from(text, base_dir, paper_matrices);
    const lgmpsp::RunOutcome out = fn(c);
    return py::make_tuple(out.report.dump(), out.exit_code);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lie-group MPSP toolkit: SO(3) maps, vehicle models and the experiment harness.";

    py::register_exception<lgmpsp::Error>(m, "LgmpspError", PyExc_RuntimeError);

    m.def("hat", &lgmpsp::hat, py::arg("v"));
    m.def("vee", &lgmpsp::vee, py::arg("m"), py::arg("tolerance") = 1e-9);
    m.def("exp_so3", &lgmpsp::exp_so3, py::arg("v"));
    m.def("log_so3", &lgmpsp::log_so3, py::arg("R"));
    m.def("log_so3_resolved", &lgmpsp::log_so3_resolved, py::arg("R"));
    m.def("right_jacobian_so3", &lgmpsp::right_jacobian_so3, py::arg("phi"));
    m.def("is_rotation", &lgmpsp::is_rotation, py::arg("R"), py::arg("tolerance") = 1e-9);
    m.def("euler_to_rotation", py::overload_cast<const lgmpsp::Vec3&>(&lgmpsp::euler_to_rotation),
          py::arg("rpy_deg"));
    m.def("rotation_to_euler", &lgmpsp::rotation_to_euler, py::arg("R"));

    m.def(
        "vpq_reference_inertia", []() { return lgmpsp::vpq_reference_inertia(); });
    m.def(
        "vpq_omega_dot",
        [](const lgmpsp::Mat3& J, const lgmpsp::Vec3& omega, const lgmpsp::Vec3& u) {
            lgmpsp::VpqParams p;
            p.J = J;
            lgmpsp::VehicleState x;
            x.omega = omega;
            return lgmpsp::vpq_derivative(p, x, u).omega_dot;
        },
        py::arg("J"), py::arg("omega"), py::arg("u"));

    m.def("_solve", &solve, py::arg("config"), py::arg("base_dir") = ".", py::arg("paper_matrices") = false);
    m.def(
        "_maneuver",
        [](const std::string& t, const std::string& b, bool p) { return command(t, b, p, lgmpsp::run_maneuver); },
        py::arg("config"), py::arg("base_dir") = ".", py::arg("paper_matrices") = false);
    m.def(
        "_compare",
        [](const std::string& t, const std::string& b, bool p) { return command(t, b, p, lgmpsp::run_comparison); },
        py::arg("config"), py::arg("base_dir") = ".", py::arg("paper_matrices") = false);
    m.def(
        "_certify",
        [](const std::string& t, const std::string& b, bool p) { return command(t, b, p, lgmpsp::run_certify); },
        py::arg("config"), py::arg("base_dir") = ".", py::arg("paper_matrices") = false);
    m.def(
        "_monte_carlo",
        [](const std::string& t, const std::string& b, bool p) {
            return command(t, b, p, lgmpsp::run_monte_carlo_command);
        },
        py::arg("config"), py::arg("base_dir") = ".", py::arg("paper_matrices") = false);
    m.def(
        "_default_config", []() { return lgmpsp::to_json(lgmpsp::ExperimentConfig{}).dump(); });
}
