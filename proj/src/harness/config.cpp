#include "lgmpsp/harness/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lgmpsp/harness/euler.hpp"

namespace lgmpsp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::config_error, path.empty() ? what : path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json& at_path(const json& doc, const std::string& path) {
    const json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) node = &node->at(part);
    return *node;
}

double get_number(const json& doc, const std::string& path) {
    const json& v = at_path(doc, path);
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

int get_int(const json& doc, const std::string& path) {
    const json& v = at_path(doc, path);
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& doc, const std::string& path) {
    const json& v = at_path(doc, path);
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& doc, const std::string& path) {
    const json& v = at_path(doc, path);
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

std::vector<double> get_numbers(const json& doc, const std::string& path) {
    const json& v = at_path(doc, path);
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
        if (!std::isfinite(out.back())) fail(path + "[" + std::to_string(i) + "]", "must be finite");
    }
    return out;
}

Vec3 get_vec3(const json& doc, const std::string& path) {
    const std::vector<double> v = get_numbers(doc, path);
    if (v.size() != 3) fail(path, "expected exactly 3 numbers");
    return Vec3(v[0], v[1], v[2]);
}

// A scalar w is read as w * (1, 1, 1).
Vec3 get_diag(const json& doc, const std::string& path) {
    const json& v = at_path(doc, path);
    if (v.is_number()) return Vec3::Constant(get_number(doc, path));
    return get_vec3(doc, path);
}

template <class Enum>
Enum get_enum(const json& doc, const std::string& path, const std::vector<std::pair<std::string, Enum>>& names) {
    const std::string s = get_string(doc, path);
    std::string choices;
    for (const auto& [name, value] : names) {
        if (s == name) return value;
        choices += (choices.empty() ? "" : ", ") + name;
    }
    fail(path, "'" + s + "' is not one of: " + choices);
}

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail(path, what);
}

const std::vector<std::pair<std::string, SolverKind>> kSolvers = {{"mpsp_effort", SolverKind::mpsp_effort},
                                                                  {"mpsp_increment", SolverKind::mpsp_increment},
                                                                  {"ilqr", SolverKind::ilqr},
                                                                  {"tpbvp", SolverKind::tpbvp}};
const std::vector<std::pair<std::string, Vehicle>> kVehicles = {{"vpq", Vehicle::vpq}, {"smrh", Vehicle::smrh}};
const std::vector<std::pair<std::string, LinearizationForm>> kForms = {
    {"exact_discrete", LinearizationForm::exact_discrete},
    {"first_order", LinearizationForm::first_order},
    {"paper_printed", LinearizationForm::paper_printed}};
const std::vector<std::pair<std::string, VariationSign>> kSigns = {{"minus", VariationSign::minus},
                                                                   {"plus", VariationSign::plus}};
const std::vector<std::pair<std::string, CostateForm>> kCostates = {{"derived", CostateForm::derived},
                                                                    {"printed", CostateForm::printed}};
const std::vector<std::pair<std::string, MonteCarloMode>> kModes = {
    {"random_control_guess", MonteCarloMode::random_control_guess},
    {"random_initial_condition", MonteCarloMode::random_initial_condition}};

template <class Enum>
std::string name_of(Enum value, const std::vector<std::pair<std::string, Enum>>& names) {
    for (const auto& [name, v] : names) {
        if (v == value) return name;
    }
    return "?";
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Rejects keys of `doc` that do not appear in `schema`; free-form objects
// (vehicle parameters) are checked separately.
void check_keys(const json& doc, const json& schema, const std::string& path) {
    if (!doc.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : doc.items()) {
        const std::string here = join(path, key);
        if (!schema.contains(key)) fail(here, "unknown key");
        if (key == "params" && path.empty()) continue;
        if (schema[key].is_object()) check_keys(value, schema[key], here);
    }
}

json vpq_params_json(const VpqParams& p) {
    return {{"J_xx", p.J(0, 0)}, {"J_yy", p.J(1, 1)}, {"J_zz", p.J(2, 2)}, {"J_xy", p.J(0, 1)},
            {"J_xz", p.J(0, 2)}, {"J_yz", p.J(1, 2)}, {"K", p.K},         {"d", p.d},
            {"r", p.r},          {"gamma", p.gamma}};
}

json smrh_params_json(const SmrhParams& p) {
    return {{"J_xx", p.J(0, 0)},  {"J_yy", p.J(1, 1)},       {"J_zz", p.J(2, 2)},   {"J_xy", p.J(0, 1)},
            {"J_xz", p.J(0, 2)},  {"J_yz", p.J(1, 2)},       {"tau_m", p.tau_m},    {"Omega_mr", p.omega_mr},
            {"k_beta", p.k_beta}, {"I_beta", p.I_beta},      {"tau_t", p.tau_t},    {"K_t", p.K_t},
            {"h_mr", p.h_mr},     {"T_mr", p.T_mr}};
}

void read_inertia(Mat3& J, const json& params, const std::string& where) {
    auto set = [&](const char* key, int i, int j) {
        if (params.contains(key)) {
            J(i, j) = get_number(params, key);
            J(j, i) = J(i, j);
        }
    };
    try {
        set("J_xx", 0, 0);
        set("J_yy", 1, 1);
        set("J_zz", 2, 2);
        set("J_xy", 0, 1);
        set("J_xz", 0, 2);
        set("J_yz", 1, 2);
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

void update_provenance(ExperimentConfig& c) {
    c.provenance.clear();
    const bool vpq = c.vehicle == Vehicle::vpq;
    const json now = vpq ? vpq_params_json(c.vpq) : smrh_params_json(c.smrh);
    const json shipped = vpq ? vpq_params_json(VpqParams{}) : smrh_params_json(SmrhParams{});
    for (const auto& [key, value] : now.items()) {
        const bool inertia = key.rfind("J_", 0) == 0;
        if (value != shipped[key]) {
            c.provenance[key] = "user";
        } else if (vpq && inertia) {
            c.provenance[key] = "paper";
        } else {
            c.provenance[key] = "shipped_default";
        }
    }
}

json default_document(Vehicle vehicle) {
    ExperimentConfig c;
    c.vehicle = vehicle;
    if (vehicle == Vehicle::smrh) c.t_f = 1.2;
    json doc = to_json(c);
    doc["params"] = json::object();
    return doc;
}

}  // namespace

std::string to_string(SolverKind kind) { return name_of(kind, kSolvers); }
std::string to_string(Vehicle vehicle) { return name_of(vehicle, kVehicles); }

int ExperimentConfig::N() const { return static_cast<int>(std::lround(t_f / h)); }

VehicleState ExperimentConfig::initial_state() const {
    VehicleState x;
    x.attitude = euler_to_rotation(initial.euler_deg);
    x.omega = initial.rate_deg_s * (std::numbers::pi / 180.0);
    if (vehicle == Vehicle::smrh) x.moment = initial.moment;
    return x;
}

VehicleState ExperimentConfig::target_state() const {
    VehicleState x;
    x.attitude = euler_to_rotation(target.euler_deg);
    x.omega = target.rate_deg_s * (std::numbers::pi / 180.0);
    if (vehicle == Vehicle::smrh) x.moment = target.moment;
    return x;
}

void load_vehicle_params(ExperimentConfig& c, const json& params, const std::string& where) {
    if (!params.is_object()) fail(where, "vehicle parameters must be an object");
    const json known = c.vehicle == Vehicle::vpq ? vpq_params_json(c.vpq) : smrh_params_json(c.smrh);
    for (const auto& [key, value] : params.items()) {
        if (key == "note" || key == "comment") continue;
        if (!known.contains(key)) fail(join(where, key), "unknown parameter for vehicle " + to_string(c.vehicle));
        if (!value.is_number()) fail(join(where, key), "expected a number");
    }
    auto num = [&](const char* key, double& field) {
        if (params.contains(key)) field = params[key].get<double>();
    };
    if (c.vehicle == Vehicle::vpq) {
        read_inertia(c.vpq.J, params, where);
        num("K", c.vpq.K);
        num("d", c.vpq.d);
        num("r", c.vpq.r);
        if (params.contains("gamma")) {
            if (!params["gamma"].is_number_integer()) fail(join(where, "gamma"), "expected +1 or -1");
            c.vpq.gamma = params["gamma"].get<int>();
        }
        try {
            c.vpq.validate();
        } catch (const Error& e) {
            fail(where, e.what());
        }
    } else {
        read_inertia(c.smrh.J, params, where);
        num("tau_m", c.smrh.tau_m);
        num("Omega_mr", c.smrh.omega_mr);
        num("k_beta", c.smrh.k_beta);
        num("I_beta", c.smrh.I_beta);
        num("tau_t", c.smrh.tau_t);
        num("K_t", c.smrh.K_t);
        num("h_mr", c.smrh.h_mr);
        num("T_mr", c.smrh.T_mr);
        try {
            c.smrh.validate();
        } catch (const Error& e) {
            fail(where, e.what());
        }
    }
    update_provenance(c);
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir) {
    if (!doc.is_object()) fail("", "configuration must be a JSON object");
    const Vehicle vehicle = doc.contains("vehicle") ? get_enum(doc, "vehicle", kVehicles) : Vehicle::vpq;
    const json schema = default_document(vehicle);
    check_keys(doc, schema, "");
    json m = schema;
    m.update(doc, true);

    ExperimentConfig c;
    c.vehicle = vehicle;
    c.solver = get_enum(m, "solver", kSolvers);
    c.t_f = get_number(m, "t_f");
    c.h = get_number(m, "h");
    require(c.h > 0.0, "h", "must be positive");
    require(c.t_f > 0.0, "t_f", "must be positive");
    require(c.N() >= 3, "t_f", "horizon must span at least 3 steps of h");
    for (const char* side : {"initial", "target"}) {
        BoundaryConfig& b = std::string(side) == "initial" ? c.initial : c.target;
        b.euler_deg = get_vec3(m, join(side, "euler_deg"));
        b.rate_deg_s = get_vec3(m, join(side, "rate_deg_s"));
        b.moment = get_vec3(m, join(side, "moment"));
    }

    const std::string params_file = get_string(m, "params_file");
    if (!params_file.empty()) {
        std::filesystem::path p(params_file);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        std::ifstream in(p);
        if (!in) fail("params_file", "cannot open " + p.string());
        json file_params;
        try {
            in >> file_params;
        } catch (const json::exception& e) {
            fail("params_file", std::string("invalid JSON: ") + e.what());
        }
        load_vehicle_params(c, file_params, p.string());
    }
    load_vehicle_params(c, m["params"], "params");

    c.linearization.form = get_enum(m, "linearization.form", kForms);
    c.linearization.sign = get_enum(m, "linearization.variation_sign", kSigns);
    c.costate_form = get_enum(m, "costate_form", kCostates);

    c.mpsp.max_iterations = get_int(m, "mpsp.max_iterations");
    require(c.mpsp.max_iterations >= 1, "mpsp.max_iterations", "must be at least 1");
    c.mpsp.tolerance = get_number(m, "mpsp.tolerance");
    require(c.mpsp.tolerance > 0.0, "mpsp.tolerance", "must be positive");
    c.mpsp.R_diag = get_diag(m, "mpsp.R");
    require(c.mpsp.R_diag.minCoeff() > 0.0, "mpsp.R", "weights must be positive");
    c.mpsp.norm_scaling = get_numbers(m, "mpsp.norm_scaling");
    const std::size_t p = vehicle == Vehicle::vpq ? 6 : 9;
    require(c.mpsp.norm_scaling.empty() || c.mpsp.norm_scaling.size() == p, "mpsp.norm_scaling",
            "needs one weight per deviation component (" + std::to_string(p) + ")");

    c.ilqr.max_iterations = get_int(m, "ilqr.max_iterations");
    require(c.ilqr.max_iterations >= 1, "ilqr.max_iterations", "must be at least 1");
    c.ilqr.Q_N = get_number(m, "ilqr.Q_N");
    require(c.ilqr.Q_N >= 0.0, "ilqr.Q_N", "must be non-negative");
    c.ilqr.R_diag = get_diag(m, "ilqr.R");
    require(c.ilqr.R_diag.minCoeff() > 0.0, "ilqr.R", "weights must be positive");
    c.ilqr.c1 = get_number(m, "ilqr.c1");
    require(c.ilqr.c1 > 0.0 && c.ilqr.c1 < 1.0, "ilqr.c1", "must lie in (0, 1)");
    c.ilqr.alphas = get_numbers(m, "ilqr.alphas");
    require(!c.ilqr.alphas.empty(), "ilqr.alphas", "must not be empty");
    for (double a : c.ilqr.alphas) require(a > 0.0 && a <= 1.0, "ilqr.alphas", "values must lie in (0, 1]");
    c.ilqr.cost_tolerance = get_number(m, "ilqr.cost_tolerance");
    require(c.ilqr.cost_tolerance > 0.0, "ilqr.cost_tolerance", "must be positive");

    c.tpbvp.Q_diag = get_diag(m, "tpbvp.Q");
    require(c.tpbvp.Q_diag.minCoeff() > 0.0, "tpbvp.Q", "weights must be positive");
    c.tpbvp.substeps = get_int(m, "tpbvp.substeps");
    require(c.tpbvp.substeps >= 1, "tpbvp.substeps", "must be at least 1");
    c.tpbvp.max_iterations = get_int(m, "tpbvp.max_iterations");
    require(c.tpbvp.max_iterations >= 1, "tpbvp.max_iterations", "must be at least 1");
    c.tpbvp.tolerance = get_number(m, "tpbvp.tolerance");
    require(c.tpbvp.tolerance > 0.0, "tpbvp.tolerance", "must be positive");
    c.tpbvp.seed = get_string(m, "tpbvp.seed");
    require(c.tpbvp.seed == "from_mpsp" || c.tpbvp.seed == "from_mpsp_control" || c.tpbvp.seed == "zero", "tpbvp.seed",
            "must be 'from_mpsp', 'from_mpsp_control' or 'zero'");

    c.monte_carlo.trials = get_int(m, "monte_carlo.trials");
    require(c.monte_carlo.trials >= 1, "monte_carlo.trials", "must be at least 1");
    c.monte_carlo.mode = get_enum(m, "monte_carlo.mode", kModes);
    c.monte_carlo.attitude_deg = get_number(m, "monte_carlo.attitude_deg");
    c.monte_carlo.rate_deg_s = get_number(m, "monte_carlo.rate_deg_s");
    c.monte_carlo.moment = get_number(m, "monte_carlo.moment");
    c.monte_carlo.control_range = get_number(m, "monte_carlo.control_range");
    for (const char* key : {"monte_carlo.attitude_deg", "monte_carlo.rate_deg_s", "monte_carlo.moment",
                            "monte_carlo.control_range"}) {
        require(get_number(m, key) >= 0.0, key, "must be non-negative");
    }
    c.monte_carlo.threads = get_int(m, "monte_carlo.threads");
    require(c.monte_carlo.threads >= 0, "monte_carlo.threads", "must be non-negative");

    const json& seed = m["seed"];
    require(seed.is_number_integer() && (seed.is_number_unsigned() || seed.get<std::int64_t>() >= 0), "seed",
            "expected a non-negative integer");
    c.seed = seed.get<std::uint64_t>();
    c.output_dir = get_string(m, "output_dir");
    c.timing = get_bool(m, "timing");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("", "cannot open config file " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail("", path + ": invalid JSON: " + e.what());
    }
    return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) fail("", "override '" + assignment + "' must look like key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json* node = &doc;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) fail(path, "'" + parts[i] + "' is not an object");
        node = &next;
    }
    (*node)[parts.back()] = value;
}

json to_json(const ExperimentConfig& c) {
    auto boundary = [](const BoundaryConfig& b) {
        return json{{"euler_deg", vec_json(b.euler_deg)}, {"rate_deg_s", vec_json(b.rate_deg_s)}, {"moment", vec_json(b.moment)}};
    };
    return {
        {"vehicle", to_string(c.vehicle)},
        {"solver", to_string(c.solver)},
        {"t_f", c.t_f},
        {"h", c.h},
        {"initial", boundary(c.initial)},
        {"target", boundary(c.target)},
        {"params_file", ""},
        {"params", c.vehicle == Vehicle::vpq ? vpq_params_json(c.vpq) : smrh_params_json(c.smrh)},
        {"linearization",
         {{"form", name_of(c.linearization.form, kForms)}, {"variation_sign", name_of(c.linearization.sign, kSigns)}}},
        {"costate_form", name_of(c.costate_form, kCostates)},
        {"mpsp",
         {{"max_iterations", c.mpsp.max_iterations},
          {"tolerance", c.mpsp.tolerance},
          {"R", vec_json(c.mpsp.R_diag)},
          {"norm_scaling", c.mpsp.norm_scaling}}},
        {"ilqr",
         {{"max_iterations", c.ilqr.max_iterations},
          {"Q_N", c.ilqr.Q_N},
          {"R", vec_json(c.ilqr.R_diag)},
          {"c1", c.ilqr.c1},
          {"alphas", c.ilqr.alphas},
          {"cost_tolerance", c.ilqr.cost_tolerance}}},
        {"tpbvp",
         {{"Q", vec_json(c.tpbvp.Q_diag)},
          {"substeps", c.tpbvp.substeps},
          {"max_iterations", c.tpbvp.max_iterations},
          {"tolerance", c.tpbvp.tolerance},
          {"seed", c.tpbvp.seed}}},
        {"monte_carlo",
         {{"trials", c.monte_carlo.trials},
          {"mode", name_of(c.monte_carlo.mode, kModes)},
          {"attitude_deg", c.monte_carlo.attitude_deg},
          {"rate_deg_s", c.monte_carlo.rate_deg_s},
          {"moment", c.monte_carlo.moment},
          {"control_range", c.monte_carlo.control_range},
          {"threads", c.monte_carlo.threads}}},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"timing", c.timing},
    };
}

void enable_paper_matrices(ExperimentConfig& config) {
    config.linearization.form = LinearizationForm::paper_printed;
    config.costate_form = CostateForm::printed;
}

}  // namespace lgmpsp
