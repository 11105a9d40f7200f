#include "lgmpsp/harness/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lgmpsp/harness/euler.hpp"

namespace lgmpsp {

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string trajectory_csv(const Trajectory<VehicleState>& traj) {
    const bool smrh = !traj.states.empty() && traj.states.front().moment.has_value();
    std::ostringstream os;
    os << "# euler " << kEulerConvention << "; rates rad/s" << (smrh ? "; moments N m" : "") << "\n";
    os << "t,phi,theta,psi,p,q,r" << (smrh ? ",l,m,n" : "") << ",u1,u2,u3\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const VehicleState& x = traj.states[k];
        const Vec3 e = rotation_to_euler(x.attitude);
        os << format_number(static_cast<double>(k) * traj.h);
        for (int i = 0; i < 3; ++i) os << ',' << format_number(e(i));
        for (int i = 0; i < 3; ++i) os << ',' << format_number(x.omega(i));
        if (smrh) {
            for (int i = 0; i < 3; ++i) os << ',' << format_number((*x.moment)(i));
        }
        if (k < traj.controls.size()) {
            for (int i = 0; i < traj.controls[k].size(); ++i) os << ',' << format_number(traj.controls[k](i));
        } else {
            os << ",,,";
        }
        os << '\n';
    }
    return os.str();
}

std::string convergence_csv(const IterationReport& report) {
    std::ostringstream os;
    os << "iter,dev_norm,J_du,J_u,wall_ms\n";
    for (const auto& r : report.records) {
        os << r.iteration << ',' << format_number(r.deviation_norm) << ',' << format_number(r.increment_cost) << ','
           << format_number(r.effort_cost) << ',' << format_number(r.wall_ms) << '\n';
    }
    return os.str();
}

nlohmann::json report_json(const IterationReport& report) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : report.records) {
        records.push_back({{"iter", r.iteration},
                           {"dev_norm", r.deviation_norm},
                           {"J_du", r.increment_cost},
                           {"J_u", r.effort_cost},
                           {"cost", r.total_cost},
                           {"alpha", r.step_size},
                           {"wall_ms", r.wall_ms}});
    }
    nlohmann::json out{{"converged", report.converged},
                       {"iterations", report.iterations()},
                       {"ratios", report.deviation_ratios()},
                       {"records", records}};
    if (!report.message.empty()) out["message"] = report.message;
    if (report.failure) out["failure"] = std::string(to_string(*report.failure));
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path);
    out << text;
}

}  // namespace lgmpsp
