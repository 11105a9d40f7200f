#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lgmpsp/error.hpp"

namespace lgmpsp {

struct IterationRecord {
    int iteration = 0;
    double deviation_norm = 0.0;  // ||dX_N|| of the rollout at this iteration
    double increment_cost = 0.0;  // J_du = 1/2 sum du^T R du of the correction computed here
    double effort_cost = 0.0;     // J_u = 1/2 sum u^T R u of the controls rolled out here
    double total_cost = 0.0;      // solver objective (iLQR: terminal + running)
    double step_size = 1.0;       // accepted line-search alpha (iLQR)
    double wall_ms = 0.0;
};

struct IterationReport {
    std::vector<IterationRecord> records;
    bool converged = false;
    std::string message;
    std::optional<ErrorCode> failure;

    int iterations() const { return static_cast<int>(records.size()); }

    /// ||dX_N^i|| / ||dX_N^{i-1}|| for i = 1 .. iterations-1.
    std::vector<double> deviation_ratios() const {
        std::vector<double> out;
        for (std::size_t i = 1; i < records.size(); ++i) {
            out.push_back(records[i].deviation_norm / records[i - 1].deviation_norm);
        }
        return out;
    }

    double total_wall_ms() const {
        double t = 0.0;
        for (const auto& r : records) t += r.wall_ms;
        return t;
    }
};

}  // namespace lgmpsp
