#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lgmpsp {

enum class ErrorCode {
    dimension_mismatch,
    not_skew_symmetric,
    not_a_rotation,
    invalid_structure_constants,
    invalid_inertia,
    antipodal_rotation,
    invalid_thrust_coefficient,
    allocation_infeasible,
    invalid_argument,
    singular_gram,
    did_not_converge,
    riccati_blowup,
    line_search_exhausted,
    extremal_diverged,
    shooting_failed,
    config_error,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lgmpsp
