#pragma once

#include <Eigen/Core>
#include <concepts>
#include <vector>

#include "lgmpsp/linearization.hpp"
#include "lgmpsp/mech_models.hpp"

namespace lgmpsp {

/// Discrete-time system whose states live on a manifold with a local
/// deviation chart. `deviation(x, ref)` is x "minus" ref in the chart
/// centred at ref, `retract(ref, dx)` its inverse.
template <class S>
concept DiscreteSystem = requires(const S& s, const typename S::State& x, const Eigen::VectorXd& v, double h) {
    { s.deviation_dim() } -> std::convertible_to<int>;
    { s.control_dim() } -> std::convertible_to<int>;
    { s.step(x, v, h) } -> std::same_as<typename S::State>;
    { s.linearize(x, v, h) } -> std::same_as<StepLinearization>;
    { s.deviation(x, x) } -> std::same_as<Eigen::VectorXd>;
    { s.deviation_resolved(x, x) } -> std::same_as<Eigen::VectorXd>;
    { s.retract(x, v) } -> std::same_as<typename S::State>;
    s.validate(x);
};

class VpqSystem {
public:
    using State = VehicleState;

    explicit VpqSystem(VpqParams params = {}, LinearizationOptions linearization = {});

    int deviation_dim() const { return 6; }
    int control_dim() const { return 3; }
    const VpqParams& params() const { return params_; }
    const LinearizationOptions& linearization() const { return linearization_; }

    State step(const State& x, const Eigen::VectorXd& u, double h) const;
    StepLinearization linearize(const State& x, const Eigen::VectorXd& u, double h) const;
    /// (log(R_ref^T R), omega - omega_ref); throws antipodal_rotation at the cut.
    Eigen::VectorXd deviation(const State& x, const State& ref) const;
    /// Same, but resolves a pi relative rotation instead of throwing.
    Eigen::VectorXd deviation_resolved(const State& x, const State& ref) const;
    State retract(const State& ref, const Eigen::VectorXd& dx) const;
    void validate(const State& x) const { x.validate(false); }

private:
    VpqParams params_;
    LinearizationOptions linearization_;
};

class SmrhSystem {
public:
    using State = VehicleState;

    explicit SmrhSystem(SmrhParams params = {}, LinearizationOptions linearization = {});

    int deviation_dim() const { return 9; }
    int control_dim() const { return 3; }
    const SmrhParams& params() const { return params_; }
    const LinearizationOptions& linearization() const { return linearization_; }

    State step(const State& x, const Eigen::VectorXd& u, double h) const;
    StepLinearization linearize(const State& x, const Eigen::VectorXd& u, double h) const;
    Eigen::VectorXd deviation(const State& x, const State& ref) const;
    Eigen::VectorXd deviation_resolved(const State& x, const State& ref) const;
    State retract(const State& ref, const Eigen::VectorXd& dx) const;
    void validate(const State& x) const { x.validate(true); }

private:
    SmrhParams params_;
    LinearizationOptions linearization_;
};

struct EuclideanState {
    Eigen::VectorXd q;
    Eigen::VectorXd v;
};

/// Simple mechanical system on an abelian group R^n: q_dot = v,
/// v_dot = I#(u). The discrete step is linear, so every linearization is exact.
class AbelianSmsSystem {
public:
    using State = EuclideanState;

    explicit AbelianSmsSystem(SmsModel model);

    int deviation_dim() const { return 2 * n_; }
    int control_dim() const { return n_; }

    State step(const State& x, const Eigen::VectorXd& u, double h) const;
    StepLinearization linearize(const State& x, const Eigen::VectorXd& u, double h) const;
    Eigen::VectorXd deviation(const State& x, const State& ref) const;
    Eigen::VectorXd deviation_resolved(const State& x, const State& ref) const { return deviation(x, ref); }
    State retract(const State& ref, const Eigen::VectorXd& dx) const;
    void validate(const State& x) const;

private:
    SmsModel model_;
    int n_;
};

static_assert(DiscreteSystem<VpqSystem>);
static_assert(DiscreteSystem<SmrhSystem>);
static_assert(DiscreteSystem<AbelianSmsSystem>);

/// Forward simulation of the discrete dynamics; returns N = controls.size() + 1 states.
template <DiscreteSystem S>
Trajectory<typename S::State> rollout(const S& system, const typename S::State& x0,
                                      const std::vector<Eigen::VectorXd>& controls, double h) {
    if (!(h > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "rollout: step must be positive");
    }
    system.validate(x0);
    Trajectory<typename S::State> traj;
    traj.h = h;
    traj.controls = controls;
    traj.states.reserve(controls.size() + 1);
    traj.states.push_back(x0);
    for (const auto& u : controls) {
        if (u.size() != system.control_dim()) {
            throw Error(ErrorCode::dimension_mismatch, "rollout: control has the wrong length");
        }
        traj.states.push_back(system.step(traj.states.back(), u, h));
    }
    return traj;
}

template <DiscreteSystem S>
std::vector<StepLinearization> linearize_along(const S& system, const Trajectory<typename S::State>& traj) {
    std::vector<StepLinearization> out;
    out.reserve(traj.controls.size());
    for (std::size_t k = 0; k < traj.controls.size(); ++k) {
        out.push_back(system.linearize(traj.states[k], traj.controls[k], traj.h));
    }
    return out;
}

}  // namespace lgmpsp
