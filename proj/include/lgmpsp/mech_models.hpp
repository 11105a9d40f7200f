#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <vector>

#include "lgmpsp/lie_core.hpp"

namespace lgmpsp {

/// Fully actuated simple mechanical system on a Lie group: the force
/// covectors are the dual basis, so u ranges over all of g*.
struct SmsModel {
    LieAlgebraSpec algebra;
    InertiaOperator inertia;

    SmsModel(LieAlgebraSpec algebra_, InertiaOperator inertia_);
};

/// v_dot = I#(ad*_v(I_flat v)) + I#(u)
Eigen::VectorXd sms_velocity_derivative(const SmsModel& model, const Eigen::VectorXd& v, const Eigen::VectorXd& u);

/// Frechet derivative of v -> I#(ad*_v(I_flat v)) at v0, as a matrix.
Eigen::MatrixXd sms_drift_jacobian(const SmsModel& model, const Eigen::VectorXd& v0);

// ---------------------------------------------------------------------------
// Vehicle parameters
// ---------------------------------------------------------------------------

/// Inertia of the variable-pitch quadrotor airframe used in the flip study.
Mat3 vpq_reference_inertia();

struct VpqParams {
    Mat3 J = vpq_reference_inertia();  // kg m^2
    double K = 40.0;                   // thrust scale, N
    double d = 0.22;                   // arm length, m
    double r = 0.12;                   // rotor radius, m
    int gamma = 1;                     // +1 normal, -1 inverted flight

    void validate() const;
};

struct SmrhParams {
    Mat3 J = vpq_reference_inertia();  // kg m^2
    double tau_m = 0.1;                // main rotor time constant, s
    double omega_mr = 167.0;           // main rotor speed, rad/s
    double k_beta = 120.0;             // blade root stiffness, N m/rad
    double I_beta = 0.03;              // blade flap inertia, kg m^2
    double tau_t = 0.05;               // tail rotor time constant, s
    double K_t = 5.0;                  // tail rotor effectiveness, N m
    double h_mr = 0.3;                 // hub height, m
    double T_mr = 0.0;                 // main rotor thrust, N

    void validate() const;

    /// k_beta + h_mr * T_mr
    double flap_stiffness() const { return k_beta + h_mr * T_mr; }

    /// Rotor-moment dynamics M_dot = A M - K omega + B u.
    Mat3 A() const;
    Mat3 K() const;
    Mat3 B() const;
};

// ---------------------------------------------------------------------------
// States and trajectories
// ---------------------------------------------------------------------------

struct VehicleState {
    Mat3 attitude = Mat3::Identity();
    Vec3 omega = Vec3::Zero();          // body rate, rad/s
    std::optional<Vec3> moment;         // (l, m, n) in N m, SMRH only

    void validate(bool expect_moment) const;
};

template <class State>
struct Trajectory {
    double h = 0.0;
    std::vector<State> states;               // N entries
    std::vector<Eigen::VectorXd> controls;   // N - 1 entries

    int size() const { return static_cast<int>(states.size()); }
};

// ---------------------------------------------------------------------------
// Continuous dynamics
// ---------------------------------------------------------------------------

struct VpqDerivative {
    Vec3 attitude_rate;  // body-frame algebra element: R_dot = R hat(attitude_rate)
    Vec3 omega_dot;
};

struct SmrhDerivative {
    Vec3 attitude_rate;
    Vec3 omega_dot;
    Vec3 moment_dot;
};

/// omega_dot = -J^-1 (omega x J omega) + J^-1 u
VpqDerivative vpq_derivative(const VpqParams& params, const VehicleState& state, const Vec3& u);

/// u = (theta_lon, theta_lat, theta_tail). The fuselage is driven by the rotor
/// moment M, which follows M_dot = A M - K omega + B u.
SmrhDerivative smrh_derivative(const SmrhParams& params, const VehicleState& state, const Vec3& u);

/// Lie-Euler step: exponential update of the attitude, explicit Euler for
/// the rate (and moment) states.
VehicleState vpq_step(const VpqParams& params, const VehicleState& state, const Vec3& u, double h);
VehicleState smrh_step(const SmrhParams& params, const VehicleState& state, const Vec3& u, double h);

// ---------------------------------------------------------------------------
// VPQ rotor allocation
// ---------------------------------------------------------------------------

struct RotorWrench {
    double T = 0.0;  // thrust, N
    double l = 0.0;  // roll moment, N m
    double m = 0.0;  // pitch moment, N m
    double n = 0.0;  // yaw moment, N m
};

enum class ThrustPower {
    signed_power,  // C^{3/2} read as sign(C)|C|^{3/2}
    principal,     // real branch only; negative coefficients are rejected
};

/// Thrust and moments of the H-configuration from the four thrust coefficients.
RotorWrench vpq_rotor_forward(const VpqParams& params, const std::array<double, 4>& c_t, int gamma,
                              ThrustPower power = ThrustPower::signed_power);

/// Thrust coefficients producing `target`, by damped Newton started from the
/// equal-thrust trim. Raises ErrorCode::allocation_infeasible after 50
/// iterations without convergence.
std::array<double, 4> vpq_rotor_inverse(const VpqParams& params, const RotorWrench& target, int gamma);

}  // namespace lgmpsp
