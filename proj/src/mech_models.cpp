#include "lgmpsp/mech_models.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lgmpsp {

SmsModel::SmsModel(LieAlgebraSpec algebra_, InertiaOperator inertia_)
    : algebra(std::move(algebra_)), inertia(std::move(inertia_)) {
    if (algebra.dim() != inertia.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "inertia operator and Lie algebra dimensions differ");
    }
}

Eigen::VectorXd sms_velocity_derivative(const SmsModel& model, const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
    if (u.size() != model.algebra.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "control covector has the wrong length");
    }
    const Eigen::VectorXd momentum = model.inertia.flat() * v;
    return model.inertia.sharp() * (model.algebra.coad_matrix(v) * momentum + u);
}

Eigen::MatrixXd sms_drift_jacobian(const SmsModel& model, const Eigen::VectorXd& v0) {
    const int n = model.algebra.dim();
    const Eigen::VectorXd momentum = model.inertia.flat() * v0;
    // w -> ad*_w(mu) at fixed mu: entry (k, i) = sum_j c^j_{ik} mu_j
    Eigen::MatrixXd coad_in_direction = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) coad_in_direction(k, i) += model.algebra.constant(i, k, j) * momentum(j);
        }
    }
    return model.inertia.sharp() * (model.algebra.coad_matrix(v0) * model.inertia.flat() + coad_in_direction);
}

// ---------------------------------------------------------------------------

Mat3 vpq_reference_inertia() {
    Mat3 J;
    J << 0.0122, 0.0003, 0.00056,
         0.0003, 0.0266, 0.00032,
         0.00056, 0.00032, 0.0387;
    return J;
}

namespace {

void require_spd(const Mat3& J, const char* who) {
    try {
        InertiaOperator check(J);
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_argument, std::string(who) + ": " + e.what());
    }
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::invalid_argument, std::string(name) + " must be strictly positive");
    }
}

double signed_pow_three_halves(double c) { return std::copysign(std::pow(std::abs(c), 1.5), c); }

}  // namespace

void VpqParams::validate() const {
    require_spd(J, "VPQ inertia");
    require_positive(K, "K");
    require_positive(d, "d");
    require_positive(r, "r");
    if (gamma != 1 && gamma != -1) {
        throw Error(ErrorCode::invalid_argument, "gamma must be +1 or -1");
    }
}

void SmrhParams::validate() const {
    require_spd(J, "SMRH inertia");
    require_positive(tau_m, "tau_m");
    require_positive(omega_mr, "Omega_mr");
    require_positive(k_beta, "k_beta");
    require_positive(I_beta, "I_beta");
    require_positive(tau_t, "tau_t");
    require_positive(K_t, "K_t");
    require_positive(h_mr, "h_mr");
    if (!(T_mr >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, "T_mr must be non-negative");
    }
}

Mat3 SmrhParams::A() const {
    const double cross = k_beta / (2.0 * omega_mr * I_beta);
    Mat3 a;
    a << -1.0 / tau_m, cross, 0.0,
         -cross, -1.0 / tau_m, 0.0,
         0.0, 0.0, -1.0 / tau_t;
    return a;
}

Mat3 SmrhParams::K() const {
    const double s = flap_stiffness();
    Mat3 k;
    k << s, -s / (omega_mr * tau_m), 0.0,
         s / (omega_mr * tau_m), s, 0.0,
         0.0, 0.0, K_t;
    return k;
}

Mat3 SmrhParams::B() const {
    const double s = flap_stiffness();
    return Vec3(s / tau_m, s / tau_m, K_t / tau_t).asDiagonal();
}

void VehicleState::validate(bool expect_moment) const {
    if (!is_rotation(attitude)) {
        throw Error(ErrorCode::not_a_rotation, "vehicle attitude is not a rotation matrix");
    }
    if (!omega.allFinite()) {
        throw Error(ErrorCode::invalid_argument, "angular velocity is not finite");
    }
    if (expect_moment != moment.has_value()) {
        throw Error(ErrorCode::invalid_argument,
                    expect_moment ? "SMRH state requires a rotor moment" : "VPQ state must not carry a rotor moment");
    }
    if (moment && !moment->allFinite()) {
        throw Error(ErrorCode::invalid_argument, "rotor moment is not finite");
    }
}

// ---------------------------------------------------------------------------

VpqDerivative vpq_derivative(const VpqParams& params, const VehicleState& state, const Vec3& u) {
    const Vec3& w = state.omega;
    const Vec3 rhs = u - w.cross(params.J * w);
    return {w, params.J.ldlt().solve(rhs)};
}

SmrhDerivative smrh_derivative(const SmrhParams& params, const VehicleState& state, const Vec3& u) {
    if (!state.moment) {
        throw Error(ErrorCode::dimension_mismatch, "SMRH derivative needs the rotor moment state");
    }
    const Vec3& w = state.omega;
    const Vec3& M = *state.moment;
    const Vec3 omega_dot = params.J.ldlt().solve(M - w.cross(params.J * w));
    const Vec3 moment_dot = params.A() * M - params.K() * w + params.B() * u;
    return {w, omega_dot, moment_dot};
}

VehicleState vpq_step(const VpqParams& params, const VehicleState& state, const Vec3& u, double h) {
    const VpqDerivative d = vpq_derivative(params, state, u);
    VehicleState next;
    next.attitude = group_step(state.attitude, d.attitude_rate, h);
    next.omega = state.omega + h * d.omega_dot;
    return next;
}

VehicleState smrh_step(const SmrhParams& params, const VehicleState& state, const Vec3& u, double h) {
    const SmrhDerivative d = smrh_derivative(params, state, u);
    VehicleState next;
    next.attitude = group_step(state.attitude, d.attitude_rate, h);
    next.omega = state.omega + h * d.omega_dot;
    next.moment = *state.moment + h * d.moment_dot;
    return next;
}

// ---------------------------------------------------------------------------

RotorWrench vpq_rotor_forward(const VpqParams& params, const std::array<double, 4>& c, int gamma, ThrustPower power) {
    if (gamma != 1 && gamma != -1) {
        throw Error(ErrorCode::invalid_argument, "gamma must be +1 or -1");
    }
    std::array<double, 4> p{};
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isfinite(c[i]) || (power == ThrustPower::principal && c[i] < 0.0)) {
            std::ostringstream os;
            os << "thrust coefficient C_T" << (i + 1) << " = " << c[i] << " has no real 3/2 power";
            throw Error(ErrorCode::invalid_thrust_coefficient, os.str());
        }
        p[i] = signed_pow_three_halves(c[i]);
    }
    const double g = gamma;
    const double K = params.K;
    RotorWrench out;
    out.T = g * K * (c[0] + c[1] + c[2] + c[3]);
    out.l = g * K * params.d * (c[0] - c[1] - c[2] + c[3]);
    out.m = g * K * params.d * (c[0] + c[1] - c[2] - c[3]);
    out.n = g * (K * params.r / std::numbers::sqrt2) * (p[0] - p[1] + p[2] - p[3]);
    return out;
}

std::array<double, 4> vpq_rotor_inverse(const VpqParams& params, const RotorWrench& target, int gamma) {
    using Vec4 = Eigen::Vector4d;
    const double g = gamma;
    const double K = params.K;
    const Vec4 wanted(target.T, target.l, target.m, target.n);
    const double scale = std::max(wanted.cwiseAbs().maxCoeff(), 1e-300);

    auto residual = [&](const Vec4& c) -> Vec4 {
        const RotorWrench w = vpq_rotor_forward(params, {c(0), c(1), c(2), c(3)}, gamma);
        return Vec4(w.T, w.l, w.m, w.n) - wanted;
    };

    Vec4 c = Vec4::Constant(target.T / (4.0 * g * K));
    Vec4 r = residual(c);
    for (int iter = 0; iter < 50; ++iter) {
        if (r.cwiseAbs().maxCoeff() <= 1e-13 * scale) {
            return {c(0), c(1), c(2), c(3)};
        }
        Eigen::Matrix4d jac;
        const double yaw = g * 1.5 * K * params.r / std::numbers::sqrt2;
        jac.row(0) = g * K * Vec4(1, 1, 1, 1).transpose();
        jac.row(1) = g * K * params.d * Vec4(1, -1, -1, 1).transpose();
        jac.row(2) = g * K * params.d * Vec4(1, 1, -1, -1).transpose();
        for (int i = 0; i < 4; ++i) jac(3, i) = yaw * std::sqrt(std::abs(c(i))) * ((i % 2 == 0) ? 1.0 : -1.0);
        Eigen::FullPivLU<Eigen::Matrix4d> lu(jac);
        if (!lu.isInvertible()) break;
        const Vec4 step = lu.solve(r);
        double alpha = 1.0;
        Vec4 trial = c - step;
        Vec4 trial_r = residual(trial);
        while (trial_r.norm() >= r.norm() && alpha > 1e-6) {
            alpha *= 0.5;
            trial = c - alpha * step;
            trial_r = residual(trial);
        }
        c = trial;
        r = trial_r;
    }
    if (r.cwiseAbs().maxCoeff() <= 1e-13 * scale) {
        return {c(0), c(1), c(2), c(3)};
    }
    std::ostringstream os;
    os << "rotor allocation did not converge, residual " << r.norm();
    throw Error(ErrorCode::allocation_infeasible, os.str());
}

}  // namespace lgmpsp
