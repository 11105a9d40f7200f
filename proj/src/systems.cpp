#include "lgmpsp/systems.hpp"

namespace lgmpsp {

namespace {

Vec3 as_vec3(const Eigen::VectorXd& u) {
    if (u.size() != 3) {
        throw Error(ErrorCode::dimension_mismatch, "expected a 3-component control");
    }
    return u;
}

}  // namespace

VpqSystem::VpqSystem(VpqParams params, LinearizationOptions linearization)
    : params_(std::move(params)), linearization_(linearization) {
    params_.validate();
}

VehicleState VpqSystem::step(const State& x, const Eigen::VectorXd& u, double h) const {
    return vpq_step(params_, x, as_vec3(u), h);
}

StepLinearization VpqSystem::linearize(const State& x, const Eigen::VectorXd&, double h) const {
    return linearize_vpq(params_, x, h, linearization_);
}

Eigen::VectorXd VpqSystem::deviation(const State& x, const State& ref) const {
    Eigen::VectorXd d(6);
    d << log_so3(ref.attitude.transpose() * x.attitude), x.omega - ref.omega;
    return d;
}

Eigen::VectorXd VpqSystem::deviation_resolved(const State& x, const State& ref) const {
    Eigen::VectorXd d(6);
    d << log_so3_resolved(ref.attitude.transpose() * x.attitude), x.omega - ref.omega;
    return d;
}

VehicleState VpqSystem::retract(const State& ref, const Eigen::VectorXd& dx) const {
    VehicleState out;
    out.attitude = ref.attitude * exp_so3(dx.head<3>());
    out.omega = ref.omega + dx.segment<3>(3);
    return out;
}

// ---------------------------------------------------------------------------

SmrhSystem::SmrhSystem(SmrhParams params, LinearizationOptions linearization)
    : params_(std::move(params)), linearization_(linearization) {
    params_.validate();
}

VehicleState SmrhSystem::step(const State& x, const Eigen::VectorXd& u, double h) const {
    return smrh_step(params_, x, as_vec3(u), h);
}

StepLinearization SmrhSystem::linearize(const State& x, const Eigen::VectorXd&, double h) const {
    return linearize_smrh(params_, x, h, linearization_);
}

Eigen::VectorXd SmrhSystem::deviation(const State& x, const State& ref) const {
    Eigen::VectorXd d(9);
    d << log_so3(ref.attitude.transpose() * x.attitude), x.omega - ref.omega, *x.moment - *ref.moment;
    return d;
}

Eigen::VectorXd SmrhSystem::deviation_resolved(const State& x, const State& ref) const {
    Eigen::VectorXd d(9);
    d << log_so3_resolved(ref.attitude.transpose() * x.attitude), x.omega - ref.omega, *x.moment - *ref.moment;
    return d;
}

VehicleState SmrhSystem::retract(const State& ref, const Eigen::VectorXd& dx) const {
    VehicleState out;
    out.attitude = ref.attitude * exp_so3(dx.head<3>());
    out.omega = ref.omega + dx.segment<3>(3);
    out.moment = *ref.moment + dx.segment<3>(6);
    return out;
}

// ---------------------------------------------------------------------------

AbelianSmsSystem::AbelianSmsSystem(SmsModel model) : model_(std::move(model)), n_(model_.algebra.dim()) {
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            for (int k = 0; k < n_; ++k) {
                if (model_.algebra.constant(i, j, k) != 0.0) {
                    throw Error(ErrorCode::invalid_structure_constants, "AbelianSmsSystem needs an abelian algebra");
                }
            }
        }
    }
}

EuclideanState AbelianSmsSystem::step(const State& x, const Eigen::VectorXd& u, double h) const {
    return {x.q + h * x.v, x.v + h * sms_velocity_derivative(model_, x.v, u)};
}

StepLinearization AbelianSmsSystem::linearize(const State&, const Eigen::VectorXd&, double h) const {
    StepLinearization lin;
    lin.A = Eigen::MatrixXd::Identity(2 * n_, 2 * n_);
    lin.A.topRightCorner(n_, n_) = h * Eigen::MatrixXd::Identity(n_, n_);
    lin.B = Eigen::MatrixXd::Zero(2 * n_, n_);
    lin.B.bottomRows(n_) = h * model_.inertia.sharp();
    return lin;
}

Eigen::VectorXd AbelianSmsSystem::deviation(const State& x, const State& ref) const {
    Eigen::VectorXd d(2 * n_);
    d << x.q - ref.q, x.v - ref.v;
    return d;
}

EuclideanState AbelianSmsSystem::retract(const State& ref, const Eigen::VectorXd& dx) const {
    return {ref.q + dx.head(n_), ref.v + dx.tail(n_)};
}

void AbelianSmsSystem::validate(const State& x) const {
    if (x.q.size() != n_ || x.v.size() != n_) {
        throw Error(ErrorCode::dimension_mismatch, "Euclidean state has the wrong dimension");
    }
}

}  // namespace lgmpsp
