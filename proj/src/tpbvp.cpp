#include "lgmpsp/tpbvp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace lgmpsp {

Vec3 optimal_control_vpq(const Mat3& Q, const Vec3& lambda_omega) { return -Q.ldlt().solve(lambda_omega); }

Vec3 optimal_control_smrh(const Mat3& Q, const Mat3& B, const Vec3& lambda_M) {
    return -Q.ldlt().solve(B.transpose() * lambda_M);
}

namespace {

Vec3 omega_costate_drift(const Mat3& J, const Vec3& w, const Vec3& lambda_omega) {
    return J.ldlt().solve(hat(J * w) * lambda_omega) - w.cross(lambda_omega);
}

}  // namespace

CostateState costate_rhs_vpq(const VpqParams& params, const VehicleState& state, const CostateState& lambda,
                             CostateForm form) {
    const Vec3& w = state.omega;
    CostateState d;
    d.lambda_R = -w.cross(lambda.lambda_R);
    d.lambda_omega = omega_costate_drift(params.J, w, lambda.lambda_omega);
    if (form == CostateForm::derived) d.lambda_omega -= params.J.ldlt().solve(lambda.lambda_R);
    return d;
}

CostateState costate_rhs_smrh(const SmrhParams& params, const VehicleState& state, const CostateState& lambda,
                              CostateForm form) {
    if (!lambda.lambda_M) {
        throw Error(ErrorCode::dimension_mismatch, "SMRH costate needs lambda_M");
    }
    const Vec3& w = state.omega;
    const Vec3& lM = *lambda.lambda_M;
    const Mat3& J = params.J;
    const Vec3 coupling = J.ldlt().solve(params.K().transpose() * lM);
    CostateState d;
    d.lambda_R = -w.cross(lambda.lambda_R);
    d.lambda_omega = omega_costate_drift(J, w, lambda.lambda_omega) - J.ldlt().solve(lambda.lambda_R) +
                     (form == CostateForm::derived ? coupling : Vec3(-coupling));
    d.lambda_M = -lambda.lambda_omega - params.A().transpose() * lM;
    return d;
}

void ShootingProblem::validate() const {
    if (!(h > 0.0) || steps < 1) {
        throw Error(ErrorCode::invalid_argument, "shooting horizon must be positive");
    }
    if (substeps < 1) {
        throw Error(ErrorCode::invalid_argument, "substeps must be at least 1");
    }
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * Q.cwiseAbs().maxCoeff() ||
        Eigen::LLT<Mat3>(Q).info() != Eigen::Success) {
        throw Error(ErrorCode::invalid_argument, "control weight Q must be symmetric positive definite");
    }
    const bool smrh = vehicle == Vehicle::smrh;
    x0.validate(smrh);
    target.validate(smrh);
    if (smrh) {
        this->smrh.validate();
    } else {
        vpq.validate();
    }
}

// ---------------------------------------------------------------------------
// Packed state: R (9, column-major), omega, [M], lambda_R, lambda_omega, [lambda_M]

namespace {

struct Layout {
    bool smrh;
    int size() const { return smrh ? 24 : 18; }
    int omega() const { return 9; }
    int moment() const { return 12; }
    int lambda_R() const { return smrh ? 15 : 12; }
    int lambda_omega() const { return smrh ? 18 : 15; }
    int lambda_M() const { return 21; }
};

Eigen::VectorXd pack(const Layout& L, const VehicleState& x, const CostateState& lam) {
    Eigen::VectorXd z(L.size());
    z.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(x.attitude.data());
    z.segment<3>(L.omega()) = x.omega;
    if (L.smrh) z.segment<3>(L.moment()) = *x.moment;
    z.segment<3>(L.lambda_R()) = lam.lambda_R;
    z.segment<3>(L.lambda_omega()) = lam.lambda_omega;
    if (L.smrh) z.segment<3>(L.lambda_M()) = *lam.lambda_M;
    return z;
}

VehicleState unpack_state(const Layout& L, const Eigen::VectorXd& z) {
    VehicleState x;
    x.attitude = Eigen::Map<const Mat3>(z.data());
    x.omega = z.segment<3>(L.omega());
    if (L.smrh) x.moment = Vec3(z.segment<3>(L.moment()));
    return x;
}

CostateState unpack_lambda(const Layout& L, const Eigen::VectorXd& z) {
    CostateState lam;
    lam.lambda_R = z.segment<3>(L.lambda_R());
    lam.lambda_omega = z.segment<3>(L.lambda_omega());
    if (L.smrh) lam.lambda_M = Vec3(z.segment<3>(L.lambda_M()));
    return lam;
}

Vec3 control_law(const ShootingProblem& P, const CostateState& lam) {
    return P.vehicle == Vehicle::vpq ? optimal_control_vpq(P.Q, lam.lambda_omega)
                                     : optimal_control_smrh(P.Q, P.smrh.B(), *lam.lambda_M);
}

Eigen::VectorXd rhs(const ShootingProblem& P, const Layout& L, const Eigen::VectorXd& z) {
    const VehicleState x = unpack_state(L, z);
    const CostateState lam = unpack_lambda(L, z);
    const Vec3 u = control_law(P, lam);
    Eigen::VectorXd dz(L.size());
    const Mat3 Rdot = x.attitude * hat(x.omega);
    dz.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(Rdot.data());
    CostateState dlam;
    if (P.vehicle == Vehicle::vpq) {
        const VpqDerivative d = vpq_derivative(P.vpq, x, u);
        dz.segment<3>(L.omega()) = d.omega_dot;
        dlam = costate_rhs_vpq(P.vpq, x, lam, P.form);
    } else {
        const SmrhDerivative d = smrh_derivative(P.smrh, x, u);
        dz.segment<3>(L.omega()) = d.omega_dot;
        dz.segment<3>(L.moment()) = d.moment_dot;
        dlam = costate_rhs_smrh(P.smrh, x, lam, P.form);
        dz.segment<3>(L.lambda_M()) = *dlam.lambda_M;
    }
    dz.segment<3>(L.lambda_R()) = dlam.lambda_R;
    dz.segment<3>(L.lambda_omega()) = dlam.lambda_omega;
    return dz;
}

Mat3 nearest_rotation(const Mat3& R) {
    const Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 out = svd.matrixU() * svd.matrixV().transpose();
    if (out.determinant() < 0.0) {
        Mat3 U = svd.matrixU();
        U.col(2) = -U.col(2);
        out = U * svd.matrixV().transpose();
    }
    return out;
}

}  // namespace

Extremal integrate_extremal(const ShootingProblem& P, const CostateState& lambda0) {
    P.validate();
    const Layout L{P.vehicle == Vehicle::smrh};
    if (L.smrh != lambda0.lambda_M.has_value()) {
        throw Error(ErrorCode::dimension_mismatch, "costate does not match the vehicle");
    }
    const double dt = P.h / P.substeps;
    Eigen::VectorXd z = pack(L, P.x0, lambda0);

    Extremal ex;
    ex.states.reserve(static_cast<std::size_t>(P.steps) + 1);
    ex.costates.reserve(static_cast<std::size_t>(P.steps) + 1);
    ex.controls.reserve(static_cast<std::size_t>(P.steps) + 1);
    auto sample = [&](const Eigen::VectorXd& s) {
        VehicleState x = unpack_state(L, s);
        x.attitude = nearest_rotation(x.attitude);
        const CostateState lam = unpack_lambda(L, s);
        ex.states.push_back(x);
        ex.controls.push_back(control_law(P, lam));
        ex.costates.push_back(lam);
    };
    sample(z);
    for (int k = 0; k < P.steps; ++k) {
        for (int s = 0; s < P.substeps; ++s) {
            const Eigen::VectorXd k1 = rhs(P, L, z);
            const Eigen::VectorXd k2 = rhs(P, L, z + 0.5 * dt * k1);
            const Eigen::VectorXd k3 = rhs(P, L, z + 0.5 * dt * k2);
            const Eigen::VectorXd k4 = rhs(P, L, z + dt * k3);
            z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if (!z.allFinite() || z.cwiseAbs().maxCoeff() > 1e8) {
            std::ostringstream os;
            os << "extremal diverged at t = " << (k + 1) * P.h << " s";
            throw Error(ErrorCode::extremal_diverged, os.str());
        }
        sample(z);
    }

    const VehicleState& xf = ex.states.back();
    ex.residual.resize(P.unknowns());
    ex.residual.head<3>() = log_so3_resolved(P.target.attitude.transpose() * xf.attitude);
    ex.residual.segment<3>(3) = xf.omega - P.target.omega;
    if (L.smrh) ex.residual.segment<3>(6) = *xf.moment - *P.target.moment;
    return ex;
}

Eigen::VectorXd shoot(const ShootingProblem& problem, const CostateState& lambda0) {
    return integrate_extremal(problem, lambda0).residual;
}

Eigen::VectorXd pack_costate(const CostateState& lambda) {
    Eigen::VectorXd z(lambda.lambda_M ? 9 : 6);
    z.head<3>() = lambda.lambda_R;
    z.segment<3>(3) = lambda.lambda_omega;
    if (lambda.lambda_M) z.segment<3>(6) = *lambda.lambda_M;
    return z;
}

CostateState unpack_costate(const Eigen::VectorXd& z, Vehicle vehicle) {
    const int expected = vehicle == Vehicle::vpq ? 6 : 9;
    if (z.size() != expected) {
        throw Error(ErrorCode::dimension_mismatch, "costate vector has the wrong length");
    }
    CostateState lam;
    lam.lambda_R = z.head<3>();
    lam.lambda_omega = z.segment<3>(3);
    if (vehicle == Vehicle::smrh) lam.lambda_M = Vec3(z.segment<3>(6));
    return lam;
}

CostateState seed_from_control(const ShootingProblem& problem, const Vec3& u0) {
    CostateState lam;
    if (problem.vehicle == Vehicle::vpq) {
        lam.lambda_omega = -problem.Q * u0;
    } else {
        lam.lambda_M = Vec3(-problem.smrh.B().transpose().partialPivLu().solve(problem.Q * u0));
    }
    return lam;
}

CostateState seed_from_discrete_costate(const ShootingProblem& problem, const Eigen::VectorXd& p0) {
    if (p0.size() != problem.unknowns()) {
        throw Error(ErrorCode::dimension_mismatch, "discrete costate does not match the vehicle");
    }
    const Mat3& J = problem.vehicle == Vehicle::vpq ? problem.vpq.J : problem.smrh.J;
    CostateState lam;
    lam.lambda_R = problem.h * p0.head<3>();
    lam.lambda_omega = problem.h * J.ldlt().solve(Vec3(p0.segment<3>(3)));
    if (problem.vehicle == Vehicle::smrh) lam.lambda_M = Vec3(problem.h * p0.segment<3>(6));
    return lam;
}

TpbvpResult solve_tpbvp(const ShootingProblem& problem, const CostateState& guess, const TpbvpOptions& options) {
    problem.validate();
    const Vehicle vehicle = problem.vehicle;
    TpbvpResult out;

    Eigen::VectorXd z = pack_costate(guess);
    if (z.size() != problem.unknowns()) {
        throw Error(ErrorCode::dimension_mismatch, "initial costate does not match the vehicle");
    }
    Extremal best = integrate_extremal(problem, guess);
    double cost = best.residual.squaredNorm();
    double mu = options.initial_damping;
    const int n = static_cast<int>(z.size());

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        out.iterations = iter + 1;
        out.residual_history.push_back(std::sqrt(cost));
        if (std::sqrt(cost) < options.tolerance) break;

        Eigen::MatrixXd jac(best.residual.size(), n);
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd zp = z;
            const double step = options.fd_step * std::max({std::abs(z(j)), z.cwiseAbs().maxCoeff(), 1e-6});
            zp(j) += step;
            jac.col(j) = (shoot(problem, unpack_costate(zp, vehicle)) - best.residual) / step;
        }
        const Eigen::MatrixXd JtJ = jac.transpose() * jac;
        const Eigen::VectorXd Jtr = jac.transpose() * best.residual;
        const Eigen::VectorXd scale = JtJ.diagonal().cwiseMax(1e-12 * std::max(1.0, JtJ.diagonal().maxCoeff()));

        bool accepted = false;
        while (mu < 1e12) {
            const Eigen::MatrixXd lhs = JtJ + Eigen::MatrixXd(mu * scale.asDiagonal());
            const Eigen::VectorXd dz = -lhs.ldlt().solve(Jtr);
            const Eigen::VectorXd trial_z = z + dz;
            try {
                Extremal trial = integrate_extremal(problem, unpack_costate(trial_z, vehicle));
                const double trial_cost = trial.residual.squaredNorm();
                if (std::isfinite(trial_cost) && trial_cost < cost) {
                    z = trial_z;
                    best = std::move(trial);
                    cost = trial_cost;
                    mu = std::max(mu / 10.0, 1e-12);
                    accepted = true;
                    break;
                }
            } catch (const Error& e) {
                if (e.code() != ErrorCode::extremal_diverged) throw;
            }
            mu *= 10.0;
        }
        if (!accepted) break;
    }

    out.lambda0 = unpack_costate(z, vehicle);
    out.residual_norm = std::sqrt(cost);
    out.converged = out.residual_norm < options.tolerance;
    out.extremal = std::move(best);
    if (!out.converged) {
        std::ostringstream os;
        os << "shooting failed to converge, best residual " << out.residual_norm;
        out.message = os.str();
    }
    return out;
}

}  // namespace lgmpsp
