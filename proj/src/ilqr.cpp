#include "lgmpsp/ilqr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace lgmpsp {

void IlqrConfig::validate(int p) const {
    if (Q_N.size() && (Q_N.rows() != p || Q_N.cols() != p)) {
        throw Error(ErrorCode::dimension_mismatch, "Q_N has the wrong size");
    }
    if (Q_N.size()) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Q_N + Q_N.transpose()), Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff())) {
            throw Error(ErrorCode::invalid_argument, "Q_N must be positive semidefinite");
        }
    }
    if (!(c1 > 0.0 && c1 < 1.0)) {
        throw Error(ErrorCode::invalid_argument, "Armijo constant c1 must lie in (0, 1)");
    }
    if (alphas.empty()) {
        throw Error(ErrorCode::invalid_argument, "line-search schedule is empty");
    }
    for (double a : alphas) {
        if (!(a > 0.0 && a <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "line-search steps must lie in (0, 1]");
        }
    }
    if (max_iterations < 1) {
        throw Error(ErrorCode::invalid_argument, "max_iterations must be at least 1");
    }
}

double ilqr_cost(const Eigen::VectorXd& dXN, const std::vector<Eigen::VectorXd>& u, const Eigen::MatrixXd& Q_N,
                 const ControlWeights& weights) {
    return 0.5 * dXN.dot(Q_N * dXN) + effort_cost(u, weights);
}

BackwardPassResult backward_pass(const std::vector<StepLinearization>& lin, const std::vector<Eigen::VectorXd>& u,
                                 const Eigen::VectorXd& dXN0, const Eigen::MatrixXd& Q_N,
                                 const ControlWeights& weights) {
    if (lin.size() != u.size()) {
        throw Error(ErrorCode::dimension_mismatch, "backward_pass: linearizations and controls differ in length");
    }
    const std::size_t steps = lin.size();
    BackwardPassResult out;
    out.policy.resize(steps);
    out.P.resize(steps + 1);
    out.p.resize(steps + 1);
    out.P[steps] = Q_N;
    out.p[steps] = Q_N * dXN0;

    for (std::size_t k = steps; k-- > 0;) {
        const Eigen::MatrixXd& A = lin[k].A;
        const Eigen::MatrixXd& B = lin[k].B;
        const Eigen::MatrixXd& P = out.P[k + 1];
        const Eigen::VectorXd& p = out.p[k + 1];
        const Eigen::MatrixXd& R = weights.at(k);

        const Eigen::MatrixXd PB = P * B;
        PolicyStep& step = out.policy[k];
        step.Q_uu = R + B.transpose() * PB;
        step.Q_uu = 0.5 * (step.Q_uu + step.Q_uu.transpose());
        const Eigen::MatrixXd Q_ux = PB.transpose() * A;
        step.Q_u = R * u[k] + B.transpose() * p;

        const Eigen::LLT<Eigen::MatrixXd> llt(step.Q_uu);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCode::riccati_blowup, "Q_uu lost positive definiteness");
        }
        step.K = -llt.solve(Q_ux);
        step.d = -llt.solve(step.Q_u);

        const Eigen::MatrixXd closed = A + B * step.K;
        Eigen::MatrixXd P_k = A.transpose() * P * closed;
        out.P[k] = 0.5 * (P_k + P_k.transpose());
        out.p[k] = closed.transpose() * p + step.K.transpose() * (R * u[k]);
        if (!(out.P[k].norm() <= 1e12)) {
            throw Error(ErrorCode::riccati_blowup, "value Hessian norm exceeded 1e12");
        }

        out.linear_term += step.d.dot(step.Q_u);
        out.quadratic_term += step.d.dot(step.Q_uu * step.d);
    }
    return out;
}

}  // namespace lgmpsp
