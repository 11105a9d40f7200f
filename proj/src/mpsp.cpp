#include "lgmpsp/mpsp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

namespace lgmpsp {

SensitivityChain build_chain(const std::vector<StepLinearization>& lin) {
    if (lin.empty()) {
        throw Error(ErrorCode::invalid_argument, "build_chain: need at least one step (N >= 2)");
    }
    const std::size_t steps = lin.size();
    SensitivityChain chain;
    chain.G.resize(steps);
    Eigen::MatrixXd G0 = Eigen::MatrixXd::Identity(lin.back().A.rows(), lin.back().A.cols());
    for (std::size_t k = steps; k-- > 0;) {
        if (k + 1 < steps) G0 = G0 * lin[k + 1].A;
        chain.G[k] = G0 * lin[k].B;
    }
    return chain;
}

RankCertificate rank_certificate(const SensitivityChain& chain, int blocks) {
    const int p = chain.rows();
    const int m = chain.cols();
    RankCertificate cert;
    cert.required_rank = p;
    if (chain.steps() == 0) return cert;
    if (blocks <= 0) blocks = (p + m - 1) / m;
    blocks = std::min(blocks, chain.steps());
    cert.blocks = blocks;

    Eigen::MatrixXd stacked(p, blocks * m);
    for (int b = 0; b < blocks; ++b) {
        stacked.middleCols(b * m, m) = chain.G[static_cast<std::size_t>(chain.steps() - blocks + b)];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    const Eigen::VectorXd s = svd.singularValues();
    cert.sigma_max = s.size() ? s(0) : 0.0;
    const double tol = std::max(stacked.rows(), stacked.cols()) * std::numeric_limits<double>::epsilon() * cert.sigma_max;
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) > tol) ++cert.rank;
    }
    cert.sigma_min = s.size() < p ? 0.0 : s(p - 1);
    cert.full_rank = cert.rank == p;
    if (stacked.rows() == stacked.cols()) cert.determinant = stacked.determinant();
    return cert;
}

double rest_determinant(double h, const Eigen::MatrixXd& sharp) {
    const double n = static_cast<double>(sharp.rows());
    const double d = sharp.determinant();
    return std::pow(h, 3.0 * n) * d * d;
}

void ControlWeights::validate(std::size_t steps, int m) const {
    if (R.empty() || (R.size() != 1 && R.size() != steps)) {
        throw Error(ErrorCode::dimension_mismatch, "control weights: give one shared R or one per step");
    }
    for (const auto& r : R) {
        if (r.rows() != m || r.cols() != m) {
            throw Error(ErrorCode::dimension_mismatch, "control weight has the wrong size");
        }
        if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * r.cwiseAbs().maxCoeff() ||
            Eigen::LLT<Eigen::MatrixXd>(r).info() != Eigen::Success) {
            throw Error(ErrorCode::invalid_argument, "control weight must be symmetric positive definite");
        }
    }
}

double effort_cost(const std::vector<Eigen::VectorXd>& u, const ControlWeights& weights) {
    double J = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) J += 0.5 * u[k].dot(weights.at(k) * u[k]);
    return J;
}

namespace {

// R_k^-1 G_k^T for each step and the Gram matrix sum G_k R_k^-1 G_k^T.
struct GramSystem {
    std::vector<Eigen::MatrixXd> RinvGt;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

GramSystem factor_gram(const SensitivityChain& chain, const ControlWeights& weights) {
    const int p = chain.rows();
    GramSystem sys;
    sys.RinvGt.reserve(chain.G.size());
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(p, p);
    std::optional<Eigen::LLT<Eigen::MatrixXd>> shared;
    if (weights.R.size() == 1) shared.emplace(weights.R.front());
    for (std::size_t k = 0; k < chain.G.size(); ++k) {
        const Eigen::MatrixXd Gt = chain.G[k].transpose();
        Eigen::MatrixXd RinvGt = shared ? shared->solve(Gt) : Eigen::LLT<Eigen::MatrixXd>(weights.at(k)).solve(Gt);
        W.noalias() += chain.G[k] * RinvGt;
        sys.RinvGt.push_back(std::move(RinvGt));
    }
    W = 0.5 * (W + W.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(W, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo < 1e-12 * hi) {
        std::ostringstream os;
        os << "sensitivity Gram matrix is singular (eigenvalues " << lo << " .. " << hi << ")";
        throw Error(ErrorCode::singular_gram, os.str());
    }
    sys.llt.compute(W);
    return sys;
}

void check_inputs(const std::vector<Eigen::VectorXd>& u_prev, const SensitivityChain& chain,
                  const ControlWeights& weights, const Eigen::VectorXd& dXN) {
    if (u_prev.size() != chain.G.size()) {
        throw Error(ErrorCode::dimension_mismatch, "control sequence and sensitivity chain lengths differ");
    }
    if (dXN.size() != chain.rows()) {
        throw Error(ErrorCode::dimension_mismatch, "terminal deviation has the wrong length");
    }
    weights.validate(chain.G.size(), chain.cols());
}

}  // namespace

MpspUpdate mpsp_update_increment(const std::vector<Eigen::VectorXd>& u_prev, const SensitivityChain& chain,
                                 const ControlWeights& weights, const Eigen::VectorXd& dXN) {
    check_inputs(u_prev, chain, weights, dXN);
    const GramSystem sys = factor_gram(chain, weights);
    const Eigen::VectorXd mu = sys.llt.solve(dXN);
    MpspUpdate out;
    out.controls.reserve(u_prev.size());
    out.correction.reserve(u_prev.size());
    for (std::size_t k = 0; k < u_prev.size(); ++k) {
        Eigen::VectorXd du = sys.RinvGt[k] * mu;
        out.increment_cost += 0.5 * du.dot(weights.at(k) * du);
        out.controls.push_back(u_prev[k] - du);
        out.correction.push_back(std::move(du));
    }
    return out;
}

MpspUpdate mpsp_update_effort(const std::vector<Eigen::VectorXd>& u_prev, const SensitivityChain& chain,
                              const ControlWeights& weights, const Eigen::VectorXd& dXN) {
    check_inputs(u_prev, chain, weights, dXN);
    const GramSystem sys = factor_gram(chain, weights);
    Eigen::VectorXd rhs = dXN;
    for (std::size_t k = 0; k < u_prev.size(); ++k) rhs.noalias() -= chain.G[k] * u_prev[k];
    const Eigen::VectorXd mu = sys.llt.solve(rhs);
    MpspUpdate out;
    out.controls.reserve(u_prev.size());
    out.correction.reserve(u_prev.size());
    for (std::size_t k = 0; k < u_prev.size(); ++k) {
        Eigen::VectorXd u_new = -(sys.RinvGt[k] * mu);
        Eigen::VectorXd du = u_prev[k] - u_new;
        out.increment_cost += 0.5 * du.dot(weights.at(k) * du);
        out.controls.push_back(std::move(u_new));
        out.correction.push_back(std::move(du));
    }
    return out;
}

Eigen::VectorXd terminal_multiplier(const SensitivityChain& chain, const ControlWeights& weights,
                                    const std::vector<Eigen::VectorXd>& u) {
    check_inputs(u, chain, weights, Eigen::VectorXd::Zero(chain.rows()));
    const GramSystem sys = factor_gram(chain, weights);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(chain.rows());
    for (std::size_t k = 0; k < u.size(); ++k) rhs.noalias() += chain.G[k] * u[k];
    return -sys.llt.solve(rhs);
}

Eigen::VectorXd initial_costate(const std::vector<StepLinearization>& lin, const Eigen::VectorXd& mu) {
    Eigen::VectorXd p = mu;
    for (std::size_t k = lin.size(); k-- > 0;) p = lin[k].A.transpose() * p;
    return p;
}

}  // namespace lgmpsp
