#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lgmpsp/mpsp.hpp"

using namespace lgmpsp;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = g(rng);
    return M;
}

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
    const Eigen::MatrixXd X = random_matrix(rng, n, n);
    return X * X.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

struct QpInstance {
    SensitivityChain chain;
    ControlWeights weights;
    std::vector<Eigen::VectorXd> u_prev;
    Eigen::VectorXd dXN;
};

QpInstance random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> steps_d(1, 5), m_d(1, 3);
    const int steps = steps_d(rng);
    const int m = m_d(rng);
    std::uniform_int_distribution<int> p_d(1, steps * m);
    const int p = p_d(rng);
    QpInstance q;
    for (int k = 0; k < steps; ++k) {
        q.chain.G.push_back(random_matrix(rng, p, m));
        q.weights.R.push_back(random_spd(rng, m));
        q.u_prev.push_back(random_matrix(rng, m, 1));
    }
    q.dXN = random_matrix(rng, p, 1);
    return q;
}

// Dense KKT solve of min 1/2 sum (du - c)^T R (du - c) s.t. sum G du = dX.
std::vector<Eigen::VectorXd> kkt_oracle(const QpInstance& q, const std::vector<Eigen::VectorXd>& c) {
    const int steps = q.chain.steps(), m = q.chain.cols(), p = q.chain.rows();
    const int n = steps * m;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + p, n + p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p);
    for (int k = 0; k < steps; ++k) {
        K.block(k * m, k * m, m, m) = q.weights.at(static_cast<std::size_t>(k));
        K.block(k * m, n, m, p) = q.chain.G[static_cast<std::size_t>(k)].transpose();
        K.block(n, k * m, p, m) = q.chain.G[static_cast<std::size_t>(k)];
        rhs.segment(k * m, m) = q.weights.at(static_cast<std::size_t>(k)) * c[static_cast<std::size_t>(k)];
    }
    rhs.tail(p) = q.dXN;
    const Eigen::VectorXd z = K.fullPivLu().solve(rhs);
    std::vector<Eigen::VectorXd> du;
    for (int k = 0; k < steps; ++k) du.push_back(z.segment(k * m, m));
    return du;
}

VehicleState flip_target() {
    VehicleState x;
    x.attitude = Vec3(1, -1, -1).asDiagonal();
    return x;
}

}  // namespace

TEST(BuildChain, ShortHorizons) {
    std::mt19937_64 rng(30);
    StepLinearization l1{random_matrix(rng, 4, 4), random_matrix(rng, 4, 2)};
    StepLinearization l2{random_matrix(rng, 4, 4), random_matrix(rng, 4, 2)};
    const SensitivityChain one = build_chain({l1});
    ASSERT_EQ(one.steps(), 1);
    EXPECT_EQ(one.G[0], l1.B);
    const SensitivityChain two = build_chain({l1, l2});
    EXPECT_LT((two.G[0] - l2.A * l1.B).norm(), 1e-14);
    EXPECT_EQ(two.G[1], l2.B);
    EXPECT_THROW(build_chain({}), Error);
}

TEST(BuildChain, RecursionMatchesProducts) {
    std::mt19937_64 rng(31);
    for (int steps = 1; steps <= 9; ++steps) {
        std::vector<StepLinearization> lin;
        for (int k = 0; k < steps; ++k) lin.push_back({random_matrix(rng, 6, 6) / 2.0, random_matrix(rng, 6, 3)});
        const SensitivityChain chain = build_chain(lin);
        for (int k = 0; k < steps; ++k) {
            Eigen::MatrixXd direct = lin[static_cast<std::size_t>(k)].B;
            for (int j = k + 1; j < steps; ++j) direct = lin[static_cast<std::size_t>(j)].A * direct;
            EXPECT_LT((chain.G[static_cast<std::size_t>(k)] - direct).norm(), 1e-12 * direct.norm());
        }
    }
}

TEST(RankCertificate, RestDeterminant) {
    const VpqSystem sys;
    const double h = 1e-3;
    for (int N : {3, 10, 600}) {
        const auto traj = rollout(sys, VehicleState{}, std::vector<Eigen::VectorXd>(N - 1, Eigen::VectorXd::Zero(3)), h);
        const RankCertificate cert = rank_certificate(build_chain(linearize_along(sys, traj)), 2);
        EXPECT_TRUE(cert.full_rank);
        ASSERT_TRUE(cert.determinant.has_value());
        const double expected = rest_determinant(h, sys.params().J.inverse());
        EXPECT_NEAR(*cert.determinant / expected, 1.0, 1e-6);
        EXPECT_NEAR(expected, std::pow(h, 9) * std::pow(sys.params().J.inverse().determinant(), 2), 1e-30);
    }
}

TEST(RankCertificate, SigmaMinScalesWithHSquared) {
    const VpqSystem sys;
    std::vector<double> sigma;
    for (double h : {1e-3, 1e-4, 1e-5}) {
        const auto traj = rollout(sys, VehicleState{}, std::vector<Eigen::VectorXd>(9, Eigen::VectorXd::Zero(3)), h);
        sigma.push_back(rank_certificate(build_chain(linearize_along(sys, traj))).sigma_min);
    }
    EXPECT_NEAR(sigma[0] / sigma[1], 100.0, 0.5);
    EXPECT_NEAR(sigma[1] / sigma[2], 100.0, 0.5);
}

TEST(RankCertificate, SmrhNeedsThreeBlocks) {
    const SmrhSystem sys;
    VehicleState x0;
    x0.moment = Vec3::Zero();
    const auto traj = rollout(sys, x0, std::vector<Eigen::VectorXd>(9, Eigen::VectorXd::Zero(3)), 1e-3);
    const SensitivityChain chain = build_chain(linearize_along(sys, traj));
    EXPECT_FALSE(rank_certificate(chain, 2).full_rank);
    const RankCertificate three = rank_certificate(chain);
    EXPECT_EQ(three.blocks, 3);
    EXPECT_TRUE(three.full_rank);
}

TEST(IncrementUpdate, ZeroDeviationKeepsControls) {
    std::mt19937_64 rng(32);
    QpInstance q = random_instance(rng);
    q.dXN.setZero();
    const MpspUpdate up = mpsp_update_increment(q.u_prev, q.chain, q.weights, q.dXN);
    for (std::size_t k = 0; k < q.u_prev.size(); ++k) EXPECT_LT((up.controls[k] - q.u_prev[k]).norm(), 1e-15);
    EXPECT_EQ(up.increment_cost, 0.0);
}

TEST(IncrementUpdate, SingleStepIsPseudoinverse) {
    std::mt19937_64 rng(33);
    const Eigen::MatrixXd G = random_matrix(rng, 2, 3);
    const Eigen::VectorXd dX = random_matrix(rng, 2, 1);
    const MpspUpdate up = mpsp_update_increment({Eigen::VectorXd::Zero(3)}, {{G}}, ControlWeights::identity(3), dX);
    const Eigen::VectorXd du = G.transpose() * (G * G.transpose()).inverse() * dX;
    EXPECT_LT((up.correction[0] - du).norm(), 1e-12);
}

TEST(Updates, MatchDenseKkt) {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 200; ++trial) {
        const QpInstance q = random_instance(rng);
        const std::vector<Eigen::VectorXd> zeros(q.u_prev.size(), Eigen::VectorXd::Zero(q.chain.cols()));
        const auto inc_oracle = kkt_oracle(q, zeros);
        const auto eff_oracle = kkt_oracle(q, q.u_prev);
        const MpspUpdate inc = mpsp_update_increment(q.u_prev, q.chain, q.weights, q.dXN);
        const MpspUpdate eff = mpsp_update_effort(q.u_prev, q.chain, q.weights, q.dXN);
        Eigen::VectorXd feas_inc = -q.dXN, feas_eff = -q.dXN;
        double scale_inc = q.dXN.norm(), scale_eff = q.dXN.norm();
        for (std::size_t k = 0; k < q.u_prev.size(); ++k) {
            EXPECT_LT((inc.correction[k] - inc_oracle[k]).norm(), 1e-10 * std::max(1.0, inc_oracle[k].norm()));
            EXPECT_LT((eff.correction[k] - eff_oracle[k]).norm(), 1e-10 * std::max(1.0, eff_oracle[k].norm()));
            feas_inc += q.chain.G[k] * inc.correction[k];
            feas_eff += q.chain.G[k] * eff.correction[k];
            scale_inc += q.chain.G[k].norm() * inc.correction[k].norm();
            scale_eff += q.chain.G[k].norm() * eff.correction[k].norm();
        }
        EXPECT_LT(feas_inc.norm(), 1e-12 * scale_inc);
        EXPECT_LT(feas_eff.norm(), 1e-12 * scale_eff);
    }
}

TEST(EffortUpdate, SpecialCases) {
    std::mt19937_64 rng(35);
    QpInstance q = random_instance(rng);
    std::vector<Eigen::VectorXd> zeros(q.u_prev.size(), Eigen::VectorXd::Zero(q.chain.cols()));
    const MpspUpdate a = mpsp_update_effort(zeros, q.chain, q.weights, q.dXN);
    const MpspUpdate b = mpsp_update_increment(zeros, q.chain, q.weights, q.dXN);
    for (std::size_t k = 0; k < zeros.size(); ++k) EXPECT_LT((a.controls[k] - b.controls[k]).norm(), 1e-12);

    q.dXN.setZero();
    for (std::size_t k = 0; k < q.u_prev.size(); ++k) q.dXN += q.chain.G[k] * q.u_prev[k];
    const MpspUpdate c = mpsp_update_effort(q.u_prev, q.chain, q.weights, q.dXN);
    for (const auto& u : c.controls) EXPECT_LT(u.norm(), 1e-10);
}

TEST(Updates, SingularGram) {
    const Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2, 1);
    try {
        mpsp_update_increment({Eigen::VectorXd::Zero(1)}, {{G}}, ControlWeights::identity(1), Eigen::VectorXd::Ones(2));
        FAIL() << "expected singular_gram";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::singular_gram);
    }
}

TEST(TerminalMultiplier, RecoversEffortSolution) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        const QpInstance q = random_instance(rng);
        const MpspUpdate eff = mpsp_update_effort(q.u_prev, q.chain, q.weights, q.dXN);
        const Eigen::VectorXd mu = terminal_multiplier(q.chain, q.weights, eff.controls);
        for (std::size_t k = 0; k < eff.controls.size(); ++k) {
            const Eigen::VectorXd u = -q.weights.at(k).llt().solve(q.chain.G[k].transpose() * mu);
            EXPECT_LT((u - eff.controls[k]).norm(), 1e-9 * std::max(1.0, u.norm()));
        }
    }
}

TEST(TerminalDeviation, BchOrder) {
    const VpqSystem sys;
    VehicleState target;
    target.attitude = exp_so3(Vec3(0.4, 0.1, -0.7));
    EXPECT_LT(sys.deviation(target, target).norm(), 1e-15);
    for (double s : {1e-2, 1e-3}) {
        const Vec3 eps = s * Vec3(1.0, -2.0, 0.5);
        VehicleState x = target;
        x.attitude = target.attitude * exp_so3(eps);
        EXPECT_LT((sys.deviation(x, target).head<3>() - eps).norm(), 10.0 * std::pow(s, 3) + 1e-15);
    }
    VehicleState w = target;
    w.omega = Vec3(0.1, 0.2, 0.3);
    const Eigen::VectorXd d = sys.deviation(w, target);
    EXPECT_LT(d.head<3>().norm(), 1e-15);
    EXPECT_EQ(Vec3(d.tail<3>()), Vec3(0.1, 0.2, 0.3));
}

TEST(MpspSolve, TrivialProblem) {
    const VpqSystem sys;
    const auto res = mpsp_solve(sys, OptimalControlProblem<VehicleState>{VehicleState{}, VehicleState{}, 100, 1e-3, {}});
    EXPECT_TRUE(res.report.converged);
    EXPECT_EQ(res.report.iterations(), 1);
    for (const auto& u : res.trajectory.controls) EXPECT_EQ(u.norm(), 0.0);
}

TEST(MpspSolve, VpqFlip) {
    const VpqSystem sys;
    for (auto variant : {MpspVariant::increment, MpspVariant::effort}) {
        MpspConfig cfg;
        cfg.variant = variant;
        const auto res = mpsp_solve(sys, OptimalControlProblem<VehicleState>{VehicleState{}, flip_target(), 600, 1e-3, {}}, cfg);
        ASSERT_TRUE(res.report.converged);
        EXPECT_LE(res.report.iterations(), 10);
        const auto ratios = res.report.deviation_ratios();
        ASSERT_GE(ratios.size(), 3u);
        for (std::size_t i = ratios.size() - 3; i < ratios.size(); ++i) EXPECT_LT(ratios[i], 1.0);
        EXPECT_LT(res.report.records.back().increment_cost, 1e-10);
        const double angle = log_so3_resolved(flip_target().attitude.transpose() * res.trajectory.states.back().attitude).norm();
        EXPECT_LT(angle, 1e-8);
    }
}

TEST(MpspSolve, SmrhFlip) {
    const SmrhSystem sys;
    VehicleState x0;
    x0.moment = Vec3::Zero();
    VehicleState target = flip_target();
    target.moment = Vec3::Zero();
    const auto res = mpsp_solve(sys, OptimalControlProblem<VehicleState>{x0, target, 1200, 1e-3, {}});
    ASSERT_TRUE(res.report.converged);
    EXPECT_LE(res.report.iterations(), 20);
}

TEST(MpspSolve, IterationCapReported) {
    const VpqSystem sys;
    MpspConfig cfg;
    cfg.max_iterations = 2;
    const auto res = mpsp_solve(sys, OptimalControlProblem<VehicleState>{VehicleState{}, flip_target(), 600, 1e-3, {}}, cfg);
    EXPECT_FALSE(res.report.converged);
    ASSERT_TRUE(res.report.failure.has_value());
    EXPECT_EQ(*res.report.failure, ErrorCode::did_not_converge);
    EXPECT_EQ(res.report.iterations(), 2);
}
