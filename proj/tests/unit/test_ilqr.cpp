#include <gtest/gtest.h>

#include <random>

#include "lgmpsp/ilqr.hpp"

using namespace lgmpsp;

namespace {

AbelianSmsSystem double_integrator(int n, const Eigen::MatrixXd& inertia) {
    return AbelianSmsSystem(SmsModel(LieAlgebraSpec::abelian(n), InertiaOperator(inertia)));
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = g(rng);
    return M;
}

VehicleState flip_target() {
    VehicleState x;
    x.attitude = Vec3(1, -1, -1).asDiagonal();
    return x;
}

}  // namespace

TEST(BackwardPass, ZeroValueFunctionIsNoOp) {
    std::mt19937_64 rng(40);
    std::vector<StepLinearization> lin;
    for (int k = 0; k < 5; ++k) lin.push_back({random_matrix(rng, 4, 4), random_matrix(rng, 4, 2)});
    const std::vector<Eigen::VectorXd> u(5, Eigen::VectorXd::Zero(2));
    const BackwardPassResult bp =
        backward_pass(lin, u, random_matrix(rng, 4, 1), Eigen::MatrixXd::Zero(4, 4), ControlWeights::identity(2));
    for (const auto& s : bp.policy) {
        EXPECT_EQ(s.K.norm(), 0.0);
        EXPECT_EQ(s.d.norm(), 0.0);
    }
}

TEST(BackwardPass, ScalarDoubleIntegratorByHand) {
    const AbelianSmsSystem sys = double_integrator(1, Eigen::MatrixXd::Identity(1, 1));
    const double h = 0.1;
    const EuclideanState x0{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
    const std::vector<Eigen::VectorXd> u(2, Eigen::VectorXd::Zero(1));
    const auto traj = rollout(sys, x0, u, h);
    const BackwardPassResult bp = backward_pass(linearize_along(sys, traj), u, Eigen::Vector2d(1.0, -1.0),
                                                Eigen::MatrixXd::Identity(2, 2), ControlWeights::identity(1));
    EXPECT_NEAR(bp.policy[1].K(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(bp.policy[1].K(0, 1), -0.09900990099009901, 1e-15);
    EXPECT_NEAR(bp.P[1](1, 1), 1.00009900990099, 1e-14);
    EXPECT_NEAR(bp.P[1](0, 1), 0.1, 1e-15);
    EXPECT_NEAR(bp.policy[0].K(0, 0), -0.009900980393117938, 1e-15);
    EXPECT_NEAR(bp.policy[0].K(0, 1), -0.10000970492137544, 1e-15);
    EXPECT_NEAR(bp.P[0](0, 0), 0.9999009901960688, 1e-14);
    EXPECT_NEAR(bp.P[0](0, 1), 0.19899990295078626, 1e-14);
    EXPECT_NEAR(bp.P[0](1, 1), 1.019997039508833, 1e-14);
}

TEST(BackwardPass, ValueHessianSymmetricPsd) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<StepLinearization> lin;
        std::vector<Eigen::VectorXd> u;
        for (int k = 0; k < 8; ++k) {
            lin.push_back({Eigen::MatrixXd::Identity(4, 4) + 0.1 * random_matrix(rng, 4, 4), random_matrix(rng, 4, 2)});
            u.push_back(random_matrix(rng, 2, 1));
        }
        const Eigen::MatrixXd X = random_matrix(rng, 4, 4);
        const BackwardPassResult bp =
            backward_pass(lin, u, random_matrix(rng, 4, 1), X * X.transpose(), ControlWeights::identity(2));
        for (const auto& P : bp.P) {
            EXPECT_EQ((P - P.transpose()).norm(), 0.0);
            EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(P).eigenvalues().minCoeff(), -1e-10);
        }
        for (const auto& s : bp.policy) {
            EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s.Q_uu).eigenvalues().minCoeff(), 0.0);
        }
    }
}

TEST(ForwardRollout, LinearSystemMatchesPrediction) {
    Eigen::Matrix2d inertia;
    inertia << 2.0, 0.3, 0.3, 1.0;
    const AbelianSmsSystem sys = double_integrator(2, inertia);
    std::mt19937_64 rng(42);
    const EuclideanState x0{random_matrix(rng, 2, 1), random_matrix(rng, 2, 1)};
    const EuclideanState target{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)};
    std::vector<Eigen::VectorXd> u;
    for (int k = 0; k < 20; ++k) u.push_back(random_matrix(rng, 2, 1));
    const auto nominal = rollout(sys, x0, u, 0.05);
    const Eigen::VectorXd dXN = sys.deviation(nominal.states.back(), target);
    const Eigen::MatrixXd Q_N = 50.0 * Eigen::MatrixXd::Identity(4, 4);
    const ControlWeights R = ControlWeights::identity(2);
    const BackwardPassResult bp = backward_pass(linearize_along(sys, nominal), u, dXN, Q_N, R);
    const double cost0 = ilqr_cost(dXN, u, Q_N, R);
    for (double alpha : {1.0, 0.5, 0.25}) {
        const auto trial = forward_rollout(sys, nominal, bp.policy, alpha, target, Q_N, R);
        EXPECT_NEAR(cost0 - trial.cost, bp.expected_decrease(alpha), 1e-9 * cost0);
    }
    const auto zero = forward_rollout(sys, nominal, std::vector<PolicyStep>(bp.policy.size(), PolicyStep{
        Eigen::MatrixXd::Zero(2, 4), Eigen::VectorXd::Ones(2), {}, {}}), 0.0, target, Q_N, R);
    EXPECT_NEAR(zero.cost, cost0, 1e-12 * cost0);
}

TEST(IlqrSolve, LinearQuadraticOnePass) {
    const AbelianSmsSystem sys = double_integrator(3, Eigen::Matrix3d(Vec3(1.0, 2.0, 0.5).asDiagonal()));
    const EuclideanState x0{Eigen::Vector3d(1.0, -1.0, 0.5), Eigen::Vector3d::Zero()};
    const EuclideanState target{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)};
    IlqrConfig cfg;
    cfg.Q_N = 100.0 * Eigen::MatrixXd::Identity(6, 6);
    cfg.max_iterations = 1;
    const auto res = ilqr_solve(sys, OptimalControlProblem<EuclideanState>{x0, target, 30, 0.05, {}}, cfg);
    ASSERT_EQ(res.report.records.size(), 1u);
    EXPECT_EQ(res.report.records[0].step_size, 1.0);

    const SensitivityChain chain = build_chain(linearize_along(sys, res.trajectory));
    const Eigen::VectorXd dXN = sys.deviation(res.trajectory.states.back(), target);
    double grad = 0.0;
    for (int k = 0; k < chain.steps(); ++k) {
        const Eigen::VectorXd g = res.trajectory.controls[static_cast<std::size_t>(k)] +
                                  chain.G[static_cast<std::size_t>(k)].transpose() * cfg.Q_N * dXN;
        grad = std::max(grad, g.cwiseAbs().maxCoeff());
    }
    EXPECT_LT(grad, 1e-9);
}

TEST(IlqrSolve, AlreadyOptimalTerminatesImmediately) {
    const VpqSystem sys;
    const auto res = ilqr_solve(sys, OptimalControlProblem<VehicleState>{VehicleState{}, VehicleState{}, 50, 1e-3, {}});
    EXPECT_TRUE(res.report.converged);
    EXPECT_EQ(res.report.iterations(), 1);
}

TEST(IlqrSolve, VpqFlipCostMonotoneAndSoftTerminal) {
    const VpqSystem sys;
    const auto res = ilqr_solve(sys, OptimalControlProblem<VehicleState>{VehicleState{}, flip_target(), 600, 1e-3, {}});
    ASSERT_TRUE(res.report.converged);
    for (std::size_t i = 1; i < res.report.records.size(); ++i) {
        EXPECT_LE(res.report.records[i].total_cost, res.report.records[i - 1].total_cost);
    }
    const double terminal = res.report.records.back().deviation_norm;
    EXPECT_GT(terminal, 1e-6);
    EXPECT_LT(terminal, 1e-2);

    IlqrConfig mild;
    mild.Q_N = 10.0 * Eigen::MatrixXd::Identity(6, 6);
    const auto soft = ilqr_solve(sys, OptimalControlProblem<VehicleState>{VehicleState{}, flip_target(), 600, 1e-3, {}}, mild);
    EXPECT_GT(soft.report.records.back().deviation_norm, 0.1);
}

TEST(IlqrConfig, Validation) {
    IlqrConfig c;
    c.c1 = 1.5;
    EXPECT_THROW(c.validate(6), Error);
    IlqrConfig a;
    a.alphas = {};
    EXPECT_THROW(a.validate(6), Error);
    IlqrConfig q;
    q.Q_N = -Eigen::MatrixXd::Identity(6, 6);
    EXPECT_THROW(q.validate(6), Error);
}
