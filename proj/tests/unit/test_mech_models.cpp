#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lgmpsp/mech_models.hpp"
#include "lgmpsp/systems.hpp"

using namespace lgmpsp;

namespace {

SmsModel so3_model(const Mat3& J) { return SmsModel(LieAlgebraSpec::so3(), InertiaOperator(J)); }

Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

Eigen::Vector4d wrench(const RotorWrench& w) { return {w.T, w.l, w.m, w.n}; }

}  // namespace

TEST(SmsVelocity, HandEvaluated) {
    const SmsModel model = so3_model(Vec3(1, 2, 3).asDiagonal());
    EXPECT_EQ(sms_velocity_derivative(model, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)),
              Eigen::VectorXd::Zero(3));
    const Eigen::VectorXd vdot = sms_velocity_derivative(model, Vec3(1, 1, 1), Eigen::VectorXd::Zero(3));
    EXPECT_LT((vdot - Vec3(-1.0, 1.0, -1.0 / 3.0)).norm(), 1e-15);
    EXPECT_LT(sms_velocity_derivative(model, Vec3(0, 2.5, 0), Eigen::VectorXd::Zero(3)).norm(), 1e-15);
}

TEST(SmsVelocity, MatchesVpq) {
    const VpqParams params;
    const SmsModel model = so3_model(params.J);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 1000; ++i) {
        VehicleState x;
        x.omega = random_vec(rng, 10.0);
        const Vec3 u = random_vec(rng);
        const Eigen::VectorXd sms = sms_velocity_derivative(model, x.omega, u);
        EXPECT_LT((sms - vpq_derivative(params, x, u).omega_dot).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SmsVelocity, DriftJacobianFiniteDifference) {
    const SmsModel model = so3_model(vpq_reference_inertia());
    const Eigen::Vector3d v0(1.0, -2.0, 0.5);
    const Eigen::MatrixXd D = sms_drift_jacobian(model, v0);
    const double eps = 1e-6;
    for (int j = 0; j < 3; ++j) {
        const Eigen::VectorXd d = eps * Eigen::Vector3d::Unit(j);
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
        const Eigen::VectorXd fd =
            (sms_velocity_derivative(model, v0 + d, zero) - sms_velocity_derivative(model, v0 - d, zero)) / (2 * eps);
        EXPECT_LT((fd - D.col(j)).norm(), 1e-6 * std::max(1.0, D.col(j).norm()));
    }
}

TEST(VpqDerivative, ReferenceInertia) {
    const VpqParams params;
    Mat3 J;
    J << 0.0122, 0.0003, 0.00056, 0.0003, 0.0266, 0.00032, 0.00056, 0.00032, 0.0387;
    EXPECT_EQ(params.J, J);
    VehicleState x;
    EXPECT_EQ(vpq_derivative(params, x, Vec3::Zero()).omega_dot, Vec3::Zero());
    const Vec3 wdot = vpq_derivative(params, x, Vec3(1, 0, 0)).omega_dot;
    EXPECT_LT((J * wdot - Vec3(1, 0, 0)).norm(), 1e-12);
    EXPECT_NEAR(wdot(0), 82.04376602111678, 1e-9);
}

TEST(RotorForward, PrintedFormulas) {
    const VpqParams p;
    EXPECT_EQ(wrench(vpq_rotor_forward(p, {0, 0, 0, 0}, 1)), Eigen::Vector4d::Zero());
    const double c = 0.02;
    const Eigen::Vector4d hover = wrench(vpq_rotor_forward(p, {c, c, c, c}, 1));
    EXPECT_LT((hover - Eigen::Vector4d(4 * p.K * c, 0, 0, 0)).norm(), 1e-15);
    const Eigen::Vector4d diag = wrench(vpq_rotor_forward(p, {c, 0, c, 0}, 1));
    EXPECT_NEAR(diag(1), 0.0, 1e-15);
    EXPECT_NEAR(diag(2), 0.0, 1e-15);
    EXPECT_NEAR(diag(3), p.K * p.r / std::sqrt(2.0) * 2.0 * std::pow(c, 1.5), 1e-15);
}

TEST(RotorForward, GammaAntisymmetry) {
    const VpqParams p;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (int i = 0; i < 100; ++i) {
        const std::array<double, 4> c{u(rng), u(rng), u(rng), u(rng)};
        EXPECT_LT((wrench(vpq_rotor_forward(p, c, -1)) + wrench(vpq_rotor_forward(p, c, 1))).norm(), 1e-15);
    }
}

TEST(RotorForward, PrincipalPowerRejectsNegative) {
    const VpqParams p;
    try {
        vpq_rotor_forward(p, {0.01, -0.01, 0.01, 0.01}, 1, ThrustPower::principal);
        FAIL() << "expected invalid_thrust_coefficient";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_thrust_coefficient);
    }
    EXPECT_NO_THROW(vpq_rotor_forward(p, {0.01, -0.01, 0.01, 0.01}, 1, ThrustPower::signed_power));
}

TEST(RotorInverse, Hover) {
    const VpqParams p;
    for (int gamma : {1, -1}) {
        const double T = 8.0 * gamma;
        const auto c = vpq_rotor_inverse(p, {T, 0, 0, 0}, gamma);
        for (double ci : c) EXPECT_NEAR(ci, T / (4.0 * gamma * p.K), 1e-15);
    }
}

TEST(RotorInverse, RoundTrip) {
    const VpqParams p;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int i = 0; i < 1000; ++i) {
        const int gamma = i % 2 ? -1 : 1;
        std::array<double, 4> c{};
        for (double& ci : c) ci = gamma * 0.05 * (1.0 + u(rng));
        const RotorWrench target = vpq_rotor_forward(p, c, gamma);
        const auto back = vpq_rotor_inverse(p, target, gamma);
        const Eigen::Vector4d w = wrench(target);
        EXPECT_LT((wrench(vpq_rotor_forward(p, back, gamma)) - w).cwiseAbs().maxCoeff(), 1e-10 * w.cwiseAbs().maxCoeff());
    }
}

TEST(RotorInverse, RollPreservesTotal) {
    const VpqParams p;
    const auto base = vpq_rotor_inverse(p, {8.0, 0, 0, 0}, 1);
    const auto rolled = vpq_rotor_inverse(p, {8.0, 0.05, 0, 0}, 1);
    EXPECT_NEAR(base[0] + base[1] + base[2] + base[3], rolled[0] + rolled[1] + rolled[2] + rolled[3], 1e-14);
}

TEST(RotorInverse, Infeasible) {
    const VpqParams p;
    try {
        vpq_rotor_inverse(p, {0.0, 0.0, 0.0, 1e3}, 1);
        FAIL() << "expected allocation_infeasible";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::allocation_infeasible);
    }
}

TEST(Smrh, BlockMatrices) {
    SmrhParams p;
    p.tau_m = 2.0;
    p.omega_mr = 5.0;
    p.k_beta = 7.0;
    p.I_beta = 11.0;
    p.tau_t = 13.0;
    p.K_t = 17.0;
    p.h_mr = 0.5;
    p.T_mr = 3.0;
    const double s = 7.0 + 0.5 * 3.0;
    const double cross = 7.0 / (2.0 * 5.0 * 11.0);
    Mat3 A, K, B;
    A << -0.5, cross, 0, -cross, -0.5, 0, 0, 0, -1.0 / 13.0;
    K << s, -s / 10.0, 0, s / 10.0, s, 0, 0, 0, 17.0;
    B << s / 2.0, 0, 0, 0, s / 2.0, 0, 0, 0, 17.0 / 13.0;
    EXPECT_LT((p.A() - A).norm(), 1e-15);
    EXPECT_LT((p.K() - K).norm(), 1e-15);
    EXPECT_LT((p.B() - B).norm(), 1e-15);
    const SmrhParams d;
    EXPECT_EQ(d.A()(2, 2), -1.0 / d.tau_t);
    EXPECT_EQ(d.B()(2, 2), d.K_t / d.tau_t);
}

TEST(Smrh, ZeroAndSteadyState) {
    const SmrhParams p;
    VehicleState x;
    x.moment = Vec3::Zero();
    const SmrhDerivative d0 = smrh_derivative(p, x, Vec3::Zero());
    EXPECT_EQ(d0.omega_dot, Vec3::Zero());
    EXPECT_EQ(d0.moment_dot, Vec3::Zero());

    const Vec3 u(0.01, -0.02, 0.03);
    const Vec3 Mss = -p.A().inverse() * p.B() * u;
    x.moment = Mss;
    EXPECT_LT(smrh_derivative(p, x, u).moment_dot.norm(), 1e-12 * Mss.norm());
    Vec3 M = Vec3::Zero();
    for (int k = 0; k < 20000; ++k) {
        x.moment = M;
        M += 1e-3 * smrh_derivative(p, x, u).moment_dot;
    }
    EXPECT_LT((M - Mss).norm(), 1e-9 * Mss.norm());
}

TEST(Smrh, RequiresMoment) {
    const SmrhParams p;
    VehicleState x;
    EXPECT_THROW(smrh_derivative(p, x, Vec3::Zero()), Error);
}

TEST(Params, Validation) {
    VpqParams v;
    v.J(0, 1) = 0.1;
    EXPECT_THROW(v.validate(), Error);
    VpqParams r;
    r.r = 0.0;
    EXPECT_THROW(r.validate(), Error);
    SmrhParams s;
    s.tau_t = -1.0;
    EXPECT_THROW(s.validate(), Error);
}

TEST(Rollout, RestStaysAtRest) {
    const VpqSystem sys;
    const auto traj = rollout(sys, VehicleState{}, std::vector<Eigen::VectorXd>(50, Eigen::VectorXd::Zero(3)), 1e-3);
    ASSERT_EQ(traj.size(), 51);
    EXPECT_EQ(traj.states.back().attitude, Mat3::Identity());
    EXPECT_EQ(traj.states.back().omega, Vec3::Zero());
}

TEST(Rollout, PrincipalAxisSpin) {
    VpqParams p;
    p.J = Vec3(0.01, 0.02, 0.03).asDiagonal();
    const VpqSystem sys(p);
    VehicleState x0;
    x0.omega = Vec3(0, 0, 2.0);
    const int n = 1000;
    const double h = 1e-3;
    const auto traj = rollout(sys, x0, std::vector<Eigen::VectorXd>(n, Eigen::VectorXd::Zero(3)), h);
    EXPECT_LT((traj.states.back().attitude - exp_so3(Vec3(0, 0, 2.0 * n * h))).norm(), 1e-12);
}

TEST(Rollout, AngularMomentumDriftIsSecondOrder) {
    const VpqParams p;
    auto drift = [&](double h) {
        VehicleState x;
        x.omega = Vec3(1.0, -2.0, 3.0);
        const double before = (p.J * x.omega).norm();
        x = vpq_step(p, x, Vec3::Zero(), h);
        return (p.J * x.omega).norm() - before;
    };
    const double ratio = drift(1e-3) / drift(5e-4);
    EXPECT_NEAR(ratio, 4.0, 1e-3);
}

TEST(Rollout, OrthogonalityOverLongHorizon) {
    const SmrhSystem sys;
    VehicleState x0;
    x0.moment = Vec3::Zero();
    x0.omega = Vec3(3.0, -1.0, 2.0);
    std::mt19937_64 rng(13);
    std::vector<Eigen::VectorXd> u;
    for (int k = 0; k < 1200; ++k) u.emplace_back(random_vec(rng, 0.05));
    const auto traj = rollout(sys, x0, u, 1e-3);
    const Mat3& R = traj.states.back().attitude;
    EXPECT_LT((R.transpose() * R - Mat3::Identity()).norm(), 1e-9);
}
