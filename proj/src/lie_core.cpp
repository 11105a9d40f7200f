#include "lgmpsp/lie_core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lgmpsp {

namespace {

constexpr double kSmallAngle = 1e-8;
constexpr double kAntipodalTraceMargin = 1e-10;

// Unit axis of a rotation by angle theta (cos_theta given) from its symmetric
// part; used where the skew part is too small to divide by sin(theta).
Vec3 axis_from_symmetric_part(const Mat3& R, double cos_theta) {
    const Mat3 outer = (0.5 * (R + R.transpose()) - cos_theta * Mat3::Identity()) / (1.0 - cos_theta);
    int col = 0;
    outer.diagonal().maxCoeff(&col);
    Vec3 axis = outer.col(col);
    return axis / axis.norm();
}

}  // namespace

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::dimension_mismatch: return "dimension mismatch";
        case ErrorCode::not_skew_symmetric: return "not skew-symmetric";
        case ErrorCode::not_a_rotation: return "not a rotation";
        case ErrorCode::invalid_structure_constants: return "invalid structure constants";
        case ErrorCode::invalid_inertia: return "invalid inertia";
        case ErrorCode::antipodal_rotation: return "antipodal rotation";
        case ErrorCode::invalid_thrust_coefficient: return "invalid thrust coefficient";
        case ErrorCode::allocation_infeasible: return "allocation infeasible";
        case ErrorCode::invalid_argument: return "invalid argument";
        case ErrorCode::singular_gram: return "singular sensitivity Gram matrix";
        case ErrorCode::did_not_converge: return "did not converge";
        case ErrorCode::riccati_blowup: return "Riccati blow-up";
        case ErrorCode::line_search_exhausted: return "line search exhausted";
        case ErrorCode::extremal_diverged: return "extremal diverged";
        case ErrorCode::shooting_failed: return "shooting failed to converge";
        case ErrorCode::config_error: return "config error";
    }
    return "unknown error";
}

Mat3 hat(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vee(const Mat3& m, double tolerance) {
    const Mat3 sym = 0.5 * (m + m.transpose());
    if (sym.cwiseAbs().maxCoeff() > tolerance) {
        std::ostringstream os;
        os << "vee: symmetric part " << sym.cwiseAbs().maxCoeff() << " exceeds tolerance " << tolerance;
        throw Error(ErrorCode::not_skew_symmetric, os.str());
    }
    const Mat3 skew = 0.5 * (m - m.transpose());
    return {skew(2, 1), skew(0, 2), skew(1, 0)};
}

Mat3 exp_so3(const Vec3& v) {
    const double theta = v.norm();
    const Mat3 K = hat(v);
    if (theta < kSmallAngle) {
        return Mat3::Identity() + K + 0.5 * K * K;
    }
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / (theta * theta);
    return Mat3::Identity() + a * K + b * K * K;
}

Vec3 log_so3(const Mat3& R) {
    const double tr = R.trace();
    if (tr <= -1.0 + kAntipodalTraceMargin) {
        throw Error(ErrorCode::antipodal_rotation, "log_so3: rotation angle is pi, logarithm is not unique");
    }
    const double cos_theta = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    const Vec3 skew{0.5 * (R(2, 1) - R(1, 2)), 0.5 * (R(0, 2) - R(2, 0)), 0.5 * (R(1, 0) - R(0, 1))};
    if (theta < kSmallAngle) {
        return skew;
    }
    if (theta > std::numbers::pi - 1e-3) {
        Vec3 axis = axis_from_symmetric_part(R, cos_theta);
        if (axis.dot(skew) < 0.0) axis = -axis;
        return theta * axis;
    }
    return (theta / std::sin(theta)) * skew;
}

Vec3 log_so3_resolved(const Mat3& R) {
    if (R.trace() > -1.0 + kAntipodalTraceMargin) {
        return log_so3(R);
    }
    Vec3 axis = axis_from_symmetric_part(R, -1.0);
    int dominant = 0;
    axis.cwiseAbs().maxCoeff(&dominant);
    if (axis(dominant) > 0.0) axis = -axis;
    return std::numbers::pi * axis;
}

Mat3 right_jacobian_so3(const Vec3& phi) {
    const double theta = phi.norm();
    const Mat3 K = hat(phi);
    if (theta < kSmallAngle) {
        return Mat3::Identity() - 0.5 * K + (1.0 / 6.0) * K * K;
    }
    const double t2 = theta * theta;
    return Mat3::Identity() - ((1.0 - std::cos(theta)) / t2) * K + ((theta - std::sin(theta)) / (t2 * theta)) * K * K;
}

bool is_rotation(const Mat3& R, double tolerance) {
    return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() <= tolerance &&
           std::abs(R.determinant() - 1.0) <= tolerance;
}

Mat3 group_step(const Mat3& g, const Vec3& v, double h) {
    if (!(h > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "group_step: step must be positive");
    }
    return g * exp_so3(h * v);
}

// ---------------------------------------------------------------------------

LieAlgebraSpec::LieAlgebraSpec(int dim, std::vector<double> constants) : dim_(dim), c_(std::move(constants)) {
    if (dim_ <= 0) {
        throw Error(ErrorCode::invalid_structure_constants, "Lie algebra dimension must be positive");
    }
    const auto n = static_cast<std::size_t>(dim_);
    if (c_.size() != n * n * n) {
        throw Error(ErrorCode::invalid_structure_constants, "structure constant array must have dim^3 entries");
    }
    double scale = 1.0;
    for (double c : c_) scale = std::max(scale, std::abs(c));
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            for (int k = 0; k < dim_; ++k) {
                if (std::abs(constant(i, j, k) + constant(j, i, k)) > 1e-12 * scale) {
                    std::ostringstream os;
                    os << "structure constants not antisymmetric at (" << i << "," << j << "," << k << ")";
                    throw Error(ErrorCode::invalid_structure_constants, os.str());
                }
            }
        }
    }
    if (jacobi_residual() > 1e-12 * scale * scale) {
        throw Error(ErrorCode::invalid_structure_constants, "structure constants violate the Jacobi identity");
    }
}

LieAlgebraSpec LieAlgebraSpec::so3() {
    std::vector<double> c(27, 0.0);
    auto set = [&c](int i, int j, int k, double value) { c[static_cast<std::size_t>((i * 3 + j) * 3 + k)] = value; };
    // [e_i, e_j] = eps_ijk e_k
    set(0, 1, 2, 1.0);
    set(1, 2, 0, 1.0);
    set(2, 0, 1, 1.0);
    set(1, 0, 2, -1.0);
    set(2, 1, 0, -1.0);
    set(0, 2, 1, -1.0);
    return LieAlgebraSpec(3, std::move(c));
}

LieAlgebraSpec LieAlgebraSpec::abelian(int dim) {
    const auto n = static_cast<std::size_t>(std::max(dim, 0));
    return LieAlgebraSpec(dim, std::vector<double>(n * n * n, 0.0));
}

void LieAlgebraSpec::require_dim(const Eigen::VectorXd& v) const {
    if (v.size() != dim_) {
        std::ostringstream os;
        os << "expected a vector of length " << dim_ << ", got " << v.size();
        throw Error(ErrorCode::dimension_mismatch, os.str());
    }
}

Eigen::VectorXd LieAlgebraSpec::bracket(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
    require_dim(v);
    require_dim(w);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            const double vw = v(i) * w(j);
            if (vw == 0.0) continue;
            for (int k = 0; k < dim_; ++k) out(k) += vw * constant(i, j, k);
        }
    }
    return out;
}

Eigen::MatrixXd LieAlgebraSpec::ad_matrix(const Eigen::VectorXd& v) const {
    require_dim(v);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            for (int k = 0; k < dim_; ++k) m(k, j) += v(i) * constant(i, j, k);
        }
    }
    return m;
}

Eigen::MatrixXd LieAlgebraSpec::coad_matrix(const Eigen::VectorXd& v) const {
    require_dim(v);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            for (int k = 0; k < dim_; ++k) m(k, j) += v(i) * constant(i, k, j);
        }
    }
    return m;
}

double LieAlgebraSpec::jacobi_residual() const {
    double worst = 0.0;
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            for (int k = 0; k < dim_; ++k) {
                for (int l = 0; l < dim_; ++l) {
                    double sum = 0.0;
                    for (int m = 0; m < dim_; ++m) {
                        sum += constant(i, j, m) * constant(m, k, l) + constant(j, k, m) * constant(m, i, l) +
                               constant(k, i, m) * constant(m, j, l);
                    }
                    worst = std::max(worst, std::abs(sum));
                }
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

InertiaOperator::InertiaOperator(const Eigen::MatrixXd& flat) : flat_(flat) {
    if (flat_.rows() == 0 || flat_.rows() != flat_.cols()) {
        throw Error(ErrorCode::invalid_inertia, "inertia matrix must be square and non-empty");
    }
    const double scale = flat_.cwiseAbs().maxCoeff();
    if (!((flat_ - flat_.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale)) {
        throw Error(ErrorCode::invalid_inertia, "inertia matrix must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(flat_);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::invalid_inertia, "inertia matrix must be positive definite");
    }
    sharp_ = llt.solve(Eigen::MatrixXd::Identity(flat_.rows(), flat_.cols()));
    const double residual = (flat_ * sharp_ - Eigen::MatrixXd::Identity(flat_.rows(), flat_.cols())).cwiseAbs().maxCoeff();
    if (residual > 1e-12 * std::max(1.0, flat_.norm() * sharp_.norm())) {
        throw Error(ErrorCode::invalid_inertia, "inertia matrix is too ill-conditioned to invert");
    }
}

}  // namespace lgmpsp
