#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "lgmpsp/error.hpp"

namespace lgmpsp {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// ---------------------------------------------------------------------------
// SO(3) primitives
// ---------------------------------------------------------------------------

/// Skew-symmetric matrix with hat(v) * y == v.cross(y).
Mat3 hat(const Vec3& v);

/// Inverse of hat. The input is symmetrized first; a symmetric part larger
/// than `tolerance` (max-abs) is rejected with ErrorCode::not_skew_symmetric.
Vec3 vee(const Mat3& m, double tolerance = 1e-9);

/// Rodrigues formula, with a Taylor expansion below ||v|| = 1e-8.
Mat3 exp_so3(const Vec3& v);

/// Principal logarithm (||result|| <= pi). Rotations with
/// trace(R) <= -1 + 1e-10 have no unique logarithm and raise
/// ErrorCode::antipodal_rotation.
Vec3 log_so3(const Mat3& R);

/// Logarithm that also accepts the pi-rotation branch. At the cut the
/// rotation axis is recovered from R + I and oriented so that its
/// largest-magnitude component is negative; everywhere else this equals
/// log_so3.
Vec3 log_so3_resolved(const Mat3& R);

/// Right Jacobian of exp: exp(phi + d) ~= exp(phi) exp(J_r(phi) d).
Mat3 right_jacobian_so3(const Vec3& phi);

/// True when R^T R = I and det(R) = 1 within `tolerance`.
bool is_rotation(const Mat3& R, double tolerance = 1e-9);

/// Lie-Euler step on SO(3): g * exp(h * v).
Mat3 group_step(const Mat3& g, const Vec3& v, double h);

// ---------------------------------------------------------------------------
// Coordinate Lie algebras
// ---------------------------------------------------------------------------

/// Finite-dimensional Lie algebra given by dense structure constants
/// c^k_{ij}, i.e. [e_i, e_j] = c^k_{ij} e_k. Antisymmetry and the Jacobi
/// identity are verified on construction.
class LieAlgebraSpec {
public:
    /// `constants` is row-major in (i, j, k): constants[(i * n + j) * n + k].
    LieAlgebraSpec(int dim, std::vector<double> constants);

    static LieAlgebraSpec so3();
    static LieAlgebraSpec abelian(int dim);

    int dim() const noexcept { return dim_; }
    double constant(int i, int j, int k) const {
        return c_[static_cast<std::size_t>((i * dim_ + j) * dim_ + k)];
    }

    /// Components of [v, w].
    Eigen::VectorXd bracket(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;

    /// Matrix of eta -> [v, eta]: ad(v)_{kj} = v^i c^k_{ij}.
    Eigen::MatrixXd ad_matrix(const Eigen::VectorXd& v) const;

    /// Matrix of the coadjoint action on the dual, <ad*_v mu, eta> = <mu, [v, eta]>.
    /// Built from the constants as coad(v)_{kj} = v^i c^j_{ik}; equals ad_matrix(v)^T.
    Eigen::MatrixXd coad_matrix(const Eigen::VectorXd& v) const;

    /// Largest |Jacobi identity| residual over all index quadruples.
    double jacobi_residual() const;

private:
    void require_dim(const Eigen::VectorXd& v) const;

    int dim_;
    std::vector<double> c_;
};

/// Kinetic-energy metric as a matrix (flat map) and its inverse (sharp map).
class InertiaOperator {
public:
    explicit InertiaOperator(const Eigen::MatrixXd& flat);

    const Eigen::MatrixXd& flat() const noexcept { return flat_; }
    const Eigen::MatrixXd& sharp() const noexcept { return sharp_; }
    int dim() const noexcept { return static_cast<int>(flat_.rows()); }

private:
    Eigen::MatrixXd flat_;
    Eigen::MatrixXd sharp_;
};

}  // namespace lgmpsp
