#pragma once

// Closed-form geometry of the Heisenberg group H_n and of (R^{2n}, omega_0).
//
// H_n is identified with R^{2n+1} in the coordinate order (x_1..x_n, y_1..y_n, z).
// The product is the one of the upper-triangular matrices
//
//     | 1  x^T  z |
//     | 0  I_n  y |
//     | 0  0    1 |
//
// i.e. (x, y, z)(x', y', z') = (x + x', y + y', z + z' + x.y').

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace diffrep::geometry {

struct GroupPoint {
    std::vector<double> x;
    std::vector<double> y;
    double z = 0.0;

    std::size_t n() const noexcept { return x.size(); }

    static GroupPoint identity(std::size_t n);
    /// Reads (x_1..x_n, y_1..y_n, z) from a flat coordinate array of length 2n+1.
    static GroupPoint from_coords(std::span<const double> coords);
    std::vector<double> coords() const;
};

/// Element (a, b, c) of the Lie algebra of H_n.
struct LieVector {
    std::vector<double> a;
    std::vector<double> b;
    double c = 0.0;

    std::size_t n() const noexcept { return a.size(); }
    static LieVector from_coords(std::span<const double> coords);
    std::vector<double> coords() const;
};

/// Tangent vector in coordinates; length 2n+1 on H_n, 2n on R^{2n}.
struct TangentVector {
    std::vector<double> components;

    std::size_t size() const noexcept { return components.size(); }
    static TangentVector unit(std::size_t dim, std::size_t axis);
};

GroupPoint group_mul(const GroupPoint& u, const GroupPoint& v);
GroupPoint group_inv(const GroupPoint& u);

/// exp(a, b, c) = (a, b, c + a.b/2).
GroupPoint exp_map(const LieVector& v);
/// Inverse of exp_map; H_n is simply connected nilpotent so this is global.
LieVector log_map(const GroupPoint& p);

/// alpha_0 = dz - sum y^i dx^i evaluated at p on v.
double alpha0(const GroupPoint& p, const TangentVector& v);
/// d alpha_0 = sum dx^i ^ dy^i; independent of p.
double d_alpha0(const GroupPoint& p, const TangentVector& v, const TangentVector& w);
/// The unit z-direction.
TangentVector reeb_field(const GroupPoint& p);

/// delta_t(x, y, z) = (e^t x, e^t y, e^{2t} z).
GroupPoint dilation(double t, const GroupPoint& p);

/// omega_0(u, v) = sum (u_{x_i} v_{y_i} - u_{y_i} v_{x_i}) on R^{2n}.
double omega0(const TangentVector& u, const TangentVector& v);

/// Matrix Omega with omega_0(u, v) = u^T Omega v.
Eigen::MatrixXd omega_matrix(std::size_t n);

/// Jacobian of p -> p g (constant in p).
Eigen::MatrixXd right_translation_jacobian(const GroupPoint& g);
/// Jacobian of p -> g p (constant in p).
Eigen::MatrixXd left_translation_jacobian(const GroupPoint& g);

/// Bordered (2n+2)x(2n+2) matrix [[dalpha_0, alpha_0^T], [-alpha_0, 0]] at p.
/// It is invertible exactly when alpha_0 ^ (d alpha_0)^n is nonzero at p.
Eigen::MatrixXd contact_pairing_matrix(const GroupPoint& p);

}  // namespace diffrep::geometry
