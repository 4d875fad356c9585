#include "diffrep/geometry.hpp"

#include <cmath>

#include "diffrep/errors.hpp"

namespace diffrep::geometry {

namespace {

void require_same_n(const GroupPoint& u, const GroupPoint& v) {
    if (u.x.size() != v.x.size() || u.y.size() != v.y.size() || u.x.size() != u.y.size())
        throw DimensionMismatch("group points of different dimension");
}

void require_heis_tangent(const GroupPoint& p, const TangentVector& v) {
    if (v.size() != 2 * p.n() + 1)
        throw DimensionMismatch("tangent vector length " + std::to_string(v.size()) +
                                " does not match H_n with n = " + std::to_string(p.n()));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

GroupPoint GroupPoint::identity(std::size_t n) {
    return GroupPoint{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
}

GroupPoint GroupPoint::from_coords(std::span<const double> coords) {
    if (coords.size() % 2 == 0 || coords.size() < 3)
        throw DimensionMismatch("H_n coordinates must have odd length 2n+1 >= 3");
    const std::size_t n = coords.size() / 2;
    GroupPoint p;
    p.x.assign(coords.begin(), coords.begin() + n);
    p.y.assign(coords.begin() + n, coords.begin() + 2 * n);
    p.z = coords[2 * n];
    return p;
}

std::vector<double> GroupPoint::coords() const {
    std::vector<double> c;
    c.reserve(2 * n() + 1);
    c.insert(c.end(), x.begin(), x.end());
    c.insert(c.end(), y.begin(), y.end());
    c.push_back(z);
    return c;
}

LieVector LieVector::from_coords(std::span<const double> coords) {
    const GroupPoint p = GroupPoint::from_coords(coords);
    return LieVector{p.x, p.y, p.z};
}

std::vector<double> LieVector::coords() const {
    return GroupPoint{a, b, c}.coords();
}

TangentVector TangentVector::unit(std::size_t dim, std::size_t axis) {
    TangentVector t{std::vector<double>(dim, 0.0)};
    t.components.at(axis) = 1.0;
    return t;
}

GroupPoint group_mul(const GroupPoint& u, const GroupPoint& v) {
    require_same_n(u, v);
    GroupPoint r;
    r.x.resize(u.n());
    r.y.resize(u.n());
    for (std::size_t i = 0; i < u.n(); ++i) {
        r.x[i] = u.x[i] + v.x[i];
        r.y[i] = u.y[i] + v.y[i];
    }
    r.z = u.z + v.z + dot(u.x, v.y);
    return r;
}

GroupPoint group_inv(const GroupPoint& u) {
    GroupPoint r;
    r.x.resize(u.n());
    r.y.resize(u.n());
    for (std::size_t i = 0; i < u.n(); ++i) {
        r.x[i] = -u.x[i];
        r.y[i] = -u.y[i];
    }
    r.z = -u.z + dot(u.x, u.y);
    return r;
}

GroupPoint exp_map(const LieVector& v) {
    if (v.a.size() != v.b.size()) throw DimensionMismatch("Lie vector a/b length mismatch");
    return GroupPoint{v.a, v.b, v.c + 0.5 * dot(v.a, v.b)};
}

LieVector log_map(const GroupPoint& p) {
    return LieVector{p.x, p.y, p.z - 0.5 * dot(p.x, p.y)};
}

double alpha0(const GroupPoint& p, const TangentVector& v) {
    require_heis_tangent(p, v);
    const std::size_t n = p.n();
    double s = v.components[2 * n];
    for (std::size_t i = 0; i < n; ++i) s -= p.y[i] * v.components[i];
    return s;
}

double d_alpha0(const GroupPoint& p, const TangentVector& v, const TangentVector& w) {
    require_heis_tangent(p, v);
    require_heis_tangent(p, w);
    const std::size_t n = p.n();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += v.components[i] * w.components[n + i] - v.components[n + i] * w.components[i];
    return s;
}

TangentVector reeb_field(const GroupPoint& p) {
    return TangentVector::unit(2 * p.n() + 1, 2 * p.n());
}

GroupPoint dilation(double t, const GroupPoint& p) {
    const double s = std::exp(t);
    const double s2 = std::exp(2.0 * t);
    GroupPoint r = p;
    for (auto& v : r.x) v *= s;
    for (auto& v : r.y) v *= s;
    r.z *= s2;
    return r;
}

double omega0(const TangentVector& u, const TangentVector& v) {
    if (u.size() != v.size() || u.size() % 2 != 0 || u.size() == 0)
        throw DimensionMismatch("omega0 needs two vectors of equal even length");
    const std::size_t n = u.size() / 2;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += u.components[i] * v.components[n + i] - u.components[n + i] * v.components[i];
    return s;
}

Eigen::MatrixXd omega_matrix(std::size_t n) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, n + i) = 1.0;
        m(n + i, i) = -1.0;
    }
    return m;
}

Eigen::MatrixXd right_translation_jacobian(const GroupPoint& g) {
    const std::size_t n = g.n();
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(2 * n + 1, 2 * n + 1);
    // z'' = z + g_z + x.g_y
    for (std::size_t i = 0; i < n; ++i) j(2 * n, i) = g.y[i];
    return j;
}

Eigen::MatrixXd left_translation_jacobian(const GroupPoint& g) {
    const std::size_t n = g.n();
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(2 * n + 1, 2 * n + 1);
    // z'' = g_z + z + g_x.y
    for (std::size_t i = 0; i < n; ++i) j(2 * n, n + i) = g.x[i];
    return j;
}

Eigen::MatrixXd contact_pairing_matrix(const GroupPoint& p) {
    const std::size_t n = p.n();
    const std::size_t d = 2 * n + 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d + 1, d + 1);
    m.topLeftCorner(2 * n, 2 * n) = omega_matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, d) = -p.y[i];
        m(d, i) = p.y[i];
    }
    m(2 * n, d) = 1.0;
    m(d, 2 * n) = -1.0;
    return m;
}

}  // namespace diffrep::geometry
