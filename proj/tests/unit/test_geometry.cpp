#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "diffrep/geometry.hpp"
#include "gen.hpp"

using namespace diffrep::geometry;

namespace {

GroupPoint gp(double x, double y, double z) { return GroupPoint{{x}, {y}, z}; }

// 3x3 upper-triangular matrix of a point of H_1.
Eigen::Matrix3d matrix_of(const GroupPoint& p) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 1) = p.x[0];
    m(0, 2) = p.z;
    m(1, 2) = p.y[0];
    return m;
}

GroupPoint from_matrix(const Eigen::Matrix3d& m) { return gp(m(0, 1), m(1, 2), m(0, 2)); }

}  // namespace

TEST_CASE("group_mul hand values") {
    CHECK(group_mul(gp(1, 0, 0), gp(0, 1, 0)).coords() == std::vector<double>{1, 1, 1});
    CHECK(group_mul(gp(0, 1, 0), gp(1, 0, 0)).coords() == std::vector<double>{1, 1, 0});
    const GroupPoint u = gp(0.3, -1.2, 2.5);
    CHECK(group_mul(u, GroupPoint::identity(1)).coords() == u.coords());
    CHECK(group_mul(GroupPoint::identity(1), u).coords() == u.coords());
}

TEST_CASE("group_mul agrees with the matrix product") {
    std::mt19937_64 rng(1);
    for (int k = 0; k < 200; ++k) {
        const GroupPoint u = gen::point(rng, 1), v = gen::point(rng, 1);
        const GroupPoint m = from_matrix(matrix_of(u) * matrix_of(v));
        CHECK(gen::max_diff(group_mul(u, v).coords(), m.coords()) <= 1e-13);
        const GroupPoint mi = from_matrix(matrix_of(u).inverse());
        CHECK(gen::max_diff(group_inv(u).coords(), mi.coords()) <= 1e-12);
    }
}

TEST_CASE("group_mul rejects mismatched n") {
    CHECK_THROWS(group_mul(GroupPoint::identity(1), GroupPoint::identity(2)));
}

TEST_CASE("group_inv") {
    CHECK(group_inv(gp(1, 2, 3)).coords() == std::vector<double>{-1, -2, -1});
    CHECK(group_inv(GroupPoint::identity(2)).coords() == GroupPoint::identity(2).coords());
    std::mt19937_64 rng(2);
    for (std::size_t n = 1; n <= 4; ++n)
        for (int k = 0; k < 50; ++k) {
            const GroupPoint u = gen::point(rng, n);
            CHECK(gen::max_diff(group_inv(group_inv(u)).coords(), u.coords()) <= 1e-14);
            CHECK(gen::max_abs(group_mul(u, group_inv(u)).coords()) <= 1e-14);
            CHECK(gen::max_abs(group_mul(group_inv(u), u).coords()) <= 1e-14);
        }
}

TEST_CASE("associativity on 1000 triples") {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
        const GroupPoint u = gen::point(rng, n), v = gen::point(rng, n), w = gen::point(rng, n);
        const auto a = group_mul(group_mul(u, v), w).coords();
        const auto b = group_mul(u, group_mul(v, w)).coords();
        worst = std::max(worst, gen::max_diff(a, b) / std::max(1.0, gen::max_abs(a)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("exp and log") {
    CHECK(exp_map(LieVector{{1}, {1}, 0}).coords() == std::vector<double>{1, 1, 0.5});
    CHECK(exp_map(LieVector{{0}, {0}, 2.5}).coords() == std::vector<double>{0, 0, 2.5});
    std::mt19937_64 rng(4);
    for (std::size_t n = 1; n <= 3; ++n)
        for (int k = 0; k < 50; ++k) {
            const LieVector v = LieVector::from_coords(gen::vec(rng, 2 * n + 1, 1.5));
            LieVector mv = v;
            for (auto& a : mv.a) a = -a;
            for (auto& b : mv.b) b = -b;
            mv.c = -mv.c;
            CHECK(gen::max_abs(group_mul(exp_map(v), exp_map(mv)).coords()) <= 1e-14);
            CHECK(gen::max_diff(log_map(exp_map(v)).coords(), v.coords()) <= 1e-14);
            // One-parameter subgroup: exp(sv) exp(tv) = exp((s+t)v).
            LieVector sv = v, tv = v, stv = v;
            for (std::size_t i = 0; i < n; ++i) {
                sv.a[i] *= 0.3, sv.b[i] *= 0.3, tv.a[i] *= 0.5, tv.b[i] *= 0.5, stv.a[i] *= 0.8, stv.b[i] *= 0.8;
            }
            sv.c *= 0.3, tv.c *= 0.5, stv.c *= 0.8;
            CHECK(gen::max_diff(group_mul(exp_map(sv), exp_map(tv)).coords(), exp_map(stv).coords()) <= 1e-14);
        }
}

TEST_CASE("alpha0 and d_alpha0") {
    CHECK(alpha0(gp(0, 2, 0), TangentVector{{1, 0, 0}}) == -2.0);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const GroupPoint p = gen::point(rng, 2);
        CHECK(alpha0(p, TangentVector::unit(5, 4)) == 1.0);
        GroupPoint q = p;
        q.y.assign(2, 0.0);
        const TangentVector v = gen::tangent(rng, 5);
        CHECK(alpha0(q, v) == v.components[4]);
        const TangentVector w = gen::tangent(rng, 5);
        CHECK(d_alpha0(p, v, v) == 0.0);
        CHECK(d_alpha0(p, v, w) == doctest::Approx(-d_alpha0(p, w, v)).epsilon(1e-15));
        CHECK(d_alpha0(p, TangentVector::unit(5, 4), w) == 0.0);
        CHECK(d_alpha0(p, v, w) == d_alpha0(GroupPoint::identity(2), v, w));
    }
    CHECK(d_alpha0(GroupPoint::identity(1), TangentVector::unit(3, 0), TangentVector::unit(3, 1)) == 1.0);
    CHECK_THROWS(alpha0(GroupPoint::identity(1), TangentVector{{1, 0}}));
}

TEST_CASE("Reeb field") {
    std::mt19937_64 rng(6);
    for (std::size_t n = 1; n <= 3; ++n) {
        const GroupPoint p = gen::point(rng, n);
        const TangentVector R = reeb_field(p);
        CHECK(R.components == TangentVector::unit(2 * n + 1, 2 * n).components);
        CHECK(alpha0(p, R) == 1.0);
        for (int k = 0; k < 10; ++k) CHECK(d_alpha0(p, R, gen::tangent(rng, 2 * n + 1)) == 0.0);
    }
}

TEST_CASE("alpha0 is right invariant") {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
        const GroupPoint p = gen::point(rng, n), g = gen::point(rng, n);
        const TangentVector v = gen::tangent(rng, 2 * n + 1);
        const Eigen::MatrixXd J = right_translation_jacobian(g);
        const Eigen::VectorXd Jv = J * Eigen::Map<const Eigen::VectorXd>(v.components.data(), static_cast<Eigen::Index>(v.size()));
        const TangentVector pushed{std::vector<double>(Jv.data(), Jv.data() + Jv.size())};
        worst = std::max(worst, std::abs(alpha0(p, v) - alpha0(group_mul(p, g), pushed)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("translation Jacobians match finite differences and are unimodular") {
    std::mt19937_64 rng(8);
    for (std::size_t n = 1; n <= 4; ++n) {
        const GroupPoint g = gen::point(rng, n), p = gen::point(rng, n);
        const Eigen::MatrixXd R = right_translation_jacobian(g), L = left_translation_jacobian(g);
        CHECK(std::abs(R.determinant() - 1.0) <= 1e-12);
        CHECK(std::abs(L.determinant() - 1.0) <= 1e-12);
        // Both maps are affine, so a unit difference quotient is exact up to rounding.
        const auto base = p.coords();
        for (std::size_t j = 0; j < 2 * n + 1; ++j) {
            auto q = base;
            q[j] += 1.0;
            const auto dr = group_mul(GroupPoint::from_coords(q), g).coords();
            const auto r0 = group_mul(p, g).coords();
            const auto dl = group_mul(g, GroupPoint::from_coords(q)).coords();
            const auto l0 = group_mul(g, p).coords();
            for (std::size_t i = 0; i < 2 * n + 1; ++i) {
                CHECK(dr[i] - r0[i] == doctest::Approx(R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))).epsilon(1e-12).scale(1.0));
                CHECK(dl[i] - l0[i] == doctest::Approx(L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))).epsilon(1e-12).scale(1.0));
            }
        }
    }
}

TEST_CASE("dilation") {
    const auto d = dilation(std::log(2.0), gp(1, 1, 1)).coords();
    CHECK(d[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(d[2] == doctest::Approx(4.0).epsilon(1e-15));
    std::mt19937_64 rng(9);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
        const GroupPoint u = gen::point(rng, n), v = gen::point(rng, n);
        const double t = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        const double s = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
        CHECK(dilation(0.0, u).coords() == u.coords());
        CHECK(gen::max_diff(dilation(t, group_mul(u, v)).coords(),
                            group_mul(dilation(t, u), dilation(t, v)).coords()) <= 1e-12);
        CHECK(gen::max_diff(dilation(t, dilation(s, u)).coords(), dilation(t + s, u).coords()) <= 1e-12);
    }
}

TEST_CASE("omega0") {
    CHECK(omega0(TangentVector{{1, 0}}, TangentVector{{0, 1}}) == 1.0);
    std::mt19937_64 rng(10);
    for (std::size_t n = 1; n <= 4; ++n) {
        const TangentVector u = gen::tangent(rng, 2 * n), v = gen::tangent(rng, 2 * n);
        CHECK(omega0(u, u) == 0.0);
        const Eigen::MatrixXd O = omega_matrix(n);
        const auto U = Eigen::Map<const Eigen::VectorXd>(u.components.data(), static_cast<Eigen::Index>(2 * n));
        const auto V = Eigen::Map<const Eigen::VectorXd>(v.components.data(), static_cast<Eigen::Index>(2 * n));
        CHECK(omega0(u, v) == doctest::Approx(U.dot(O * V)).epsilon(1e-14));
        CHECK((O * O + Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n))).norm() == 0.0);
    }
    CHECK_THROWS(omega0(TangentVector{{1, 0}}, TangentVector{{1, 0, 0}}));
}

TEST_CASE("nondegeneracy of omega0 and the contact pairing") {
    std::mt19937_64 rng(11);
    for (std::size_t n = 1; n <= 4; ++n) {
        Eigen::JacobiSVD<Eigen::MatrixXd> so(omega_matrix(n));
        CHECK(so.singularValues().minCoeff() >= 0.5);
        for (int k = 0; k < 40; ++k) {
            // The pairing degenerates like 1/|y| for large y; the 0.5 floor holds exactly for |y| <= 1.5.
            GroupPoint p = gen::point(rng, n, 1.5);
            double ny = 0.0;
            for (double v : p.y) ny += v * v;
            ny = std::sqrt(ny);
            if (ny > 1.5)
                for (double& v : p.y) v *= 1.5 / ny;
            const double r = std::min(ny, 1.5);
            Eigen::JacobiSVD<Eigen::MatrixXd> sc(contact_pairing_matrix(p));
            const double smin = sc.singularValues().minCoeff();
            CHECK(smin == doctest::Approx((std::sqrt(r * r + 4.0) - r) / 2.0).epsilon(1e-12));
            CHECK(smin >= 0.5 - 1e-12);
        }
    }
}
