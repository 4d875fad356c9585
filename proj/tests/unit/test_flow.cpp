#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "diffrep/errors.hpp"
#include "diffrep/flow.hpp"
#include "gen.hpp"

using namespace diffrep;
using namespace diffrep::flow;

namespace {

const fields::VarContext H1{1, true};

std::shared_ptr<const fields::VectorField> dilation_field() {
    return std::make_shared<fields::VectorField>(fields::contact_field(fields::ScalarField::parse("2*z - x1*y1", H1)));
}

double dilation_error(double step, const std::vector<std::vector<double>>& pts) {
    const FlowMap m(dilation_field(), 1.0, step);
    double e = 0.0;
    for (const auto& p : pts) {
        const auto exact = geometry::dilation(1.0, geometry::GroupPoint::from_coords(p)).coords();
        e = std::max(e, gen::max_diff(m.apply(p), exact));
    }
    return e;
}

ContactTranslationConfig contact_cfg() {
    ContactTranslationConfig c;
    c.V_radius = 0.1;
    c.W_box = Box::cube(3, 0.3);
    c.outer_box = Box::cube(3, 1.5);
    return c;
}

}  // namespace

TEST_CASE("constant field flows are exact translations") {
    auto X = std::make_shared<fields::VectorField>(fields::explicit_field(H1, std::vector<std::string>{"0.3", "0 - 0.2", "0.7"}));
    const FlowMap m(X, 1.0, 0.1);
    std::mt19937_64 rng(51);
    for (int k = 0; k < 10; ++k) {
        const auto p = gen::vec(rng, 3, 1.0);
        std::vector<double> J;
        const auto q = m.apply(p, J);
        CHECK(gen::max_diff(q, {p[0] + 0.3, p[1] - 0.2, p[2] + 0.7}) <= 1e-14);
        CHECK(gen::max_diff(J, {1, 0, 0, 0, 1, 0, 0, 0, 1}) == 0.0);
    }
}

TEST_CASE("dilation flow is fourth order") {
    std::mt19937_64 rng(52);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 10; ++k) pts.push_back(gen::vec(rng, 3, 1.0));
    const double e1 = dilation_error(0.1, pts), e2 = dilation_error(0.05, pts), e3 = dilation_error(0.025, pts);
    CHECK(e1 / e2 >= 14.0);
    CHECK(e1 / e2 <= 18.0);
    CHECK(e2 / e3 >= 14.0);
    CHECK(e2 / e3 <= 18.0);
}

TEST_CASE("flow Jacobian matches finite differences and the closed form") {
    const FlowMap m(dilation_field(), 0.7, 1e-2);
    std::mt19937_64 rng(53);
    for (int k = 0; k < 10; ++k) {
        const auto p = gen::vec(rng, 3, 1.0);
        std::vector<double> J;
        m.apply(p, J);
        const double et = std::exp(0.7);
        CHECK(gen::max_diff(J, {et, 0, 0, 0, et, 0, 0, 0, et * et}) <= 1e-8);
    }
    auto X = std::make_shared<fields::VectorField>(
        fields::hamiltonian_field(fields::ScalarField::parse("(x1^2*y1 + sin(y1)) * bump(0.8, 2)", {1, false})));
    const FlowMap h(X, 1.0, 1e-2);
    for (int k = 0; k < 10; ++k) {
        const auto p = gen::vec(rng, 2, 1.2);
        std::vector<double> J;
        h.apply(p, J);
        const double e = 1e-6;
        for (std::size_t j = 0; j < 2; ++j) {
            auto a = p, b = p;
            a[j] += e;
            b[j] -= e;
            const auto qa = h.apply(a), qb = h.apply(b);
            for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs((qa[i] - qb[i]) / (2 * e) - J[i * 2 + j]) <= 1e-6);
        }
        Eigen::Map<Eigen::Matrix<double, 2, 2, Eigen::RowMajor>> M(J.data());
        CHECK(std::abs(M.determinant() - 1.0) <= 1e-6);
    }
}

TEST_CASE("inverse and composition") {
    const FlowMap m(dilation_field(), 0.5, 1e-2);
    std::mt19937_64 rng(54);
    for (int k = 0; k < 10; ++k) {
        const auto p = gen::vec(rng, 3, 1.0);
        CHECK(gen::max_diff(m.inverse().apply(m.apply(p)), p) <= 1e-9);
        const FlowMap c = compose(m, m);
        CHECK(gen::max_diff(c.apply(p), m.apply(m.apply(p))) == 0.0);
    }
    CHECK(FlowMap::identity(3).is_identity());
    CHECK(m.moving_radius() == std::numeric_limits<double>::infinity());
}

TEST_CASE("symplectic translation") {
    std::mt19937_64 rng(55);
    const std::vector<double> x{0.5, 0.5};
    const FlowMap tau = translation_symplecto(x, 1.0, 4.0);
    CHECK(tau.moving_radius() <= 4.0);
    std::vector<std::vector<double>> ball;
    for (int k = 0; k < 100; ++k) {
        auto y = gen::vec(rng, 2, 1.0);
        if (std::hypot(y[0], y[1]) >= 1.0) continue;
        CHECK(gen::max_diff(tau.apply(y), {y[0] + 0.5, y[1] + 0.5}) <= 1e-8);
        ball.push_back(y);
    }
    CHECK(check_structure(tau, StructureKind::Symplectic, ball, 1e-12).passed);
    for (int k = 0; k < 20; ++k) {
        const double r = 4.0 + k * 0.1, a = k;
        const std::vector<double> y{r * std::cos(a), r * std::sin(a)};
        CHECK(tau.apply(y) == y);
    }
    const FlowMap fine = translation_symplecto(x, 1.0, 4.0, 1e-3);
    std::vector<std::vector<double>> annulus;
    for (int k = 0; k < 20; ++k) {
        const double r = 3.0 + 0.05 * k, a = 0.7 * k;
        annulus.push_back({r * std::cos(a), r * std::sin(a)});
    }
    const StructureReport s = check_structure(fine, StructureKind::Symplectic, annulus, 1e-6);
    CHECK(s.passed);
    CHECK(s.residuals.size() == annulus.size());

    const FlowMap zero = translation_symplecto(std::vector<double>{0.0, 0.0}, 1.0, 4.0);
    CHECK(gen::max_diff(zero.apply(std::vector<double>{0.3, 2.5}), {0.3, 2.5}) == 0.0);
    CHECK_THROWS_AS(translation_symplecto(std::vector<double>{2.5, 0.0}, 1.0, 4.0), PreconditionError);
    CHECK_THROWS_AS(translation_symplecto(x, 1.0, 2.5), PreconditionError);
}

TEST_CASE("contact translation") {
    std::mt19937_64 rng(56);
    const auto cfg = contact_cfg();
    const auto x = geometry::exp_map(geometry::LieVector::from_coords(std::vector<double>{0.12, -0.08, 0.05}));
    const FlowMap rho = translation_contacto(x, cfg);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 50; ++k) {
        const auto y = gen::vec(rng, 3, 0.1);
        const auto yx = geometry::group_mul(geometry::GroupPoint::from_coords(y), x).coords();
        CHECK(gen::max_diff(rho.apply(y), yx) <= 1e-6);
        pts.push_back(y);
        pts.push_back(gen::vec(rng, 3, 1.2));
    }
    CHECK(check_structure(rho, StructureKind::Contact, pts, 1e-6).passed);
    for (int k = 0; k < 20; ++k) {
        auto y = gen::vec(rng, 3, 1.0);
        y[k % 3] = (k % 2 ? 1.0 : -1.0) * (1.6 + 0.05 * k);
        CHECK(rho.apply(y) == y);
    }

    // Composition: rho_x o rho_x' (y) = y x' x while everything stays in V.
    const auto x2 = geometry::exp_map(geometry::LieVector::from_coords(std::vector<double>{-0.05, 0.04, 0.02}));
    const FlowMap both = compose(rho, translation_contacto(x2, cfg));
    for (int k = 0; k < 10; ++k) {
        const auto y = gen::vec(rng, 3, 0.02);
        const auto want =
            geometry::group_mul(geometry::group_mul(geometry::GroupPoint::from_coords(y), x2), x).coords();
        CHECK(gen::max_diff(both.apply(y), want) <= 1e-6);
    }

    const FlowMap id = translation_contacto(geometry::GroupPoint::identity(1), cfg);
    CHECK(gen::max_diff(id.apply(std::vector<double>{0.05, 0.02, -0.03}), {0.05, 0.02, -0.03}) == 0.0);
    CHECK_THROWS_AS(translation_contacto(geometry::exp_map(geometry::LieVector::from_coords(std::vector<double>{0.5, 0, 0})), cfg),
                    PreconditionError);
    auto bad = cfg;
    bad.outer_box = Box::cube(3, 0.3);
    CHECK_THROWS_AS(check_contact_configuration(x, bad), PreconditionError);
}
