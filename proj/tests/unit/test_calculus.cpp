#include <doctest.h>

#include <cmath>

#include "diffrep/calculus.hpp"
#include "diffrep/errors.hpp"
#include "diffrep/geometry.hpp"
#include "diffrep/inputs.hpp"
#include "gen.hpp"

using namespace diffrep;
using namespace diffrep::calculus;

namespace {

SampledFunction indicator(const GridSpec& g, double a, double b) {
    return sample([](auto) { return cplx(1.0); }, g, Box({a}, {b}));
}

// Brute-force quadrature of (f *_H g)(u) = sum_v w(v) f(v) g(v^{-1} u), with g
// read through its interpolant. Shares nothing with the convolution code.
cplx heis_oracle(const SampledFunction& f, const SampledFunction& g, std::span<const double> u) {
    const GridSpec& gr = f.grid();
    const auto U = geometry::GroupPoint::from_coords(u);
    cplx acc = 0.0;
    for (IndexIterator it(f.support_nodes()); !it.done(); it.next()) {
        const std::size_t flat = gr.flat(it.index());
        if (f[flat] == cplx{}) continue;
        const auto v = geometry::GroupPoint::from_coords(gr.node(flat));
        const auto q = geometry::group_mul(geometry::group_inv(v), U).coords();
        acc += gr.weight(it.index()) * f[flat] * g.evaluate(q);
    }
    return acc;
}

// Fiberwise z-moment computed straight from the node values.
double moment_sup(const SampledFunction& f, int k) {
    const GridSpec& g = f.grid();
    const std::size_t za = g.dim() - 1;
    const std::size_t nz = g.counts()[za];
    double worst = 0.0;
    for (std::size_t col = 0; col < g.size(); col += nz) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < nz; ++j) {
            const double w = (j == 0 || j + 1 == nz ? 0.5 : 1.0) * g.spacing(za);
            acc += w * std::pow(g.coord(za, static_cast<std::ptrdiff_t>(j)), k) * f[col + j];
        }
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

int moment_order(const SampledFunction& f) {
    const GridSpec& g = f.grid();
    const double zext = f.support().hi.back() - f.support().lo.back();
    for (int j = 0; j <= kDefaultKMax; ++j) {
        const double thr = kEpsS * f.max_abs() * std::pow(std::max(zext, g.spacing(g.dim() - 1)), j + 1);
        if (moment_sup(f, j) > thr) return j;
    }
    return -1;
}

}  // namespace

TEST_CASE("op_T_1d on a step pair gives a tent") {
    const std::size_t N = 201;
    const GridSpec g({-0.5}, {2.5}, {N});
    const double h = g.spacing(0);
    std::vector<cplx> v(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        const double t = g.coord(0, static_cast<std::ptrdiff_t>(i));
        if (std::abs(t) < 1e-12 || std::abs(t - 1.0) < 1e-12 || std::abs(t - 2.0) < 1e-12)
            v[i] = std::abs(t - 1.0) < 1e-12 ? 0.0 : (t < 0.5 ? 0.5 : -0.5);
        else if (t > 0.0 && t < 1.0)
            v[i] = 1.0;
        else if (t > 1.0 && t < 2.0)
            v[i] = -1.0;
    }
    const SampledFunction f(g, Box({0.0}, {2.0}), v);
    const SampledFunction T = op_T_1d(f, {0.0, 2.0});
    CHECK(T.support().hi[0] <= 2.0 + 1e-12);
    for (std::size_t i = 0; i < N; ++i) {
        const double t = g.coord(0, static_cast<std::ptrdiff_t>(i));
        const double tent = std::max(0.0, 1.0 - std::abs(t - 1.0));
        CHECK(std::abs(T[i] - tent) <= h);
        if (t > 2.0 + 1e-12) CHECK(T[i] == cplx(0.0));
    }
    CHECK(op_T_1d(cplx(0.0) * f, {0.0, 2.0}).max_abs() == 0.0);
    CHECK_THROWS_AS(op_T_1d(f, {0.5, 2.0}), PreconditionError);
}

TEST_CASE("op_T_1d norm bound") {
    std::mt19937_64 rng(31);
    const GridSpec g({-0.1}, {2.1}, {221});
    const double a = 0.0, b = 2.0;
    const double K = (b - a) / std::sqrt(2.0);
    for (int k = 0; k < 20; ++k) {
        // psi(t) - psi(t - s) with s a whole number of cells has zero discrete integral.
        auto bumps = inputs::random_bumps_in_box(rng, Box({0.0}, {1.2}), 2);
        auto shifted = bumps;
        for (auto& bb : shifted) bb.center[0] += 0.8, bb.amplitude = -bb.amplitude;
        bumps.insert(bumps.end(), shifted.begin(), shifted.end());
        const SampledFunction f = inputs::sample_bumps(bumps, g, Box({a}, {b}));
        CHECK(std::abs(integrate(f)) <= 1e-12 * f.max_abs());
        const SampledFunction T = op_T_1d(f, {a, b});
        CHECK(T.support().hi[0] <= b + 1e-12);
        CHECK(l2_norm(T) <= K * l2_norm(f));
    }
}

TEST_CASE("op_S") {
    std::mt19937_64 rng(32);
    const GridSpec g = GridSpec::cube(3, 1.0, 21);
    const std::vector<inputs::Bump> phi = inputs::random_bumps_in_box(rng, Box::cube(2, 0.8), 2);
    const SampledFunction odd = inputs::z_odd_product(g, phi, 0.7);
    CHECK(op_S(odd).max_abs() <= 1e-12 * odd.max_abs());
    CHECK(op_S(odd).dim() == 2);

    // Separable phi(x, y) psi(z): S f = phi * int psi.
    inputs::Bump psi{{0.1}, 0.6, 4, 1.0};
    const SampledFunction sep = sample(
        [&](auto p) { return inputs::bump_sum(phi)(p) * inputs::bump_value(psi, p.subspan(2)); }, g, g.box());
    const GridSpec zline({-1.0}, {1.0}, {21});
    const cplx ipsi = integrate(sample([&](auto p) { return inputs::bump_value(psi, p); }, zline, zline.box()));
    const SampledFunction sf = op_S(sep);
    const GridSpec& xg = sf.grid();
    for (std::size_t i = 0; i < xg.size(); ++i) CHECK(std::abs(sf[i] - inputs::bump_sum(phi)(xg.node(i)) * ipsi) <= 1e-13);

    const SampledFunction a = inputs::sample_bumps(inputs::random_bumps_in_box(rng, Box::cube(3, 0.9), 3), g, Box::cube(3, 0.9));
    const SampledFunction b = inputs::sample_bumps(inputs::random_bumps_in_box(rng, Box::cube(3, 0.9), 3), g, Box::cube(3, 0.9));
    const cplx s(0.3, -1.2), t(2.0, 0.5);
    CHECK(max_abs_difference(op_S(s * a + t * b), s * op_S(a) + t * op_S(b)) <= 1e-13);
}

TEST_CASE("op_T_heis on a planted derivative") {
    std::mt19937_64 rng(33);
    const std::vector<inputs::Bump> phi = inputs::random_bumps_in_box(rng, Box::cube(2, 0.6), 2);
    const std::vector<inputs::Bump> psi{{{0.05}, 0.5, 4, 1.0}};
    double prev = 0.0;
    for (std::size_t res : {33u, 65u}) {
        const GridSpec g = GridSpec::cube(3, 1.0, res);
        const SampledFunction f = inputs::planted_order(g, phi, psi, 1);
        const SampledFunction base = inputs::planted_order(g, phi, psi, 0);
        const SampledFunction T = op_T_heis(f);
        CHECK(T.support().contains(*T.exact_support(), 1e-12));
        const double err = max_abs_difference(T, base) / base.max_abs();
        CHECK(err <= (res == 33 ? 5e-2 : 1e-2));
        if (prev > 0.0) CHECK(prev / err >= 3.5);
        prev = err;
        // S(T f) = phi * int psi.
        CHECK(max_abs_difference(op_S(T), op_S(base)) <= 1e-2 * op_S(base).max_abs());
    }
    const GridSpec g = GridSpec::cube(3, 1.0, 17);
    CHECK(op_T_heis(SampledFunction::zeros(g)).max_abs() == 0.0);
    const SampledFunction nz = inputs::planted_order(g, phi, psi, 0);
    try {
        op_T_heis(nz);
        FAIL("expected SNotZeroError");
    } catch (const SNotZeroError& e) {
        CHECK(e.max_abs_s() == doctest::Approx(op_S(nz).max_abs()));
        CHECK(e.max_abs_s() > e.threshold());
    }
}

TEST_CASE("moment_profile") {
    std::mt19937_64 rng(34);
    const GridSpec g = GridSpec::cube(3, 1.0, 33);
    const std::vector<inputs::Bump> phi = inputs::random_bumps_in_box(rng, Box::cube(2, 0.6), 2);
    const SampledFunction f = inputs::sample_bumps(inputs::random_bumps_in_box(rng, Box::cube(3, 0.8), 3), g, Box::cube(3, 0.8));
    CHECK(max_abs_difference(moment_profile(f, 0), op_S(f)) == 0.0);
    const SampledFunction odd = inputs::z_odd_product(g, phi, 0.6);
    for (int k : {0, 2, 4}) CHECK(moment_profile(odd, k).max_abs() <= 1e-13 * odd.max_abs());
    const std::vector<inputs::Bump> psi{{{0.0}, 0.5, 4, 1.0}};
    const SampledFunction d1 = inputs::planted_order(g, phi, psi, 1);
    const SampledFunction d0 = inputs::planted_order(g, phi, psi, 0);
    // int z psi'(z) dz = -int psi.
    CHECK(max_abs_difference(moment_profile(d1, 1), -1.0 * op_S(d0)) <= 1e-12 * op_S(d0).max_abs());
    CHECK_THROWS_AS(moment_profile(f, -1), PreconditionError);
}

TEST_CASE("minimal_k against the moment oracle on 20 planted inputs") {
    std::mt19937_64 rng(35);
    const GridSpec g = GridSpec::cube(3, 1.0, 33);
    int mismatches = 0;
    for (int i = 0; i < 20; ++i) {
        const int m = i % 5;
        const SampledFunction f = inputs::random_planted(rng, g, Box::cube(3, 0.6), m);
        const MinimalKResult r = minimal_k(f);
        const int oracle = moment_order(f);
        mismatches += (r.k != oracle) + (r.k != m);
        CHECK(r.s_norms.size() == static_cast<std::size_t>(r.k + 1));
        // S T^k f = (-1)^k / k! times the k-th moment once lower moments vanish.
        const double fact = std::tgamma(r.k + 1.0);
        const SampledFunction mk = (std::pow(-1.0, r.k) / fact) * moment_profile(f, r.k);
        CHECK(max_abs_difference(r.result, mk) <= 1e-6 * mk.max_abs());
    }
    CHECK(mismatches == 0);
    CHECK_THROWS_AS(minimal_k(SampledFunction::zeros(g)), KMaxExceeded);
}

TEST_CASE("conv_euclid") {
    const GridSpec g({-0.5}, {1.5}, {201});
    const SampledFunction ind = indicator(g, 0.0, 1.0);
    const SampledFunction tent = conv_euclid(ind, ind, ConvMethod::Direct);
    const double h = g.spacing(0);
    for (std::size_t i = 0; i < tent.grid().size(); ++i) {
        const double t = tent.grid().coord(0, static_cast<std::ptrdiff_t>(i));
        CHECK(std::abs(tent[i] - std::max(0.0, 1.0 - std::abs(t - 1.0))) <= 2 * h);
    }

    std::mt19937_64 rng(36);
    const GridSpec g2 = GridSpec::cube(2, 1.0, 33);
    for (int k = 0; k < 5; ++k) {
        const Box bf({-0.9, -0.4}, {0.3, 0.8}), bg({-0.2, -0.9}, {0.9, 0.1});
        const SampledFunction f = inputs::sample_bumps(inputs::random_bumps_in_box(rng, bf, 3), g2, bf);
        const SampledFunction e = inputs::sample_bumps(inputs::random_bumps_in_box(rng, bg, 3), g2, bg);
        const SampledFunction fast = conv_euclid(f, e, ConvMethod::Fft);
        const SampledFunction direct = conv_euclid(f, e, ConvMethod::Direct);
        CHECK(max_abs_difference(fast, direct) <= 1e-10 * direct.max_abs());
        CHECK(std::abs(integrate(direct) - integrate(f) * integrate(e)) <= 1e-8 * std::abs(integrate(f) * integrate(e)) + 1e-14);
        const Box mk = minkowski_sum(bf, bg);
        CHECK(mk.contains(*direct.exact_support(), 1e-9));
    }

    // Narrow unit-mass bump is an approximate identity.
    const GridSpec g3 = GridSpec::cube(2, 1.0, 65);
    const SampledFunction e = inputs::sample_bumps(inputs::random_bumps_in_box(rng, Box::cube(2, 0.7), 2), g3, Box::cube(2, 0.7));
    double prev = 0.0;
    for (double w : {0.2, 0.1}) {
        const std::vector<inputs::Bump> nb{{{0.0, 0.0}, w, 4, 1.0}};
        SampledFunction d = inputs::sample_bumps(nb, g3, Box::cube(2, w));
        d = (1.0 / integrate(d)) * d;
        const double err = max_abs_difference(conv_euclid(d, e), e) / e.max_abs();
        if (prev > 0.0) CHECK(prev / err >= 3.0);
        prev = err;
    }
    CHECK_THROWS_AS(conv_euclid(ind, indicator(GridSpec({-0.5}, {1.5}, {101}), 0.0, 1.0)), GridMismatch);
}

TEST_CASE("conv_heis matches a brute-force oracle at 17^3") {
    std::mt19937_64 rng(37);
    const GridSpec g = GridSpec::cube(3, 1.0, 17);
    const Box bf({-0.5, -0.25, -0.5}, {0.25, 0.5, 0.25}), bg({-0.25, -0.5, -0.25}, {0.5, 0.25, 0.5});
    const SampledFunction f = inputs::sample_bumps(inputs::random_bumps_in_box(rng, bf, 3), g, bf);
    const SampledFunction e = inputs::sample_bumps(inputs::random_bumps_in_box(rng, bg, 3), g, bg);
    const double scale = l2_norm(f) * l2_norm(e);
    for (ConvMethod m : {ConvMethod::Direct, ConvMethod::Fft}) {
        const SampledFunction c = conv_heis(f, e, m);
        const GridSpec& cg = c.grid();
        double worst = 0.0;
        for (std::size_t i = 0; i < cg.size(); ++i) worst = std::max(worst, std::abs(c[i] - heis_oracle(f, e, cg.node(i))));
        CHECK(worst <= 1e-10 * scale);
        // Linear interpolation in z spreads the support by one cell.
        Box pb = heis_product_box(bf, bg);
        pb.lo[2] -= g.spacing(2);
        pb.hi[2] += g.spacing(2);
        CHECK(pb.contains(*c.exact_support(), 1e-9));
        CHECK(c.support().contains(*c.exact_support(), 1e-12));
    }
    // Noncommutative: f *_H g differs from g *_H f in general.
    CHECK(max_abs_difference(conv_heis(f, e), conv_heis(e, f)) > 1e-3 * scale);
}

TEST_CASE("heis_product_box covers sampled products") {
    std::mt19937_64 rng(38);
    const Box a({-0.5, 0.1, -0.2}, {0.3, 0.6, 0.4}), b({-0.2, -0.7, 0.0}, {0.8, -0.1, 0.3});
    const Box pb = heis_product_box(a, b);
    for (int k = 0; k < 500; ++k) {
        std::vector<double> u(3), v(3);
        for (int i = 0; i < 3; ++i) {
            u[i] = std::uniform_real_distribution<double>(a.lo[i], a.hi[i])(rng);
            v[i] = std::uniform_real_distribution<double>(b.lo[i], b.hi[i])(rng);
        }
        const auto p = geometry::group_mul(geometry::GroupPoint::from_coords(u), geometry::GroupPoint::from_coords(v));
        CHECK(pb.contains(p.coords(), 1e-12));
    }
}

TEST_CASE("S intertwines Heisenberg and Euclidean convolution") {
    std::mt19937_64 rng(39);
    const GridSpec g = GridSpec::cube(3, 1.0, 33);
    const Box region = Box::cube(3, 0.5);
    const SampledFunction f = inputs::random_planted(rng, g, region, 0);
    const SampledFunction e = inputs::random_planted(rng, g, region, 0);
    const SampledFunction lhs = op_S(conv_heis(f, e));
    const SampledFunction rhs = conv_euclid(op_S(f), op_S(e));
    CHECK(max_abs_difference(lhs, rhs) <= 5e-3 * l2_norm(f) * l2_norm(e));

    const SampledFunction f1 = inputs::random_planted(rng, g, region, 1);
    const SampledFunction t_left = op_T_heis(conv_heis(f1, e));
    CHECK(max_abs_difference(conv_heis(op_T_heis(f1), e), t_left) <= 5e-3 * l2_norm(f1) * l2_norm(e));
    const SampledFunction e1 = inputs::random_planted(rng, g, region, 1);
    CHECK(max_abs_difference(conv_heis(f, op_T_heis(e1)), op_T_heis(conv_heis(f, e1))) <=
          5e-3 * l2_norm(f) * l2_norm(e1));
}

TEST_CASE("non-vanishing certificate") {
    std::mt19937_64 rng(40);
    const GridSpec g = GridSpec::cube(3, 1.0, 33);
    const Box region = Box::cube(3, 0.5);
    SUBCASE("k = l = 1") {
        const SampledFunction f = inputs::random_planted(rng, g, region, 1);
        const SampledFunction e = inputs::random_planted(rng, g, region, 1);
        const WitnessReport w = nonvanishing_certificate(f, e);
        CHECK(w.passed);
        CHECK(w.diagnostics["k"] == 1);
        CHECK(w.diagnostics["l"] == 1);
        CHECK(w.diagnostics["chain_relative_residual"].get<double>() <= 5e-3);
    }
    SUBCASE("k = l = 0 reduces to the Euclidean peak") {
        const SampledFunction f = inputs::random_planted(rng, g, region, 0);
        const SampledFunction e = inputs::random_planted(rng, g, region, 0);
        const WitnessReport w = nonvanishing_certificate(f, e, {kDefaultKMax, false});
        const SampledFunction c = conv_euclid(op_S(f), op_S(e));
        CHECK(w.passed);
        CHECK(std::abs(w.value) == doctest::Approx(c.max_abs()).epsilon(1e-12));
    }
    SUBCASE("z-odd pair, two computation orders") {
        const std::vector<inputs::Bump> phi{{{0.1, -0.1}, 0.4, 4, 1.0}};
        const SampledFunction f = inputs::z_odd_product(g, phi, 0.4);
        const WitnessReport w = nonvanishing_certificate(f, f);
        CHECK(w.diagnostics["k"] == 1);
        const SampledFunction stf = op_S(op_T_heis(f));
        CHECK(std::abs(w.value) == doctest::Approx(conv_euclid(stf, stf).max_abs()).epsilon(1e-12));
        SampledFunction h = conv_heis(f, f);
        h = op_T_heis(op_T_heis(h));
        CHECK(max_abs_difference(op_S(h), conv_euclid(stf, stf)) <= 5e-3 * std::abs(w.value));
    }
}
