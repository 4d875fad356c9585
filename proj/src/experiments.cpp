#include "diffrep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "diffrep/calculus.hpp"
#include "diffrep/errors.hpp"
#include "diffrep/fields.hpp"
#include "diffrep/flow.hpp"
#include "diffrep/inputs.hpp"
#include "diffrep/representations.hpp"
#include "diffrep/serialize.hpp"

namespace diffrep::experiments {

namespace {

using geometry::GroupPoint;
using nlohmann::json;

double tol_or(const Config& cfg, double fallback) { return cfg.tol.value_or(fallback); }
std::size_t res_or(const Config& cfg, std::size_t fallback) { return cfg.res ? cfg.res : fallback; }

json config_json(const Config& cfg, std::size_t res) {
    json j;
    j["n"] = cfg.n;
    j["res"] = res;
    j["theta"] = cfg.theta;
    j["step"] = cfg.step;
    j["seed"] = cfg.seed;
    if (cfg.tol) j["tol"] = *cfg.tol;
    if (!cfg.f.empty()) j["f"] = cfg.f;
    if (!cfg.g.empty()) j["g"] = cfg.g;
    return j;
}

double norm2(std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

double dist_inf(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> uniform_point(std::mt19937_64& rng, std::size_t d, double half) {
    std::uniform_real_distribution<double> U(-half, half);
    std::vector<double> p(d);
    for (auto& v : p) v = U(rng);
    return p;
}

std::vector<double> ball_point(std::mt19937_64& rng, std::size_t d, double R) {
    for (;;) {
        std::vector<double> p = uniform_point(rng, d, R);
        if (norm2(p) < R) return p;
    }
}

// Point with rmin <= |p| <= rmax.
std::vector<double> shell_point(std::mt19937_64& rng, std::size_t d, double rmin, double rmax) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(rmin, rmax);
    std::vector<double> p(d);
    for (auto& v : p) v = N(rng);
    const double s = U(rng) / norm2(p);
    for (auto& v : p) v *= s;
    return p;
}

double l1_norm(const SampledFunction& f) {
    double acc = 0.0;
    const GridSpec& g = f.grid();
    for (IndexIterator it(f.support_nodes()); !it.done(); it.next())
        acc += g.weight(it.index()) * std::abs(f[g.flat(it.index())]);
    return acc;
}

double rel(double num, double den) { return den > 0.0 ? num / den : num; }

// DSL source sampled on the grid; support is the grid box cut to the
// expression's support radius.
SampledFunction sample_dsl(const std::string& src, const expr::VarContext& ctx, const GridSpec& grid) {
    auto field = std::make_shared<fields::ScalarField>(fields::ScalarField::parse(src, ctx));
    const double R = expr::support_radius(field->expression());
    Box support = grid.box();
    if (R < std::numeric_limits<double>::infinity()) {
        support = intersection(support, Box::cube(grid.dim(), R));
    }
    return sample([field](std::span<const double> p) { return cplx(field->value(p), 0.0); }, grid, support);
}

bool support_contained(const SampledFunction& f) {
    const std::optional<Box> e = f.exact_support();
    return !e || f.support().contains(*e, 1e-9 * (1.0 + f.support().max_norm()));
}

std::string dilation_generator(int n) {
    std::string s = "2*z";
    for (int i = 1; i <= n; ++i) s += " - x" + std::to_string(i) + "*y" + std::to_string(i);
    return s;
}

std::shared_ptr<const fields::VectorField> dilation_field(int n) {
    const expr::VarContext ctx{n, true};
    return std::make_shared<fields::VectorField>(
        fields::contact_field(fields::ScalarField::parse(dilation_generator(n), ctx)));
}

Box heis_region(int n, double half) { return Box::cube(static_cast<std::size_t>(2 * n + 1), half); }

flow::ContactTranslationConfig contact_config(int n, double step) {
    const auto d = static_cast<std::size_t>(2 * n + 1);
    flow::ContactTranslationConfig c;
    c.V_radius = 0.1;
    c.W_box = Box::cube(d, 0.3);
    c.outer_box = Box::cube(d, 1.5);
    c.step = step;
    return c;
}

std::vector<double> fixed_shift(std::size_t d, const std::vector<double>& pattern) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = pattern[i % pattern.size()] / std::sqrt(static_cast<double>(d / 2));
    return x;
}

// Shift with every component at a third of a coarse cell past a coarse node, so
// the interpolation error constant is the same on the coarse and the fine grid.
std::vector<double> snapped_shift(std::vector<double> x, double hc) {
    for (auto& v : x) v = (std::round(v / hc - 1.0 / 3.0) + 1.0 / 3.0) * hc;
    return x;
}

// Wide bumps centred near the origin, inside B(0, R).
std::vector<inputs::Bump> centred_bumps(std::mt19937_64& rng, std::size_t d, double R, int count) {
    std::vector<inputs::Bump> b = inputs::random_bumps_in_ball(rng, d, 0.05 * R, count);
    std::uniform_real_distribution<double> frac(0.85, 0.95);
    for (auto& x : b) x.radius = frac(rng) * R;
    return b;
}

// Sets check from a refinement pair: ratio above 3, or a fine residual at rounding level.
Check refinement_check(const std::string& name, double coarse, double fine) {
    if (fine <= 1e-12) return check_le(name + "_fine_residual", fine, 1e-12);
    return check_gt(name + "_refinement_ratio", coarse / fine, 3.0);
}

}  // namespace

void validate(const Config& cfg) {
    if (cfg.n < 1 || cfg.n > 4) throw PreconditionError("--n must be between 1 and 4");
    if (cfg.res != 0 && cfg.res < 9) throw PreconditionError("--res must be at least 9");
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) throw PreconditionError("--step must be positive");
    if (cfg.tol && !(*cfg.tol > 0.0)) throw PreconditionError("--tol must be positive");
    if (!std::isfinite(cfg.theta)) throw PreconditionError("--theta must be finite");
}

Report conv_euclid(const Config& cfg) {
    const std::size_t res = res_or(cfg, 33);
    const auto d = static_cast<std::size_t>(2 * cfg.n);
    Report r;
    r.command = "conv-euclid";
    r.inputs = config_json(cfg, res);
    std::mt19937_64 rng(cfg.seed);
    const GridSpec grid = GridSpec::cube(d, 1.0, res);
    const expr::VarContext ctx{cfg.n, false};
    const SampledFunction f = cfg.f.empty()
        ? inputs::sample_bumps(inputs::random_bumps_in_ball(rng, d, 1.0, 3), grid, grid.box())
        : sample_dsl(cfg.f, ctx, grid);
    const SampledFunction g = cfg.g.empty()
        ? inputs::sample_bumps(inputs::random_bumps_in_ball(rng, d, 1.0, 3), grid, grid.box())
        : sample_dsl(cfg.g, ctx, grid);

    const SampledFunction c = calculus::conv_euclid(f, g, calculus::ConvMethod::Fft);
    const double work = static_cast<double>(f.support_nodes().count()) * static_cast<double>(g.support_nodes().count());
    if (work <= 5e7) {
        const SampledFunction cd = calculus::conv_euclid(f, g, calculus::ConvMethod::Direct);
        r.add(check_le("fast_vs_direct", rel(max_abs_difference(c, cd), cd.max_abs()), tol_or(cfg, 1e-10)));
    }
    const double fub = std::abs(integrate(c) - integrate(f) * integrate(g));
    r.add(check_le("fubini", rel(fub, l1_norm(f) * l1_norm(g)), 1e-8));
    r.add(check_eq("support_within_minkowski_box", support_contained(c) ? 1.0 : 0.0, 1.0));
    r.results["grid"] = grid_to_json(c.grid());
    r.results["support"] = box_to_json(c.support());
    r.results["max_abs"] = c.max_abs();
    return r;
}

Report conv_heis(const Config& cfg) {
    const std::size_t res = res_or(cfg, 33);
    const auto d = static_cast<std::size_t>(2 * cfg.n + 1);
    Report r;
    r.command = "conv-heis";
    r.inputs = config_json(cfg, res);
    const double tol = tol_or(cfg, 5e-3);
    std::mt19937_64 rng(cfg.seed);
    const GridSpec grid = GridSpec::cube(d, 1.0, res);
    const Box region = heis_region(cfg.n, 0.5);
    const expr::VarContext ctx{cfg.n, true};
    const SampledFunction f0 = cfg.f.empty() ? inputs::random_planted(rng, grid, region, 0) : sample_dsl(cfg.f, ctx, grid);
    const SampledFunction g0 = cfg.g.empty() ? inputs::random_planted(rng, grid, region, 0) : sample_dsl(cfg.g, ctx, grid);
    const SampledFunction f1 = inputs::random_planted(rng, grid, region, 1);
    const SampledFunction g1 = inputs::random_planted(rng, grid, region, 1);

    const SampledFunction c00 = calculus::conv_heis(f0, g0);
    const double e1 = max_abs_difference(calculus::op_S(c00), calculus::conv_euclid(calculus::op_S(f0), calculus::op_S(g0)));
    r.add(check_le("S_of_product", rel(e1, l2_norm(f0) * l2_norm(g0)), tol));

    const double e2 = max_abs_difference(calculus::conv_heis(calculus::op_T_heis(f1), g0),
                                         calculus::op_T_heis(calculus::conv_heis(f1, g0)));
    r.add(check_le("T_left_factor", rel(e2, l2_norm(f1) * l2_norm(g0)), tol));
    const double e3 = max_abs_difference(calculus::conv_heis(f0, calculus::op_T_heis(g1)),
                                         calculus::op_T_heis(calculus::conv_heis(f0, g1)));
    r.add(check_le("T_right_factor", rel(e3, l2_norm(f0) * l2_norm(g1)), tol));

    if (grid.size() <= 17 * 17 * 17) {
        const SampledFunction cd = calculus::conv_heis(f0, g0, calculus::ConvMethod::Direct);
        const SampledFunction cf = calculus::conv_heis(f0, g0, calculus::ConvMethod::Fft);
        r.add(check_le("fast_vs_direct", rel(max_abs_difference(cf, cd), cd.max_abs()), 1e-10));
    }
    r.add(check_eq("support_within_product_box", support_contained(c00) ? 1.0 : 0.0, 1.0));
    r.results["grid"] = grid_to_json(c00.grid());
    r.results["support"] = box_to_json(c00.support());
    r.results["max_abs"] = c00.max_abs();
    return r;
}

Report minimal_k(const Config& cfg) {
    const std::size_t res = res_or(cfg, 33);
    const auto d = static_cast<std::size_t>(2 * cfg.n + 1);
    Report r;
    r.command = "minimal-k";
    r.inputs = config_json(cfg, res);
    std::mt19937_64 rng(cfg.seed);
    const GridSpec grid = GridSpec::cube(d, 1.0, res);
    const int planted = static_cast<int>(cfg.seed % 5);
    const SampledFunction f = cfg.f.empty() ? inputs::random_planted(rng, grid, heis_region(cfg.n, 0.6), planted)
                                            : sample_dsl(cfg.f, expr::VarContext{cfg.n, true}, grid);
    const calculus::MinimalKResult mk = calculus::minimal_k(f);

    const Box& s = f.support();
    const double zext = s.hi[d - 1] - s.lo[d - 1];
    int oracle = -1;
    std::vector<double> moments;
    for (int j = 0; j <= calculus::kDefaultKMax && oracle < 0; ++j) {
        const double m = calculus::moment_profile(f, j).max_abs();
        moments.push_back(m);
        if (m > calculus::kEpsS * f.max_abs() * std::pow(zext, j + 1)) oracle = j;
    }
    r.add(check_eq("k_matches_moment_oracle", mk.k, oracle));
    if (cfg.f.empty()) r.add(check_eq("k_matches_planted_order", mk.k, planted));

    // S T^k f = (-1)^k / k! times the k-th moment when the lower moments vanish.
    SampledFunction mom = calculus::moment_profile(f, mk.k);
    const double fact = std::tgamma(mk.k + 1.0);
    mom = cplx((mk.k % 2 ? -1.0 : 1.0) / fact, 0.0) * mom;
    r.results["k"] = mk.k;
    r.results["s_norms"] = mk.s_norms;
    r.results["moment_norms"] = moments;
    r.results["moment_oracle_k"] = oracle;
    r.results["moment_relative_difference"] = rel(max_abs_difference(mk.result, mom), mk.result.max_abs());
    r.results["integral_value"] = complex_to_json(mk.integral_value);
    return r;
}

Report certificate(const Config& cfg) {
    const std::size_t res = res_or(cfg, 33);
    const auto d = static_cast<std::size_t>(2 * cfg.n + 1);
    Report r;
    r.command = "certificate";
    r.inputs = config_json(cfg, res);
    std::mt19937_64 rng(cfg.seed);
    const GridSpec grid = GridSpec::cube(d, 1.0, res);
    const int k = static_cast<int>(cfg.seed % 3);
    const int l = static_cast<int>((cfg.seed / 3) % 3);
    const expr::VarContext ctx{cfg.n, true};
    const Box region = heis_region(cfg.n, 0.5);
    const SampledFunction f = cfg.f.empty() ? inputs::random_planted(rng, grid, region, k) : sample_dsl(cfg.f, ctx, grid);
    const SampledFunction g = cfg.g.empty() ? inputs::random_planted(rng, grid, region, l) : sample_dsl(cfg.g, ctx, grid);
    const WitnessReport w = calculus::nonvanishing_certificate(f, g);
    r.add(check_gt("witness_abs_value", std::abs(w.value), w.threshold));
    const double chain = w.diagnostics.contains("chain_relative_residual")
        ? w.diagnostics["chain_relative_residual"].get<double>()
        : std::numeric_limits<double>::quiet_NaN();
    r.add(check_le("chain_relative_residual", chain, tol_or(cfg, 5e-3)));
    if (cfg.f.empty()) r.add(check_eq("k_matches_planted", w.diagnostics["k"].get<int>(), k));
    if (cfg.g.empty()) r.add(check_eq("l_matches_planted", w.diagnostics["l"].get<int>(), l));
    r.results["witness"] = to_json(w);
    return r;
}

Report flow_check(const Config& cfg) {
    const int n = cfg.n;
    const auto d = static_cast<std::size_t>(2 * n + 1);
    Report r;
    r.command = "flow-check";
    r.inputs = config_json(cfg, 0);
    std::mt19937_64 rng(cfg.seed);
    const expr::VarContext ctx{n, true};
    const fields::ScalarField gen = fields::ScalarField::parse(cfg.f.empty() ? dilation_generator(n) : cfg.f, ctx);
    const fields::VectorField X = fields::contact_field(gen);

    double def_res = 0.0, grad_res = 0.0, hess_res = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < 50; ++k) {
        const std::vector<double> p = uniform_point(rng, d, 1.0);
        const std::vector<double> gp = gen.gradient(p);
        const std::vector<double> Hp = gen.hessian(p);
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<double> a = p, b = p;
            a[i] += h;
            b[i] -= h;
            const double fd = (gen.value(a) - gen.value(b)) / (2.0 * h);
            grad_res = std::max(grad_res, std::abs(fd - gp[i]) / std::max(1.0, std::abs(gp[i])));
            const std::vector<double> ga = gen.gradient(a), gb = gen.gradient(b);
            for (std::size_t j = 0; j < d; ++j) {
                const double hd = (ga[j] - gb[j]) / (2.0 * h);
                hess_res = std::max(hess_res, std::abs(hd - Hp[j * d + i]) / std::max(1.0, std::abs(Hp[j * d + i])));
            }
        }
        if (k >= 20) continue;
        const GroupPoint P = GroupPoint::from_coords(p);
        const geometry::TangentVector Xp{X.eval(p)};
        const double scale = 1.0 + norm2(gp) + std::abs(gen.value(p));
        def_res = std::max(def_res, std::abs(geometry::alpha0(P, Xp) - gen.value(p)) / scale);
        const geometry::TangentVector w{uniform_point(rng, d, 1.0)};
        double dfw = 0.0;
        for (std::size_t i = 0; i < d; ++i) dfw += gp[i] * w.components[i];
        const double lhs = geometry::d_alpha0(P, Xp, w);
        const double rhs = gp[d - 1] * geometry::alpha0(P, w) - dfw;
        def_res = std::max(def_res, std::abs(lhs - rhs) / scale);
    }
    r.add(check_le("contact_defining_conditions", def_res, 1e-10));
    r.add(check_le("gradient_vs_central_difference", grad_res, 1e-6));
    r.add(check_le("hessian_vs_central_difference", hess_res, 1e-6));

    // Hamiltonian identity omega0(X_f, w) = df(w) for a truncated generator.
    {
        std::string src = "bump(1,2)*(";
        for (int i = 1; i <= n; ++i) src += (i > 1 ? "+" : "") + ("x" + std::to_string(i)) + "*y" + std::to_string(i) + "+x" + std::to_string(i) + "^2";
        src += ")";
        const fields::ScalarField hf = fields::ScalarField::parse(src, expr::VarContext{n, false});
        const fields::VectorField XH = fields::hamiltonian_field(hf);
        double ham = 0.0;
        for (int k = 0; k < 20; ++k) {
            const std::vector<double> p = uniform_point(rng, d - 1, 1.6);
            const geometry::TangentVector w{uniform_point(rng, d - 1, 1.0)};
            const std::vector<double> gp = hf.gradient(p);
            double dfw = 0.0;
            for (std::size_t i = 0; i + 1 < d; ++i) dfw += gp[i] * w.components[i];
            ham = std::max(ham, std::abs(geometry::omega0(geometry::TangentVector{XH.eval(p)}, w) - dfw));
        }
        r.add(check_le("hamiltonian_identity", ham, 1e-10));
    }

    // Step convergence of the dilation flow against delta_1.
    const auto field = dilation_field(n);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 10; ++k) pts.push_back(uniform_point(rng, d, 0.5));
    std::vector<double> errs;
    for (double s : {cfg.step, cfg.step / 2.0, cfg.step / 4.0}) {
        const flow::FlowMap m(field, 1.0, s);
        double e = 0.0;
        for (const auto& p : pts) {
            const std::vector<double> exact = geometry::dilation(1.0, GroupPoint::from_coords(p)).coords();
            e = std::max(e, dist_inf(m.apply(p), exact));
        }
        errs.push_back(e);
    }
    r.add(check_in("dilation_step_ratio_1", errs[0] / errs[1], 14.0, 18.0));
    r.add(check_in("dilation_step_ratio_2", errs[1] / errs[2], 14.0, 18.0));
    const flow::FlowMap m(field, 1.0, cfg.step);
    const flow::FlowMap mi = m.inverse();
    double rev = 0.0;
    for (const auto& p : pts) rev = std::max(rev, dist_inf(mi.apply(m.apply(p)), p));
    r.add(check_le("reversibility", rev, 1e-6));
    r.results["dilation_errors"] = errs;
    r.results["generator"] = gen.to_string();
    return r;
}

Report translate_sympl(const Config& cfg) {
    const auto d = static_cast<std::size_t>(2 * cfg.n);
    Report r;
    r.command = "translate-sympl";
    r.inputs = config_json(cfg, 0);
    std::mt19937_64 rng(cfg.seed);
    const double rad = 1.0, R = 4.0;
    std::vector<double> x = shell_point(rng, d, 0.2 * rad, 1.9 * rad);
    const flow::FlowMap tau = flow::translation_symplecto(x, rad, R, cfg.step);

    double inside = 0.0;
    std::vector<std::vector<double>> ball;
    for (int k = 0; k < 100; ++k) {
        const std::vector<double> y = ball_point(rng, d, rad);
        std::vector<double> yx = y;
        for (std::size_t i = 0; i < d; ++i) yx[i] += x[i];
        inside = std::max(inside, dist_inf(tau.apply(y), yx));
        if (k < 20) ball.push_back(y);
    }
    r.add(check_le("translation_on_ball", inside, tol_or(cfg, 1e-8)));
    double outside = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::vector<double> y = shell_point(rng, d, R, 1.5 * R);
        outside = std::max(outside, dist_inf(tau.apply(y), y));
    }
    r.add(check_le("identity_outside", outside, 1e-12));
    r.add(check_le("symplectic_on_ball", flow::check_structure(tau, flow::StructureKind::Symplectic, ball, 1e-12).max_residual, 1e-12));

    std::vector<std::vector<double>> annulus;
    for (int k = 0; k < 20; ++k) annulus.push_back(shell_point(rng, d, 3.0 * rad, R));
    const flow::FlowMap fine = flow::translation_symplecto(x, rad, R, 1e-3);
    r.add(check_le("symplectic_in_annulus",
                   flow::check_structure(fine, flow::StructureKind::Symplectic, annulus, 1e-6).max_residual, 1e-6));
    double det = 0.0;
    std::vector<double> J;
    for (int k = 0; k < 30; ++k) {
        const std::vector<double> y = ball_point(rng, d, R);
        fine.apply(y, J);
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
            J.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        det = std::max(det, std::abs(M.determinant() - 1.0));
    }
    r.add(check_le("volume_preservation", det, 1e-6));
    r.results["x"] = x;
    return r;
}

Report translate_cont(const Config& cfg) {
    const int n = cfg.n;
    const auto d = static_cast<std::size_t>(2 * n + 1);
    Report r;
    r.command = "translate-cont";
    r.inputs = config_json(cfg, 0);
    std::mt19937_64 rng(cfg.seed);
    const flow::ContactTranslationConfig cc = contact_config(n, cfg.step);
    const GroupPoint x = geometry::exp_map(geometry::LieVector::from_coords(uniform_point(rng, d, 0.8 * 0.3)));
    const flow::ContactTranslationInfo info = flow::check_contact_configuration(x, cc);
    const flow::FlowMap rho = flow::translation_contacto(x, cc);

    double onV = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::vector<double> y = uniform_point(rng, d, cc.V_radius);
        const std::vector<double> yx = geometry::group_mul(GroupPoint::from_coords(y), x).coords();
        onV = std::max(onV, dist_inf(rho.apply(y), yx));
    }
    r.add(check_le("translation_on_V", onV, tol_or(cfg, 1e-6)));
    double outside = 0.0;
    for (int k = 0; k < 50; ++k) {
        std::vector<double> y = uniform_point(rng, d, 2.0);
        const std::size_t axis = static_cast<std::size_t>(k) % d;
        y[axis] = (k % 2 ? -1.0 : 1.0) * (1.5 + 0.5 * std::abs(y[axis]) / 2.0);
        outside = std::max(outside, dist_inf(rho.apply(y), y));
    }
    r.add(check_le("identity_outside", outside, 1e-12));
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 40; ++k) pts.push_back(uniform_point(rng, d, 1.5));
    r.add(check_le("contact_structure", flow::check_structure(rho, flow::StructureKind::Contact, pts, 1e-6).max_residual, 1e-6));

    const GroupPoint x2 = geometry::exp_map(geometry::LieVector::from_coords(uniform_point(rng, d, 0.3 * 0.3)));
    const flow::FlowMap rho2 = flow::translation_contacto(x2, cc);
    double comp = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::vector<double> y = uniform_point(rng, d, 0.5 * cc.V_radius);
        const std::vector<double> expect =
            geometry::group_mul(geometry::group_mul(GroupPoint::from_coords(y), x2), x).coords();
        comp = std::max(comp, dist_inf(rho.apply(rho2.apply(y)), expect));
    }
    r.add(check_le("composition", comp, 1e-6));
    r.results["x"] = x.coords();
    r.results["plateau_box"] = box_to_json(info.plateau_box);
    r.results["plateau_radius"] = info.plateau_radius;
    r.results["outer_radius"] = info.outer_radius;
    return r;
}

namespace {

struct UnitarityRun {
    std::vector<double> sympl;  // per theta
    std::vector<double> dil;
    double homomorphism = 0.0;
    double intertwining = 0.0;
    double isometry = 0.0;
};

UnitarityRun unitarity_run(const Config& cfg, std::size_t res, std::size_t coarse, const std::vector<double>& thetas) {
    UnitarityRun out;
    const int n = cfg.n;
    const auto d = static_cast<std::size_t>(2 * n);
    std::mt19937_64 rng(cfg.seed);
    const double half = 1.35;
    const GridSpec grid = GridSpec::cube(d, half, res);
    const double hc = 2.0 * half / static_cast<double>(coarse - 1);
    const SampledFunction f = inputs::sample_bumps(centred_bumps(rng, d, 1.0, 2), grid, Box::cube(d, 1.0));
    const double nf = l2_norm(f);
    const double rad = 0.8;
    const auto shift = [&](std::vector<double> p) { return snapped_shift(fixed_shift(d, p), hc); };
    const flow::FlowMap tau = flow::translation_symplecto(shift({0.2, -0.12}), rad, 4.0 * rad, cfg.step);
    for (double th : thetas)
        out.sympl.push_back(std::abs(l2_norm(rep::apply_rep(rep::RepresentationParams{th, {}}, tau, f)) - nf) / nf);

    const flow::FlowMap t1 = flow::translation_symplecto(shift({0.12, -0.07}), rad, 4.0 * rad, cfg.step);
    const flow::FlowMap t2 = flow::translation_symplecto(shift({-0.05, 0.16}), rad, 4.0 * rad, cfg.step);
    const rep::RepresentationParams P{cfg.theta, {}};
    const SampledFunction lhs = rep::apply_rep(P, t1, rep::apply_rep(P, t2, f));
    const SampledFunction rhs = rep::apply_rep(P, flow::compose(t1, t2), f);
    out.homomorphism = l2_norm(lhs - rhs) / nf;

    const fields::ScalarField ratio = fields::ScalarField::parse("1 + bump(1,2)/2", expr::VarContext{n, false});
    const rep::RepresentationParams mu{0.7, ratio};
    const rep::RepresentationParams nu{0.7, {}};
    // Wider grid so the input reaches the annulus where the ratio varies.
    const GridSpec wgrid = GridSpec::cube(d, 2.3, res);
    const SampledFunction fw = inputs::sample_bumps(centred_bumps(rng, d, 1.9, 2), wgrid, Box::cube(d, 1.9));
    const flow::FlowMap tw = flow::translation_symplecto(shift({0.12, -0.07}), 1.0, 4.0, cfg.step);
    const SampledFunction Tf = rep::intertwiner(mu, ratio, fw);
    const SampledFunction a = rep::intertwiner(mu, ratio, rep::apply_rep(mu, tw, fw));
    const SampledFunction b = rep::apply_rep(nu, tw, Tf);
    out.intertwining = l2_norm(a - b) / l2_norm(Tf);
    const double nmu = rep::weighted_l2_norm(mu, fw);
    out.isometry = std::abs(l2_norm(Tf) - nmu) / nmu;

    const auto dh = static_cast<std::size_t>(2 * n + 1);
    const GridSpec hgrid = GridSpec::cube(dh, 1.0, res);
    const SampledFunction fh = inputs::sample_bumps(centred_bumps(rng, dh, 0.9, 2), hgrid, Box::cube(dh, 0.9));
    const double nh = l2_norm(fh);
    const flow::FlowMap delta(dilation_field(n), -0.3, cfg.step);
    const rep::Pullback pb = rep::make_pullback(hgrid, rep::image_box(delta, fh), {}, delta);
    for (double th : thetas) out.dil.push_back(std::abs(l2_norm(rep::apply_pullback(pb, fh, th)) - nh) / nh);
    return out;
}

}  // namespace

Report rep_unitarity(const Config& cfg) {
    const std::size_t res = res_or(cfg, 65);
    const std::size_t coarse = (res + 1) / 2;
    if (coarse < 9) throw PreconditionError("rep-unitarity needs --res >= 17");
    Report r;
    r.command = "rep-unitarity";
    r.inputs = config_json(cfg, res);
    const double tol = tol_or(cfg, 5e-3);
    std::vector<double> thetas{0.0, 1.0, std::numbers::pi};
    if (std::find(thetas.begin(), thetas.end(), cfg.theta) == thetas.end()) thetas.push_back(cfg.theta);

    const UnitarityRun fine = unitarity_run(cfg, res, coarse, thetas);
    const UnitarityRun crs = unitarity_run(cfg, coarse, coarse, thetas);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        std::ostringstream tag;
        tag << "theta=" << thetas[i];
        r.add(check_le("unitarity_translation_" + tag.str(), fine.sympl[i], tol));
        r.add(check_le("unitarity_dilation_" + tag.str(), fine.dil[i], tol));
    }
    r.add(check_le("homomorphism", fine.homomorphism, tol));
    r.add(check_le("intertwining", fine.intertwining, tol));
    r.add(check_le("intertwiner_isometry", fine.isometry, tol));
    r.add(refinement_check("unitarity_translation", crs.sympl[0], fine.sympl[0]));
    r.add(refinement_check("unitarity_dilation", crs.dil[0], fine.dil[0]));
    r.add(refinement_check("homomorphism", crs.homomorphism, fine.homomorphism));

    // rn_derivative of delta_t is exp(-(2n + 2) t).
    std::mt19937_64 rng(cfg.seed);
    const double t = 0.3;
    const flow::FlowMap delta(dilation_field(cfg.n), t, cfg.step);
    const double expect = std::exp(-(2.0 * cfg.n + 2.0) * t);
    double rn = 0.0;
    for (int k = 0; k < 10; ++k) {
        const std::vector<double> p = uniform_point(rng, static_cast<std::size_t>(2 * cfg.n + 1), 0.5);
        rn = std::max(rn, std::abs(rep::rn_derivative(delta, {}, p) - expect));
    }
    r.add(check_le("rn_derivative_dilation", rn, 1e-6));
    r.results["thetas"] = thetas;
    r.results["coarse_res"] = coarse;
    r.results["unitarity_translation"] = {{"coarse", crs.sympl}, {"fine", fine.sympl}};
    r.results["unitarity_dilation"] = {{"coarse", crs.dil}, {"fine", fine.dil}};
    r.results["homomorphism"] = {{"coarse", crs.homomorphism}, {"fine", fine.homomorphism}};
    r.results["intertwining"] = {{"coarse", crs.intertwining}, {"fine", fine.intertwining}};
    return r;
}

Report witness_sympl(const Config& cfg) {
    const std::size_t res = res_or(cfg, 65);
    const auto d = static_cast<std::size_t>(2 * cfg.n);
    Report r;
    r.command = "witness-sympl";
    r.inputs = config_json(cfg, res);
    std::mt19937_64 rng(cfg.seed);
    const GridSpec grid = GridSpec::cube(d, 1.0, res);
    const expr::VarContext ctx{cfg.n, false};
    const SampledFunction f = cfg.f.empty()
        ? inputs::sample_bumps(inputs::random_bumps_in_ball(rng, d, 1.0, 3), grid, grid.box())
        : sample_dsl(cfg.f, ctx, grid);
    const SampledFunction g = cfg.g.empty()
        ? inputs::sample_bumps(inputs::random_bumps_in_ball(rng, d, 1.0, 3), grid, grid.box())
        : sample_dsl(cfg.g, ctx, grid);
    rep::SymplWitnessOptions opt;
    opt.step = cfg.step;
    opt.verify_tol = tol_or(cfg, 5e-3);
    const WitnessReport w = rep::sympl_witness_search(f, g, opt);
    r.add(check_gt("witness_abs_value", std::abs(w.value), w.threshold));
    r.add(check_le("matrix_coefficient_identity", w.diagnostics["verify_relative_residual"].get<double>(), opt.verify_tol));
    r.results["witness"] = to_json(w);
    return r;
}

Report witness_cont(const Config& cfg) {
    const std::size_t res = res_or(cfg, 33);
    const auto d = static_cast<std::size_t>(2 * cfg.n + 1);
    Report r;
    r.command = "witness-cont";
    r.inputs = config_json(cfg, res);
    std::mt19937_64 rng(cfg.seed);
    rep::ContWitnessOptions opt;
    opt.contact = contact_config(cfg.n, cfg.step);
    opt.verify_tol = tol_or(cfg, 5e-3);
    if (std::find(opt.thetas.begin(), opt.thetas.end(), cfg.theta) == opt.thetas.end()) opt.thetas.push_back(cfg.theta);
    const double a = opt.contact.V_radius;
    const GridSpec grid = GridSpec::cube(d, 1.5 * a, res);
    const expr::VarContext ctx{cfg.n, true};
    const Box V = Box::cube(d, a);
    const SampledFunction f = cfg.f.empty() ? inputs::sample_bumps(inputs::random_bumps_in_box(rng, V, 3), grid, V)
                                            : sample_dsl(cfg.f, ctx, grid);
    const SampledFunction g = cfg.g.empty() ? inputs::sample_bumps(inputs::random_bumps_in_box(rng, V, 3), grid, V)
                                            : sample_dsl(cfg.g, ctx, grid);
    const WitnessReport w = rep::cont_witness_search(f, g, opt);
    r.add(check_gt("witness_abs_value", std::abs(w.value), w.threshold));
    r.add(check_le("matrix_coefficient_identity", w.diagnostics["verify_relative_residual"].get<double>(), opt.verify_tol));
    r.add(check_le("theta_independence", w.diagnostics["theta_spread"].get<double>(), 1e-8));
    r.results["witness"] = to_json(w);
    return r;
}

Report shrink_demo(const Config& cfg) {
    const std::size_t res = res_or(cfg, 49);
    const auto d = static_cast<std::size_t>(2 * cfg.n + 1);
    Report r;
    r.command = "shrink-demo";
    r.inputs = config_json(cfg, res);
    const double a = 0.5;
    const Box V = Box::cube(d, a);
    const GridSpec grid = GridSpec::cube(d, a, res);
    const SampledFunction f = cfg.f.empty()
        ? inputs::sample_bumps({inputs::off_center_bump(d, a)}, grid, V)
        : sample_dsl(cfg.f, expr::VarContext{cfg.n, true}, grid);
    rep::ShrinkOptions opt;
    opt.step = cfg.step;
    opt.lhs_counts = res;
    opt.rhs_counts = res;
    const rep::RepresentationParams params{cfg.theta, {}};
    const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
    const std::vector<rep::ShrinkRow> rows = rep::dilation_shrink(params, f, V, times, opt);
    const double tol = tol_or(cfg, 5e-3);
    json table = json::array();
    for (const auto& row : rows) {
        table.push_back(rep::to_json(row));
        std::ostringstream tag;
        tag << "t=" << row.t;
        r.add(check_le("sides_agree_" + tag.str(), row.relative_difference, row.t == 0.0 ? 1e-12 : tol));
    }
    r.add(check_lt("decay_t2_over_t0", rel(rows.back().lhs, rows.front().lhs), 0.1));
    r.results["table"] = table;
    return r;
}

Report selftest(const Config& cfg) {
    Report r;
    r.command = "selftest";
    r.inputs = config_json(cfg, 0);
    const std::vector<std::pair<std::string, std::size_t>> plan{
        {"conv-euclid", 17}, {"conv-heis", 17},       {"minimal-k", 17},      {"certificate", 17},
        {"flow-check", 0},   {"translate-sympl", 0},  {"translate-cont", 0},  {"rep-unitarity", 65},
        {"witness-sympl", 33}, {"witness-cont", 17},  {"shrink-demo", 17}};
    for (const auto& [name, res] : plan) {
        Config c = cfg;
        c.res = res;
        c.f.clear();
        c.g.clear();
        c.tol.reset();
        const Report sub = commands().at(name)(c);
        for (Check ch : sub.checks) {
            ch.name = name + "/" + ch.name;
            r.add(std::move(ch));
        }
        r.results[name] = sub.passed();
    }
    return r;
}

const std::map<std::string, Runner>& commands() {
    static const std::map<std::string, Runner> table{
        {"conv-euclid", conv_euclid},         {"conv-heis", conv_heis},
        {"minimal-k", minimal_k},             {"certificate", certificate},
        {"flow-check", flow_check},           {"translate-sympl", translate_sympl},
        {"translate-cont", translate_cont},   {"rep-unitarity", rep_unitarity},
        {"witness-sympl", witness_sympl},     {"witness-cont", witness_cont},
        {"shrink-demo", shrink_demo},         {"selftest", selftest},
    };
    return table;
}

}  // namespace diffrep::experiments
