#include <algorithm>
#include <cmath>

#include "diffrep/calculus.hpp"
#include "diffrep/errors.hpp"
#include "diffrep/representations.hpp"

namespace diffrep::rep {

namespace {

struct Argmax {
    std::size_t index = 0;
    double abs = -1.0;
    std::size_t searched = 0;
};

template <class Pred>
Argmax search(const SampledFunction& c, Pred&& admissible) {
    const GridSpec& g = c.grid();
    Argmax best;
    for (IndexIterator it(g.all_nodes()); !it.done(); it.next()) {
        const std::vector<double> p = g.node(g.flat(it.index()));
        if (!admissible(p)) continue;
        ++best.searched;
        const std::size_t flat = g.flat(it.index());
        const double a = std::abs(c[flat]);
        if (a > best.abs) {
            best.abs = a;
            best.index = flat;
        }
    }
    return best;
}

double norm2(std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

}  // namespace

WitnessReport sympl_witness_search(const SampledFunction& f, const SampledFunction& g,
                                   const SymplWitnessOptions& options) {
    if (f.dim() != g.dim() || f.dim() % 2 != 0) throw DimensionMismatch("symplectic witness needs R^{2n} inputs");
    const double r = options.r;
    const double R_outer = options.R_outer > 0.0 ? options.R_outer : 4.0 * r;
    const SampledFunction c = calculus::conv_euclid(f, star_euclid(g), calculus::ConvMethod::Auto);
    const Argmax best = search(c, [&](const std::vector<double>& p) { return norm2(p) < 2.0 * r; });
    if (best.searched == 0) throw PreconditionError("no grid node with |x| < 2r");

    const double nf = l2_norm(f);
    const double ng = l2_norm(g);
    WitnessReport w;
    w.grid_searched = c.grid();
    w.location = c.grid().node(best.index);
    w.value = c[best.index];
    w.threshold = witness_threshold(nf, ng, c.grid().box().volume());
    w.diagnostics["nodes_searched"] = best.searched;
    w.diagnostics["norm_f"] = nf;
    w.diagnostics["norm_g"] = ng;
    w.passed = std::abs(w.value) > w.threshold;
    if (!options.verify) return w;

    const flow::FlowMap tau = flow::translation_symplecto(w.location, r, R_outer, options.step);
    const cplx mc = matrix_coefficient(RepresentationParams{}, f, g, tau);
    const double res = std::abs(mc - w.value);
    const double rel = nf * ng > 0.0 ? res / (nf * ng) : res;
    w.diagnostics["verify_value"] = complex_to_json(mc);
    w.diagnostics["verify_residual"] = res;
    w.diagnostics["verify_relative_residual"] = rel;
    w.diagnostics["verify_passed"] = rel <= options.verify_tol;
    return w;
}

SampledFunction heis_coefficient_function(const SampledFunction& f, const SampledFunction& g) {
    return calculus::conv_heis(star_heis(g), f, calculus::ConvMethod::Auto);
}

WitnessReport cont_witness_search(const SampledFunction& f, const SampledFunction& g,
                                  const ContWitnessOptions& options) {
    if (f.dim() != g.dim() || f.dim() % 2 == 0 || f.dim() < 3)
        throw DimensionMismatch("contact witness needs H_n inputs");
    if (options.thetas.empty()) throw PreconditionError("at least one theta is required");
    const Box& W = options.contact.W_box;
    const double tol = 1e-12 * (1.0 + W.max_norm());
    const SampledFunction c = heis_coefficient_function(f, g);
    const Argmax best = search(c, [&](const std::vector<double>& p) {
        return W.contains(geometry::log_map(geometry::GroupPoint::from_coords(p)).coords(), tol);
    });
    if (best.searched == 0) throw PreconditionError("no grid node in exp[W]");

    const double nf = l2_norm(f);
    const double ng = l2_norm(g);
    const double scale = nf * ng > 0.0 ? nf * ng : 1.0;
    WitnessReport w;
    w.grid_searched = c.grid();
    w.location = c.grid().node(best.index);
    w.value = c[best.index];
    w.threshold = witness_threshold(nf, ng, W.volume());
    w.diagnostics["nodes_searched"] = best.searched;
    w.diagnostics["norm_f"] = nf;
    w.diagnostics["norm_g"] = ng;
    w.passed = std::abs(w.value) > w.threshold;
    if (!options.verify) return w;

    const flow::FlowMap rho = flow::translation_contacto(geometry::GroupPoint::from_coords(w.location), options.contact);
    const Pullback pb = make_pullback(f.grid(), f.support(), RepresentationParams{}, rho);
    nlohmann::json per_theta = nlohmann::json::array();
    double worst = 0.0, spread = 0.0, abs_spread = 0.0;
    cplx first{};
    for (std::size_t i = 0; i < options.thetas.size(); ++i) {
        const double theta = options.thetas[i];
        const cplx mc = inner_product(f, apply_pullback(pb, g, theta));
        if (i == 0) first = mc;
        const double rel = std::abs(mc - w.value) / scale;
        worst = std::max(worst, rel);
        spread = std::max(spread, std::abs(mc - first) / scale);
        abs_spread = std::max(abs_spread, std::abs(std::abs(mc) - std::abs(first)) / scale);
        per_theta.push_back({{"theta", theta}, {"value", complex_to_json(mc)}, {"relative_residual", rel}});
    }
    double rn_dev = 0.0;
    for (double v : pb.rn) rn_dev = std::max(rn_dev, std::abs(v - 1.0));
    w.diagnostics["thetas"] = per_theta;
    w.diagnostics["verify_relative_residual"] = worst;
    w.diagnostics["theta_spread"] = spread;
    w.diagnostics["theta_abs_spread"] = abs_spread;
    w.diagnostics["rn_max_deviation"] = rn_dev;
    w.diagnostics["verify_passed"] = worst <= options.verify_tol;
    return w;
}

}  // namespace diffrep::rep
