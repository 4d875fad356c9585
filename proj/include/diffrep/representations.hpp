#pragma once

// The representation Pi^theta(gamma) f = (f o gamma^{-1}) (d gamma_* mu / d mu)^{1/2 + i theta}
// on sampled functions, the measure-change intertwiner, matrix coefficients,
// irreducibility-witness searches, the small-support difference and the
// dilation shrinking table.

#include <optional>
#include <vector>

#include "diffrep/fields.hpp"
#include "diffrep/flow.hpp"
#include "diffrep/report.hpp"
#include "diffrep/sampled.hpp"

namespace diffrep::rep {

struct RepresentationParams {
    double theta = 0.0;
    /// Density of mu against Lebesgue measure; 1 when absent.
    std::optional<fields::ScalarField> density;

    double density_at(std::span<const double> p) const;
};

/// w^{1/2 + i theta} = exp((1/2 + i theta) ln w) for w > 0.
cplx rn_power(double w, double theta);

/// (d gamma_* mu / d mu)(p) = rho(gamma^{-1} p) |det D gamma^{-1}(p)| / rho(p).
double rn_derivative(const flow::FlowMap& map, const RepresentationParams& params, std::span<const double> p);

/// Preimages gamma^{-1}(p) and Radon-Nikodym factors at the nodes of `grid`
/// inside `region`; independent of theta, so one pullback serves many.
struct Pullback {
    GridSpec grid;
    Box region;
    std::vector<std::size_t> nodes;
    std::vector<double> preimages;  // nodes.size() x dim
    std::vector<double> rn;
};

Pullback make_pullback(const GridSpec& grid, const Box& region, const RepresentationParams& params,
                       const flow::FlowMap& map);
SampledFunction apply_pullback(const Pullback& pb, const SampledFunction& f, double theta);

/// Pi^theta(gamma) f evaluated at the nodes of `grid` that lie in `region`;
/// zero elsewhere. f is read by multilinear interpolation.
SampledFunction apply_rep_on(const GridSpec& grid, const Box& region, const RepresentationParams& params,
                             const flow::FlowMap& map, const SampledFunction& f);

/// Bounding box of gamma[supp f] (sampled on the boundary of the support box
/// and padded), used to limit the nodes that need evaluating.
Box image_box(const flow::FlowMap& map, const SampledFunction& f);

/// Pi^theta(gamma) f on the grid of f. Throws PreconditionError when the image
/// of the support leaves the grid.
SampledFunction apply_rep(const RepresentationParams& params, const flow::FlowMap& map, const SampledFunction& f);

/// T f = f (d mu / d nu)^{1/2 + i theta}; `ratio` is d mu / d nu.
SampledFunction intertwiner(const RepresentationParams& params, const fields::ScalarField& ratio,
                            const SampledFunction& f);

/// <f, g> in L^2(mu): sum of w f conj(g) rho.
cplx weighted_inner_product(const RepresentationParams& params, const SampledFunction& f, const SampledFunction& g);
double weighted_l2_norm(const RepresentationParams& params, const SampledFunction& f);

/// <f, Pi^theta(gamma) g>, evaluating Pi g only on the support of f.
cplx matrix_coefficient(const RepresentationParams& params, const SampledFunction& f, const SampledFunction& g,
                        const flow::FlowMap& map);

/// Default witness threshold 1e-9 ||f|| ||g|| sqrt(volume).
double witness_threshold(double norm_f, double norm_g, double volume);

struct SymplWitnessOptions {
    double r = 1.0;            // supports inside B(0, r)
    double R_outer = 0.0;      // bump outer radius; 0 means 4r
    double step = flow::kDefaultStep;
    double verify_tol = 5e-3;  // relative to ||f|| ||g||
    bool verify = true;
};

/// Searches c = f * g^* on its grid (nodes with |x| < 2r), then checks c(x*)
/// against <f, Pi^0(tau_{x*}) g>. passed reflects only the threshold test; the
/// cross-check lands in the diagnostics.
WitnessReport sympl_witness_search(const SampledFunction& f, const SampledFunction& g,
                                   const SymplWitnessOptions& options = {});

struct ContWitnessOptions {
    flow::ContactTranslationConfig contact;
    std::vector<double> thetas{0.0, 0.5, 3.0};
    double verify_tol = 5e-3;  // relative to ||f|| ||g||
    bool verify = true;
};

/// Heisenberg coefficient function c(x) = <f, Pi(rho_x) g> = (g^* *_H f)(x)
/// for the right translations rho_x(y) = y x.
SampledFunction heis_coefficient_function(const SampledFunction& f, const SampledFunction& g);

/// Searches c over the nodes of exp[W], then checks c(x*) against
/// <f, Pi^theta(rho_{x*}) g> for every theta.
WitnessReport cont_witness_search(const SampledFunction& f, const SampledFunction& g,
                                  const ContWitnessOptions& options);

struct SmallSupportResult {
    SampledFunction difference;
    bool nonzero = false;
};

/// g - Pi^0(gamma) g.
SmallSupportResult small_support_reduce(const SampledFunction& g, const flow::FlowMap& map);

struct ShrinkOptions {
    double r1 = 0.0;       // bump plateau radius of the truncated dilation generator; 0: 1.05 |V|
    double r2 = 0.0;       // bump outer radius; 0: 2 r1
    double step = flow::kDefaultStep;
    std::size_t lhs_counts = 49;  // nodes per axis on V
    std::size_t rhs_counts = 49;  // nodes per axis on delta_{-t} V
};

struct ShrinkRow {
    double t = 0.0;
    double lhs = 0.0;  // int_V |Pi(psi_t) f|^2
    double rhs = 0.0;  // int_{psi_{-t} V} |f|^2
    double relative_difference = 0.0;
    Box shrunken_box;
};

/// psi_t is the flow of the contact field of (2z - x.y) bump(r1, r2); on V it
/// agrees with delta_t for t <= 0, so psi_{-t}[V] = delta_{-t}[V].
std::vector<ShrinkRow> dilation_shrink(const RepresentationParams& params, const SampledFunction& f,
                                       const Box& V_box, const std::vector<double>& times,
                                       const ShrinkOptions& options = {});

nlohmann::json to_json(const ShrinkRow& row);

}  // namespace diffrep::rep
