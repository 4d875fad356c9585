#pragma once

// Time-t flows of compactly supported vector fields (classical RK4, fixed
// step, Jacobian from the variational equations), compositions and inverses
// of such flows, and the translation maps tau_x on R^{2n} and rho_x on H_n.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "diffrep/fields.hpp"
#include "diffrep/geometry.hpp"
#include "diffrep/grid.hpp"

namespace diffrep::flow {

inline constexpr double kDefaultStep = 1e-2;

struct FlowStage {
    std::shared_ptr<const fields::VectorField> field;
    double time = 0.0;
};

/// Composition of flow stages, applied first to last.
class FlowMap {
public:
    FlowMap() = default;
    FlowMap(std::shared_ptr<const fields::VectorField> field, double time, double step = kDefaultStep);
    static FlowMap identity(int dim);

    int dim() const { return dim_; }
    double step() const { return step_; }
    const std::vector<FlowStage>& stages() const { return stages_; }
    bool is_identity() const { return stages_.empty(); }

    std::vector<double> apply(std::span<const double> p) const;
    /// Image of p and the Jacobian of the map at p (row-major).
    std::vector<double> apply(std::span<const double> p, std::vector<double>& jacobian) const;

    /// Same stages in reverse order with negated times.
    FlowMap inverse() const;

    /// Points with |p| >= moving_radius() are fixed; infinite when a stage has
    /// an unbounded field.
    double moving_radius() const;

    friend FlowMap compose(const FlowMap& outer, const FlowMap& inner);

private:
    int dim_ = 0;
    double step_ = kDefaultStep;
    std::vector<FlowStage> stages_;
};

/// outer o inner.
FlowMap compose(const FlowMap& outer, const FlowMap& inner);

/// tau_x: time-1 flow of X_{fh}, f = c.y - d.x for x = (c, d) and
/// h = bump(3r, R_outer). Requires |x| < 2r and 3r < R_outer.
FlowMap translation_symplecto(std::span<const double> x, double r, double R_outer,
                              double step = kDefaultStep);

struct ContactTranslationConfig {
    double V_radius = 0.1;  // V is the open cube of this half-width
    Box W_box;              // coordinates (a, b, c) of the Lie algebra
    Box outer_box;          // the map is the identity outside
    double step = kDefaultStep;
    int random_checks = 2000;
    std::uint64_t seed = 12345;
};

struct ContactTranslationInfo {
    Box plateau_box;       // box containing V exp[W] and V exp[-W]
    double plateau_radius;  // bump inner radius
    double outer_radius;    // bump outer radius
};

/// Checks 0 in V, V V inside exp[W], x = exp(v) with v in W and that the
/// plateau fits in the outer box; throws PreconditionError naming the failing
/// inclusion.
ContactTranslationInfo check_contact_configuration(const geometry::GroupPoint& x,
                                                   const ContactTranslationConfig& cfg);

/// rho_x: time-1 flow of the contact field of h * alpha0(X_v), v = log x, with
/// h = 1 on the plateau box and 0 outside the outer box.
FlowMap translation_contacto(const geometry::GroupPoint& x, const ContactTranslationConfig& cfg);

enum class StructureKind { Symplectic, Contact };

struct StructureReport {
    std::vector<double> residuals;
    double max_residual = 0.0;
    double tol = 0.0;
    bool passed = true;
};

/// Symplectic: ||J^T Omega J - Omega||_inf; contact: max_i |alpha0(phi(p), J e_i)| / ||J e_i||
/// over a basis e_i of ker alpha0 at p.
StructureReport check_structure(const FlowMap& map, StructureKind kind,
                                const std::vector<std::vector<double>>& points, double tol);

}  // namespace diffrep::flow
