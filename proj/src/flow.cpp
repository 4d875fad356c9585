#include "diffrep/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diffrep/errors.hpp"

namespace diffrep::flow {

namespace {

double norm2(std::span<const double> p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return std::sqrt(s);
}

struct Workspace {
    std::vector<double> tape;
    std::vector<double> k[4];
    std::vector<double> K[4];
    std::vector<double> y, J, eval;
};

// Advances (y, J) along the field for time T with RK4; J may be null.
void integrate(const fields::VectorField& X, double T, double step, std::vector<double>& y,
               std::vector<double>* J, Workspace& ws) {
    const auto d = static_cast<std::size_t>(X.dim());
    if (T == 0.0) return;
    const double R = X.support_radius();
    const bool bounded = X.compactly_supported();
    // Trajectories never cross the sphere where the field vanishes.
    if (bounded && norm2(y) >= R) return;
    const double domain = 1.1 * R;

    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(T) / step - 1e-9)));
    const double dt = T / static_cast<double>(steps);
    const bool jac = J != nullptr;
    const std::size_t out_len = jac ? d + d * d : d;
    ws.eval.resize(out_len);
    for (int s = 0; s < 4; ++s) {
        ws.k[s].resize(d);
        if (jac) ws.K[s].resize(d * d);
    }
    ws.y.resize(d);
    if (jac) ws.J.resize(d * d);

    auto stage = [&](int s, const std::vector<double>& ys, const std::vector<double>* Js) {
        if (jac) {
            X.eval_with_jacobian(ys, ws.eval, ws.tape);
            std::copy_n(ws.eval.begin(), d, ws.k[s].begin());
            // K = DX(ys) * Js
            const double* A = ws.eval.data() + d;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    double acc = 0.0;
                    for (std::size_t l = 0; l < d; ++l) acc += A[i * d + l] * (*Js)[l * d + j];
                    ws.K[s][i * d + j] = acc;
                }
        } else {
            X.eval(ys, ws.k[s], ws.tape);
        }
    };

    for (std::size_t n = 0; n < steps; ++n) {
        stage(0, y, J);
        const double c[3] = {0.5 * dt, 0.5 * dt, dt};
        for (int s = 1; s < 4; ++s) {
            for (std::size_t i = 0; i < d; ++i) ws.y[i] = y[i] + c[s - 1] * ws.k[s - 1][i];
            if (jac)
                for (std::size_t i = 0; i < d * d; ++i) ws.J[i] = (*J)[i] + c[s - 1] * ws.K[s - 1][i];
            stage(s, ws.y, jac ? &ws.J : nullptr);
        }
        for (std::size_t i = 0; i < d; ++i)
            y[i] += dt / 6.0 * (ws.k[0][i] + 2.0 * ws.k[1][i] + 2.0 * ws.k[2][i] + ws.k[3][i]);
        if (jac)
            for (std::size_t i = 0; i < d * d; ++i)
                (*J)[i] += dt / 6.0 * (ws.K[0][i] + 2.0 * ws.K[1][i] + 2.0 * ws.K[2][i] + ws.K[3][i]);

        for (double v : y)
            if (!std::isfinite(v)) throw FlowEscape("flow produced a non-finite point");
        if (bounded)
            for (double v : y)
                if (std::abs(v) > domain) throw FlowEscape("trajectory left the field's domain box");
    }
    if (jac)
        for (double v : *J)
            if (!std::isfinite(v)) throw FlowEscape("flow Jacobian not finite");
}

}  // namespace

FlowMap::FlowMap(std::shared_ptr<const fields::VectorField> field, double time, double step)
    : dim_(field->dim()), step_(step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw PreconditionError("flow step must be positive");
    if (!std::isfinite(time)) throw PreconditionError("flow time must be finite");
    stages_.push_back(FlowStage{std::move(field), time});
}

FlowMap FlowMap::identity(int dim) {
    FlowMap m;
    m.dim_ = dim;
    return m;
}

std::vector<double> FlowMap::apply(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("flow point dimension mismatch");
    std::vector<double> y(p.begin(), p.end());
    Workspace ws;
    for (const auto& s : stages_) integrate(*s.field, s.time, step_, y, nullptr, ws);
    return y;
}

std::vector<double> FlowMap::apply(std::span<const double> p, std::vector<double>& jacobian) const {
    if (static_cast<int>(p.size()) != dim_) throw DimensionMismatch("flow point dimension mismatch");
    const auto d = static_cast<std::size_t>(dim_);
    std::vector<double> y(p.begin(), p.end());
    jacobian.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) jacobian[i * d + i] = 1.0;
    Workspace ws;
    std::vector<double> Js(d * d), prod(d * d);
    for (const auto& s : stages_) {
        // Chain rule: each stage starts from J = I and is multiplied on the left.
        std::fill(Js.begin(), Js.end(), 0.0);
        for (std::size_t i = 0; i < d; ++i) Js[i * d + i] = 1.0;
        integrate(*s.field, s.time, step_, y, &Js, ws);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t l = 0; l < d; ++l) acc += Js[i * d + l] * jacobian[l * d + j];
                prod[i * d + j] = acc;
            }
        jacobian.swap(prod);
    }
    return y;
}

FlowMap FlowMap::inverse() const {
    FlowMap m = *this;
    std::reverse(m.stages_.begin(), m.stages_.end());
    for (auto& s : m.stages_) s.time = -s.time;
    return m;
}

double FlowMap::moving_radius() const {
    double r = 0.0;
    for (const auto& s : stages_) r = std::max(r, s.field->support_radius());
    return r;
}

FlowMap compose(const FlowMap& outer, const FlowMap& inner) {
    if (outer.dim_ != inner.dim_) throw DimensionMismatch("composed flows differ in dimension");
    if (!outer.stages_.empty() && !inner.stages_.empty() && outer.step_ != inner.step_)
        throw PreconditionError("composed flows differ in step");
    FlowMap m = inner;
    if (inner.stages_.empty()) m.step_ = outer.step_;
    m.stages_.insert(m.stages_.end(), outer.stages_.begin(), outer.stages_.end());
    return m;
}

StructureReport check_structure(const FlowMap& map, StructureKind kind,
                                const std::vector<std::vector<double>>& points, double tol) {
    StructureReport r;
    r.tol = tol;
    const auto d = static_cast<std::size_t>(map.dim());
    std::vector<double> J;
    for (const auto& p : points) {
        const std::vector<double> q = map.apply(p, J);
        double res = 0.0;
        if (kind == StructureKind::Symplectic) {
            if (d % 2 != 0) throw DimensionMismatch("symplectic check needs even dimension");
            const std::size_t n = d / 2;
            const Eigen::MatrixXd Om = geometry::omega_matrix(n);
            Eigen::MatrixXd Jm(d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) Jm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = J[i * d + j];
            res = (Jm.transpose() * Om * Jm - Om).cwiseAbs().maxCoeff();
        } else {
            if (d % 2 == 0) throw DimensionMismatch("contact check needs odd dimension");
            const std::size_t n = d / 2;
            const geometry::GroupPoint P = geometry::GroupPoint::from_coords(p);
            const geometry::GroupPoint Q = geometry::GroupPoint::from_coords(q);
            // ker alpha0 at p is spanned by d/dx_i + y_i d/dz and d/dy_i.
            for (std::size_t b = 0; b < 2 * n; ++b) {
                std::vector<double> e(d, 0.0);
                e[b] = 1.0;
                if (b < n) e[2 * n] = P.y[b];
                geometry::TangentVector Je{std::vector<double>(d, 0.0)};
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) Je.components[i] += J[i * d + j] * e[j];
                const double len = norm2(Je.components);
                const double a = std::abs(geometry::alpha0(Q, Je));
                res = std::max(res, len > 0.0 ? a / len : a);
            }
        }
        r.residuals.push_back(res);
        r.max_residual = std::max(r.max_residual, res);
        if (!(res <= tol)) r.passed = false;
    }
    return r;
}

}  // namespace diffrep::flow
