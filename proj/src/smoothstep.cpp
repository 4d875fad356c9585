#include <algorithm>
#include <cmath>
#include <vector>

#include "diffrep/errors.hpp"
#include "diffrep/expr.hpp"

namespace diffrep::expr {

namespace {

// Outside [kEdge, 1 - kEdge] the transition is flat to double precision.
constexpr double kEdge = 0.01;

}  // namespace

void smoothstep_derivatives(double t, int order, std::span<double> out) {
    if (order < 0 || out.size() < static_cast<std::size_t>(order) + 1)
        throw PreconditionError("smoothstep: output too short");
    std::fill(out.begin(), out.begin() + order + 1, 0.0);
    if (t <= kEdge) {
        out[0] = 1.0;
        return;
    }
    if (t >= 1.0 - kEdge) return;

    // Taylor jets in the offset d of t + d: q = 1/(1-t-d) - 1/(t+d),
    // E = exp(q), D = 1 + E, s = 1/D.
    const auto K = static_cast<std::size_t>(order) + 1;
    std::vector<double> q(K), E(K), D(K), S(K);
    const double u = 1.0 / (1.0 - t), v = 1.0 / t;
    double up = u, vp = v;
    for (std::size_t j = 0; j < K; ++j) {
        q[j] = up - ((j % 2 == 0) ? vp : -vp);
        up *= u;
        vp *= v;
    }
    E[0] = std::exp(q[0]);
    for (std::size_t j = 1; j < K; ++j) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= j; ++i) acc += static_cast<double>(i) * q[i] * E[j - i];
        E[j] = acc / static_cast<double>(j);
    }
    for (std::size_t j = 0; j < K; ++j) D[j] = E[j] + (j == 0 ? 1.0 : 0.0);
    S[0] = 1.0 / D[0];
    for (std::size_t j = 1; j < K; ++j) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= j; ++i) acc += D[i] * S[j - i];
        S[j] = -acc / D[0];
    }
    double fact = 1.0;
    for (std::size_t j = 0; j < K; ++j) {
        if (j > 0) fact *= static_cast<double>(j);
        out[j] = fact * S[j];
    }
}

double smoothstep_derivative(double t, int k) {
    if (k == 0) {
        if (t <= kEdge) return 1.0;
        if (t >= 1.0 - kEdge) return 0.0;
        return 1.0 / (1.0 + std::exp(1.0 / (1.0 - t) - 1.0 / t));
    }
    if (t <= kEdge || t >= 1.0 - kEdge) return 0.0;
    double buf[32];
    if (k > 31) throw PreconditionError("smoothstep derivative order too high");
    smoothstep_derivatives(t, k, std::span<double>(buf, static_cast<std::size_t>(k) + 1));
    return buf[k];
}

double radial_value(const RadialParams& r, std::span<const double> p) {
    double rho2 = 0.0;
    for (int i = 0; i < r.dim; ++i) rho2 += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
    const double rho = std::sqrt(rho2);
    const double t = (rho - r.r1) / (r.r2 - r.r1);
    const double s = smoothstep_derivative(t, r.k);
    if (s == 0.0) return 0.0;
    if (r.m == 0) return s;
    return s * std::pow(rho, -r.m);
}

}  // namespace diffrep::expr
