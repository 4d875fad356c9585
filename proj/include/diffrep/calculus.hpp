#pragma once

// S/T operator calculus on H_n, the minimal-k procedure, and convolutions on
// R^m and on H_n.
//
// Conventions:
//   (f * g)(x)    = int f(t) g(x - t) dt                    on R^m
//   (f *_H g)(u)  = int f(v) g(v^{-1} u) dv                  on H_n
//   S f(x, y)     = int f(x, y, z) dz
//   T f(x, y, z)  = int_{-inf}^{z} f(x, y, t) dt             (only when S f = 0)
//
// All integrals are trapezoid sums on the grids; T is the cumulative trapezoid
// antiderivative so that the last value of T f along a fiber equals S f.

#include <optional>

#include "diffrep/report.hpp"
#include "diffrep/sampled.hpp"

namespace diffrep::calculus {

/// Relative threshold of the "S f = 0" test.
inline constexpr double kEpsS = 1e-8;
inline constexpr int kDefaultKMax = 16;

struct KernelBox {
    double a;
    double b;
};

/// Cumulative trapezoid antiderivative of a function on R. Requires the
/// support inside [a, b] and the grid covering [a, b].
SampledFunction op_T_1d(const SampledFunction& f, const KernelBox& box);

/// Fiberwise z-integral; the result lives on the (x, y) axes of the grid.
SampledFunction op_S(const SampledFunction& f);

/// Threshold below which ||S f||_inf counts as zero:
/// kEpsS * ||f||_inf * (z-extent of the support box).
double s_zero_threshold(const SampledFunction& f);
bool s_is_zero(const SampledFunction& f, const SampledFunction& sf);

/// Fiberwise z-antiderivative. Throws SNotZeroError unless S f is numerically zero.
SampledFunction op_T_heis(const SampledFunction& f);

struct MinimalKResult {
    int k = 0;
    SampledFunction result;  // S T^k f
    cplx integral_value;     // integral of S T^k f over R^{2n}
    std::vector<double> s_norms;  // ||S T^j f||_inf for j = 0..k
};

/// Smallest k such that S T^k f is not numerically zero.
MinimalKResult minimal_k(const SampledFunction& f, int k_max = kDefaultKMax);

/// Fiberwise k-th z-moment: int z^k f(x, y, z) dz.
SampledFunction moment_profile(const SampledFunction& f, int k);

enum class ConvMethod { Direct, Fft, Auto };

/// Convolution on R^m. Output grid: same spacing, covering the Minkowski sum of
/// the support boxes with one padding node per side.
SampledFunction conv_euclid(const SampledFunction& f, const SampledFunction& g,
                            ConvMethod method = ConvMethod::Auto);

/// Convolution on H_n by direct quadrature. g is read off-lattice in z by
/// linear interpolation. Output grid covers the bounding box of the product
/// set supp f * supp g (padded by one z cell for the interpolation).
/// The Fft method evaluates the same quadrature sum, doing the fiberwise
/// z-convolutions with 1-D transforms.
SampledFunction conv_heis(const SampledFunction& f, const SampledFunction& g,
                          ConvMethod method = ConvMethod::Auto);

/// Bounding box of {u v : u in a, v in b} for boxes in H_n.
Box heis_product_box(const Box& a, const Box& b);

struct CertificateOptions {
    int k_max = kDefaultKMax;
    /// Skip the S T^{k+l}(f *_H g) cross-check (it needs a full H_n convolution).
    bool verify_chain = true;
};

/// Non-vanishing certificate for f *_H g: builds S T^k f * S T^l g and
/// locates its largest node; optionally checks it against S T^{k+l}(f *_H g).
WitnessReport nonvanishing_certificate(const SampledFunction& f, const SampledFunction& g,
                                       const CertificateOptions& options = {});

}  // namespace diffrep::calculus
