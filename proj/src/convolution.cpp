#include <algorithm>
#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "diffrep/calculus.hpp"
#include "diffrep/errors.hpp"

namespace diffrep::calculus {

namespace {

// FFTW buffer with RAII ownership.
class FftBuffer {
public:
    explicit FftBuffer(std::size_t n) : n_(n), data_(fftw_alloc_complex(n)) {
        if (data_ == nullptr) throw Error("fftw allocation failed");
        std::fill_n(reinterpret_cast<double*>(data_), 2 * n, 0.0);
    }
    ~FftBuffer() { fftw_free(data_); }
    FftBuffer(const FftBuffer&) = delete;
    FftBuffer& operator=(const FftBuffer&) = delete;

    fftw_complex* data() { return data_; }
    cplx get(std::size_t i) const { return {data_[i][0], data_[i][1]}; }
    void set(std::size_t i, cplx v) {
        data_[i][0] = v.real();
        data_[i][1] = v.imag();
    }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex* data_;
};

class FftPlan {
public:
    FftPlan(const std::vector<int>& shape, fftw_complex* buf, int sign) {
        plan_ = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf, buf, sign, FFTW_ESTIMATE);
        if (plan_ == nullptr) throw Error("fftw planning failed");
    }
    ~FftPlan() { fftw_destroy_plan(plan_); }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void run() const { fftw_execute(plan_); }
    void run(fftw_complex* buf) const { fftw_execute_dft(plan_, buf, buf); }

private:
    fftw_plan plan_;
};

// Smallest 7-smooth integer >= n.
std::size_t fft_size(std::size_t n) {
    for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

void require_compatible(const SampledFunction& f, const SampledFunction& g) {
    if (f.dim() != g.dim()) throw DimensionMismatch("convolution operands differ in dimension");
    if (!f.grid().same_spacing(g.grid())) throw GridMismatch("convolution operands differ in spacing");
}

IndexBox nonempty_support_nodes(const SampledFunction& f) {
    IndexBox b = f.support_nodes();
    if (b.empty()) throw PreconditionError("support box holds no grid nodes");
    return b;
}

Box clip_to(const Box& b, const GridSpec& g) {
    Box r = b;
    for (std::size_t a = 0; a < b.dim(); ++a) {
        r.lo[a] = std::clamp(b.lo[a], g.lo()[a], g.hi()[a]);
        r.hi[a] = std::clamp(b.hi[a], g.lo()[a], g.hi()[a]);
    }
    return r;
}

inline void mul_add(double* acc, const double* a, const double* b) {
    acc[0] += a[0] * b[0] - a[1] * b[1];
    acc[1] += a[0] * b[1] + a[1] * b[0];
}

inline void mul_to(double* out, const double* a, const double* b) {
    out[0] = a[0] * b[0] - a[1] * b[1];
    out[1] = a[0] * b[1] + a[1] * b[0];
}

}  // namespace

SampledFunction conv_euclid(const SampledFunction& f, const SampledFunction& g, ConvMethod method) {
    require_compatible(f, g);
    const std::size_t d = f.dim();
    const GridSpec& fg = f.grid();
    const IndexBox fs = nonempty_support_nodes(f);
    const IndexBox gs = nonempty_support_nodes(g);

    std::vector<double> origin(d);
    std::vector<std::ptrdiff_t> first(d);
    std::vector<std::size_t> counts(d), nf(d), ng(d);
    for (std::size_t a = 0; a < d; ++a) {
        origin[a] = fg.lo()[a] + g.grid().lo()[a];
        first[a] = fs.lo[a] + gs.lo[a] - 1;
        nf[a] = static_cast<std::size_t>(fs.hi[a] - fs.lo[a] + 1);
        ng[a] = static_cast<std::size_t>(gs.hi[a] - gs.lo[a] + 1);
        counts[a] = nf[a] + ng[a] + 1;
    }
    GridSpec out_grid = GridSpec::on_lattice(origin, fg.spacings(), first, counts);
    std::vector<cplx> out(out_grid.size(), 0.0);
    const auto& os = out_grid.strides();

    if (method == ConvMethod::Auto) {
        double direct = static_cast<double>(fs.count()) * static_cast<double>(gs.count());
        double total = 1.0;
        for (std::size_t a = 0; a < d; ++a) total *= static_cast<double>(fft_size(nf[a] + ng[a] - 1));
        method = direct <= 8.0 * total * std::log2(total + 2.0) ? ConvMethod::Direct : ConvMethod::Fft;
    }

    if (method == ConvMethod::Direct) {
        std::vector<std::pair<std::size_t, cplx>> gl;
        for (IndexIterator it(gs); !it.done(); it.next()) {
            const cplx v = g.at(it.index());
            if (v == cplx{}) continue;
            std::size_t off = 0;
            for (std::size_t a = 0; a < d; ++a) off += static_cast<std::size_t>(it.index()[a] - gs.lo[a]) * os[a];
            gl.emplace_back(off, v);
        }
        for (IndexIterator it(fs); !it.done(); it.next()) {
            const cplx fv = f.at(it.index());
            if (fv == cplx{}) continue;
            const cplx wf = fg.weight(it.index()) * fv;
            std::size_t base = 0;
            for (std::size_t a = 0; a < d; ++a) base += static_cast<std::size_t>(it.index()[a] - fs.lo[a] + 1) * os[a];
            for (const auto& [off, gv] : gl) out[base + off] += wf * gv;
        }
    } else {
        std::vector<int> shape(d);
        std::vector<std::size_t> strides(d, 1);
        std::size_t total = 1;
        for (std::size_t a = 0; a < d; ++a) {
            shape[a] = static_cast<int>(fft_size(nf[a] + ng[a] - 1));
            total *= static_cast<std::size_t>(shape[a]);
        }
        for (std::size_t a = d - 1; a-- > 0;) strides[a] = strides[a + 1] * static_cast<std::size_t>(shape[a + 1]);

        FftBuffer A(total), B(total);
        for (IndexIterator it(fs); !it.done(); it.next()) {
            std::size_t p = 0;
            for (std::size_t a = 0; a < d; ++a) p += static_cast<std::size_t>(it.index()[a] - fs.lo[a]) * strides[a];
            A.set(p, fg.weight(it.index()) * f.at(it.index()));
        }
        for (IndexIterator it(gs); !it.done(); it.next()) {
            std::size_t p = 0;
            for (std::size_t a = 0; a < d; ++a) p += static_cast<std::size_t>(it.index()[a] - gs.lo[a]) * strides[a];
            B.set(p, g.at(it.index()));
        }
        const FftPlan forward(shape, A.data(), FFTW_FORWARD);
        const FftPlan backward(shape, A.data(), FFTW_BACKWARD);
        forward.run(A.data());
        forward.run(B.data());
        for (std::size_t i = 0; i < total; ++i) {
            double prod[2];
            mul_to(prod, A.data()[i], B.data()[i]);
            A.data()[i][0] = prod[0];
            A.data()[i][1] = prod[1];
        }
        backward.run(A.data());
        const double scale = 1.0 / static_cast<double>(total);
        IndexBox valid;
        valid.lo.assign(d, 0);
        for (std::size_t a = 0; a < d; ++a) valid.hi.push_back(static_cast<std::ptrdiff_t>(nf[a] + ng[a]) - 2);
        for (IndexIterator it(valid); !it.done(); it.next()) {
            std::size_t p = 0, q = 0;
            for (std::size_t a = 0; a < d; ++a) {
                p += static_cast<std::size_t>(it.index()[a]) * strides[a];
                q += static_cast<std::size_t>(it.index()[a] + 1) * os[a];
            }
            out[q] = scale * A.get(p);
        }
    }

    Box support = clip_to(minkowski_sum(f.support(), g.support()), out_grid);
    return SampledFunction(std::move(out_grid), std::move(support), std::move(out));
}

Box heis_product_box(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("box dimension mismatch");
    if (a.dim() % 2 == 0) throw DimensionMismatch("H_n box must have odd dimension");
    const std::size_t n = a.dim() / 2;
    Box r = minkowski_sum(a, b);
    for (std::size_t i = 0; i < n; ++i) {
        const double c[4] = {a.lo[i] * b.lo[n + i], a.lo[i] * b.hi[n + i], a.hi[i] * b.lo[n + i],
                             a.hi[i] * b.hi[n + i]};
        r.lo[2 * n] += *std::min_element(c, c + 4);
        r.hi[2 * n] += *std::max_element(c, c + 4);
    }
    return r;
}

SampledFunction conv_heis(const SampledFunction& f, const SampledFunction& g, ConvMethod method) {
    require_compatible(f, g);
    const std::size_t d = f.dim();
    if (d < 3 || d % 2 == 0) throw DimensionMismatch("conv_heis expects functions on H_n");
    const std::size_t n = d / 2, za = 2 * n;
    const GridSpec& fg = f.grid();
    const GridSpec& gg = g.grid();
    const double hz = fg.spacing(za);
    const IndexBox fs = nonempty_support_nodes(f);
    const IndexBox gs = nonempty_support_nodes(g);

    // Range of the twist s = x(v) . y(w) over the support nodes.
    double smin = 0.0, smax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = fg.coord(i, fs.lo[i]), x1 = fg.coord(i, fs.hi[i]);
        const double y0 = gg.coord(n + i, gs.lo[n + i]), y1 = gg.coord(n + i, gs.hi[n + i]);
        const double c[4] = {x0 * y0, x0 * y1, x1 * y0, x1 * y1};
        smin += *std::min_element(c, c + 4);
        smax += *std::max_element(c, c + 4);
    }
    const auto mmin = static_cast<std::ptrdiff_t>(std::floor(smin / hz)) - 1;
    const auto mmax = static_cast<std::ptrdiff_t>(std::floor(smax / hz)) + 1;
    const std::ptrdiff_t qlo = fs.lo[za] + gs.lo[za];
    const std::ptrdiff_t qhi = fs.hi[za] + gs.hi[za];

    std::vector<double> origin(d);
    std::vector<std::ptrdiff_t> first(d);
    std::vector<std::size_t> counts(d);
    for (std::size_t a = 0; a < za; ++a) {
        origin[a] = fg.lo()[a] + gg.lo()[a];
        first[a] = fs.lo[a] + gs.lo[a] - 1;
        counts[a] = static_cast<std::size_t>((fs.hi[a] - fs.lo[a]) + (gs.hi[a] - gs.lo[a]) + 3);
    }
    origin[za] = fg.lo()[za] + gg.lo()[za];
    first[za] = qlo + mmin;
    counts[za] = static_cast<std::size_t>(qhi + mmax + 1 - first[za] + 1);
    GridSpec out_grid = GridSpec::on_lattice(origin, fg.spacings(), first, counts);
    const std::size_t nzo = counts[za];

    // Columns over the (x, y) support nodes, indexed locally.
    const auto nfz = static_cast<std::size_t>(fs.hi[za] - fs.lo[za] + 1);
    const auto ngz = static_cast<std::size_t>(gs.hi[za] - gs.lo[za] + 1);
    std::vector<std::size_t> fext(za), gext(za), fstr(za, 1), gstr(za, 1), ostr(za, 1);
    for (std::size_t a = 0; a < za; ++a) {
        fext[a] = static_cast<std::size_t>(fs.hi[a] - fs.lo[a] + 1);
        gext[a] = static_cast<std::size_t>(gs.hi[a] - gs.lo[a] + 1);
    }
    for (std::size_t a = za - 1; a-- > 0;) {
        fstr[a] = fstr[a + 1] * fext[a + 1];
        gstr[a] = gstr[a + 1] * gext[a + 1];
        ostr[a] = ostr[a + 1] * counts[a + 1];
    }
    const std::size_t nfcol = fstr[0] * fext[0];
    const std::size_t ngcol = gstr[0] * gext[0];
    const std::size_t nocol = ostr[0] * counts[0];

    if (method == ConvMethod::Auto) {
        const std::size_t lz = fft_size(nzo);
        method = nfz * ngz > 4 * lz ? ConvMethod::Fft : ConvMethod::Direct;
    }

    // Weighted f columns and g columns (z values over the support range).
    std::vector<cplx> fcol(nfcol * nfz), gcol(ngcol * ngz);
    std::vector<char> fnz(nfcol, 0), gnz(ngcol, 0);
    {
        std::vector<std::ptrdiff_t> idx(d);
        IndexBox fxy{std::vector<std::ptrdiff_t>(fs.lo.begin(), fs.lo.end() - 1),
                     std::vector<std::ptrdiff_t>(fs.hi.begin(), fs.hi.end() - 1)};
        std::size_t c = 0;
        for (IndexIterator it(fxy); !it.done(); it.next(), ++c) {
            std::copy(it.index().begin(), it.index().end(), idx.begin());
            double wxy = 1.0;
            for (std::size_t a = 0; a < za; ++a) wxy *= fg.axis_weight(a, idx[a]);
            for (std::size_t k = 0; k < nfz; ++k) {
                idx[za] = fs.lo[za] + static_cast<std::ptrdiff_t>(k);
                const cplx v = wxy * fg.axis_weight(za, idx[za]) * f.at(idx);
                fcol[c * nfz + k] = v;
                if (v != cplx{}) fnz[c] = 1;
            }
        }
        IndexBox gxy{std::vector<std::ptrdiff_t>(gs.lo.begin(), gs.lo.end() - 1),
                     std::vector<std::ptrdiff_t>(gs.hi.begin(), gs.hi.end() - 1)};
        c = 0;
        for (IndexIterator it(gxy); !it.done(); it.next(), ++c) {
            std::copy(it.index().begin(), it.index().end(), idx.begin());
            for (std::size_t k = 0; k < ngz; ++k) {
                idx[za] = gs.lo[za] + static_cast<std::ptrdiff_t>(k);
                const cplx v = g.at(idx);
                gcol[c * ngz + k] = v;
                if (v != cplx{}) gnz[c] = 1;
            }
        }
    }

    // Iterate x-parts of v and y-parts of w (which fix the twist), then the
    // remaining y-parts of v and x-parts of w.
    IndexBox vx_box, wy_box, vy_box, wx_box;
    for (std::size_t i = 0; i < n; ++i) {
        vx_box.lo.push_back(0);
        vx_box.hi.push_back(static_cast<std::ptrdiff_t>(fext[i]) - 1);
        vy_box.lo.push_back(0);
        vy_box.hi.push_back(static_cast<std::ptrdiff_t>(fext[n + i]) - 1);
        wx_box.lo.push_back(0);
        wx_box.hi.push_back(static_cast<std::ptrdiff_t>(gext[i]) - 1);
        wy_box.lo.push_back(0);
        wy_box.hi.push_back(static_cast<std::ptrdiff_t>(gext[n + i]) - 1);
    }
    auto twist = [&](const std::vector<std::ptrdiff_t>& vx, const std::vector<std::ptrdiff_t>& wy) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += fg.coord(i, fs.lo[i] + vx[i]) * gg.coord(n + i, gs.lo[n + i] + wy[i]);
        return s;
    };
    // Local column offsets; the output column of (v, w) is (v + w + 1) per axis.
    auto fcol_of = [&](const std::vector<std::ptrdiff_t>& vx, const std::vector<std::ptrdiff_t>& vy) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i)
            c += static_cast<std::size_t>(vx[i]) * fstr[i] + static_cast<std::size_t>(vy[i]) * fstr[n + i];
        return c;
    };
    auto gcol_of = [&](const std::vector<std::ptrdiff_t>& wx, const std::vector<std::ptrdiff_t>& wy) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i)
            c += static_cast<std::size_t>(wx[i]) * gstr[i] + static_cast<std::size_t>(wy[i]) * gstr[n + i];
        return c;
    };
    auto ocol_of = [&](const std::vector<std::ptrdiff_t>& vx, const std::vector<std::ptrdiff_t>& vy,
                       const std::vector<std::ptrdiff_t>& wx, const std::vector<std::ptrdiff_t>& wy) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i) {
            c += static_cast<std::size_t>(vx[i] + wx[i] + 1) * ostr[i];
            c += static_cast<std::size_t>(vy[i] + wy[i] + 1) * ostr[n + i];
        }
        return c;
    };

    std::vector<cplx> out(out_grid.size(), 0.0);

    if (method == ConvMethod::Direct) {
        std::vector<cplx> cbuf(nfz + ngz - 1);
        for (IndexIterator ivx(vx_box); !ivx.done(); ivx.next()) {
            for (IndexIterator iwy(wy_box); !iwy.done(); iwy.next()) {
                const double e = twist(ivx.index(), iwy.index()) / hz;
                const double mf = std::floor(e);
                const double a = e - mf;
                // Output position of c[q] shifted by m: P = q - qlo + (m - mmin).
                const auto shift = static_cast<std::ptrdiff_t>(mf) - mmin;
                for (IndexIterator ivy(vy_box); !ivy.done(); ivy.next()) {
                    const std::size_t fc = fcol_of(ivx.index(), ivy.index());
                    if (!fnz[fc]) continue;
                    const cplx* fp = &fcol[fc * nfz];
                    for (IndexIterator iwx(wx_box); !iwx.done(); iwx.next()) {
                        const std::size_t gc = gcol_of(iwx.index(), iwy.index());
                        if (!gnz[gc]) continue;
                        const cplx* gp = &gcol[gc * ngz];
                        std::fill(cbuf.begin(), cbuf.end(), cplx{});
                        for (std::size_t j = 0; j < nfz; ++j) {
                            if (fp[j] == cplx{}) continue;
                            for (std::size_t p = 0; p < ngz; ++p) cbuf[j + p] += fp[j] * gp[p];
                        }
                        cplx* op = &out[ocol_of(ivx.index(), ivy.index(), iwx.index(), iwy.index()) * nzo];
                        for (std::size_t q = 0; q < cbuf.size(); ++q) {
                            const auto P = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(q) + shift);
                            op[P] += (1.0 - a) * cbuf[q];
                            op[P + 1] += a * cbuf[q];
                        }
                    }
                }
            }
        }
    } else {
        const std::size_t lz = fft_size(nzo);
        const std::vector<int> shape{static_cast<int>(lz)};
        FftBuffer work(lz);
        const FftPlan forward(shape, work.data(), FFTW_FORWARD);
        const FftPlan backward(shape, work.data(), FFTW_BACKWARD);

        auto transform_columns = [&](const std::vector<cplx>& cols, std::size_t ncol, std::size_t nz,
                                     const std::vector<char>& nzmask) {
            std::vector<double> spec(2 * ncol * lz, 0.0);
            for (std::size_t c = 0; c < ncol; ++c) {
                if (!nzmask[c]) continue;
                std::fill_n(reinterpret_cast<double*>(work.data()), 2 * lz, 0.0);
                for (std::size_t k = 0; k < nz; ++k) work.set(k, cols[c * nz + k]);
                forward.run(work.data());
                std::copy_n(reinterpret_cast<const double*>(work.data()), 2 * lz, &spec[2 * c * lz]);
            }
            return spec;
        };
        const std::vector<double> fhat = transform_columns(fcol, nfcol, nfz, fnz);
        const std::vector<double> ghat = transform_columns(gcol, ngcol, ngz, gnz);

        std::vector<double> twiddle(2 * lz);
        for (std::size_t k = 0; k < lz; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(lz);
            twiddle[2 * k] = std::cos(ang);
            twiddle[2 * k + 1] = std::sin(ang);
        }

        std::vector<double> acc(2 * nocol * lz, 0.0);
        std::vector<char> ocol_used(nocol, 0);
        std::vector<double> H(2 * lz), tmp(2 * lz);
        for (IndexIterator ivx(vx_box); !ivx.done(); ivx.next()) {
            for (IndexIterator iwy(wy_box); !iwy.done(); iwy.next()) {
                const double e = twist(ivx.index(), iwy.index()) / hz;
                const double mf = std::floor(e);
                const double a = e - mf;
                const auto shift = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(mf) - mmin);
                // Transfer function of "shift by `shift`, then blend with the next node".
                for (std::size_t k = 0; k < lz; ++k) {
                    const double* ek = &twiddle[2 * ((k * shift) % lz)];
                    const double lin[2] = {(1.0 - a) + a * twiddle[2 * k], a * twiddle[2 * k + 1]};
                    mul_to(&H[2 * k], ek, lin);
                }
                for (IndexIterator ivy(vy_box); !ivy.done(); ivy.next()) {
                    const std::size_t fc = fcol_of(ivx.index(), ivy.index());
                    if (!fnz[fc]) continue;
                    const double* fp = &fhat[2 * fc * lz];
                    for (std::size_t k = 0; k < lz; ++k) mul_to(&tmp[2 * k], fp + 2 * k, &H[2 * k]);
                    for (IndexIterator iwx(wx_box); !iwx.done(); iwx.next()) {
                        const std::size_t gc = gcol_of(iwx.index(), iwy.index());
                        if (!gnz[gc]) continue;
                        const double* gp = &ghat[2 * gc * lz];
                        const std::size_t oc = ocol_of(ivx.index(), ivy.index(), iwx.index(), iwy.index());
                        ocol_used[oc] = 1;
                        double* op = &acc[2 * oc * lz];
                        for (std::size_t k = 0; k < lz; ++k) mul_add(op + 2 * k, &tmp[2 * k], gp + 2 * k);
                    }
                }
            }
        }

        const double scale = 1.0 / static_cast<double>(lz);
        for (std::size_t oc = 0; oc < nocol; ++oc) {
            if (!ocol_used[oc]) continue;
            std::copy_n(&acc[2 * oc * lz], 2 * lz, reinterpret_cast<double*>(work.data()));
            backward.run(work.data());
            for (std::size_t k = 0; k < nzo; ++k) out[oc * nzo + k] = scale * work.get(k);
        }
    }

    Box support = heis_product_box(f.support(), g.support());
    support.lo[za] -= hz;
    support.hi[za] += hz;
    support = clip_to(support, out_grid);
    return SampledFunction(std::move(out_grid), std::move(support), std::move(out));
}

}  // namespace diffrep::calculus
