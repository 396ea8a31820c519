// AVX2 variants of the hot kernels. Compiled with -mavx2 only (no -mfma), so
// element-wise results match the scalar reference bit for bit; reductions use
// four lane accumulators and differ from the scalar sum by reassociation only.
#include "ks/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

#include "kernels_detail.hpp"

namespace ks::kernels {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

inline double hmax(__m128d pair) {
    return _mm_cvtsd_f64(_mm_max_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

inline double hmin(__m128d pair) {
    return _mm_cvtsd_f64(_mm_min_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

const __m256d k_absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

double v_sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double v_sum_abs(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_and_pd(k_absmask, _mm256_loadu_pd(x + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

double v_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double v_wdot(const double* x, const double* y, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(xy, _mm256_loadu_pd(w + i)));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += (x[i] * y[i]) * w[i];
    return s;
}

double v_abs_max(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_and_pd(k_absmask, _mm256_loadu_pd(x + i)));
    double m = hmax(_mm_max_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1)));
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

double v_abs_max_diff(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_max_pd(acc, _mm256_and_pd(k_absmask, d));
    }
    double m = hmax(_mm_max_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1)));
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    return m;
}

double v_min(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    double m = x[0];
    std::size_t i = 1;
    if (n >= 5) {
        __m256d acc = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
        m = hmin(_mm_min_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1)));
    }
    for (; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

double v_max(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    double m = x[0];
    std::size_t i = 1;
    if (n >= 5) {
        __m256d acc = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
        m = hmax(_mm_max_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1)));
    }
    for (; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

void v_axpy(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                        _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, t);
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void v_zpbp(double* p, const double* z, double b, std::size_t n) {
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_add_pd(_mm256_loadu_pd(z + i),
                                        _mm256_mul_pd(vb, _mm256_loadu_pd(p + i)));
        _mm256_storeu_pd(p + i, t);
    }
    for (; i < n; ++i) p[i] = z[i] + b * p[i];
}

void v_scale(double* out, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = a * x[i];
}

void v_add_scalar(double* x, double c, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), vc));
    for (; i < n; ++i) x[i] = x[i] + c;
}

void v_clip_negative(double* x, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d neg = _mm256_cmp_pd(v, zero, _CMP_LT_OQ);
        _mm256_storeu_pd(x + i, _mm256_blendv_pd(v, zero, neg));
    }
    for (; i < n; ++i)
        if (x[i] < 0.0) x[i] = 0.0;
}

// Row-wise stencil: first/last column and the tail go through the shared
// scalar cell; interior columns are 4-wide with the same operation tree
// (xi-xW)+(xi-xE), (xi-xS)+(xi-xN), out = (sigma*xi + ihx2*dxx) + ihy2*dyy.
void v_screened_apply_rect(double* out, const double* x, int nx, int ny,
                           double sigma, double ihx2, double ihy2) {
    const __m256d vs = _mm256_set1_pd(sigma);
    const __m256d vhx = _mm256_set1_pd(ihx2);
    const __m256d vhy = _mm256_set1_pd(ihy2);
    for (int j = 0; j < ny; ++j) {
        const double* xc = x + static_cast<std::size_t>(j) * nx;
        const double* xs = (j > 0) ? xc - nx : nullptr;
        const double* xn = (j + 1 < ny) ? xc + nx : nullptr;
        double* o = out + static_cast<std::size_t>(j) * nx;

        o[0] = detail::screened_cell(xc, xs, xn, 0, nx, sigma, ihx2, ihy2);
        int i = 1;
        for (; i + 4 <= nx - 1; i += 4) {
            const __m256d xi = _mm256_loadu_pd(xc + i);
            const __m256d dxx =
                _mm256_add_pd(_mm256_sub_pd(xi, _mm256_loadu_pd(xc + i - 1)),
                              _mm256_sub_pd(xi, _mm256_loadu_pd(xc + i + 1)));
            __m256d dyy = _mm256_setzero_pd();
            if (xs) dyy = _mm256_sub_pd(xi, _mm256_loadu_pd(xs + i));
            if (xn) dyy = _mm256_add_pd(dyy, _mm256_sub_pd(xi, _mm256_loadu_pd(xn + i)));
            const __m256d r = _mm256_add_pd(
                _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vhx, dxx)),
                _mm256_mul_pd(vhy, dyy));
            _mm256_storeu_pd(o + i, r);
        }
        for (; i < nx; ++i)
            o[i] = detail::screened_cell(xc, xs, xn, i, nx, sigma, ihx2, ihy2);
    }
}

constexpr Kernels k_avx2 = {
    "avx2",
    v_sum, v_sum_abs, v_dot, v_wdot, v_abs_max, v_abs_max_diff, v_min, v_max,
    v_axpy, v_zpbp, v_scale, v_add_scalar, v_clip_negative,
    v_screened_apply_rect,
};

}  // namespace

const Kernels& avx2_table() { return k_avx2; }

}  // namespace ks::kernels

#endif  // __AVX2__
