#include "ks/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "ks/errors.hpp"
#include "kernels_detail.hpp"

namespace ks::kernels {

namespace {

double s_sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double s_sum_abs(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
    return s;
}

double s_dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double s_wdot(const double* x, const double* y, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (x[i] * y[i]) * w[i];
    return s;
}

double s_abs_max(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

double s_abs_max_diff(const double* x, const double* y, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    return m;
}

double s_min(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

double s_max(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

void s_axpy(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void s_zpbp(double* p, const double* z, double b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + b * p[i];
}

void s_scale(double* out, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}

void s_add_scalar(double* x, double c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = x[i] + c;
}

void s_clip_negative(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] < 0.0) x[i] = 0.0;
}

void s_screened_apply_rect(double* out, const double* x, int nx, int ny,
                           double sigma, double ihx2, double ihy2) {
    for (int j = 0; j < ny; ++j) {
        const double* xc = x + static_cast<std::size_t>(j) * nx;
        const double* xs = (j > 0) ? xc - nx : nullptr;
        const double* xn = (j + 1 < ny) ? xc + nx : nullptr;
        double* o = out + static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i)
            o[i] = detail::screened_cell(xc, xs, xn, i, nx, sigma, ihx2, ihy2);
    }
}

constexpr Kernels k_scalar = {
    "scalar",
    s_sum, s_sum_abs, s_dot, s_wdot, s_abs_max, s_abs_max_diff, s_min, s_max,
    s_axpy, s_zpbp, s_scale, s_add_scalar, s_clip_negative,
    s_screened_apply_rect,
};

const Kernels* g_forced = nullptr;

const Kernels& pick(Backend b) {
    switch (b) {
        case Backend::scalar:
            return k_scalar;
        case Backend::avx2:
#ifdef KS_HAVE_AVX2
            if (avx2_available()) return avx2_table();
#endif
            throw config_error("kernels: avx2 backend requested but not available");
        case Backend::auto_detect:
        default:
#ifdef KS_HAVE_AVX2
            if (avx2_available()) return avx2_table();
#endif
            return k_scalar;
    }
}

const Kernels& choose_from_env() {
    const char* env = std::getenv("KS_KERNELS");
    if (env) {
        const std::string v(env);
        if (v == "scalar") return pick(Backend::scalar);
        if (v == "avx2") return pick(Backend::avx2);
    }
    return pick(Backend::auto_detect);
}

}  // namespace

const Kernels& scalar_table() { return k_scalar; }

bool avx2_available() {
#if defined(KS_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Kernels& active() {
    static const Kernels& detected = choose_from_env();
    return g_forced ? *g_forced : detected;
}

void force(Backend b) { g_forced = &pick(b); }

}  // namespace ks::kernels
