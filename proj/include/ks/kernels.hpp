#pragma once

#include <cstddef>
#include <string>

// Hot inner loops behind a runtime-dispatched function table. Every entry has
// a plain scalar reference implementation; on x86-64 an AVX2 variant is
// selected at startup when the CPU supports it. Element-wise kernels are
// bit-identical between backends (same operation tree per element); reductions
// may differ in rounding because SIMD uses lane-partial accumulators.
namespace ks::kernels {

struct Kernels {
    const char* name;

    // reductions
    double (*sum)(const double* x, std::size_t n);
    double (*sum_abs)(const double* x, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*wdot)(const double* x, const double* y, const double* w, std::size_t n);
    double (*abs_max)(const double* x, std::size_t n);
    double (*abs_max_diff)(const double* x, const double* y, std::size_t n);
    double (*min)(const double* x, std::size_t n);
    double (*max)(const double* x, std::size_t n);

    // element-wise
    void (*axpy)(double* y, double a, const double* x, std::size_t n);          // y += a*x
    void (*zpbp)(double* p, const double* z, double b, std::size_t n);          // p = z + b*p
    void (*scale)(double* out, double a, const double* x, std::size_t n);       // out = a*x
    void (*add_scalar)(double* x, double c, std::size_t n);                     // x += c
    void (*clip_negative)(double* x, std::size_t n);                            // x = (x<0) ? 0 : x

    // out = sigma*x - laplacian(x) on an nx-by-ny cell-centered grid with
    // homogeneous Neumann faces (missing-neighbor terms simply absent).
    void (*screened_apply_rect)(double* out, const double* x, int nx, int ny,
                                double sigma, double ihx2, double ihy2);
};

enum class Backend { auto_detect, scalar, avx2 };

// Active table. Chosen once: KS_KERNELS env var ("scalar"/"avx2"/"auto") wins,
// otherwise CPU detection. force() overrides for tests.
const Kernels& active();
void force(Backend b);

const Kernels& scalar_table();
bool avx2_available();
#ifdef KS_HAVE_AVX2
const Kernels& avx2_table();
#endif

}  // namespace ks::kernels
