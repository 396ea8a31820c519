#pragma once

#include <cstddef>

// Shared per-cell arithmetic for the screened-Laplacian stencil. Both the
// scalar backend and the SIMD boundary/remainder lanes call this, so any two
// backends produce bit-identical element-wise results (the operation tree per
// cell is fixed here).
namespace ks::kernels::detail {

inline double screened_cell(const double* xc, const double* xs, const double* xn,
                            int i, int nx, double sigma, double ihx2, double ihy2) {
    const double xi = xc[i];
    double dxx = 0.0;
    if (i > 0) dxx = xi - xc[i - 1];
    if (i + 1 < nx) dxx = dxx + (xi - xc[i + 1]);
    double dyy = 0.0;
    if (xs) dyy = xi - xs[i];
    if (xn) dyy = dyy + (xi - xn[i]);
    return (sigma * xi + ihx2 * dxx) + ihy2 * dyy;
}

}  // namespace ks::kernels::detail
