#pragma once

#include <optional>
#include <vector>

#include "ks/grid.hpp"

namespace ks {

// Face-normal components on interior faces. Boundary faces are not stored:
// their normal component is identically zero (the Neumann condition).
struct FaceVector {
    GridPtr grid;
    std::vector<double> fx;  // (nx-1)*ny interior x-faces; radial: nr-1 r-faces
    std::vector<double> fy;  // nx*(ny-1) interior y-faces; radial: empty

    static FaceVector zeros(const GridPtr& grid);
    double& x_face(int i, int j) { return fx[static_cast<std::size_t>(j) * (grid->nx() - 1) + i]; }
    double x_face(int i, int j) const { return fx[static_cast<std::size_t>(j) * (grid->nx() - 1) + i]; }
    double& y_face(int i, int j) { return fy[static_cast<std::size_t>(j) * grid->nx() + i]; }
    double y_face(int i, int j) const { return fy[static_cast<std::size_t>(j) * grid->nx() + i]; }
    double abs_max() const;
};

// sigma*I - laplacian with homogeneous Neumann faces. SPD for sigma > 0 in the
// cell-weighted inner product; positive semi-definite with constant kernel at
// sigma = 0.
class ScreenedOperator {
  public:
    ScreenedOperator(GridPtr grid, double sigma);

    double sigma() const { return sigma_; }
    const GridPtr& grid() const { return grid_; }
    void apply(const double* x, double* out) const;
    const std::vector<double>& inverse_diagonal() const { return inv_diag_; }

  private:
    GridPtr grid_;
    double sigma_;
    std::vector<double> inv_diag_;
};

Field laplacian_neumann(const Field& f);
FaceVector gradient_faces(const Field& f);
Field divergence(const FaceVector& flux);

// Reusable CG scratch space; one instance per thread/trajectory.
struct CgWorkspace {
    std::vector<double> r, z, p, ap;
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 20000;
    const Field* initial_guess = nullptr;  // default: rhs/sigma (zeros when sigma == 0)
    CgWorkspace* workspace = nullptr;
};

// Jacobi-preconditioned conjugate gradient, deterministic iteration order.
// Returns x with ||op(x) - rhs||_2 <= tol * ||rhs||_2 in the weighted L2 norm.
// sigma = 0 requires a zero-mean rhs and returns the zero-mean solution.
Field solve_spd(const ScreenedOperator& op, const Field& rhs, const SolveOptions& opts = {});

}  // namespace ks
