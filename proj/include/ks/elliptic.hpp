#pragma once

#include <span>
#include <vector>

#include "ks/operators.hpp"

namespace ks {

// Solves (I - laplacian) v = u with Neumann faces. Nonnegative u gives
// nonnegative v (M-matrix maximum principle, up to solver tolerance).
Field solve_screened_poisson(const Field& u, double tol = 1e-10,
                             const Field* initial_guess = nullptr,
                             CgWorkspace* workspace = nullptr);

// Incremental backward-Euler march of f_t = laplacian f. Mass is pinned to the
// initial integral after every step (the implicit solve's mass defect is
// redistributed uniformly).
class HeatMarch {
  public:
    HeatMarch(Field f0, double linear_tol = 1e-12);

    void step(double dt);
    const Field& field() const { return f_; }
    double time() const { return t_; }
    double initial_mass() const { return mass0_; }

  private:
    Field f_;
    double t_ = 0.0;
    double mass0_ = 0.0;
    double tol_;
    CgWorkspace ws_;
};

// e^{t*laplacian} f0 via ceil(t/dt) backward-Euler steps, last step shortened.
Field heat_propagate(const Field& f0, double t, double dt, double linear_tol = 1e-12);

// Snapshots of e^{t*laplacian} u_init at the (strictly increasing) times in
// t_grid, computed by one continuing march: each interval is covered by full
// dt steps with a shortened final step, so the first snapshot is bit-identical
// to heat_propagate(u_init, t_grid[0], dt).
std::vector<Field> semigroup_cache(const Field& u_init, std::span<const double> t_grid, double dt,
                                   double linear_tol = 1e-12);

}  // namespace ks
