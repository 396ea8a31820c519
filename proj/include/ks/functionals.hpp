#pragma once

#include <limits>
#include <string>

#include "ks/operators.hpp"

namespace ks {

// Per-step observables; optional entries stay NaN until computed.
struct DiagnosticsRecord {
    double t = 0;
    double mass = 0;
    double linf_u = 0;
    double l2_u = 0;
    double lp_u_theta = 0;
    double w1q_v = 0;
    double lyapunov = 0;
    double dissipation_residual = std::numeric_limits<double>::quiet_NaN();
    double semigroup_deviation = std::numeric_limits<double>::quiet_NaN();
    double dt_used = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

// Discrete Dirichlet energy: integral of |grad f|^2 by face quadrature. This
// is exactly <-laplacian f, f> in the cell-weighted inner product.
double dirichlet_energy(const Field& f);

// W = integral(u log u - chi u v + (chi/2)(|grad v|^2 + v^2)), 0 log 0 := 0.
// Throws domain_error when u dips below -1e-12 * ||u||_inf.
double lyapunov(const Field& u, const Field& v, double chi);

struct TrajectorySample {
    double t = 0;
    Field u;
    Field v;
};

// |dW/dt + chi*lambda*||v_t||_2^2 + integral(u |grad(log u - chi v)|^2)| at
// the middle of three uniformly spaced samples; v_t and dW/dt by centered
// differences of the stored snapshots. Faces adjacent to cells with
// u <= 1e-14 * ||u||_inf contribute zero to the log-gradient term.
double dissipation_residual(const TrajectorySample& s0, const TrajectorySample& s1,
                            const TrajectorySample& s2, double chi, double lambda);

// ||u_t - heat_snapshot||_theta on matching grids.
double semigroup_deviation(const Field& u_t, const Field& heat_snapshot, double theta);

// (||v||_q^q + |||grad v|||_q^q)^(1/q); face gradients averaged to cells
// (boundary faces count as zero).
double w1q_norm(const Field& v, double q);

// Per-cell gradient magnitude field (face components averaged to the cell).
Field gradient_magnitude(const Field& v);

// Running sup_t ||u_pp - u_pe||_inf over [0, t_end] plus the trapezoid of
// ||v_pp - v_pe||^2_{W^{1,2}} over samples with t >= t0.
class PpPeErrorAccumulator {
  public:
    explicit PpPeErrorAccumulator(double t0) : t0_(t0) {}

    void add(double t_pp, const Field& u_pp, const Field& v_pp,
             double t_pe, const Field& u_pe, const Field& v_pe);

    double sup_linf_u() const { return sup_linf_u_; }
    double int_l2_w12_v() const { return int_v_; }

  private:
    double t0_;
    double sup_linf_u_ = 0.0;
    double int_v_ = 0.0;
    double prev_t_ = std::numeric_limits<double>::quiet_NaN();
    double prev_val_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace ks
