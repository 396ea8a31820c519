#pragma once

#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "ks/elliptic.hpp"
#include "ks/grid.hpp"

namespace ks::theory {

// Open interval (lo, hi); hi may be +infinity (positive-part convention:
// division by a vanishing positive part).
struct Interval {
    double lo = 0;
    double hi = 0;
    bool empty() const { return !(lo < hi); }
    bool contains(double x) const { return lo < x && x < hi; }
};

// The staged admissible intervals for (theta, q0, mu) given n >= 3 integer,
// p > n/2, q > n. I1 depends on (n,p,q); I2 additionally on theta; I3 on
// theta and q0.
struct StagedIntervals {
    int n = 0;
    double p = 0, q = 0;
    Interval I1;
    Interval I2(double theta) const;
    Interval I3(double theta, double q0) const;
};

StagedIntervals intervals(int n, double p, double q);

enum class Selector { midpoint, lower_quartile };

// Cap applied to +infinity endpoints when a selector must pick a point.
inline constexpr double kEndpointCap = 1e6;

struct ParamWitness {
    int n = 0;
    double p = 0, q = 0;
    Interval I1, I2, I3;
    double theta = 0, q0 = 0, mu = 0;
    double a = 0;  // interpolation exponent in (0,1)
};

// Picks theta in I1, q0 in I2, mu in I3 by the selector and derives a.
// An empty interval here contradicts the admissibility lemma and signals an
// implementation bug (std::logic_error).
ParamWitness param_witness(int n, double p, double q, Selector selector = Selector::midpoint);

// a = ((q0-mu)*theta - q0*mu) / (q0*mu*(theta-1)); throws domain_error
// when the result leaves (0,1).
double interpolation_exponent(double theta, double q0, double mu);

// The seven strict inequalities the downstream estimates rely on, returned as
// positive margins (value > 0 means the inequality holds strictly):
//   theta > p; q0 < q; mu < q0; 1 < q0*mu/(q0-mu) < theta;
//   1/2 + (n/2)(1/p - 1/q0) < 1; 1/2 + (n/2)(1/mu - 1/theta) < 1;
//   1 - 1/2 - (n/2)(1/mu - 1/theta) - (n/2)(1/p - 1/theta) > 0.
std::array<double, 7> derived_inequality_margins(const ParamWitness& w);

// First nonzero Neumann eigenvalue of -laplacian: pi^2/max(Lx,Ly)^2 on the
// rectangle; (j/R)^2 on the radial disk with j the first positive root of
// J0'(j) = -J1(j) = 0, found by bisection.
double neumann_alpha(const Grid& grid);

double bessel_j1(double x);

// Empirical check of the four heat-semigroup estimates on a grid: evolve test
// fields, fit the tail decay exponent of the measured norm curve, and fit the
// smallest constant k with ||.|| <= k (1 + t^-power) e^(-alpha t) ||phi||.
struct SemigroupCheckConfig {
    double dt = 1e-3;
    double linear_tol = 1e-12;
    int n_times = 24;
    double t_lo = 0.05;   // scaled by 1/alpha
    double t_hi = 3.0;    // scaled by 1/alpha
    double exponent_slack = 0.05;
};

struct EstimateReport {
    int estimate = 0;  // 1..4
    double p = 0, q = 0;
    double measured_exponent = std::numeric_limits<double>::quiet_NaN();
    double fitted_prefactor = 0;
    bool degenerate = false;  // zero signal; bound holds trivially
    bool pass = false;
};

std::vector<EstimateReport> semigroup_empirical_check(
    const GridPtr& grid, const SemigroupCheckConfig& cfg,
    const std::vector<std::pair<double, double>>& pq_pairs,
    const std::vector<Field>& zero_mean_fields, const std::vector<Field>& general_fields);

}  // namespace ks::theory
