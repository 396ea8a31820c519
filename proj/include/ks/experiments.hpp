#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ks/dynamics.hpp"

namespace ks::experiments {

// Restrict a field on a 2x-refined grid to the coarse grid (cell averages;
// mass-weighted on the radial disk).
Field restrict_to_coarse(const Field& fine, const GridPtr& coarse);

// ---------------------------------------------------------------------------
// Fast-signal-diffusion-limit sweep
// ---------------------------------------------------------------------------

struct SweepSetup {
    GridPtr grid;
    Field u_init;
    Field v_init;
    // Optional 2x-refined control problem for the discretization floor.
    GridPtr fine_grid;
    Field u_init_fine;
    Field v_init_fine;
    double chi = 1.0;
    double lambda_cap = 1.0;
    double t0 = 0.2;  // v-error integration starts here (excludes t = 0)
    StepperConfig stepper;
    int jobs = 1;
};

struct SweepReport {
    std::vector<double> lambda_values;  // strictly decreasing
    std::vector<double> err_u_cloc;     // sup_t ||u_l - u||_inf per lambda
    std::vector<double> err_v_l2w12;    // int ||v_l - v||^2_W12 dt per lambda
    double fitted_rate_u = std::numeric_limits<double>::quiet_NaN();
    double fitted_rate_v = std::numeric_limits<double>::quiet_NaN();
    double floor_u = std::numeric_limits<double>::quiet_NaN();
    double floor_v = std::numeric_limits<double>::quiet_NaN();
    double dt_fixed = 0;
    bool monotone_u = false, monotone_v = false;  // within 5% slack
    bool aborted = false;
    std::string abort_reason;
    std::vector<DiagnosticsRecord> pe_records;
    std::vector<std::vector<DiagnosticsRecord>> records_per_lambda;
};

// Runs the parabolic-elliptic problem once and one coupled run per lambda on
// a shared fixed-dt schedule (0.85 x the adaptive minimum of a preliminary
// parabolic-elliptic pass), accumulating the two convergence errors.
SweepReport lambda_sweep(const SweepSetup& setup, std::vector<double> lambdas);

// ---------------------------------------------------------------------------
// Critical-mass scan
// ---------------------------------------------------------------------------

struct ScanOutcome {
    double mass = 0;
    std::string classification;  // bounded | blowup_suspected | inconclusive
    Termination termination = Termination::completed;
    double linf_init = 0;
    double linf_peak = 0;
    double t_reached = 0;
};

struct ScanReport {
    double chi = 0;
    double width_frac = 0;
    std::vector<ScanOutcome> outcomes;  // sorted by mass
    double bracket_lo = std::numeric_limits<double>::quiet_NaN();  // largest bounded
    double bracket_hi = std::numeric_limits<double>::quiet_NaN();  // smallest blow-up
    bool inversion = false;  // bounded mass above a blow-up mass: scan fails
};

struct ScanSetup {
    GridPtr grid;
    double chi = 1.0;
    double width_frac = 0.05;  // gaussian width as a fraction of R (or min side)
    StepperConfig stepper;
    int jobs = 1;
};

ScanReport blowup_scan(const ScanSetup& setup, std::vector<double> masses);

// ---------------------------------------------------------------------------
// Uniqueness / continuous-dependence twin
// ---------------------------------------------------------------------------

struct TwinReport {
    double delta = 0;
    double sup_diff = 0;       // sup_t ||u1 - u2||_inf
    double amplification = 0;  // sup_diff / delta for delta > 0
    bool flagged = false;      // blow-up or solver failure in either twin
    std::string reason;
};

struct TwinSetup {
    GridPtr grid;
    Field u_init;
    Field v_init;
    double chi = 1.0;
    StepperConfig stepper;
};

// Two parabolic-elliptic runs: base data, and base plus delta times a
// zero-mean smooth bump. delta = 0 must reproduce bit-identical trajectories.
TwinReport stability_twin(const TwinSetup& setup, double delta);

// ---------------------------------------------------------------------------
// Scheme-order study
// ---------------------------------------------------------------------------

struct RefinementSetup {
    // Space study: chi = 0 heat mode 1 + cos(pi x / Lx) on (0,pi)^2 against
    // the analytic solution, dt tied to h^2.
    double t_end_space = 0.5;
    double dt_base_space = 2e-3;  // at the first grid level
    // Time study: small-amplitude coupled run, self-convergence vs dt/8.
    double t_end_time = 0.5;
    int n_time = 96;
    double chi_time = 1.0;
    double lambda_time = 0.1;
    double amp_time = 0.05;
    double linear_tol = 1e-11;
};

struct RefinementReport {
    std::vector<int> grid_levels;
    std::vector<double> space_errors;
    std::vector<double> dt_levels;
    std::vector<double> time_errors;
    double space_order = std::numeric_limits<double>::quiet_NaN();
    double time_order = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
    std::string flag_reason;
};

RefinementReport refinement_study(const RefinementSetup& setup, std::vector<int> grid_levels,
                                  std::vector<double> dt_levels);

// ---------------------------------------------------------------------------
// Small-data semigroup barrier
// ---------------------------------------------------------------------------

struct SmallDataSetup {
    GridPtr grid;
    Field u_shape;  // rescaled so ||u_init||_p = 0.9 eps
    Field v_shape;  // rescaled so ||grad v_init||_q = 0.9 eps (kept if grad = 0)
    double chi = 1.0;
    double eps = 0.05;
    double theta = 2.2;
    double p = 2.0;
    double q = 4.0;
    StepperConfig stepper;  // forced to a fixed dt_max schedule
};

struct SmallDataLambdaSeries {
    double lambda = 0;
    std::vector<std::pair<double, double>> deviation;  // (t, ||u - e^{tL}u_init||_theta)
    double max_deviation = 0;
    Termination termination = Termination::completed;
};

struct SmallDataReport {
    double eps = 0;
    double theta = 0;
    std::vector<SmallDataLambdaSeries> series;
    bool barrier_held = false;  // every deviation < eps, uniformly in lambda
};

SmallDataReport small_data_monitor(const SmallDataSetup& setup, std::vector<double> lambdas);

}  // namespace ks::experiments
