#pragma once

#include <string>
#include <vector>

#include "ks/functionals.hpp"
#include "ks/operators.hpp"

namespace ks {

// One trajectory point of the coupled system. lambda = 0 degenerates exactly
// to the parabolic-elliptic system: the v-update becomes the screened Poisson
// solve for u, on the same code path.
struct PPState {
    Field u;
    Field v;
    double t = 0.0;
    double lambda = 0.0;  // signal relaxation time, >= 0
    double chi = 1.0;     // chemotactic sensitivity, > 0
};

struct StepperConfig {
    double dt_max = 1e-2;
    double dt_min = 1e-9;
    double cfl_safety = 0.4;
    double linear_tol = 1e-10;
    double blowup_linf_factor = 1e6;  // threshold = factor * ||u_init||_inf
    double t_end = 2.0;
    int diag_stride = 10;
    double fixed_dt = 0.0;  // > 0: forced uniform schedule (CFL still checked)
    double diag_theta = 2.2;
    double diag_q = 4.0;
    int max_iter = 20000;

    void validate() const;
};

// dt = min(dt_max, cfl_safety * h / (chi * max_face |grad v|)), h = min spacing.
// May return values below dt_min; the driver treats that as a blow-up signal.
double cfl_dt(const PPState& state, const StepperConfig& cfg);

// One step of the coupled system:
//   (1/dt I - lap) u' = u/dt - chi * div(upwind_flux(u, grad v))
//   ((1 + lambda/dt) I - lap) v' = (lambda/dt) v + u'   [lambda=0: rhs is u']
// u' is clipped at zero (tolerance-level solver undershoot only) and
// mass-projected onto mass_target.
void step_pp(PPState& state, double dt, const StepperConfig& cfg, double mass_target,
             CgWorkspace* ws = nullptr);

// Named alias: the parabolic-elliptic step. Requires lambda == 0.
void step_pe(PPState& state, double dt, const StepperConfig& cfg, double mass_target,
             CgWorkspace* ws = nullptr);

enum class Termination { completed, blowup_suspected, solver_failure };
std::string to_string(Termination t);

// Observation hooks used by the experiment drivers (per-step lockstep twins,
// snapshot capture at records).
struct RunObserver {
    virtual ~RunObserver() = default;
    virtual void after_step(const PPState&, double /*dt*/) {}
    virtual void at_record(DiagnosticsRecord&, const PPState&) {}
};

struct RunResult {
    PPState final_state;
    std::vector<DiagnosticsRecord> records;
    Termination termination = Termination::completed;
    std::string reason;
    long steps = 0;
};

// Integrates to cfg.t_end or aborts (blow-up suspicion, solver failure).
// Diagnostics every diag_stride steps plus the initial and final states; the
// dissipation residual is back-filled at interior records when the record
// spacing is uniform. use_pe_alias routes stepping through step_pe.
RunResult run(const PPState& initial, const StepperConfig& cfg, RunObserver* observer = nullptr,
              bool use_pe_alias = false);

}  // namespace ks
