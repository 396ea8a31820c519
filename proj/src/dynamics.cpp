#include "ks/dynamics.hpp"

#include <cmath>
#include <limits>

#include "ks/kernels.hpp"

namespace ks {

void StepperConfig::validate() const {
    if (!(dt_min > 0) || !(dt_max > 0) || dt_min > dt_max)
        throw config_error("stepper: need 0 < dt_min <= dt_max");
    if (!(cfl_safety > 0) || cfl_safety > 1)
        throw config_error("stepper: cfl_safety must be in (0, 1]");
    if (!(linear_tol > 0)) throw config_error("stepper: linear_tol must be positive");
    if (!(blowup_linf_factor > 0)) throw config_error("stepper: blowup threshold must be positive");
    if (!(t_end > 0)) throw config_error("stepper: t_end must be positive");
    if (diag_stride < 1) throw config_error("stepper: diag_stride must be >= 1");
    if (fixed_dt < 0) throw config_error("stepper: fixed_dt must be >= 0");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::completed: return "completed";
        case Termination::blowup_suspected: return "blowup_suspected";
        default: return "solver_failure";
    }
}

double cfl_dt(const PPState& state, const StepperConfig& cfg) {
    if (state.chi <= 0) return cfg.dt_max;
    const double gmax = gradient_faces(state.v).abs_max();
    const double speed = state.chi * gmax;
    if (speed <= 0) return cfg.dt_max;
    const double h = state.u.grid()->min_spacing();
    return std::min(cfg.dt_max, cfg.cfl_safety * h / speed);
}

namespace {

// Donor-cell flux for velocity chi*grad v: the face carries the upwind cell's
// u times the face gradient (chi is applied by the caller).
FaceVector upwind_flux(const Field& u, const FaceVector& grad) {
    const Grid& g = *u.grid();
    FaceVector flux = FaceVector::zeros(u.grid());
    if (g.geometry() == Geometry::rectangle) {
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i + 1 < g.nx(); ++i) {
                const double gf = grad.x_face(i, j);
                flux.x_face(i, j) = gf * (gf >= 0 ? u.at(i, j) : u.at(i + 1, j));
            }
        for (int j = 0; j + 1 < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const double gf = grad.y_face(i, j);
                flux.y_face(i, j) = gf * (gf >= 0 ? u.at(i, j) : u.at(i, j + 1));
            }
    } else {
        for (int i = 0; i + 1 < g.nx(); ++i) {
            const double gf = grad.fx[i];
            flux.fx[i] = gf * (gf >= 0 ? u[i] : u[i + 1]);
        }
    }
    return flux;
}

void check_positivity(const Field& f, const char* label) {
    const auto n = static_cast<std::size_t>(f.size());
    const auto& k = kernels::active();
    const double fmax = k.abs_max(f.data(), n);
    if (k.min(f.data(), n) < -1e-12 * fmax)
        throw scheme_error(std::string(label) + ": positivity violated beyond tolerance");
}

}  // namespace

void step_pp(PPState& state, double dt, const StepperConfig& cfg, double mass_target,
             CgWorkspace* ws) {
    if (!(dt > 0)) throw domain_error("step: dt must be positive");
    const GridPtr& gp = state.u.grid();
    const auto n = static_cast<std::size_t>(state.u.size());
    const auto& k = kernels::active();
    const double inv_dt = 1.0 / dt;

    // u-update: implicit diffusion, explicit upwinded chemotaxis (from v^n).
    Field rhs(gp);
    k.scale(rhs.data(), inv_dt, state.u.data(), n);
    if (state.chi != 0.0) {
        const Field adv = divergence(upwind_flux(state.u, gradient_faces(state.v)));
        k.axpy(rhs.data(), -state.chi, adv.data(), n);
    }
    ScreenedOperator op_u(gp, inv_dt);
    SolveOptions opts;
    opts.tol = cfg.linear_tol;
    opts.max_iter = cfg.max_iter;
    opts.initial_guess = &state.u;
    opts.workspace = ws;
    Field u_next = solve_spd(op_u, rhs, opts);

    check_positivity(u_next, "step: u");
    k.clip_negative(u_next.data(), n);
    const double defect = mass_target - integrate(u_next);
    k.add_scalar(u_next.data(), defect / gp->area(), n);

    // v-update from u^{n+1}; lambda = 0 is exactly the screened Poisson solve.
    Field rhs_v(gp);
    if (state.lambda > 0) {
        k.scale(rhs_v.data(), state.lambda * inv_dt, state.v.data(), n);
        k.axpy(rhs_v.data(), 1.0, u_next.data(), n);
    } else {
        rhs_v = u_next;
    }
    ScreenedOperator op_v(gp, state.lambda > 0 ? 1.0 + state.lambda * inv_dt : 1.0);
    SolveOptions opts_v = opts;
    opts_v.initial_guess = &state.v;
    Field v_next = solve_spd(op_v, rhs_v, opts_v);
    check_positivity(v_next, "step: v");
    k.clip_negative(v_next.data(), n);

    state.u = std::move(u_next);
    state.v = std::move(v_next);
    state.t += dt;
}

void step_pe(PPState& state, double dt, const StepperConfig& cfg, double mass_target,
             CgWorkspace* ws) {
    if (state.lambda != 0.0)
        throw domain_error("step_pe: parabolic-elliptic stepping requires lambda == 0");
    step_pp(state, dt, cfg, mass_target, ws);
}

namespace {

DiagnosticsRecord make_record(const PPState& s, double dt_used, const StepperConfig& cfg) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.mass = integrate(s.u);
    r.linf_u = lp_norm(s.u, std::numeric_limits<double>::infinity());
    r.l2_u = lp_norm(s.u, 2.0);
    r.lp_u_theta = lp_norm(s.u, cfg.diag_theta);
    r.w1q_v = w1q_norm(s.v, cfg.diag_q);
    r.lyapunov = lyapunov(s.u, s.v, s.chi);
    r.dt_used = dt_used;
    return r;
}

}  // namespace

RunResult run(const PPState& initial, const StepperConfig& cfg, RunObserver* observer,
              bool use_pe_alias) {
    cfg.validate();
    initial.u.check_finite("initial u");
    initial.v.check_finite("initial v");
    if (!(initial.chi >= 0)) throw config_error("run: chi must be nonnegative");
    if (!(initial.lambda >= 0)) throw config_error("run: lambda must be nonnegative");
    if (use_pe_alias && initial.lambda != 0.0)
        throw config_error("run: the parabolic-elliptic system requires lambda = 0");

    RunResult res;
    res.final_state = initial;
    PPState& s = res.final_state;

    const double mass0 = integrate(s.u);
    const double linf0 = lp_norm(s.u, std::numeric_limits<double>::infinity());
    const double blowup_threshold = cfg.blowup_linf_factor * (linf0 > 0 ? linf0 : 1.0);
    CgWorkspace ws;

    // Rolling window of recorded states for the dissipation residual.
    std::vector<TrajectorySample> window;
    auto record = [&](double dt_used) {
        DiagnosticsRecord r = make_record(s, dt_used, cfg);
        if (observer) observer->at_record(r, s);
        res.records.push_back(r);
        window.push_back(TrajectorySample{s.t, s.u, s.v});
        if (window.size() > 3) window.erase(window.begin());
        if (window.size() == 3) {
            const double d1 = window[1].t - window[0].t;
            const double d2 = window[2].t - window[1].t;
            if (std::fabs(d2 - d1) <= 1e-9 * (d1 + d2)) {
                res.records[res.records.size() - 2].dissipation_residual =
                    dissipation_residual(window[0], window[1], window[2], s.chi, s.lambda);
            }
        }
    };

    record(0.0);
    const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
    auto record_if_stale = [&](double dt_used) {
        if (res.records.empty() || res.records.back().t != s.t) record(dt_used);
    };
    try {
        while (cfg.t_end - s.t > t_eps) {
            const double dt_req = cfl_dt(s, cfg);
            if (dt_req < cfg.dt_min) {
                record_if_stale(0.0);
                res.termination = Termination::blowup_suspected;
                res.reason = "required dt fell below dt_min (timestep collapse)";
                return res;
            }
            double dt = dt_req;
            if (cfg.fixed_dt > 0) {
                if (cfg.fixed_dt > dt_req * (1.0 + 1e-12)) {
                    record_if_stale(0.0);
                    res.termination = Termination::blowup_suspected;
                    res.reason = "fixed dt schedule violates the CFL bound";
                    return res;
                }
                dt = cfg.fixed_dt;
            }
            dt = std::min(dt, cfg.t_end - s.t);

            if (use_pe_alias)
                step_pe(s, dt, cfg, mass0, &ws);
            else
                step_pp(s, dt, cfg, mass0, &ws);
            ++res.steps;
            if (observer) observer->after_step(s, dt);

            const bool done = cfg.t_end - s.t <= t_eps;
            if (res.steps % cfg.diag_stride == 0 || done) record(dt);

            const double linf_now =
                kernels::active().abs_max(s.u.data(), static_cast<std::size_t>(s.u.size()));
            if (linf_now > blowup_threshold) {
                record_if_stale(dt);
                res.termination = Termination::blowup_suspected;
                res.reason = "||u||_inf exceeded the blow-up threshold";
                return res;
            }
        }
    } catch (const solver_error& e) {
        res.termination = Termination::solver_failure;
        res.reason = e.what();
        return res;
    } catch (const scheme_error& e) {
        res.termination = Termination::solver_failure;
        res.reason = e.what();
        return res;
    }
    res.termination = Termination::completed;
    return res;
}

}  // namespace ks
