#include "ks/elliptic.hpp"

#include <cmath>

#include "ks/kernels.hpp"

namespace ks {

Field solve_screened_poisson(const Field& u, double tol, const Field* initial_guess,
                             CgWorkspace* workspace) {
    ScreenedOperator op(u.grid(), 1.0);
    SolveOptions opts;
    opts.tol = tol;
    opts.initial_guess = initial_guess;
    opts.workspace = workspace;
    return solve_spd(op, u, opts);
}

namespace {

// Shared single backward-Euler diffusion step:
//   ((1/dt) I - laplacian) f' = f/dt,
// warm-started from f, then mass-projected onto mass_target. Both HeatMarch
// and the coupled stepper route their diffusion solves through this exact
// arithmetic path.
void be_diffusion_step(Field& f, double dt, double tol, double mass_target, CgWorkspace* ws) {
    const GridPtr& gp = f.grid();
    const auto n = static_cast<std::size_t>(f.size());
    const auto& k = kernels::active();
    const double inv_dt = 1.0 / dt;

    ScreenedOperator op(gp, inv_dt);
    Field rhs(gp);
    k.scale(rhs.data(), inv_dt, f.data(), n);

    SolveOptions opts;
    opts.tol = tol;
    opts.initial_guess = &f;
    opts.workspace = ws;
    f = solve_spd(op, rhs, opts);

    const double defect = mass_target - integrate(f);
    k.add_scalar(f.data(), defect / gp->area(), n);
}

}  // namespace

HeatMarch::HeatMarch(Field f0, double linear_tol) : f_(std::move(f0)), tol_(linear_tol) {
    f_.check_finite("heat march initial data");
    mass0_ = integrate(f_);
}

void HeatMarch::step(double dt) {
    if (!(dt > 0)) throw domain_error("heat march: dt must be positive");
    be_diffusion_step(f_, dt, tol_, mass0_, &ws_);
    t_ += dt;
}

namespace {

// Number of full dt steps and the shortened remainder covering an interval.
struct StepPlan {
    long full = 0;
    double rem = 0.0;
};

StepPlan plan_interval(double length, double dt) {
    if (length < 0) throw domain_error("heat propagation: negative time interval");
    const auto full = static_cast<long>(std::floor(length / dt + 1e-12));
    double rem = length - static_cast<double>(full) * dt;
    if (rem <= 1e-12 * dt) rem = 0.0;
    return {full, rem};
}

}  // namespace

Field heat_propagate(const Field& f0, double t, double dt, double linear_tol) {
    if (!(t >= 0)) throw domain_error("heat_propagate: t must be >= 0");
    if (!(dt > 0)) throw domain_error("heat_propagate: dt must be > 0");
    HeatMarch march(f0, linear_tol);
    const StepPlan plan = plan_interval(t, dt);
    for (long s = 0; s < plan.full; ++s) march.step(dt);
    if (plan.rem > 0) march.step(plan.rem);
    return march.field();
}

std::vector<Field> semigroup_cache(const Field& u_init, std::span<const double> t_grid, double dt,
                                   double linear_tol) {
    for (std::size_t i = 0; i + 1 < t_grid.size(); ++i)
        if (!(t_grid[i] < t_grid[i + 1]))
            throw config_error("semigroup_cache: t_grid must be strictly increasing");
    if (!t_grid.empty() && t_grid.front() < 0)
        throw config_error("semigroup_cache: times must be nonnegative");

    std::vector<Field> out;
    out.reserve(t_grid.size());
    HeatMarch march(u_init, linear_tol);
    double prev = 0.0;
    for (const double t : t_grid) {
        const StepPlan plan = plan_interval(t - prev, dt);
        for (long s = 0; s < plan.full; ++s) march.step(dt);
        if (plan.rem > 0) march.step(plan.rem);
        out.push_back(march.field());
        prev = t;
    }
    return out;
}

}  // namespace ks
