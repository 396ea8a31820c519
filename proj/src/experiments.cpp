#include "ks/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "ks/elliptic.hpp"
#include "ks/kernels.hpp"
#include "ks/report_io.hpp"

namespace ks::experiments {

Field restrict_to_coarse(const Field& fine, const GridPtr& coarse) {
    const Grid& gf = *fine.grid();
    const Grid& gc = *coarse;
    if (gf.geometry() != gc.geometry() || gf.nx() != 2 * gc.nx() ||
        (gc.geometry() == Geometry::rectangle && gf.ny() != 2 * gc.ny()))
        throw structural_error("restrict_to_coarse: fine grid is not a 2x refinement");
    Field out(coarse);
    if (gc.geometry() == Geometry::rectangle) {
        for (int j = 0; j < gc.ny(); ++j)
            for (int i = 0; i < gc.nx(); ++i)
                out.at(i, j) = 0.25 * (fine.at(2 * i, 2 * j) + fine.at(2 * i + 1, 2 * j) +
                                       fine.at(2 * i, 2 * j + 1) + fine.at(2 * i + 1, 2 * j + 1));
    } else {
        for (int i = 0; i < gc.nx(); ++i) {
            const double w0 = gf.weights()[2 * i], w1 = gf.weights()[2 * i + 1];
            out[i] = (w0 * fine[2 * i] + w1 * fine[2 * i + 1]) / (w0 + w1);
        }
    }
    return out;
}

namespace {

// Captures (t, u, v) snapshots at diagnostics records, optionally restricted
// to a coarser grid.
struct SnapshotSink : RunObserver {
    std::vector<TrajectorySample> samples;
    GridPtr restrict_grid;  // when set, store the restriction instead

    void at_record(DiagnosticsRecord&, const PPState& s) override {
        if (restrict_grid)
            samples.push_back(TrajectorySample{
                s.t, restrict_to_coarse(s.u, restrict_grid), restrict_to_coarse(s.v, restrict_grid)});
        else
            samples.push_back(TrajectorySample{s.t, s.u, s.v});
    }
};

// Collects the dt sequence of an adaptive pass.
struct DtSink : RunObserver {
    std::vector<double> dts;
    void after_step(const PPState&, double dt) override { dts.push_back(dt); }
};

// Compares a running trajectory against reference snapshots, record by record.
struct CompareSink : RunObserver {
    const std::vector<TrajectorySample>* reference = nullptr;
    PpPeErrorAccumulator acc;
    std::size_t next = 0;

    explicit CompareSink(double t0) : acc(t0) {}

    void at_record(DiagnosticsRecord&, const PPState& s) override {
        if (next >= reference->size())
            throw structural_error("sweep: trajectory produced more records than the reference");
        const TrajectorySample& ref = (*reference)[next++];
        acc.add(s.t, s.u, s.v, ref.t, ref.u, ref.v);
    }
};

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(xs.size());
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < m; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = m * sxx - sx * sx;
    return denom != 0 ? (m * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
}

// Deterministic parallel map over an index range.
template <typename F>
void parallel_for(int count, int jobs, F&& body) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::future<void>> futs;
    futs.reserve(count);
    for (int i = 0; i < count; ++i)
        futs.push_back(std::async(std::launch::async, [&body, i] { body(i); }));
    for (auto& f : futs) f.get();
}

}  // namespace

SweepReport lambda_sweep(const SweepSetup& setup, std::vector<double> lambdas) {
    SweepReport rep;
    if (lambdas.empty()) throw config_error("sweep: need at least one lambda");
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        if (!(lambdas[i] > lambdas[i + 1]))
            throw config_error("sweep: lambdas must be strictly decreasing");
    for (const double l : lambdas) {
        if (l < 0) throw config_error("sweep: lambdas must be nonnegative");
        if (l >= setup.lambda_cap)
            throw config_error("sweep: lambdas must stay below the configured cap");
    }
    rep.lambda_values = lambdas;

    // Preliminary adaptive parabolic-elliptic pass fixes the shared schedule.
    StepperConfig pre = setup.stepper;
    pre.fixed_dt = 0;
    PPState pe0{setup.u_init, setup.v_init, 0.0, 0.0, setup.chi};
    DtSink dts;
    const RunResult pre_run = run(pe0, pre, &dts, true);
    if (pre_run.termination != Termination::completed) {
        rep.aborted = true;
        rep.abort_reason = "preliminary parabolic-elliptic pass: " + pre_run.reason;
        return rep;
    }
    double dt_min_seen = pre.dt_max;
    for (std::size_t i = 0; i + 1 < dts.dts.size(); ++i) dt_min_seen = std::min(dt_min_seen, dts.dts[i]);
    const double dt_target = 0.85 * dt_min_seen;
    const auto nsteps = static_cast<long>(std::ceil(pre.t_end / dt_target - 1e-12));
    StepperConfig fixed = setup.stepper;
    fixed.fixed_dt = pre.t_end / static_cast<double>(nsteps);
    fixed.dt_max = std::max(fixed.dt_max, fixed.fixed_dt);
    rep.dt_fixed = fixed.fixed_dt;

    // Reference parabolic-elliptic trajectory on the shared schedule.
    SnapshotSink pe_snaps;
    const RunResult pe_run = run(pe0, fixed, &pe_snaps, true);
    if (pe_run.termination != Termination::completed) {
        rep.aborted = true;
        rep.abort_reason = "parabolic-elliptic reference run: " + pe_run.reason;
        return rep;
    }
    rep.pe_records = pe_run.records;

    const int nl = static_cast<int>(lambdas.size());
    rep.err_u_cloc.assign(nl, std::numeric_limits<double>::quiet_NaN());
    rep.err_v_l2w12.assign(nl, std::numeric_limits<double>::quiet_NaN());
    rep.records_per_lambda.resize(nl);
    std::vector<std::string> failures(nl);

    parallel_for(nl, setup.jobs, [&](int i) {
        try {
            PPState s0{setup.u_init, setup.v_init, 0.0, lambdas[i], setup.chi};
            CompareSink cmp(setup.t0);
            cmp.reference = &pe_snaps.samples;
            const RunResult rr = run(s0, fixed, &cmp, false);
            rep.records_per_lambda[i] = rr.records;
            if (rr.termination != Termination::completed) {
                failures[i] = to_string(rr.termination) + ": " + rr.reason;
                return;
            }
            rep.err_u_cloc[i] = cmp.acc.sup_linf_u();
            rep.err_v_l2w12[i] = cmp.acc.int_l2_w12_v();
        } catch (const error& e) {
            failures[i] = e.what();
        }
    });
    for (int i = 0; i < nl; ++i)
        if (!failures[i].empty()) {
            rep.aborted = true;
            rep.abort_reason = "lambda = " + io::fmt(lambdas[i]) + ": " + failures[i];
            return rep;
        }

    // Discretization floor from a 2x-refined parabolic-elliptic control run.
    if (setup.fine_grid) {
        StepperConfig fine_cfg = fixed;
        fine_cfg.fixed_dt = 0.5 * fixed.fixed_dt;
        fine_cfg.dt_max = std::max(fine_cfg.dt_max, fine_cfg.fixed_dt);
        fine_cfg.diag_stride = 2 * fixed.diag_stride;
        PPState f0{setup.u_init_fine, setup.v_init_fine, 0.0, 0.0, setup.chi};
        SnapshotSink fine_snaps;
        fine_snaps.restrict_grid = setup.grid;
        const RunResult fine_run = run(f0, fine_cfg, &fine_snaps, true);
        if (fine_run.termination != Termination::completed) {
            rep.aborted = true;
            rep.abort_reason = "grid-refined control run: " + fine_run.reason;
            return rep;
        }
        const std::size_t m = std::min(pe_snaps.samples.size(), fine_snaps.samples.size());
        PpPeErrorAccumulator acc(setup.t0);
        double sup = 0;
        for (std::size_t k = 0; k < m; ++k) {
            const auto& a = pe_snaps.samples[k];
            const auto& b = fine_snaps.samples[k];
            acc.add(a.t, a.u, a.v, b.t, b.u, b.v);
            sup = acc.sup_linf_u();
        }
        rep.floor_u = sup;
        rep.floor_v = acc.int_l2_w12_v();
    }

    // Monotonicity within 5% slack; lambda = 0 anchors are exempt (exact zero).
    auto monotone = [&](const std::vector<double>& errs) {
        for (std::size_t i = 0; i + 1 < errs.size(); ++i)
            if (errs[i + 1] > 1.05 * errs[i]) return false;
        return true;
    };
    rep.monotone_u = monotone(rep.err_u_cloc);
    rep.monotone_v = monotone(rep.err_v_l2w12);

    // Rate fits on the pre-floor range (reported, never asserted).
    auto fit_rate = [&](const std::vector<double>& errs, double floor) {
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < errs.size(); ++i) {
            if (lambdas[i] <= 0 || errs[i] <= 0) continue;
            if (std::isfinite(floor) && errs[i] < 2.0 * floor) continue;
            lx.push_back(std::log(lambdas[i]));
            ly.push_back(std::log(errs[i]));
        }
        return lsq_slope(lx, ly);
    };
    rep.fitted_rate_u = fit_rate(rep.err_u_cloc, rep.floor_u);
    rep.fitted_rate_v = fit_rate(rep.err_v_l2w12, rep.floor_v);
    return rep;
}

ScanReport blowup_scan(const ScanSetup& setup, std::vector<double> masses) {
    if (masses.empty()) throw config_error("blowup scan: need at least one mass");
    for (std::size_t i = 0; i + 1 < masses.size(); ++i)
        if (!(masses[i] < masses[i + 1]))
            throw config_error("blowup scan: masses must be sorted ascending");

    ScanReport rep;
    rep.chi = setup.chi;
    rep.width_frac = setup.width_frac;
    rep.outcomes.resize(masses.size());

    const Grid& g = *setup.grid;
    const bool radial = g.geometry() == Geometry::radial_disk;
    const double width =
        setup.width_frac * (radial ? g.radius() : std::min(g.Lx(), g.Ly()));

    parallel_for(static_cast<int>(masses.size()), setup.jobs, [&](int i) {
        PresetParams prm;
        prm.width = width;
        prm.target_mass = masses[i];
        Field u0 = sample_initial(radial ? "radial_gaussian" : "gaussian_bump", prm, setup.grid);
        Field v0 = solve_screened_poisson(u0, setup.stepper.linear_tol);
        PPState s0{std::move(u0), std::move(v0), 0.0, 0.0, setup.chi};
        const RunResult rr = run(s0, setup.stepper, nullptr, true);

        ScanOutcome& o = rep.outcomes[i];
        o.mass = masses[i];
        o.termination = rr.termination;
        o.linf_init = rr.records.front().linf_u;
        for (const auto& r : rr.records) o.linf_peak = std::max(o.linf_peak, r.linf_u);
        o.t_reached = rr.final_state.t;
        if (rr.termination == Termination::blowup_suspected) {
            o.classification = "blowup_suspected";
        } else if (rr.termination == Termination::solver_failure) {
            o.classification = "inconclusive";
        } else {
            // Growth trend over the second half vs the second quarter.
            const double T = setup.stepper.t_end;
            double a = 0, b = 0;
            for (const auto& r : rr.records) {
                if (r.t >= 0.25 * T && r.t <= 0.5 * T) a = std::max(a, r.linf_u);
                if (r.t >= 0.75 * T) b = std::max(b, r.linf_u);
            }
            o.classification = (a > 0 && b > 1.10 * a) ? "inconclusive" : "bounded";
        }
    });

    bool seen_blowup = false;
    for (const auto& o : rep.outcomes) {
        if (o.classification == "blowup_suspected") {
            seen_blowup = true;
            if (std::isnan(rep.bracket_hi)) rep.bracket_hi = o.mass;
        } else if (o.classification == "bounded") {
            if (seen_blowup) rep.inversion = true;
            rep.bracket_lo = o.mass;
        }
    }
    return rep;
}

TwinReport stability_twin(const TwinSetup& setup, double delta) {
    TwinReport rep;
    rep.delta = delta;

    const Grid& g = *setup.grid;
    Field bump(setup.grid);
    if (g.geometry() == Geometry::rectangle) {
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                bump.at(i, j) = std::cos(std::numbers::pi * g.x(i) / g.Lx()) *
                                std::cos(std::numbers::pi * g.y(j) / g.Ly());
    } else {
        for (int i = 0; i < g.nx(); ++i)
            bump[i] = std::cos(std::numbers::pi * g.r(i) / g.radius());
        const double mb = mean(bump);
        kernels::active().add_scalar(bump.data(), -mb, bump.size());
    }

    Field u2 = setup.u_init;
    for (int k = 0; k < u2.size(); ++k) u2[k] += delta * bump[k];
    if (kernels::active().min(u2.data(), u2.size()) < 0)
        throw config_error("stability twin: perturbation makes the initial data negative");

    // Shared fixed schedule from an adaptive pass of the base run.
    StepperConfig pre = setup.stepper;
    pre.fixed_dt = 0;
    PPState base0{setup.u_init, setup.v_init, 0.0, 0.0, setup.chi};
    DtSink dts;
    const RunResult pre_run = run(base0, pre, &dts, true);
    if (pre_run.termination != Termination::completed) {
        rep.flagged = true;
        rep.reason = "base run: " + pre_run.reason;
        return rep;
    }
    double dt_min_seen = pre.dt_max;
    for (std::size_t i = 0; i + 1 < dts.dts.size(); ++i) dt_min_seen = std::min(dt_min_seen, dts.dts[i]);
    StepperConfig fixed = setup.stepper;
    const auto nsteps = static_cast<long>(std::ceil(pre.t_end / (0.85 * dt_min_seen) - 1e-12));
    fixed.fixed_dt = pre.t_end / static_cast<double>(nsteps);
    fixed.dt_max = std::max(fixed.dt_max, fixed.fixed_dt);

    SnapshotSink snaps1;
    const RunResult r1 = run(base0, fixed, &snaps1, true);
    PPState twin0{std::move(u2), setup.v_init, 0.0, 0.0, setup.chi};
    CompareSink cmp(0.0);
    cmp.reference = &snaps1.samples;
    const RunResult r2 = run(twin0, fixed, &cmp, true);
    if (r1.termination != Termination::completed || r2.termination != Termination::completed) {
        rep.flagged = true;
        rep.reason = "twin run terminated: " +
                     to_string(r1.termination != Termination::completed ? r1.termination
                                                                        : r2.termination);
        return rep;
    }
    rep.sup_diff = cmp.acc.sup_linf_u();
    rep.amplification = delta > 0 ? rep.sup_diff / delta : 0.0;
    return rep;
}

RefinementReport refinement_study(const RefinementSetup& setup, std::vector<int> grid_levels,
                                  std::vector<double> dt_levels) {
    RefinementReport rep;
    rep.grid_levels = grid_levels;
    rep.dt_levels = dt_levels;
    if (grid_levels.size() < 3 || dt_levels.size() < 3) {
        rep.flag_reason = "need at least 3 grid and 3 dt levels";
        return rep;
    }
    for (std::size_t i = 0; i + 1 < grid_levels.size(); ++i)
        if (grid_levels[i] >= grid_levels[i + 1]) {
            rep.flag_reason = "grid levels must be strictly increasing";
            return rep;
        }
    for (std::size_t i = 0; i + 1 < dt_levels.size(); ++i)
        if (dt_levels[i] <= dt_levels[i + 1]) {
            rep.flag_reason = "dt levels must be strictly decreasing";
            return rep;
        }

    const double pi = std::numbers::pi;

    // Space study: pure diffusion of the first Neumann mode, analytic
    // reference 1 + e^{-t} cos x, dt scaled with h^2 so time error stays
    // subdominant.
    for (const int n : grid_levels) {
        GridPtr grid = Grid::rectangle(pi, pi, n, n);
        PresetParams prm;
        prm.base = 1.0;
        prm.amp = 1.0;
        prm.mode_x = 1;
        prm.mode_y = 0;
        Field u0 = sample_initial("cosine_perturbed_constant", prm, grid);
        Field v0 = solve_screened_poisson(u0, setup.linear_tol);
        const double scale = static_cast<double>(grid_levels.front()) / n;
        StepperConfig cfg;
        cfg.t_end = setup.t_end_space;
        cfg.fixed_dt = setup.dt_base_space * scale * scale;
        cfg.dt_max = std::max(cfg.dt_max, cfg.fixed_dt);
        cfg.linear_tol = setup.linear_tol;
        cfg.diag_stride = 1 << 20;  // endpoints only
        PPState s0{std::move(u0), std::move(v0), 0.0, 1.0, 0.0};  // chi = 0, lambda = 1
        const RunResult rr = run(s0, cfg);
        if (rr.termination != Termination::completed) {
            rep.flag_reason = "space study run failed: " + rr.reason;
            return rep;
        }
        const double decay = std::exp(-setup.t_end_space);
        double err = 0;
        for (int j = 0; j < grid->ny(); ++j)
            for (int i = 0; i < grid->nx(); ++i)
                err = std::max(err, std::fabs(rr.final_state.u.at(i, j) -
                                              (1.0 + decay * std::cos(grid->x(i)))));
        rep.space_errors.push_back(err);
    }

    // Time study: small-amplitude coupled run, error vs a dt/8 reference.
    {
        GridPtr grid = Grid::rectangle(pi, pi, setup.n_time, setup.n_time);
        PresetParams prm;
        prm.base = 1.0;
        prm.amp = setup.amp_time;
        prm.mode_x = 1;
        prm.mode_y = 0;
        const Field u0 = sample_initial("cosine_perturbed_constant", prm, grid);
        const Field v0 = solve_screened_poisson(u0, setup.linear_tol);
        auto final_u = [&](double dt) {
            StepperConfig cfg;
            cfg.t_end = setup.t_end_time;
            const auto nsteps = static_cast<long>(std::llround(setup.t_end_time / dt));
            cfg.fixed_dt = setup.t_end_time / static_cast<double>(nsteps);
            cfg.dt_max = std::max(cfg.dt_max, cfg.fixed_dt);
            cfg.linear_tol = setup.linear_tol;
            cfg.diag_stride = 1 << 20;
            PPState s0{u0, v0, 0.0, setup.lambda_time, setup.chi_time};
            const RunResult rr = run(s0, cfg);
            if (rr.termination != Termination::completed)
                throw solver_error("time study run failed: " + rr.reason, 0, 0);
            return rr.final_state.u;
        };
        try {
            const Field ref = final_u(dt_levels.back() / 8.0);
            for (const double dt : dt_levels) {
                const Field u = final_u(dt);
                rep.time_errors.push_back(
                    kernels::active().abs_max_diff(u.data(), ref.data(), u.size()));
            }
        } catch (const solver_error& e) {
            rep.flag_reason = e.what();
            return rep;
        }
    }

    for (std::size_t i = 0; i + 1 < rep.space_errors.size(); ++i)
        if (rep.space_errors[i + 1] >= rep.space_errors[i]) {
            rep.flag_reason = "space error sequence is not monotone decreasing";
            return rep;
        }
    for (std::size_t i = 0; i + 1 < rep.time_errors.size(); ++i)
        if (rep.time_errors[i + 1] >= rep.time_errors[i]) {
            rep.flag_reason = "time error sequence is not monotone decreasing";
            return rep;
        }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < grid_levels.size(); ++i) {
        lx.push_back(std::log(pi / grid_levels[i]));
        ly.push_back(std::log(rep.space_errors[i]));
    }
    rep.space_order = lsq_slope(lx, ly);
    lx.clear();
    ly.clear();
    for (std::size_t i = 0; i < dt_levels.size(); ++i) {
        lx.push_back(std::log(dt_levels[i]));
        ly.push_back(std::log(rep.time_errors[i]));
    }
    rep.time_order = lsq_slope(lx, ly);
    rep.valid = true;
    return rep;
}

namespace {

// Lockstep heat twin: advanced with exactly the dt sequence of the run, so a
// chi = 0 run reproduces it bit for bit.
struct HeatTwinMonitor : RunObserver {
    HeatMarch march;
    double theta;
    std::vector<std::pair<double, double>>* series;

    HeatTwinMonitor(Field f0, double tol, double theta,
                    std::vector<std::pair<double, double>>* out)
        : march(std::move(f0), tol), theta(theta), series(out) {}

    void after_step(const PPState&, double dt) override { march.step(dt); }
    void at_record(DiagnosticsRecord& r, const PPState& s) override {
        r.semigroup_deviation = semigroup_deviation(s.u, march.field(), theta);
        series->push_back({s.t, r.semigroup_deviation});
    }
};

}  // namespace

SmallDataReport small_data_monitor(const SmallDataSetup& setup, std::vector<double> lambdas) {
    SmallDataReport rep;
    rep.eps = setup.eps;
    rep.theta = setup.theta;
    if (!(setup.eps > 0)) throw config_error("small data: eps must be positive");

    // Rescale the shapes onto the smallness hypotheses.
    Field u0 = setup.u_shape;
    const double up = lp_norm(u0, setup.p);
    if (!(up > 0)) throw config_error("small data: u shape must be nonzero");
    {
        const double s = 0.9 * setup.eps / up;
        for (auto& v : u0.values()) v *= s;
    }
    Field v0 = setup.v_shape;
    const double vq = lp_norm(gradient_magnitude(v0), setup.q);
    if (vq > 0) {
        const double s = 0.9 * setup.eps / vq;
        for (auto& v : v0.values()) v *= s;
    }

    StepperConfig cfg = setup.stepper;
    cfg.fixed_dt = cfg.dt_max;  // uniform schedule shared with the heat march
    {
        const auto nsteps = static_cast<long>(std::ceil(cfg.t_end / cfg.fixed_dt - 1e-12));
        cfg.fixed_dt = cfg.t_end / static_cast<double>(nsteps);
        cfg.dt_max = std::max(cfg.dt_max, cfg.fixed_dt);
    }

    rep.barrier_held = true;
    for (const double lambda : lambdas) {
        SmallDataLambdaSeries series;
        series.lambda = lambda;
        HeatTwinMonitor twin(u0, cfg.linear_tol, setup.theta, &series.deviation);
        PPState s0{u0, v0, 0.0, lambda, setup.chi};
        const RunResult rr = run(s0, cfg, &twin, false);
        series.termination = rr.termination;
        for (const auto& [t, d] : series.deviation)
            series.max_deviation = std::max(series.max_deviation, d);
        if (rr.termination != Termination::completed || series.max_deviation >= setup.eps)
            rep.barrier_held = false;
        rep.series.push_back(std::move(series));
    }
    return rep;
}

}  // namespace ks::experiments
