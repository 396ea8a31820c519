#include "ks/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "ks/config.hpp"
#include "ks/elliptic.hpp"
#include "ks/experiments.hpp"
#include "ks/kernels.hpp"
#include "ks/report_io.hpp"
#include "ks/theory.hpp"

namespace ks::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_override;
    long long seed_override = -1;
    int jobs_override = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("config", opts.config_path, "configuration file")->required();
    cmd->add_option("--set", opts.sets, "override a config key (section.key=value), repeatable");
    cmd->add_option("--out", opts.out_override, "output directory (overrides output.dir)");
    cmd->add_option("--seed", opts.seed_override, "random seed (overrides output.seed)");
    cmd->add_option("--jobs", opts.jobs_override, "parallel runs (overrides output.jobs)");
}

RunConfig load_config(const CommonOpts& opts, const std::string& expected_kind) {
    std::vector<std::string> overrides = opts.sets;
    if (!opts.out_override.empty()) overrides.push_back("output.dir=" + opts.out_override);
    if (opts.seed_override >= 0)
        overrides.push_back("output.seed=" + std::to_string(opts.seed_override));
    if (opts.jobs_override > 0)
        overrides.push_back("output.jobs=" + std::to_string(opts.jobs_override));
    overrides.push_back("experiment.kind=" + expected_kind);
    return parse_config(opts.config_path, overrides);
}

std::vector<io::ManifestEntry> base_manifest(const RunConfig& cfg) {
    std::vector<io::ManifestEntry> m;
    m.push_back({"config_hash", "fnv1a64:" + cfg.config_hash});
    m.push_back({"experiment", cfg.kind});
    m.push_back({"geometry", to_string(cfg.geometry)});
    if (cfg.geometry == Geometry::rectangle) {
        m.push_back({"Lx", io::fmt(cfg.Lx)});
        m.push_back({"Ly", io::fmt(cfg.Ly)});
        m.push_back({"nx", std::to_string(cfg.nx)});
        m.push_back({"ny", std::to_string(cfg.ny)});
    } else {
        m.push_back({"R", io::fmt(cfg.R)});
        m.push_back({"nr", std::to_string(cfg.nr)});
    }
    m.push_back({"chi", io::fmt(cfg.chi)});
    m.push_back({"dt_max", io::fmt(cfg.stepper.dt_max)});
    m.push_back({"cfl_safety", io::fmt(cfg.stepper.cfl_safety)});
    m.push_back({"fixed_dt", io::fmt(cfg.stepper.fixed_dt)});
    m.push_back({"linear_tol", io::fmt(cfg.stepper.linear_tol)});
    m.push_back({"t_end", io::fmt(cfg.stepper.t_end)});
    m.push_back({"seed", std::to_string(cfg.seed)});
    m.push_back({"kernels", kernels::active().name});
    return m;
}

void write_records_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    io::atomic_write(path, [&](std::ostream& out) {
        out << DiagnosticsRecord::csv_header() << '\n';
        for (const auto& r : records) out << r.csv_row() << '\n';
    });
}

std::string lambda_tag(double l) {
    std::ostringstream ss;
    ss << l;
    std::string s = ss.str();
    for (auto& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

// ---------------------------------------------------------------------- run
int cmd_run(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts, "run");
    const std::string dir = io::resolve_output_dir(cfg.out_dir);
    const GridPtr grid = cfg.make_grid_ptr();
    const Field u0 = cfg.build_u_init(grid);
    const Field v0 = cfg.build_v_init(grid, u0);
    PPState s0{u0, v0, 0.0, cfg.lambda, cfg.chi};

    const RunResult res = run(s0, cfg.stepper, nullptr, cfg.system == "pe");

    write_records_csv(dir + "/diagnostics.csv", res.records);
    write_snapshot_file(dir + "/u_final.snap", res.final_state.u, res.final_state.t);
    write_snapshot_file(dir + "/v_final.snap", res.final_state.v, res.final_state.t);
    auto manifest = base_manifest(cfg);
    manifest.push_back({"lambda", io::fmt(cfg.lambda)});
    manifest.push_back({"system", cfg.system});
    manifest.push_back({"termination", to_string(res.termination)});
    manifest.push_back({"steps", std::to_string(res.steps)});
    io::write_manifest(dir + "/manifest.txt", manifest);

    std::cerr << "run: " << to_string(res.termination) << " after " << res.steps
              << " steps, t = " << res.final_state.t;
    if (!res.reason.empty()) std::cerr << " (" << res.reason << ")";
    std::cerr << "\n";
    return res.termination == Termination::completed ? 0 : 1;
}

// -------------------------------------------------------------------- sweep
int cmd_sweep(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts, "sweep");
    const std::string dir = io::resolve_output_dir(cfg.out_dir);

    experiments::SweepSetup setup;
    setup.grid = cfg.make_grid_ptr();
    setup.u_init = cfg.build_u_init(setup.grid);
    setup.v_init = cfg.build_v_init(setup.grid, setup.u_init);
    if (cfg.geometry == Geometry::rectangle)
        setup.fine_grid = Grid::rectangle(cfg.Lx, cfg.Ly, 2 * cfg.nx, 2 * cfg.ny);
    else
        setup.fine_grid = Grid::radial_disk(cfg.R, 2 * cfg.nr);
    setup.u_init_fine = cfg.build_u_init(setup.fine_grid);
    setup.v_init_fine = cfg.build_v_init(setup.fine_grid, setup.u_init_fine);
    setup.chi = cfg.chi;
    setup.lambda_cap = cfg.lambda_cap;
    setup.t0 = cfg.t0;
    setup.stepper = cfg.stepper;
    setup.jobs = cfg.jobs;

    const experiments::SweepReport rep = experiments::lambda_sweep(setup, cfg.lambdas);

    io::atomic_write(dir + "/sweep.csv", [&](std::ostream& out) {
        out << "# columns: lambda,err_u_cloc,err_v_l2w12\n";
        out << "# dt_fixed = " << io::fmt(rep.dt_fixed) << '\n';
        out << "# floor_u = " << io::fmt(rep.floor_u) << '\n';
        out << "# floor_v = " << io::fmt(rep.floor_v) << '\n';
        out << "# fitted_rate_u = " << io::fmt(rep.fitted_rate_u) << '\n';
        out << "# fitted_rate_v = " << io::fmt(rep.fitted_rate_v) << '\n';
        out << "# monotone_u = " << (rep.monotone_u ? "true" : "false") << '\n';
        out << "# monotone_v = " << (rep.monotone_v ? "true" : "false") << '\n';
        if (rep.aborted) out << "# aborted = " << rep.abort_reason << '\n';
        for (std::size_t i = 0; i < rep.lambda_values.size(); ++i)
            out << io::fmt(rep.lambda_values[i]) << ',' << io::fmt(rep.err_u_cloc[i]) << ','
                << io::fmt(rep.err_v_l2w12[i]) << '\n';
    });
    if (!rep.pe_records.empty()) write_records_csv(dir + "/diag_pe.csv", rep.pe_records);
    for (std::size_t i = 0; i < rep.records_per_lambda.size(); ++i)
        if (!rep.records_per_lambda[i].empty())
            write_records_csv(dir + "/diag_lambda_" + lambda_tag(rep.lambda_values[i]) + ".csv",
                              rep.records_per_lambda[i]);
    auto manifest = base_manifest(cfg);
    {
        std::ostringstream ls;
        for (std::size_t i = 0; i < cfg.lambdas.size(); ++i)
            ls << (i ? "," : "") << io::fmt(cfg.lambdas[i]);
        manifest.push_back({"lambdas", ls.str()});
    }
    manifest.push_back({"aborted", rep.aborted ? "true" : "false"});
    io::write_manifest(dir + "/manifest.txt", manifest);

    if (rep.aborted) {
        std::cerr << "sweep: aborted, partial report persisted: " << rep.abort_reason << "\n";
        return 1;
    }
    if (!rep.monotone_u || !rep.monotone_v) {
        std::cerr << "sweep: error sequence not monotone within 5% slack\n";
        return 1;
    }
    std::cerr << "sweep: completed, dt_fixed = " << rep.dt_fixed << "\n";
    return 0;
}

// ------------------------------------------------------------------- blowup
void write_scan_csv(std::ostream& out, const experiments::ScanReport& rep) {
    out << "# columns: mass,classification,linf_init,linf_peak,t_reached\n";
    out << "# chi = " << io::fmt(rep.chi) << '\n';
    out << "# width_frac = " << io::fmt(rep.width_frac) << '\n';
    out << "# bracket_lo = " << io::fmt(rep.bracket_lo) << '\n';
    out << "# bracket_hi = " << io::fmt(rep.bracket_hi) << '\n';
    out << "# inversion = " << (rep.inversion ? "true" : "false") << '\n';
    for (const auto& o : rep.outcomes)
        out << io::fmt(o.mass) << ',' << o.classification << ',' << io::fmt(o.linf_init) << ','
            << io::fmt(o.linf_peak) << ',' << io::fmt(o.t_reached) << '\n';
}

int cmd_blowup(const CommonOpts& opts) {
    RunConfig cfg = load_config(opts, "blowup");
    // Desk-scale saturation keeps the default 1e6 factor out of reach on a
    // fixed grid; scans default to a 50x peak-growth detector instead.
    if (!cfg.blowup_factor_explicit) cfg.stepper.blowup_linf_factor = 50.0;
    const std::string dir = io::resolve_output_dir(cfg.out_dir);

    experiments::ScanSetup setup;
    setup.grid = cfg.make_grid_ptr();
    setup.chi = cfg.chi;
    setup.width_frac = cfg.width_frac;
    setup.stepper = cfg.stepper;
    setup.jobs = cfg.jobs;
    const experiments::ScanReport rep = experiments::blowup_scan(setup, cfg.masses);

    io::atomic_write(dir + "/scan.csv",
                     [&](std::ostream& out) { write_scan_csv(out, rep); });

    bool inversion = rep.inversion;
    if (cfg.chi_scaling_check) {
        experiments::ScanSetup setup2 = setup;
        setup2.chi = 2.0 * cfg.chi;
        std::vector<double> masses2;
        for (const double m : cfg.masses) masses2.push_back(0.5 * m);
        const experiments::ScanReport rep2 = experiments::blowup_scan(setup2, masses2);
        io::atomic_write(dir + "/scan_chi2.csv",
                         [&](std::ostream& out) { write_scan_csv(out, rep2); });
        inversion = inversion || rep2.inversion;
        std::cerr << "blowup: chi-doubled bracket (" << io::fmt(rep2.bracket_lo) << ", "
                  << io::fmt(rep2.bracket_hi) << ")\n";
    }

    auto manifest = base_manifest(cfg);
    manifest.push_back({"width_frac", io::fmt(cfg.width_frac)});
    manifest.push_back({"inversion", inversion ? "true" : "false"});
    io::write_manifest(dir + "/manifest.txt", manifest);

    std::cerr << "blowup: bracket (" << io::fmt(rep.bracket_lo) << ", "
              << io::fmt(rep.bracket_hi) << ")\n";
    if (inversion) {
        std::cerr << "blowup: classification inversion, scan failed\n";
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------- intervals
int cmd_intervals(int n, double p, double q, const std::string& selector, long long sweep_n,
                  long long seed, bool csv, const std::string& out_path) {
    const auto sel = selector == "lower_quartile" ? theory::Selector::lower_quartile
                                                  : theory::Selector::midpoint;
    std::ostringstream out;
    auto emit_header = [&] {
        if (csv)
            out << "# columns: n,p,q,theta,I1_lo,I1_hi,q0,I2_lo,I2_hi,mu,I3_lo,I3_hi,a\n";
        else
            out << "#      n        p        q    theta    I1_lo    I1_hi       q0    I2_lo"
                   "    I2_hi       mu    I3_lo    I3_hi            a\n";
    };
    auto emit_row = [&](const theory::ParamWitness& w) {
        if (csv) {
            out << w.n << ',' << io::fmt(w.p) << ',' << io::fmt(w.q) << ',' << io::fmt(w.theta)
                << ',' << io::fmt(w.I1.lo) << ',' << io::fmt(w.I1.hi) << ',' << io::fmt(w.q0)
                << ',' << io::fmt(w.I2.lo) << ',' << io::fmt(w.I2.hi) << ',' << io::fmt(w.mu)
                << ',' << io::fmt(w.I3.lo) << ',' << io::fmt(w.I3.hi) << ',' << io::fmt(w.a)
                << '\n';
        } else {
            char buf[512];
            std::snprintf(buf, sizeof buf,
                          "%8d %8.5g %8.5g %8.5g %8.5g %8.5g %8.5g %8.5g %8.5g %8.5g %8.5g "
                          "%8.5g %12.6e\n",
                          w.n, w.p, w.q, w.theta, w.I1.lo, w.I1.hi, w.q0, w.I2.lo, w.I2.hi,
                          w.mu, w.I3.lo, w.I3.hi, w.a);
            out << buf;
        }
    };

    emit_header();
    if (sweep_n > 0) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::uniform_int_distribution<int> pick_n(3, 5);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        long long failures = 0;
        for (long long k = 0; k < sweep_n; ++k) {
            const int nn = pick_n(rng);
            const double pp = 0.5 * nn + (0.5 * nn) * std::max(unit(rng), 1e-12);
            const double qq = nn + 2.0 * nn * std::max(unit(rng), 1e-12);
            try {
                emit_row(theory::param_witness(nn, pp, qq, sel));
            } catch (const std::exception& e) {
                ++failures;
                std::cerr << "intervals: witness failed for (n,p,q)=(" << nn << "," << pp << ","
                          << qq << "): " << e.what() << "\n";
            }
        }
        if (failures > 0) {
            std::cerr << "intervals: " << failures << " of " << sweep_n << " witnesses failed\n";
            return 1;
        }
    } else {
        emit_row(theory::param_witness(n, p, q, sel));
    }

    if (out_path.empty())
        std::cout << out.str();
    else
        io::atomic_write(out_path, [&](std::ostream& f) { f << out.str(); });
    return 0;
}

// ---------------------------------------------------------------- semigroup
int cmd_semigroup(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts, "semigroup");
    const std::string dir = io::resolve_output_dir(cfg.out_dir);
    const GridPtr grid = cfg.make_grid_ptr();

    // Zero-mean test fields: pure Neumann modes. General fields: a shifted
    // mode and the configured u preset.
    std::vector<Field> zero_mean, general;
    {
        Field m1(grid);
        const Grid& g = *grid;
        if (g.geometry() == Geometry::rectangle) {
            for (int j = 0; j < g.ny(); ++j)
                for (int i = 0; i < g.nx(); ++i)
                    m1.at(i, j) = std::cos(std::numbers::pi * g.x(i) / g.Lx());
        } else {
            for (int i = 0; i < g.nx(); ++i)
                m1[i] = std::cos(std::numbers::pi * g.r(i) / g.radius());
            kernels::active().add_scalar(m1.data(), -mean(m1), m1.size());
        }
        // Make the mode exactly zero-mean in the discrete quadrature.
        kernels::active().add_scalar(m1.data(), -mean(m1), m1.size());
        zero_mean.push_back(m1);
        Field shifted = m1;
        kernels::active().add_scalar(shifted.data(), 2.0, shifted.size());
        general.push_back(std::move(shifted));
        general.push_back(cfg.build_u_init(grid));
    }

    theory::SemigroupCheckConfig scfg;
    scfg.dt = cfg.semigroup.dt;
    scfg.t_lo = cfg.semigroup.t_lo;
    scfg.t_hi = cfg.semigroup.t_hi;
    scfg.n_times = cfg.semigroup.n_times;
    const auto reports =
        theory::semigroup_empirical_check(grid, scfg, cfg.semigroup.pq_pairs, zero_mean, general);

    bool all_pass = true;
    io::atomic_write(dir + "/semigroup.csv", [&](std::ostream& out) {
        out << "# columns: estimate,p,q,measured_exponent,fitted_prefactor,degenerate,pass\n";
        out << "# alpha = " << io::fmt(theory::neumann_alpha(*grid)) << '\n';
        for (const auto& r : reports) {
            out << r.estimate << ',' << io::fmt(r.p) << ',' << io::fmt(r.q) << ','
                << io::fmt(r.measured_exponent) << ',' << io::fmt(r.fitted_prefactor) << ','
                << (r.degenerate ? "true" : "false") << ',' << (r.pass ? "true" : "false")
                << '\n';
        }
    });
    for (const auto& r : reports) all_pass = all_pass && r.pass;

    auto manifest = base_manifest(cfg);
    io::write_manifest(dir + "/manifest.txt", manifest);
    std::cerr << "semigroup: " << reports.size() << " estimates, "
              << (all_pass ? "all passed" : "FAILURES") << "\n";
    return all_pass ? 0 : 1;
}

// ------------------------------------------------------------------- refine
int cmd_refine(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts, "refine");
    const std::string dir = io::resolve_output_dir(cfg.out_dir);

    experiments::RefinementSetup setup;
    setup.linear_tol = std::min(cfg.stepper.linear_tol, 1e-11);
    const experiments::RefinementReport rep =
        experiments::refinement_study(setup, cfg.grid_levels, cfg.dt_levels);

    io::atomic_write(dir + "/refine.csv", [&](std::ostream& out) {
        out << "# columns: study,level,error\n";
        out << "# space_order = " << io::fmt(rep.space_order) << '\n';
        out << "# time_order = " << io::fmt(rep.time_order) << '\n';
        out << "# valid = " << (rep.valid ? "true" : "false") << '\n';
        if (!rep.flag_reason.empty()) out << "# flag = " << rep.flag_reason << '\n';
        for (std::size_t i = 0; i < rep.space_errors.size(); ++i)
            out << "space," << rep.grid_levels[i] << ',' << io::fmt(rep.space_errors[i]) << '\n';
        for (std::size_t i = 0; i < rep.time_errors.size(); ++i)
            out << "time," << io::fmt(rep.dt_levels[i]) << ',' << io::fmt(rep.time_errors[i])
                << '\n';
    });
    auto manifest = base_manifest(cfg);
    io::write_manifest(dir + "/manifest.txt", manifest);

    if (!rep.valid) {
        std::cerr << "refine: study flagged invalid: " << rep.flag_reason << "\n";
        return 1;
    }
    std::cerr << "refine: space order " << rep.space_order << ", time order " << rep.time_order
              << "\n";
    return 0;
}

// ---------------------------------------------------------------- stability
int cmd_stability(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts, "stability");
    const std::string dir = io::resolve_output_dir(cfg.out_dir);

    experiments::TwinSetup setup;
    setup.grid = cfg.make_grid_ptr();
    setup.u_init = cfg.build_u_init(setup.grid);
    setup.v_init = cfg.build_v_init(setup.grid, setup.u_init);
    setup.chi = cfg.chi;
    setup.stepper = cfg.stepper;

    const auto rep1 = experiments::stability_twin(setup, cfg.delta);
    const auto rep2 = experiments::stability_twin(setup, 0.1 * cfg.delta);

    io::atomic_write(dir + "/stability.csv", [&](std::ostream& out) {
        out << "# columns: delta,sup_diff,amplification,flagged\n";
        for (const auto& r : {rep1, rep2})
            out << io::fmt(r.delta) << ',' << io::fmt(r.sup_diff) << ','
                << io::fmt(r.amplification) << ',' << (r.flagged ? "true" : "false") << '\n';
        if (rep1.amplification > 0 && rep2.amplification > 0)
            out << "# amplification_ratio = "
                << io::fmt(rep1.amplification / rep2.amplification) << '\n';
    });
    auto manifest = base_manifest(cfg);
    manifest.push_back({"delta", io::fmt(cfg.delta)});
    io::write_manifest(dir + "/manifest.txt", manifest);

    if (rep1.flagged || rep2.flagged) {
        std::cerr << "stability: flagged: " << rep1.reason << rep2.reason << "\n";
        return 1;
    }
    std::cerr << "stability: amplification " << rep1.amplification << " at delta " << cfg.delta
              << "\n";
    return 0;
}

// ---------------------------------------------------------------- smalldata
int cmd_smalldata(const CommonOpts& opts) {
    const RunConfig cfg = load_config(opts, "smalldata");
    const std::string dir = io::resolve_output_dir(cfg.out_dir);

    experiments::SmallDataSetup setup;
    setup.grid = cfg.make_grid_ptr();
    setup.u_shape = cfg.build_u_init(setup.grid);
    setup.v_shape = cfg.build_v_init(setup.grid, setup.u_shape);
    setup.chi = cfg.chi;
    setup.eps = cfg.eps;
    setup.theta = cfg.theta;
    setup.p = cfg.small_p;
    setup.q = cfg.small_q;
    setup.stepper = cfg.stepper;

    const auto rep = experiments::small_data_monitor(setup, cfg.lambdas);

    io::atomic_write(dir + "/smalldata.csv", [&](std::ostream& out) {
        out << "# columns: lambda,t,deviation\n";
        out << "# eps = " << io::fmt(rep.eps) << '\n';
        out << "# theta = " << io::fmt(rep.theta) << '\n';
        out << "# barrier_held = " << (rep.barrier_held ? "true" : "false") << '\n';
        for (const auto& s : rep.series) {
            out << "# max_deviation(lambda=" << io::fmt(s.lambda)
                << ") = " << io::fmt(s.max_deviation) << '\n';
            for (const auto& [t, d] : s.deviation)
                out << io::fmt(s.lambda) << ',' << io::fmt(t) << ',' << io::fmt(d) << '\n';
        }
    });
    auto manifest = base_manifest(cfg);
    manifest.push_back({"eps", io::fmt(cfg.eps)});
    manifest.push_back({"theta", io::fmt(cfg.theta)});
    io::write_manifest(dir + "/manifest.txt", manifest);

    if (!rep.barrier_held) {
        std::cerr << "smalldata: deviation barrier violated\n";
        return 1;
    }
    std::cerr << "smalldata: barrier held for all lambda\n";
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Keller-Segel chemotaxis laboratory"};
    app.require_subcommand(1);

    CommonOpts run_o, sweep_o, blowup_o, semi_o, refine_o, stab_o, small_o;
    add_common(app.add_subcommand("run", "integrate one trajectory"), run_o);
    add_common(app.add_subcommand("sweep", "fast-signal-diffusion-limit sweep"), sweep_o);
    add_common(app.add_subcommand("blowup", "critical-mass scan"), blowup_o);
    add_common(app.add_subcommand("semigroup", "heat semigroup decay checks"), semi_o);
    add_common(app.add_subcommand("refine", "space/time order study"), refine_o);
    add_common(app.add_subcommand("stability", "uniqueness/perturbation twin"), stab_o);
    add_common(app.add_subcommand("smalldata", "small-data deviation barrier"), small_o);

    auto* iv = app.add_subcommand("intervals", "admissible parameter intervals");
    int iv_n = 3;
    double iv_p = 2.0, iv_q = 4.0;
    std::string iv_selector = "midpoint", iv_out;
    long long iv_sweep = 0, iv_seed = 0;
    bool iv_csv = false;
    iv->add_option("--n", iv_n, "dimension (integer >= 3)");
    iv->add_option("--p", iv_p, "p > n/2");
    iv->add_option("--q", iv_q, "q > n");
    iv->add_option("--selector", iv_selector, "midpoint | lower_quartile");
    iv->add_option("--sweep", iv_sweep, "emit N randomized witnesses instead");
    iv->add_option("--seed", iv_seed, "sweep seed");
    iv->add_flag("--csv", iv_csv, "CSV output");
    iv->add_option("--out", iv_out, "write the table to a file instead of stdout");

    std::vector<std::string> argv_store;
    argv_store.push_back("kslab");
    for (const auto& a : args) argv_store.push_back(a);
    std::vector<char*> argv;
    argv.reserve(argv_store.size());
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand("run")) return cmd_run(run_o);
        if (app.got_subcommand("sweep")) return cmd_sweep(sweep_o);
        if (app.got_subcommand("blowup")) return cmd_blowup(blowup_o);
        if (app.got_subcommand("semigroup")) return cmd_semigroup(semi_o);
        if (app.got_subcommand("refine")) return cmd_refine(refine_o);
        if (app.got_subcommand("stability")) return cmd_stability(stab_o);
        if (app.got_subcommand("smalldata")) return cmd_smalldata(small_o);
        if (app.got_subcommand("intervals"))
            return cmd_intervals(iv_n, iv_p, iv_q, iv_selector, iv_sweep, iv_seed, iv_csv, iv_out);
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace ks::cli
