#include "ks/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "ks/elliptic.hpp"
#include "ks/report_io.hpp"

namespace ks {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& msg, const std::string& key, int line) {
    std::ostringstream ss;
    ss << "config: " << msg << " (key '" << key << "'";
    if (line > 0) ss << ", line " << line;
    ss << ")";
    throw config_error(ss.str());
}

}  // namespace

void RawConfig::set(const std::string& key, const std::string& value, int line) {
    entries[key] = Entry{value, line, false};
}

const RawConfig::Entry* RawConfig::find(const std::string& key) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
}

RawConfig parse_raw_config_text(const std::string& text, const std::string& label) {
    RawConfig raw;
    raw.source_path = label;
    raw.source_bytes = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("config: malformed section header at line " +
                                   std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw config_error("config: empty section name at line " + std::to_string(lineno));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: expected 'key = value' at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("config: empty key at line " + std::to_string(lineno));
        if (section.empty())
            throw config_error("config: key '" + key + "' outside any [section] at line " +
                               std::to_string(lineno));
        raw.set(section + "." + key, value, lineno);
    }
    return raw;
}

RawConfig parse_raw_config(const std::string& path) {
    RawConfig raw = parse_raw_config_text(io::read_file(path), path);
    raw.source_path = path;
    return raw;
}

void apply_override(RawConfig& raw, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw config_error("override '" + kv + "' must have the form section.key=value");
    const std::string key = trim(kv.substr(0, eq));
    if (key.find('.') == std::string::npos)
        throw config_error("override key '" + key + "' must be section-qualified");
    raw.set(key, trim(kv.substr(eq + 1)), 0);
    raw.source_bytes += "\n--set " + kv;
}

namespace {

class Reader {
  public:
    explicit Reader(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.entries.count(key) > 0; }

    std::string str(const std::string& key, const std::string& def) const {
        const auto* e = raw_.find(key);
        return e ? e->value : def;
    }

    double num(const std::string& key, double def) const {
        const auto* e = raw_.find(key);
        if (!e) return def;
        return to_num(key, *e);
    }

    int integer(const std::string& key, int def) const {
        const auto* e = raw_.find(key);
        if (!e) return def;
        const double v = to_num(key, *e);
        if (v != std::floor(v)) fail("expected an integer", key, e->line);
        return static_cast<int>(v);
    }

    bool flag(const std::string& key, bool def) const {
        const auto* e = raw_.find(key);
        if (!e) return def;
        if (e->value == "true" || e->value == "1") return true;
        if (e->value == "false" || e->value == "0") return false;
        fail("expected true/false", key, e->line);
    }

    std::vector<double> num_list(const std::string& key, std::vector<double> def) const {
        const auto* e = raw_.find(key);
        if (!e) return def;
        std::vector<double> out;
        std::string item;
        std::istringstream ss(e->value);
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty list element", key, e->line);
            out.push_back(parse_double(item, key, e->line));
        }
        if (out.empty()) fail("expected a nonempty list", key, e->line);
        return out;
    }

    void check_all_consumed() const {
        for (const auto& [key, entry] : raw_.entries)
            if (!entry.consumed) fail("unknown key", key, entry.line);
    }

  private:
    static double parse_double(const std::string& s, const std::string& key, int line) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) fail("trailing characters after number", key, line);
            return v;
        } catch (const config_error&) {
            throw;
        } catch (...) {
            fail("expected a number, got '" + s + "'", key, line);
        }
    }

    double to_num(const std::string& key, const RawConfig::Entry& e) const {
        return parse_double(e.value, key, e.line);
    }

    const RawConfig& raw_;
};

InitialCondition read_preset(const Reader& r, const std::string& section,
                             const std::string& def_preset) {
    InitialCondition ic;
    ic.preset = r.str(section + ".preset", def_preset);
    ic.params.c = r.num(section + ".c", 1.0);
    ic.params.base = r.num(section + ".base", 1.0);
    ic.params.amp = r.num(section + ".amp", 0.5);
    ic.params.mode_x = r.integer(section + ".mode_x", 1);
    ic.params.mode_y = r.integer(section + ".mode_y", 0);
    ic.params.center_x = r.num(section + ".center_x", -1.0);
    ic.params.center_y = r.num(section + ".center_y", -1.0);
    ic.params.width = r.num(section + ".width", 0.5);
    ic.params.target_mass = r.num(section + ".target_mass", -1.0);
    return ic;
}

}  // namespace

RunConfig typecheck_config(const RawConfig& raw) {
    const Reader r(raw);
    RunConfig c;

    c.geometry = geometry_from_string(r.str("grid.geometry", "rectangle"));
    c.Lx = r.num("grid.Lx", c.Lx);
    c.Ly = r.num("grid.Ly", c.Lx);
    c.R = r.num("grid.R", c.R);
    c.nx = r.integer("grid.nx", c.nx);
    c.ny = r.integer("grid.ny", c.nx);
    c.nr = r.integer("grid.nr", c.nx);

    c.chi = r.num("model.chi", c.chi);
    if (!(c.chi >= 0)) fail("chi must be nonnegative (chi > 0 for chemotaxis)", "model.chi", 0);
    c.lambda = r.num("model.lambda", c.lambda);
    if (c.lambda < 0) fail("lambda must be >= 0", "model.lambda", 0);
    c.lambdas = r.num_list("model.lambdas", {});
    c.lambda_cap = r.num("model.lambda_cap", c.lambda_cap);
    c.system = r.str("model.system", "pp");
    if (c.system != "pp" && c.system != "pe")
        fail("system must be pp or pe", "model.system", 0);
    if (c.system == "pe" && c.lambda != 0.0)
        fail("the parabolic-elliptic system requires lambda = 0", "model.lambda", 0);

    c.init_u = read_preset(r, "initial_u", "constant");
    c.init_v = read_preset(r, "initial_v", "consistent");

    c.stepper.dt_max = r.num("stepper.dt_max", 1e-2);
    c.stepper.dt_min = r.num("stepper.dt_min", 1e-9);
    c.stepper.cfl_safety = r.num("stepper.cfl_safety", 0.4);
    c.stepper.linear_tol = r.num("stepper.linear_tol", 1e-10);
    c.blowup_factor_explicit = r.has("stepper.blowup_linf_factor");
    c.stepper.blowup_linf_factor = r.num("stepper.blowup_linf_factor", 1e6);
    c.stepper.t_end = r.num("stepper.t_end", 2.0);
    c.stepper.diag_stride = r.integer("stepper.diag_stride", 10);
    c.stepper.fixed_dt = r.num("stepper.fixed_dt", 0.0);
    c.stepper.diag_theta = r.num("stepper.diag_theta", 2.2);
    c.stepper.diag_q = r.num("stepper.diag_q", 4.0);
    c.stepper.max_iter = r.integer("stepper.max_iter", 20000);
    c.stepper.validate();

    c.kind = r.str("experiment.kind", "run");
    c.t0 = r.num("experiment.t0", c.t0);
    c.masses = r.num_list("experiment.masses", {});
    c.width_frac = r.num("experiment.width_frac", c.width_frac);
    c.chi_scaling_check = r.flag("experiment.chi_scaling_check", false);
    c.delta = r.num("experiment.delta", c.delta);
    {
        const auto gl = r.num_list("experiment.grid_levels", {});
        if (!gl.empty()) {
            c.grid_levels.clear();
            for (const double v : gl) c.grid_levels.push_back(static_cast<int>(v));
        }
        c.dt_levels = r.num_list("experiment.dt_levels", c.dt_levels);
    }
    c.eps = r.num("experiment.eps", c.eps);
    c.theta = r.num("experiment.theta", c.theta);
    c.small_p = r.num("experiment.p", c.small_p);
    c.small_q = r.num("experiment.q", c.small_q);
    c.semigroup.dt = r.num("experiment.semigroup_dt", c.semigroup.dt);
    c.semigroup.t_lo = r.num("experiment.semigroup_t_lo", c.semigroup.t_lo);
    c.semigroup.t_hi = r.num("experiment.semigroup_t_hi", c.semigroup.t_hi);
    c.semigroup.n_times = r.integer("experiment.semigroup_n_times", c.semigroup.n_times);
    {
        // "p:q" pairs, comma separated.
        const std::string s = r.str("experiment.semigroup_pairs", "");
        if (!s.empty()) {
            c.semigroup.pq_pairs.clear();
            auto number = [&](const std::string& txt) {
                if (txt == "inf") return std::numeric_limits<double>::infinity();
                try {
                    return std::stod(txt);
                } catch (...) {
                    fail("expected a number in p:q pair", "experiment.semigroup_pairs", 0);
                }
            };
            std::istringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto colon = item.find(':');
                if (colon == std::string::npos)
                    fail("semigroup pairs must look like p:q", "experiment.semigroup_pairs", 0);
                c.semigroup.pq_pairs.emplace_back(number(trim(item.substr(0, colon))),
                                                  number(trim(item.substr(colon + 1))));
            }
        }
    }

    const std::string valid_kinds[] = {"run",    "sweep",  "blowup",    "semigroup",
                                       "refine", "stability", "smalldata"};
    if (std::find(std::begin(valid_kinds), std::end(valid_kinds), c.kind) ==
        std::end(valid_kinds))
        fail("unknown experiment kind '" + c.kind + "'", "experiment.kind", 0);

    c.out_dir = r.str("output.dir", "out");
    {
        const double seed = r.num("output.seed", 0.0);
        if (seed < 0 || seed != std::floor(seed))
            fail("seed must be a nonnegative integer", "output.seed", 0);
        c.seed = static_cast<std::uint64_t>(seed);
    }
    c.jobs = r.integer("output.jobs", 1);
    if (c.jobs < 1) fail("jobs must be >= 1", "output.jobs", 0);

    r.check_all_consumed();

    // Experiment preconditions checked before any compute starts.
    if (c.kind == "sweep" && c.lambdas.empty())
        fail("sweep requires model.lambdas", "model.lambdas", 0);
    if (c.kind == "blowup" && c.masses.empty())
        fail("blowup requires experiment.masses", "experiment.masses", 0);
    if (c.kind == "smalldata" && c.lambdas.empty())
        fail("smalldata requires model.lambdas", "model.lambdas", 0);
    if (c.kind == "blowup")
        for (const double m : c.masses)
            if (!(m > 0)) fail("masses must be positive", "experiment.masses", 0);

    c.config_hash = io::hex64(io::fnv1a64(raw.source_bytes));
    return c;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    RawConfig raw = parse_raw_config(path);
    for (const auto& kv : overrides) apply_override(raw, kv);
    return typecheck_config(raw);
}

GridPtr RunConfig::make_grid_ptr() const {
    if (geometry == Geometry::rectangle) return Grid::rectangle(Lx, Ly, nx, ny);
    return Grid::radial_disk(R, nr);
}

Field RunConfig::build_u_init(const GridPtr& grid) const {
    return sample_initial(init_u.preset, init_u.params, grid);
}

Field RunConfig::build_v_init(const GridPtr& grid, const Field& u_init) const {
    if (init_v.preset == "consistent")
        return solve_screened_poisson(u_init, stepper.linear_tol);
    return sample_initial(init_v.preset, init_v.params, grid);
}

}  // namespace ks
