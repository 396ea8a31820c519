#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ks/dynamics.hpp"
#include "ks/grid.hpp"

namespace ks {

// Raw parsed file: section-qualified keys with their source line, before any
// typing. CLI --set overrides land here too (line 0).
struct RawConfig {
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    std::map<std::string, Entry> entries;  // key: "section.name"
    std::string source_path;
    std::string source_bytes;

    void set(const std::string& key, const std::string& value, int line);
    const Entry* find(const std::string& key) const;
};

RawConfig parse_raw_config(const std::string& path);
RawConfig parse_raw_config_text(const std::string& text, const std::string& label = "<memory>");
void apply_override(RawConfig& raw, const std::string& key_equals_value);

struct InitialCondition {
    std::string preset = "constant";  // v side also accepts "consistent"
    PresetParams params;
};

struct SemigroupParams {
    double dt = 1e-3;
    double t_lo = 0.05, t_hi = 3.0;
    int n_times = 24;
    std::vector<std::pair<double, double>> pq_pairs{{2.0, 2.0}};
};

// Fully typed and validated run configuration.
struct RunConfig {
    // [grid]
    Geometry geometry = Geometry::rectangle;
    double Lx = 3.141592653589793, Ly = 3.141592653589793;
    double R = 1.0;
    int nx = 128, ny = 128, nr = 128;

    // [model]
    double chi = 1.0;
    double lambda = 0.1;
    std::vector<double> lambdas;  // sweep / smalldata
    double lambda_cap = 1.0;
    std::string system = "pp";  // pp | pe (pe requires lambda == 0)

    // [initial_u] / [initial_v]
    InitialCondition init_u{.preset = "constant", .params = {}};
    InitialCondition init_v{.preset = "consistent", .params = {}};

    // [stepper]
    StepperConfig stepper;
    bool blowup_factor_explicit = false;

    // [experiment]
    std::string kind = "run";
    double t0 = 0.2;                  // sweep: v-error window start
    std::vector<double> masses;       // blowup
    double width_frac = 0.05;         // blowup
    bool chi_scaling_check = false;   // blowup: rerun at 2*chi, halved masses
    double delta = 1e-6;              // stability
    std::vector<int> grid_levels{32, 48, 64};         // refine
    std::vector<double> dt_levels{4e-3, 2e-3, 1e-3};  // refine
    double eps = 0.05;                // smalldata
    double theta = 2.2;               // smalldata deviation norm
    double small_p = 2.0, small_q = 4.0;
    SemigroupParams semigroup;

    // [output]
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int jobs = 1;

    std::string config_hash;  // fnv1a64 of the raw bytes

    GridPtr make_grid_ptr() const;
    Field build_u_init(const GridPtr& grid) const;
    // Resolves "consistent" via the screened Poisson solve of u_init.
    Field build_v_init(const GridPtr& grid, const Field& u_init) const;
};

RunConfig parse_config(const std::string& path,
                       const std::vector<std::string>& overrides = {});
RunConfig typecheck_config(const RawConfig& raw);

}  // namespace ks
