#include "ks/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ks/kernels.hpp"
#include "ks/report_io.hpp"

namespace ks {

std::string to_string(Geometry g) {
    return g == Geometry::rectangle ? "rectangle" : "radial_disk";
}

Geometry geometry_from_string(const std::string& s) {
    if (s == "rectangle") return Geometry::rectangle;
    if (s == "radial_disk") return Geometry::radial_disk;
    throw config_error("unknown geometry '" + s + "' (expected rectangle or radial_disk)");
}

std::shared_ptr<const Grid> Grid::rectangle(double Lx, double Ly, int nx, int ny) {
    if (!(Lx > 0) || !(Ly > 0))
        throw config_error("grid: rectangle lengths must be positive");
    if (nx < 4 || ny < 4)
        throw config_error("grid: nx and ny must be at least 4");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->geometry_ = Geometry::rectangle;
    g->Lx_ = Lx;
    g->Ly_ = Ly;
    g->nx_ = nx;
    g->ny_ = ny;
    g->hx_ = Lx / nx;
    g->hy_ = Ly / ny;
    g->area_ = Lx * Ly;
    return g;
}

std::shared_ptr<const Grid> Grid::radial_disk(double R, int nr) {
    if (!(R > 0)) throw config_error("grid: disk radius must be positive");
    if (nr < 4) throw config_error("grid: nr must be at least 4");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->geometry_ = Geometry::radial_disk;
    g->Lx_ = R;
    g->Ly_ = 0;
    g->nx_ = nr;
    g->ny_ = 1;
    g->hx_ = R / nr;
    g->hy_ = 0;
    g->area_ = std::numbers::pi * R * R;
    g->weights_.resize(nr);
    const double two_pi_hr = 2.0 * std::numbers::pi * g->hx_;
    for (int i = 0; i < nr; ++i) g->weights_[i] = two_pi_hr * g->r(i) ;
    return g;
}

double Grid::cell_weight(int i, int j) const {
    (void)j;
    if (geometry_ == Geometry::rectangle) return hx_ * hy_;
    return weights_[i];
}

double Grid::weight_sum() const {
    // Neumaier compensated sum; the invariant tests compare against |Omega|.
    double s = 0.0, c = 0.0;
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            const double w = cell_weight(i, j);
            const double t = s + w;
            c += (std::fabs(s) >= std::fabs(w)) ? (s - t) + w : (w - t) + s;
            s = t;
        }
    return s + c;
}

bool Grid::same_layout(const Grid& other) const {
    return geometry_ == other.geometry_ && nx_ == other.nx_ && ny_ == other.ny_ &&
           Lx_ == other.Lx_ && Ly_ == other.Ly_;
}

GridPtr make_grid(Geometry geometry, double Lx, double Ly, int nx, int ny) {
    if (geometry == Geometry::rectangle) return Grid::rectangle(Lx, Ly, nx, ny);
    return Grid::radial_disk(Lx, nx);
}

Field::Field(GridPtr grid, double fill)
    : grid_(std::move(grid)), values_(static_cast<std::size_t>(grid_->cells()), fill) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_->cells())
        throw structural_error("field: value count does not match grid cell count");
}

void Field::check_finite(const char* label) const {
    for (const double v : values_)
        if (!std::isfinite(v))
            throw domain_error(std::string(label) + ": non-finite value encountered");
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!a.grid() || !b.grid() || !a.grid()->same_layout(*b.grid()))
        throw structural_error(std::string(where) + ": fields live on different grids");
}

double integrate(const Field& f) {
    const Grid& g = *f.grid();
    const auto n = static_cast<std::size_t>(f.size());
    const auto& k = kernels::active();
    if (g.uniform_weights()) return k.sum(f.data(), n) * g.uniform_weight();
    return k.dot(f.data(), g.weights().data(), n);
}

double mean(const Field& f) { return integrate(f) / f.grid()->area(); }

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw domain_error("lp_norm: p must be >= 1");
    const auto n = static_cast<std::size_t>(f.size());
    const auto& k = kernels::active();
    if (std::isinf(p)) return k.abs_max(f.data(), n);
    const Grid& g = *f.grid();
    if (p == 1.0) {
        if (g.uniform_weights()) return k.sum_abs(f.data(), n) * g.uniform_weight();
        double s = 0.0;
        for (int i = 0; i < f.size(); ++i) s += std::fabs(f[i]) * g.weights()[i];
        return s;
    }
    if (p == 2.0) {
        double s2 = g.uniform_weights()
                        ? k.dot(f.data(), f.data(), n) * g.uniform_weight()
                        : k.wdot(f.data(), f.data(), g.weights().data(), n);
        return std::sqrt(s2);
    }
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            s += std::pow(std::fabs(f.at(i, j)), p) * g.cell_weight(i, j);
    return std::pow(s, 1.0 / p);
}

namespace {

Field normalize_mass(Field f, double target_mass) {
    if (!(target_mass > 0)) throw config_error("preset: target_mass must be positive");
    const double m = integrate(f);
    if (!(m > 0)) throw config_error("preset: cannot normalize a zero-mass field");
    const double s = target_mass / m;
    for (auto& v : f.values()) v *= s;
    return f;
}

}  // namespace

Field sample_initial(const std::string& preset, const PresetParams& p, const GridPtr& grid) {
    const Grid& g = *grid;
    if (preset == "constant") {
        if (p.c < 0) throw config_error("preset constant: c must be nonnegative");
        return Field(grid, p.c);
    }
    if (preset == "cosine_perturbed_constant") {
        if (g.geometry() != Geometry::rectangle)
            throw config_error("preset cosine_perturbed_constant requires a rectangle grid");
        if (std::fabs(p.amp) > p.base)
            throw config_error("preset cosine_perturbed_constant: |amp| > base yields negative values");
        Field f(grid);
        const double kx = p.mode_x * std::numbers::pi / g.Lx();
        const double ky = p.mode_y * std::numbers::pi / g.Ly();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                f.at(i, j) = p.base + p.amp * std::cos(kx * g.x(i)) * std::cos(ky * g.y(j));
        return f;
    }
    if (preset == "gaussian_bump") {
        if (g.geometry() != Geometry::rectangle)
            throw config_error("preset gaussian_bump requires a rectangle grid (use radial_gaussian)");
        if (!(p.width > 0)) throw config_error("preset gaussian_bump: width must be positive");
        const double cx = p.center_x >= 0 ? p.center_x : 0.5 * g.Lx();
        const double cy = p.center_y >= 0 ? p.center_y : 0.5 * g.Ly();
        Field f(grid);
        const double iw2 = 1.0 / (2.0 * p.width * p.width);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const double dx = g.x(i) - cx, dy = g.y(j) - cy;
                f.at(i, j) = std::exp(-(dx * dx + dy * dy) * iw2);
            }
        return normalize_mass(std::move(f), p.target_mass);
    }
    if (preset == "radial_gaussian") {
        if (g.geometry() != Geometry::radial_disk)
            throw config_error("preset radial_gaussian requires a radial_disk grid");
        if (!(p.width > 0)) throw config_error("preset radial_gaussian: width must be positive");
        Field f(grid);
        const double iw2 = 1.0 / (2.0 * p.width * p.width);
        for (int i = 0; i < g.nx(); ++i) f[i] = std::exp(-g.r(i) * g.r(i) * iw2);
        return normalize_mass(std::move(f), p.target_mass);
    }
    throw config_error("unknown initial-condition preset '" + preset + "'");
}

void write_snapshot(std::ostream& out, const Field& f, double t) {
    const Grid& g = *f.grid();
    out << "# " << to_string(g.geometry()) << ' ' << g.nx() << ' ' << g.ny() << ' '
        << io::fmt(g.Lx()) << ' ' << io::fmt(g.Ly()) << ' ' << io::fmt(t) << '\n';
    if (g.geometry() == Geometry::rectangle) {
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                out << io::fmt(g.x(i)) << ' ' << io::fmt(g.y(j)) << ' '
                    << io::fmt(f.at(i, j)) << '\n';
    } else {
        for (int i = 0; i < g.nx(); ++i)
            out << io::fmt(g.r(i)) << ' ' << io::fmt(f[i]) << '\n';
    }
}

void write_snapshot_file(const std::string& path, const Field& f, double t) {
    io::atomic_write(path, [&](std::ostream& out) { write_snapshot(out, f, t); });
}

Snapshot read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw config_error("snapshot: empty stream");
    std::istringstream hdr(line);
    std::string hash, geom;
    int nx = 0, ny = 0;
    double Lx = 0, Ly = 0, t = 0;
    hdr >> hash >> geom >> nx >> ny >> Lx >> Ly >> t;
    if (hash != "#" || hdr.fail()) throw config_error("snapshot: malformed header line");
    GridPtr grid = geometry_from_string(geom) == Geometry::rectangle
                       ? Grid::rectangle(Lx, Ly, nx, ny)
                       : Grid::radial_disk(Lx, nx);
    Field f(grid);
    const bool radial = grid->geometry() == Geometry::radial_disk;
    for (int k = 0; k < grid->cells(); ++k) {
        if (!std::getline(in, line))
            throw config_error("snapshot: truncated data section");
        std::istringstream row(line);
        double a = 0, b = 0, v = 0;
        if (radial)
            row >> a >> v;
        else
            row >> a >> b >> v;
        if (row.fail()) throw config_error("snapshot: malformed data row");
        f[k] = v;
    }
    return Snapshot{std::move(f), t};
}

}  // namespace ks
