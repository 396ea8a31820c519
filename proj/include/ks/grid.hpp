#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ks/errors.hpp"

namespace ks {

enum class Geometry { rectangle, radial_disk };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

// Cell-centered uniform grid on a Neumann domain. Rectangle (0,Lx)x(0,Ly)
// stores nx*ny cells with constant weight hx*hy; the radial disk of radius R
// is a 1-D array in r (ny == 1) with metric weights 2*pi*r_i*hr.
class Grid {
  public:
    static std::shared_ptr<const Grid> rectangle(double Lx, double Ly, int nx, int ny);
    static std::shared_ptr<const Grid> radial_disk(double R, int nr);

    Geometry geometry() const { return geometry_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int cells() const { return nx_ * ny_; }
    double Lx() const { return Lx_; }
    double Ly() const { return Ly_; }
    double radius() const { return Lx_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double min_spacing() const { return (ny_ > 1 && hy_ < hx_) ? hy_ : hx_; }
    double area() const { return area_; }

    double x(int i) const { return (i + 0.5) * hx_; }
    double y(int j) const { return (j + 0.5) * hy_; }
    double r(int i) const { return (i + 0.5) * hx_; }
    double r_face(int i) const { return i * hx_; }  // face between cells i-1 and i

    bool uniform_weights() const { return geometry_ == Geometry::rectangle; }
    double uniform_weight() const { return hx_ * hy_; }
    double cell_weight(int i, int j) const;
    std::span<const double> weights() const { return weights_; }  // radial only

    // Compensated sum of all cell weights; equals |Omega| to ~eps.
    double weight_sum() const;

    bool same_layout(const Grid& other) const;

  private:
    Grid() = default;
    Geometry geometry_ = Geometry::rectangle;
    double Lx_ = 0, Ly_ = 0, hx_ = 0, hy_ = 0, area_ = 0;
    int nx_ = 0, ny_ = 0;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(Geometry geometry, double Lx, double Ly, int nx, int ny);

// Scalar cell-centered function bound to a grid.
class Field {
  public:
    Field() = default;
    explicit Field(GridPtr grid, double fill = 0.0);
    Field(GridPtr grid, std::vector<double> values);

    const GridPtr& grid() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    double& operator[](int k) { return values_[k]; }
    double operator[](int k) const { return values_[k]; }
    double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_->nx() + i]; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * grid_->nx() + i]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    // Throws domain_error on NaN/Inf entries.
    void check_finite(const char* label = "field") const;

  private:
    GridPtr grid_;
    std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b, const char* where);

double integrate(const Field& f);
double mean(const Field& f);

// (integral |f|^p)^(1/p); p = infinity gives max|f|. Requires p >= 1.
double lp_norm(const Field& f, double p);

// Initial-condition presets. All presets produce nonnegative fields;
// mass-normalized presets divide by their own discrete integral.
struct PresetParams {
    double c = 1.0;                      // constant
    double base = 1.0, amp = 0.5;        // cosine_perturbed_constant
    int mode_x = 1, mode_y = 0;
    double center_x = -1, center_y = -1;  // gaussian_bump; negative = domain center
    double width = 0.5;
    double target_mass = -1;             // gaussian presets; must be > 0
};

Field sample_initial(const std::string& preset, const PresetParams& params, const GridPtr& grid);

// Field snapshot file: "# geometry nx ny Lx Ly t" header then one
// "x y value" ("r value" for radial) row per cell, 17 significant digits.
void write_snapshot(std::ostream& out, const Field& f, double t);
void write_snapshot_file(const std::string& path, const Field& f, double t);
struct Snapshot {
    Field field;
    double t = 0;
};
Snapshot read_snapshot(std::istream& in);

}  // namespace ks
