#include "ks/operators.hpp"

#include <cmath>
#include <cstring>

#include "ks/kernels.hpp"

namespace ks {

FaceVector FaceVector::zeros(const GridPtr& grid) {
    FaceVector v;
    v.grid = grid;
    if (grid->geometry() == Geometry::rectangle) {
        v.fx.assign(static_cast<std::size_t>(grid->nx() - 1) * grid->ny(), 0.0);
        v.fy.assign(static_cast<std::size_t>(grid->nx()) * (grid->ny() - 1), 0.0);
    } else {
        v.fx.assign(static_cast<std::size_t>(grid->nx() - 1), 0.0);
    }
    return v;
}

double FaceVector::abs_max() const {
    const auto& k = kernels::active();
    const double mx = k.abs_max(fx.data(), fx.size());
    const double my = fy.empty() ? 0.0 : k.abs_max(fy.data(), fy.size());
    return mx > my ? mx : my;
}

ScreenedOperator::ScreenedOperator(GridPtr grid, double sigma)
    : grid_(std::move(grid)), sigma_(sigma) {
    if (sigma < 0) throw domain_error("screened operator: sigma must be >= 0");
    const Grid& g = *grid_;
    inv_diag_.resize(g.cells());
    if (g.geometry() == Geometry::rectangle) {
        const double ihx2 = 1.0 / (g.hx() * g.hx());
        const double ihy2 = 1.0 / (g.hy() * g.hy());
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const double dx = (i > 0 ? 1.0 : 0.0) + (i + 1 < g.nx() ? 1.0 : 0.0);
                const double dy = (j > 0 ? 1.0 : 0.0) + (j + 1 < g.ny() ? 1.0 : 0.0);
                inv_diag_[static_cast<std::size_t>(j) * g.nx() + i] =
                    1.0 / (sigma_ + ihx2 * dx + ihy2 * dy);
            }
    } else {
        const double ihr2 = 1.0 / (g.hx() * g.hx());
        for (int i = 0; i < g.nx(); ++i) {
            const double rw = g.r_face(i), re = g.r_face(i + 1);
            const double off = ((i > 0 ? rw : 0.0) + (i + 1 < g.nx() ? re : 0.0)) / g.r(i);
            inv_diag_[i] = 1.0 / (sigma_ + ihr2 * off);
        }
    }
}

void ScreenedOperator::apply(const double* x, double* out) const {
    const Grid& g = *grid_;
    if (g.geometry() == Geometry::rectangle) {
        kernels::active().screened_apply_rect(out, x, g.nx(), g.ny(), sigma_,
                                              1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
        return;
    }
    // Conservative radial stencil -(1/r)(r f_r)_r + sigma f; the axis cell has
    // a zero inner face (r_face(0) == 0).
    const int nr = g.nx();
    const double ihr2 = 1.0 / (g.hx() * g.hx());
    for (int i = 0; i < nr; ++i) {
        const double xi = x[i];
        double d = 0.0;
        if (i > 0) d = g.r_face(i) * (xi - x[i - 1]);
        if (i + 1 < nr) d = d + g.r_face(i + 1) * (xi - x[i + 1]);
        out[i] = sigma_ * xi + ihr2 * d / g.r(i);
    }
}

FaceVector gradient_faces(const Field& f) {
    const Grid& g = *f.grid();
    FaceVector v = FaceVector::zeros(f.grid());
    if (g.geometry() == Geometry::rectangle) {
        const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i + 1 < g.nx(); ++i)
                v.x_face(i, j) = (f.at(i + 1, j) - f.at(i, j)) * ihx;
        for (int j = 0; j + 1 < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                v.y_face(i, j) = (f.at(i, j + 1) - f.at(i, j)) * ihy;
    } else {
        const double ihr = 1.0 / g.hx();
        for (int i = 0; i + 1 < g.nx(); ++i) v.fx[i] = (f[i + 1] - f[i]) * ihr;
    }
    return v;
}

Field divergence(const FaceVector& flux) {
    const GridPtr& gp = flux.grid;
    const Grid& g = *gp;
    const FaceVector check = FaceVector::zeros(gp);
    if (flux.fx.size() != check.fx.size() || flux.fy.size() != check.fy.size())
        throw structural_error("divergence: flux arrays do not match grid face counts");
    Field out(gp);
    if (g.geometry() == Geometry::rectangle) {
        const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const double fe = (i + 1 < g.nx()) ? flux.x_face(i, j) : 0.0;
                const double fw = (i > 0) ? flux.x_face(i - 1, j) : 0.0;
                const double fn = (j + 1 < g.ny()) ? flux.y_face(i, j) : 0.0;
                const double fs = (j > 0) ? flux.y_face(i, j - 1) : 0.0;
                out.at(i, j) = (fe - fw) * ihx + (fn - fs) * ihy;
            }
    } else {
        const double ihr = 1.0 / g.hx();
        for (int i = 0; i < g.nx(); ++i) {
            const double fe = (i + 1 < g.nx()) ? g.r_face(i + 1) * flux.fx[i] : 0.0;
            const double fw = (i > 0) ? g.r_face(i) * flux.fx[i - 1] : 0.0;
            out[i] = (fe - fw) * ihr / g.r(i);
        }
    }
    return out;
}

Field laplacian_neumann(const Field& f) { return divergence(gradient_faces(f)); }

namespace {

// Weighted dot/norm used by CG so the radial operator is self-adjoint.
double wip(const Grid& g, const double* a, const double* b) {
    const auto n = static_cast<std::size_t>(g.cells());
    const auto& k = kernels::active();
    if (g.uniform_weights()) return k.dot(a, b, n) * g.uniform_weight();
    return k.wdot(a, b, g.weights().data(), n);
}

double wnorm(const Grid& g, const double* a) { return std::sqrt(wip(g, a, a)); }

double wmean(const Grid& g, const double* a) {
    const auto n = static_cast<std::size_t>(g.cells());
    const auto& k = kernels::active();
    const double s = g.uniform_weights() ? k.sum(a, n) * g.uniform_weight()
                                         : k.dot(a, g.weights().data(), n);
    return s / g.area();
}

}  // namespace

Field solve_spd(const ScreenedOperator& op, const Field& rhs, const SolveOptions& opts) {
    const GridPtr& gp = op.grid();
    const Grid& g = *gp;
    if (!rhs.grid() || !rhs.grid()->same_layout(g))
        throw structural_error("solve_spd: rhs grid does not match operator grid");
    const auto n = static_cast<std::size_t>(g.cells());
    const auto& k = kernels::active();

    Field b = rhs;
    const bool singular = (op.sigma() == 0.0);
    if (singular) {
        const double mb = wmean(g, b.data());
        const double scale = k.abs_max(b.data(), n);
        if (std::fabs(mb) * g.area() > 1e-10 * (scale * g.area() + 1e-300))
            throw solvability_error("solve_spd: sigma = 0 requires a zero-mean rhs");
        k.add_scalar(b.data(), -mb, n);
    }

    const double bnorm = wnorm(g, b.data());
    Field x = opts.initial_guess ? *opts.initial_guess : Field(gp);
    if (opts.initial_guess) {
        if (!opts.initial_guess->grid()->same_layout(g))
            throw structural_error("solve_spd: initial guess grid mismatch");
    } else if (!singular) {
        k.scale(x.data(), 1.0 / op.sigma(), b.data(), n);
    }
    if (bnorm == 0.0) {
        return singular ? Field(gp) : x;
    }

    CgWorkspace local;
    CgWorkspace& ws = opts.workspace ? *opts.workspace : local;
    ws.r.resize(n);
    ws.z.resize(n);
    ws.p.resize(n);
    ws.ap.resize(n);
    const auto& inv_diag = op.inverse_diagonal();

    int total_iters = 0;
    double true_rel = 0.0;
    // The recurrence residual can drift from the true one; verify and, if
    // needed, restart CG from the current iterate (at most twice).
    for (int attempt = 0; attempt < 3; ++attempt) {
        op.apply(x.data(), ws.ap.data());
        for (std::size_t i = 0; i < n; ++i) ws.r[i] = b[static_cast<int>(i)] - ws.ap[i];
        double rnorm = wnorm(g, ws.r.data());
        double rho = 0.0;
        bool first = true;
        while (rnorm > opts.tol * bnorm && total_iters < opts.max_iter) {
            for (std::size_t i = 0; i < n; ++i) ws.z[i] = ws.r[i] * inv_diag[i];
            const double rho_new = wip(g, ws.r.data(), ws.z.data());
            if (first)
                std::memcpy(ws.p.data(), ws.z.data(), n * sizeof(double));
            else
                k.zpbp(ws.p.data(), ws.z.data(), rho_new / rho, n);
            first = false;
            rho = rho_new;
            op.apply(ws.p.data(), ws.ap.data());
            const double pap = wip(g, ws.p.data(), ws.ap.data());
            if (!(pap > 0))
                throw solver_error("solve_spd: operator lost positive definiteness",
                                   rnorm / bnorm, total_iters);
            const double alpha = rho / pap;
            k.axpy(x.data(), alpha, ws.p.data(), n);
            k.axpy(ws.r.data(), -alpha, ws.ap.data(), n);
            rnorm = wnorm(g, ws.r.data());
            ++total_iters;
        }
        op.apply(x.data(), ws.ap.data());
        for (std::size_t i = 0; i < n; ++i) ws.r[i] = b[static_cast<int>(i)] - ws.ap[i];
        true_rel = wnorm(g, ws.r.data()) / bnorm;
        if (true_rel <= opts.tol) {
            if (singular) {
                const double mx = wmean(g, x.data());
                k.add_scalar(x.data(), -mx, n);
            }
            return x;
        }
        if (total_iters >= opts.max_iter)
            throw solver_error("solve_spd: no convergence within max_iter", true_rel, total_iters);
    }
    throw solver_error("solve_spd: residual polish failed", true_rel, total_iters);
}

}  // namespace ks
