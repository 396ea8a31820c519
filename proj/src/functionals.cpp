#include "ks/functionals.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ks/kernels.hpp"
#include "ks/report_io.hpp"

namespace ks {

std::string DiagnosticsRecord::csv_header() {
    return "# columns: t,mass,linf_u,l2_u,lp_u_theta,w1q_v,lyapunov,"
           "dissipation_residual,semigroup_deviation,dt_used";
}

std::string DiagnosticsRecord::csv_row() const {
    std::ostringstream ss;
    ss << io::fmt(t) << ',' << io::fmt(mass) << ',' << io::fmt(linf_u) << ','
       << io::fmt(l2_u) << ',' << io::fmt(lp_u_theta) << ',' << io::fmt(w1q_v) << ','
       << io::fmt(lyapunov) << ',' << io::fmt(dissipation_residual) << ','
       << io::fmt(semigroup_deviation) << ',' << io::fmt(dt_used);
    return ss.str();
}

namespace {

double face_weight_x(const Grid& g, int i_face) {
    if (g.geometry() == Geometry::rectangle) return g.hx() * g.hy();
    // face between radial cells i_face and i_face+1
    return 2.0 * std::numbers::pi * g.r_face(i_face + 1) * g.hx();
}

inline double ulogu(double u) { return u > 0 ? u * std::log(u) : 0.0; }

void require_u_nonnegative(const Field& u, const char* where) {
    const auto n = static_cast<std::size_t>(u.size());
    const auto& k = kernels::active();
    const double umax = k.abs_max(u.data(), n);
    if (k.min(u.data(), n) < -1e-12 * umax)
        throw domain_error(std::string(where) + ": u is negative beyond tolerance");
}

}  // namespace

double dirichlet_energy(const Field& f) {
    const Grid& g = *f.grid();
    const FaceVector grad = gradient_faces(f);
    double e = 0.0;
    if (g.geometry() == Geometry::rectangle) {
        const double wf = g.hx() * g.hy();
        double s = 0.0;
        for (const double gx : grad.fx) s += gx * gx;
        for (const double gy : grad.fy) s += gy * gy;
        e = wf * s;
    } else {
        for (int i = 0; i + 1 < g.nx(); ++i)
            e += face_weight_x(g, i) * grad.fx[i] * grad.fx[i];
    }
    return e;
}

double lyapunov(const Field& u, const Field& v, double chi) {
    require_same_grid(u, v, "lyapunov");
    require_u_nonnegative(u, "lyapunov");
    const Grid& g = *u.grid();
    double cell_part = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double ui = u.at(i, j), vi = v.at(i, j);
            cell_part += g.cell_weight(i, j) * (ulogu(ui) - chi * ui * vi + 0.5 * chi * vi * vi);
        }
    return cell_part + 0.5 * chi * dirichlet_energy(v);
}

namespace {

// integral u |grad(log u - chi v)|^2 with arithmetic-mean face u and the
// u_floor cutoff on either adjacent cell.
double log_gradient_dissipation(const Field& u, const Field& v, double chi) {
    const Grid& g = *u.grid();
    const double floor = 1e-14 * kernels::active().abs_max(u.data(), u.size());
    Field w(u.grid());
    for (int k = 0; k < u.size(); ++k)
        w[k] = (u[k] > floor ? std::log(u[k]) : 0.0) - chi * v[k];

    double s = 0.0;
    auto face_term = [&](double ua, double ub, double wa, double wb, double h, double wf) {
        if (ua <= floor || ub <= floor) return;
        const double grad = (wb - wa) / h;
        s += wf * 0.5 * (ua + ub) * grad * grad;
    };
    if (g.geometry() == Geometry::rectangle) {
        const double wf = g.hx() * g.hy();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i + 1 < g.nx(); ++i)
                face_term(u.at(i, j), u.at(i + 1, j), w.at(i, j), w.at(i + 1, j), g.hx(), wf);
        for (int j = 0; j + 1 < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                face_term(u.at(i, j), u.at(i, j + 1), w.at(i, j), w.at(i, j + 1), g.hy(), wf);
    } else {
        for (int i = 0; i + 1 < g.nx(); ++i)
            face_term(u[i], u[i + 1], w[i], w[i + 1], g.hx(), face_weight_x(g, i));
    }
    return s;
}

}  // namespace

double dissipation_residual(const TrajectorySample& s0, const TrajectorySample& s1,
                            const TrajectorySample& s2, double chi, double lambda) {
    const double d1 = s1.t - s0.t, d2 = s2.t - s1.t;
    if (!(d1 > 0) || !(d2 > 0) || std::fabs(d2 - d1) > 1e-9 * (d1 + d2))
        throw config_error("dissipation_residual: samples must be uniformly spaced in time");
    require_same_grid(s0.u, s2.u, "dissipation_residual");

    const double two_delta = s2.t - s0.t;
    const double dWdt =
        (lyapunov(s2.u, s2.v, chi) - lyapunov(s0.u, s0.v, chi)) / two_delta;

    Field vt(s1.v.grid());
    for (int k = 0; k < vt.size(); ++k) vt[k] = (s2.v[k] - s0.v[k]) / two_delta;
    const double vt_l2 = lp_norm(vt, 2.0);
    const double relax = chi * lambda * vt_l2 * vt_l2;

    const double dissip = log_gradient_dissipation(s1.u, s1.v, chi);
    return std::fabs(dWdt + relax + dissip);
}

double semigroup_deviation(const Field& u_t, const Field& heat_snapshot, double theta) {
    require_same_grid(u_t, heat_snapshot, "semigroup_deviation");
    if (!(theta >= 1)) throw domain_error("semigroup_deviation: theta must be >= 1");
    Field diff(u_t.grid());
    for (int k = 0; k < diff.size(); ++k) diff[k] = u_t[k] - heat_snapshot[k];
    return lp_norm(diff, theta);
}

Field gradient_magnitude(const Field& v) {
    const Grid& g = *v.grid();
    const FaceVector grad = gradient_faces(v);
    Field out(v.grid());
    if (g.geometry() == Geometry::rectangle) {
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const double gw = (i > 0) ? grad.x_face(i - 1, j) : 0.0;
                const double ge = (i + 1 < g.nx()) ? grad.x_face(i, j) : 0.0;
                const double gs = (j > 0) ? grad.y_face(i, j - 1) : 0.0;
                const double gn = (j + 1 < g.ny()) ? grad.y_face(i, j) : 0.0;
                out.at(i, j) = std::hypot(0.5 * (gw + ge), 0.5 * (gs + gn));
            }
    } else {
        for (int i = 0; i < g.nx(); ++i) {
            const double gw = (i > 0) ? grad.fx[i - 1] : 0.0;
            const double ge = (i + 1 < g.nx()) ? grad.fx[i] : 0.0;
            out[i] = std::fabs(0.5 * (gw + ge));
        }
    }
    return out;
}

double w1q_norm(const Field& v, double q) {
    if (!(q >= 1) || std::isinf(q)) throw domain_error("w1q_norm: q must be finite and >= 1");
    const double a = lp_norm(v, q);
    const double b = lp_norm(gradient_magnitude(v), q);
    return std::pow(std::pow(a, q) + std::pow(b, q), 1.0 / q);
}

void PpPeErrorAccumulator::add(double t_pp, const Field& u_pp, const Field& v_pp,
                               double t_pe, const Field& u_pe, const Field& v_pe) {
    if (std::fabs(t_pp - t_pe) > 1e-9 * (1.0 + std::fabs(t_pe)))
        throw config_error("pp_pe_error: timestamp mismatch between trajectories");
    require_same_grid(u_pp, u_pe, "pp_pe_error");
    const double t = t_pe;

    const auto n = static_cast<std::size_t>(u_pp.size());
    sup_linf_u_ = std::max(sup_linf_u_, kernels::active().abs_max_diff(u_pp.data(), u_pe.data(), n));

    Field dv(v_pp.grid());
    for (int k = 0; k < dv.size(); ++k) dv[k] = v_pp[k] - v_pe[k];
    const double w12 = w1q_norm(dv, 2.0);
    const double val = w12 * w12;
    if (t >= t0_) {
        if (!std::isnan(prev_t_)) int_v_ += 0.5 * (t - prev_t_) * (prev_val_ + val);
        prev_t_ = t;
        prev_val_ = val;
    }
}

}  // namespace ks
