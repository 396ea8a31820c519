#include "ks/theory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ks/functionals.hpp"

namespace ks::theory {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// num / den with the positive-part convention: a vanishing (or negative)
// positive part in the denominator sends the quotient to +infinity.
double div_pos(double num, double den) { return den > 0 ? num / den : kInf; }

double pick(const Interval& iv, Selector sel, const char* stage) {
    if (iv.empty())
        throw std::logic_error(std::string("param_witness: empty interval for ") + stage +
                               " (contradicts the admissibility lemma)");
    const double hi = std::min(iv.hi, kEndpointCap);
    const double frac = sel == Selector::midpoint ? 0.5 : 0.25;
    return iv.lo + frac * (hi - iv.lo);
}

}  // namespace

StagedIntervals intervals(int n, double p, double q) {
    if (n < 3) throw domain_error("intervals: n must be an integer >= 3");
    if (!(p > 0.5 * n)) throw domain_error("intervals: p must exceed n/2");
    if (!(q > n)) throw domain_error("intervals: q must exceed n");
    StagedIntervals s;
    s.n = n;
    s.p = p;
    s.q = q;
    const double nd = n;
    s.I1.lo = p;
    s.I1.hi = std::min(div_pos(nd * p * q, nd * p + nd * q - p * q),
                       div_pos(nd * p, 2.0 * (nd - p)));
    return s;
}

Interval StagedIntervals::I2(double theta) const {
    const double nd = n;
    Interval iv;
    iv.lo = std::max(1.0, div_pos(nd * p * theta, p * theta + nd * p - nd * theta));
    iv.hi = std::min(q, div_pos(nd * p, nd - p));
    return iv;
}

Interval StagedIntervals::I3(double theta, double q0) const {
    const double nd = n;
    Interval iv;
    iv.lo = std::max({1.0, nd * theta / (nd + theta),
                      div_pos(nd * p * theta, p * theta + 2.0 * nd * p - nd * theta)});
    iv.hi = std::min(q0, q0 * theta / (q0 + theta));
    return iv;
}

double interpolation_exponent(double theta, double q0, double mu) {
    const double a = ((q0 - mu) * theta - q0 * mu) / (q0 * mu * (theta - 1.0));
    if (!(a > 0.0) || !(a < 1.0))
        throw domain_error("interpolation_exponent: a outside (0,1); inputs not from a valid chain");
    return a;
}

ParamWitness param_witness(int n, double p, double q, Selector selector) {
    const StagedIntervals s = intervals(n, p, q);
    ParamWitness w;
    w.n = n;
    w.p = p;
    w.q = q;
    w.I1 = s.I1;
    w.theta = pick(s.I1, selector, "theta");
    w.I2 = s.I2(w.theta);
    w.q0 = pick(w.I2, selector, "q0");
    w.I3 = s.I3(w.theta, w.q0);
    w.mu = pick(w.I3, selector, "mu");
    w.a = interpolation_exponent(w.theta, w.q0, w.mu);

    for (const double m : derived_inequality_margins(w))
        if (!(m > 0))
            throw std::logic_error("param_witness: a derived inequality failed "
                                   "(contradicts the admissibility lemma)");
    return w;
}

std::array<double, 7> derived_inequality_margins(const ParamWitness& w) {
    const double nd = w.n;
    const double r = w.q0 * w.mu / (w.q0 - w.mu);
    return {
        w.theta - w.p,
        w.q - w.q0,
        w.q0 - w.mu,
        std::min(r - 1.0, w.theta - r),
        1.0 - (0.5 + 0.5 * nd * (1.0 / w.p - 1.0 / w.q0)),
        1.0 - (0.5 + 0.5 * nd * (1.0 / w.mu - 1.0 / w.theta)),
        0.5 - 0.5 * nd * (1.0 / w.mu - 1.0 / w.theta) - 0.5 * nd * (1.0 / w.p - 1.0 / w.theta),
    };
}

double bessel_j1(double x) {
    // Power series; fine for the bisection window x in (0, 10).
    const double h = 0.5 * x;
    double term = h;
    double sum = h;
    for (int k = 1; k < 60; ++k) {
        term *= -(h * h) / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

double neumann_alpha(const Grid& grid) {
    if (grid.geometry() == Geometry::rectangle) {
        const double L = std::max(grid.Lx(), grid.Ly());
        return std::numbers::pi * std::numbers::pi / (L * L);
    }
    // First positive root of J1 on (3,4), bisection to 1e-12.
    double lo = 3.0, hi = 4.0;
    double flo = bessel_j1(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = bessel_j1(mid);
        if ((flo > 0) == (fmid > 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    const double j = 0.5 * (lo + hi);
    const double R = grid.radius();
    return (j / R) * (j / R);
}

namespace {

struct CurveFit {
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double prefactor = 0;
    bool degenerate = false;
};

// Least-squares slope of log y vs t on the tail, plus the envelope constant.
CurveFit fit_curve(const std::vector<double>& ts, const std::vector<double>& ys,
                   double alpha, double power, double rhs_norm) {
    CurveFit fit;
    double ymax = 0;
    for (const double y : ys) ymax = std::max(ymax, y);
    if (ymax <= 1e-13 * std::max(rhs_norm, 1e-300) || rhs_norm == 0) {
        fit.degenerate = true;
        return fit;
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double env = (1.0 + std::pow(ts[i], -power)) * std::exp(-alpha * ts[i]) * rhs_norm;
        fit.prefactor = std::max(fit.prefactor, ys[i] / env);
    }
    const double t_tail = 0.5 * ts.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] < t_tail || ys[i] <= 0) continue;
        const double x = ts[i], y = std::log(ys[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        const double denom = m * sxx - sx * sx;
        if (denom != 0) fit.exponent = -(m * sxy - sx * sy) / denom;
    }
    return fit;
}

}  // namespace

std::vector<EstimateReport> semigroup_empirical_check(
    const GridPtr& grid, const SemigroupCheckConfig& cfg,
    const std::vector<std::pair<double, double>>& pq_pairs,
    const std::vector<Field>& zero_mean_fields, const std::vector<Field>& general_fields) {
    const double alpha = neumann_alpha(*grid);
    for (const auto& [pp, qq] : pq_pairs)
        if (!(qq >= 1) || !(pp >= qq))
            throw config_error("semigroup check: pairs must satisfy 1 <= q <= p");
    for (const Field& phi : zero_mean_fields) {
        const double m = integrate(phi);
        if (std::fabs(m) > 1e-10 * (lp_norm(phi, 1.0) + 1e-300))
            throw config_error("semigroup check: estimate (i) requires zero-mean fields");
    }

    std::vector<double> ts(cfg.n_times);
    const double lo = cfg.t_lo / alpha, hi = cfg.t_hi / alpha;
    for (int i = 0; i < cfg.n_times; ++i)
        ts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (cfg.n_times - 1));

    std::vector<EstimateReport> out;
    auto push = [&](int est, double p, double q, const CurveFit& fit) {
        EstimateReport r;
        r.estimate = est;
        r.p = p;
        r.q = q;
        r.measured_exponent = fit.exponent;
        r.fitted_prefactor = fit.prefactor;
        r.degenerate = fit.degenerate;
        r.pass = fit.degenerate ||
                 (std::isfinite(fit.exponent) &&
                  fit.exponent >= alpha * (1.0 - cfg.exponent_slack) &&
                  std::isfinite(fit.prefactor));
        out.push_back(r);
    };

    const double nd = 2.0;  // grids here discretize 2-D domains
    auto run_curves = [&](const Field& f0, auto&& measure) {
        std::vector<double> ys;
        const auto snaps = semigroup_cache(f0, ts, cfg.dt, cfg.linear_tol);
        ys.reserve(snaps.size());
        for (const auto& s : snaps) ys.push_back(measure(s));
        return ys;
    };

    for (const auto& [p, q] : pq_pairs) {
        const double smoothing = 0.5 * nd * (1.0 / q - 1.0 / p);
        // (i) ||e^{tL} phi||_p <= k1 (1 + t^-smoothing) e^{-alpha t} ||phi||_q, mean-zero phi
        for (const Field& phi : zero_mean_fields) {
            const auto ys = run_curves(phi, [&](const Field& s) { return lp_norm(s, p); });
            push(1, p, q, fit_curve(ts, ys, alpha, smoothing, lp_norm(phi, q)));
        }
        // (ii) ||grad e^{tL} phi||_p <= k2 (1 + t^{-1/2-smoothing}) e^{-alpha t} ||phi||_q
        for (const Field& phi : general_fields) {
            const auto ys = run_curves(
                phi, [&](const Field& s) { return lp_norm(gradient_magnitude(s), p); });
            push(2, p, q, fit_curve(ts, ys, alpha, 0.5 + smoothing, lp_norm(phi, q)));
        }
        // (iii) ||grad e^{tL} phi||_p <= k3 (1 + t^-smoothing) e^{-alpha t} ||grad phi||_q, q >= 2
        if (q >= 2) {
            for (const Field& phi : general_fields) {
                const auto ys = run_curves(
                    phi, [&](const Field& s) { return lp_norm(gradient_magnitude(s), p); });
                push(3, p, q, fit_curve(ts, ys, alpha, smoothing,
                                        lp_norm(gradient_magnitude(phi), q)));
            }
        }
        // (iv) ||e^{tL} div Phi||_p <= k4 (1 + t^{-1/2-smoothing}) e^{-alpha t} ||Phi||_q,
        //      q > 1; Phi = grad psi for test fields psi.
        if (q > 1) {
            for (const Field& psi : general_fields) {
                const Field div_phi = divergence(gradient_faces(psi));
                const auto ys = run_curves(div_phi, [&](const Field& s) { return lp_norm(s, p); });
                push(4, p, q, fit_curve(ts, ys, alpha, 0.5 + smoothing,
                                        lp_norm(gradient_magnitude(psi), q)));
            }
        }
    }
    return out;
}

}  // namespace ks::theory
