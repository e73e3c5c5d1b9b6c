#include "igstab/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace igstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One Runge-Kutta-Fehlberg 4(5) step for chi' = f(t, chi).  Returns the 5th
// order solution and the embedded error estimate, or nothing if any stage
// falls outside the rectangle where f is defined.
struct RkStep {
    double value, error;
};

template <class Rhs>
std::optional<RkStep> rkf45_step(const Rhs& rhs, double t, double x, double h) {
    const auto k1 = rhs(t, x);
    if (!k1) return std::nullopt;
    const auto k2 = rhs(t + h / 4.0, x + h * (*k1) / 4.0);
    if (!k2) return std::nullopt;
    const auto k3 = rhs(t + 3.0 * h / 8.0, x + h * (3.0 * (*k1) + 9.0 * (*k2)) / 32.0);
    if (!k3) return std::nullopt;
    const auto k4 = rhs(t + 12.0 * h / 13.0,
                        x + h * (1932.0 * (*k1) - 7200.0 * (*k2) + 7296.0 * (*k3)) / 2197.0);
    if (!k4) return std::nullopt;
    const auto k5 = rhs(t + h, x + h * (439.0 / 216.0 * (*k1) - 8.0 * (*k2) +
                                        3680.0 / 513.0 * (*k3) - 845.0 / 4104.0 * (*k4)));
    if (!k5) return std::nullopt;
    const auto k6 =
        rhs(t + h / 2.0, x + h * (-8.0 / 27.0 * (*k1) + 2.0 * (*k2) - 3544.0 / 2565.0 * (*k3) +
                                  1859.0 / 4104.0 * (*k4) - 11.0 / 40.0 * (*k5)));
    if (!k6) return std::nullopt;

    const double x5 = x + h * (16.0 / 135.0 * (*k1) + 6656.0 / 12825.0 * (*k3) +
                               28561.0 / 56430.0 * (*k4) - 9.0 / 50.0 * (*k5) + 2.0 / 55.0 * (*k6));
    const double x4 = x + h * (25.0 / 216.0 * (*k1) + 1408.0 / 2565.0 * (*k3) +
                               2197.0 / 4104.0 * (*k4) - 1.0 / 5.0 * (*k5));
    return RkStep{x5, std::abs(x5 - x4)};
}

// Adaptive integration from (t0, x0) to t1 (either direction).  Returns the
// end value or nothing when the trajectory leaves the rectangle and no step,
// however small, stays inside.
template <class Rhs>
std::optional<double> integrate_leg(const Rhs& rhs, double t0, double x0, double t1, double tol) {
    const double span = t1 - t0;
    if (span == 0.0) return x0;
    const double dir = span > 0 ? 1.0 : -1.0;
    const double h_min = std::max(std::abs(span) * 1e-14, 1e-300);
    double t = t0, x = x0;
    double h = span / 8.0;
    int steps = 0;
    while (dir * (t1 - t) > 0) {
        if (++steps > 200000) throw std::runtime_error("characteristic ODE: step budget exhausted");
        if (dir * (t + h - t1) > 0) h = t1 - t;
        const auto step = rkf45_step(rhs, t, x, h);
        if (!step) {
            h *= 0.5;
            if (std::abs(h) < h_min) return std::nullopt;  // stuck at the boundary
            continue;
        }
        const double scale = tol * (1.0 + std::abs(x));
        if (step->error <= scale) {
            t += h;
            x = step->value;
            const double grow = step->error > 0 ? 0.9 * std::pow(scale / step->error, 0.2) : 4.0;
            h *= std::clamp(grow, 0.2, 4.0);
        } else {
            h *= std::max(0.9 * std::pow(scale / step->error, 0.25), 0.1);
            if (std::abs(h) < h_min) return std::nullopt;
        }
    }
    return x;
}

}  // namespace

LagrangianFlow integrate_flow(const GraphFunction& g, double eta0,
                              std::span<const double> zeta_grid, const TimeSpan& span,
                              double tol) {
    const Rect& rect = g.spec().rect;
    if (span.n_t < 2) throw std::invalid_argument("flow needs at least 2 sample times");
    if (!(span.t_min < span.t_max)) throw std::invalid_argument("empty time span");
    if (!(tol > 0) || !std::isfinite(tol)) throw std::invalid_argument("ODE tolerance must be positive");
    if (span.t_min < rect.eta_min - 1e-12 || span.t_max > rect.eta_max + 1e-12)
        throw std::invalid_argument("time span leaves the grid's eta extent");
    if (eta0 < span.t_min || eta0 > span.t_max)
        throw std::invalid_argument("eta0 must lie inside the time span");
    if (zeta_grid.size() < 2) throw std::invalid_argument("flow needs at least 2 characteristics");
    for (std::size_t j = 1; j < zeta_grid.size(); ++j)
        if (!(zeta_grid[j] > zeta_grid[j - 1]))
            throw std::invalid_argument("zeta grid must be strictly increasing");
    for (double z : zeta_grid)
        if (!rect.contains(eta0, z))
            throw std::invalid_argument("initial point (eta0, zeta) outside the grid rectangle");

    LagrangianFlow flow;
    flow.eta0 = eta0;
    flow.zeta.assign(zeta_grid.begin(), zeta_grid.end());
    flow.ode_tolerance = tol;
    flow.t = linspace(span.t_min, span.t_max, span.n_t);
    {
        auto it = std::min_element(flow.t.begin(), flow.t.end(), [&](double p, double q) {
            return std::abs(p - eta0) < std::abs(q - eta0);
        });
        if (std::abs(*it - eta0) <= 1e-9 * (span.t_max - span.t_min)) {
            *it = eta0;
        } else {
            flow.t.insert(std::upper_bound(flow.t.begin(), flow.t.end(), eta0), eta0);
        }
        flow.i_eta0 = static_cast<int>(std::lower_bound(flow.t.begin(), flow.t.end(), eta0) -
                                       flow.t.begin());
    }

    const int nt = flow.n_t(), nz = flow.n_zeta();
    flow.chi = RowMatrix(nt, nz, kNaN);
    flow.dchi_dt = RowMatrix(nt, nz, kNaN);
    flow.d2chi_dt2 = RowMatrix(nt, nz, kNaN);
    flow.dchi_dzeta = RowMatrix(nt, nz, kNaN);
    flow.valid.assign(static_cast<std::size_t>(nz), {flow.i_eta0, flow.i_eta0});

    auto rhs = [&](double t, double x) -> std::optional<double> {
        if (!rect.contains(t, x)) return std::nullopt;
        return g.f_at(t, x);
    };

    for (int j = 0; j < nz; ++j) {
        auto& window = flow.valid[static_cast<std::size_t>(j)];
        flow.chi(flow.i_eta0, j) = flow.zeta[static_cast<std::size_t>(j)];  // exact normalisation
        for (int dir : {+1, -1}) {
            double x = flow.zeta[static_cast<std::size_t>(j)];
            for (int i = flow.i_eta0 + dir; i >= 0 && i < nt; i += dir) {
                const auto next = integrate_leg(rhs, flow.t[static_cast<std::size_t>(i - dir)], x,
                                                flow.t[static_cast<std::size_t>(i)], tol);
                if (!next || !rect.contains(flow.t[static_cast<std::size_t>(i)], *next)) break;
                x = *next;
                flow.chi(i, j) = x;
                (dir > 0 ? window.second : window.first) = i;
            }
        }
        for (int i = window.first; i <= window.second; ++i) {
            const double ti = flow.t[static_cast<std::size_t>(i)];
            const double xi = flow.chi(i, j);
            flow.dchi_dt(i, j) = g.f_at(ti, xi);
            flow.d2chi_dt2(i, j) = g.grad_at(ti, xi);
        }
    }

    // Monotonicity across characteristics.  The tolerance absorbs the
    // per-trajectory integration error; genuine crossings blow past it.
    double chi_scale = 0;
    for (double v : flow.chi.v)
        if (std::isfinite(v)) chi_scale = std::max(chi_scale, std::abs(v));
    const double crossing_tol = std::max(1e-9, 1e3 * tol * (1.0 + chi_scale));
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j + 1 < nz; ++j) {
            if (!flow.sample_valid(i, j) || !flow.sample_valid(i, j + 1)) continue;
            const double gap = flow.chi(i, j + 1) - flow.chi(i, j);
            if (gap < -crossing_tol) {
                std::ostringstream msg;
                msg << "characteristics crossed at t = " << flow.t[static_cast<std::size_t>(i)]
                    << " between zeta = " << flow.zeta[static_cast<std::size_t>(j)] << " and zeta = "
                    << flow.zeta[static_cast<std::size_t>(j + 1)] << " (gap " << gap << ")";
                throw CrossingError(flow.t[static_cast<std::size_t>(i)],
                                    flow.zeta[static_cast<std::size_t>(j)],
                                    flow.zeta[static_cast<std::size_t>(j + 1)], msg.str());
            }
        }

    // Difference quotients across zeta, central where both neighbours hold a
    // sample at this time, one-sided at the window edges.
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nz; ++j) {
            if (!flow.sample_valid(i, j)) continue;
            const bool lo = j - 1 >= 0 && flow.sample_valid(i, j - 1);
            const bool hi = j + 1 < nz && flow.sample_valid(i, j + 1);
            if (lo && hi)
                flow.dchi_dzeta(i, j) =
                    (flow.chi(i, j + 1) - flow.chi(i, j - 1)) /
                    (flow.zeta[static_cast<std::size_t>(j + 1)] - flow.zeta[static_cast<std::size_t>(j - 1)]);
            else if (hi)
                flow.dchi_dzeta(i, j) =
                    (flow.chi(i, j + 1) - flow.chi(i, j)) /
                    (flow.zeta[static_cast<std::size_t>(j + 1)] - flow.zeta[static_cast<std::size_t>(j)]);
            else if (lo)
                flow.dchi_dzeta(i, j) =
                    (flow.chi(i, j) - flow.chi(i, j - 1)) /
                    (flow.zeta[static_cast<std::size_t>(j)] - flow.zeta[static_cast<std::size_t>(j - 1)]);
        }

    return flow;
}

ConjugationResidual conjugation_residual(const LagrangianFlow& flow, const GraphFunction& g) {
    ConjugationResidual res;
    const int nt = flow.n_t(), nz = flow.n_zeta();
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < nt; ++i) {
            if (!flow.sample_valid(i, j)) continue;
            if (flow.sample_valid(i - 1, j) && flow.sample_valid(i + 1, j)) {
                const double d2 = central_derivative(
                    flow.t[static_cast<std::size_t>(i - 1)], flow.t[static_cast<std::size_t>(i)],
                    flow.t[static_cast<std::size_t>(i + 1)], flow.dchi_dt(i - 1, j),
                    flow.dchi_dt(i, j), flow.dchi_dt(i + 1, j));
                res.res1 = std::max(res.res1, std::abs(d2 - flow.d2chi_dt2(i, j)));
            }
            if (j - 1 >= 0 && j + 1 < nz && flow.sample_valid(i, j - 1) && flow.sample_valid(i, j + 1)) {
                const double dz = flow.zeta[static_cast<std::size_t>(j + 1)] -
                                  flow.zeta[static_cast<std::size_t>(j - 1)];
                const double dzdt = (flow.dchi_dt(i, j + 1) - flow.dchi_dt(i, j - 1)) / dz;
                const double dchain = g.d_tau_at(flow.t[static_cast<std::size_t>(i)], flow.chi(i, j)) *
                                      (flow.chi(i, j + 1) - flow.chi(i, j - 1)) / dz;
                res.res2 = std::max(res.res2, std::abs(dzdt - dchain));
            }
        }
    return res;
}

RulingProfile extract_ruling(const LagrangianFlow& flow, const GraphFunction& g) {
    const int nz = flow.n_zeta();
    if (nz < 3)
        throw std::invalid_argument("ruling difference quotients need at least 3 characteristics");
    RulingProfile p;
    p.zeta = flow.zeta;
    p.a.resize(static_cast<std::size_t>(nz));
    p.b.resize(static_cast<std::size_t>(nz));
    for (int j = 0; j < nz; ++j) {
        p.a[static_cast<std::size_t>(j)] = g.grad_at(flow.eta0, flow.zeta[static_cast<std::size_t>(j)]);
        p.b[static_cast<std::size_t>(j)] = g.f_at(flow.eta0, flow.zeta[static_cast<std::size_t>(j)]);
    }
    p.da.resize(static_cast<std::size_t>(nz));
    p.db.resize(static_cast<std::size_t>(nz));
    for (int j = 0; j < nz; ++j) {
        auto quot = [&](const std::vector<double>& ys) {
            if (j == 0)
                return one_sided_derivative(p.zeta[0], p.zeta[1], p.zeta[2], ys[0], ys[1], ys[2]);
            if (j == nz - 1)
                return one_sided_derivative(p.zeta[static_cast<std::size_t>(nz - 1)],
                                            p.zeta[static_cast<std::size_t>(nz - 2)],
                                            p.zeta[static_cast<std::size_t>(nz - 3)],
                                            ys[static_cast<std::size_t>(nz - 1)],
                                            ys[static_cast<std::size_t>(nz - 2)],
                                            ys[static_cast<std::size_t>(nz - 3)]);
            return central_derivative(p.zeta[static_cast<std::size_t>(j - 1)],
                                      p.zeta[static_cast<std::size_t>(j)],
                                      p.zeta[static_cast<std::size_t>(j + 1)],
                                      ys[static_cast<std::size_t>(j - 1)],
                                      ys[static_cast<std::size_t>(j)],
                                      ys[static_cast<std::size_t>(j + 1)]);
        };
        p.da[static_cast<std::size_t>(j)] = quot(p.a);
        p.db[static_cast<std::size_t>(j)] = quot(p.b);
    }
    return p;
}

VandermondeRuling vandermonde_extract(const LagrangianFlow& flow, double t1, double t2, double t3) {
    const double span = flow.t.back() - flow.t.front();
    const double req[3] = {t1, t2, t3};
    int idx[3];
    double ts[3];
    for (int k = 0; k < 3; ++k) {
        if (req[k] < flow.t.front() - 1e-12 * span || req[k] > flow.t.back() + 1e-12 * span)
            throw std::invalid_argument("sample time outside the flow span");
        const auto it = std::min_element(flow.t.begin(), flow.t.end(), [&](double p, double q) {
            return std::abs(p - req[k]) < std::abs(q - req[k]);
        });
        idx[k] = static_cast<int>(it - flow.t.begin());
        ts[k] = *it;
    }
    for (int k = 0; k < 3; ++k)
        for (int l = k + 1; l < 3; ++l)
            if (std::abs(ts[k] - ts[l]) < 1e-6 * span)
                throw std::invalid_argument(
                    "sample times nearly coincide; the 3x3 system is ill-conditioned");

    VandermondeRuling out;
    out.profile.zeta = flow.zeta;
    const int nz = flow.n_zeta();
    out.profile.a.assign(static_cast<std::size_t>(nz), kNaN);
    out.profile.b.assign(static_cast<std::size_t>(nz), kNaN);
    out.c.assign(static_cast<std::size_t>(nz), kNaN);

    // Explicit inverse of [[t^2/2, t, 1]] at the three sample times; the
    // denominators are the pairwise difference products.
    const double d1 = (ts[0] - ts[1]) * (ts[0] - ts[2]);
    const double d2 = (ts[1] - ts[0]) * (ts[1] - ts[2]);
    const double d3 = (ts[2] - ts[0]) * (ts[2] - ts[1]);
    for (int j = 0; j < nz; ++j) {
        if (!flow.sample_valid(idx[0], j) || !flow.sample_valid(idx[1], j) ||
            !flow.sample_valid(idx[2], j))
            continue;
        const double x1 = flow.chi(idx[0], j), x2 = flow.chi(idx[1], j), x3 = flow.chi(idx[2], j);
        out.profile.a[static_cast<std::size_t>(j)] = 2.0 * (x1 / d1 + x2 / d2 + x3 / d3);
        out.profile.b[static_cast<std::size_t>(j)] =
            -(ts[1] + ts[2]) * x1 / d1 - (ts[0] + ts[2]) * x2 / d2 - (ts[0] + ts[1]) * x3 / d3;
        out.c[static_cast<std::size_t>(j)] =
            ts[1] * ts[2] * x1 / d1 + ts[0] * ts[2] * x2 / d2 + ts[0] * ts[1] * x3 / d3;
    }

    // Difference quotients where defined (skip characteristics without data).
    const int nzv = nz;
    out.profile.da.assign(static_cast<std::size_t>(nzv), kNaN);
    out.profile.db.assign(static_cast<std::size_t>(nzv), kNaN);
    auto has = [&](int j) {
        return j >= 0 && j < nz && std::isfinite(out.profile.a[static_cast<std::size_t>(j)]);
    };
    for (int j = 0; j < nz; ++j) {
        if (!has(j)) continue;
        if (has(j - 1) && has(j + 1)) {
            out.profile.da[static_cast<std::size_t>(j)] = central_derivative(
                flow.zeta[static_cast<std::size_t>(j - 1)], flow.zeta[static_cast<std::size_t>(j)],
                flow.zeta[static_cast<std::size_t>(j + 1)], out.profile.a[static_cast<std::size_t>(j - 1)],
                out.profile.a[static_cast<std::size_t>(j)], out.profile.a[static_cast<std::size_t>(j + 1)]);
            out.profile.db[static_cast<std::size_t>(j)] = central_derivative(
                flow.zeta[static_cast<std::size_t>(j - 1)], flow.zeta[static_cast<std::size_t>(j)],
                flow.zeta[static_cast<std::size_t>(j + 1)], out.profile.b[static_cast<std::size_t>(j - 1)],
                out.profile.b[static_cast<std::size_t>(j)], out.profile.b[static_cast<std::size_t>(j + 1)]);
        } else if (has(j + 1) && has(j + 2)) {
            out.profile.da[static_cast<std::size_t>(j)] = one_sided_derivative(
                flow.zeta[static_cast<std::size_t>(j)], flow.zeta[static_cast<std::size_t>(j + 1)],
                flow.zeta[static_cast<std::size_t>(j + 2)], out.profile.a[static_cast<std::size_t>(j)],
                out.profile.a[static_cast<std::size_t>(j + 1)], out.profile.a[static_cast<std::size_t>(j + 2)]);
            out.profile.db[static_cast<std::size_t>(j)] = one_sided_derivative(
                flow.zeta[static_cast<std::size_t>(j)], flow.zeta[static_cast<std::size_t>(j + 1)],
                flow.zeta[static_cast<std::size_t>(j + 2)], out.profile.b[static_cast<std::size_t>(j)],
                out.profile.b[static_cast<std::size_t>(j + 1)], out.profile.b[static_cast<std::size_t>(j + 2)]);
        } else if (has(j - 1) && has(j - 2)) {
            out.profile.da[static_cast<std::size_t>(j)] = one_sided_derivative(
                flow.zeta[static_cast<std::size_t>(j)], flow.zeta[static_cast<std::size_t>(j - 1)],
                flow.zeta[static_cast<std::size_t>(j - 2)], out.profile.a[static_cast<std::size_t>(j)],
                out.profile.a[static_cast<std::size_t>(j - 1)], out.profile.a[static_cast<std::size_t>(j - 2)]);
            out.profile.db[static_cast<std::size_t>(j)] = one_sided_derivative(
                flow.zeta[static_cast<std::size_t>(j)], flow.zeta[static_cast<std::size_t>(j - 1)],
                flow.zeta[static_cast<std::size_t>(j - 2)], out.profile.b[static_cast<std::size_t>(j)],
                out.profile.b[static_cast<std::size_t>(j - 1)], out.profile.b[static_cast<std::size_t>(j - 2)]);
        }
    }
    return out;
}

double ruling_residual(const LagrangianFlow& flow, const RulingProfile& profile) {
    if (profile.zeta.size() != flow.zeta.size())
        throw std::invalid_argument("profile and flow zeta grids differ");
    double res = 0;
    for (int j = 0; j < flow.n_zeta(); ++j) {
        const double a = profile.a[static_cast<std::size_t>(j)];
        const double b = profile.b[static_cast<std::size_t>(j)];
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        for (int i = 0; i < flow.n_t(); ++i) {
            if (!flow.sample_valid(i, j)) continue;
            const double s = flow.t[static_cast<std::size_t>(i)] - flow.eta0;
            const double model = a * s * s / 2.0 + b * s + flow.zeta[static_cast<std::size_t>(j)];
            res = std::max(res, std::abs(flow.chi(i, j) - model));
        }
    }
    return res;
}

std::pair<double, double> lagrangian_inverse(const GraphFunction& g, double eta, double tau,
                                             double eta0) {
    const double s = eta - eta0;
    const double zeta = tau + g.grad_at(eta, tau) * s * s / 2.0 - g.f_at(eta, tau) * s;
    return {eta, zeta};
}

double horizontal_lift_straightness(const LagrangianFlow& flow, const GraphFunction& g) {
    double worst = 0;
    for (int j = 0; j < flow.n_zeta(); ++j) {
        const auto [lo, hi] = flow.valid[static_cast<std::size_t>(j)];
        if (hi - lo < 2) continue;
        const Vec3 p0 = graph_embed(g, flow.t[static_cast<std::size_t>(lo)], flow.chi(lo, j));
        const Vec3 p1 = graph_embed(g, flow.t[static_cast<std::size_t>(hi)], flow.chi(hi, j));
        const double dx = p1.x - p0.x, dy = p1.y - p0.y, dz = p1.z - p0.z;
        const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (len == 0) continue;
        for (int i = lo + 1; i < hi; ++i) {
            const Vec3 q = graph_embed(g, flow.t[static_cast<std::size_t>(i)], flow.chi(i, j));
            const double vx = q.x - p0.x, vy = q.y - p0.y, vz = q.z - p0.z;
            // |v x d| / |d|
            const double cx = vy * dz - vz * dy;
            const double cy = vz * dx - vx * dz;
            const double cz = vx * dy - vy * dx;
            worst = std::max(worst, std::sqrt(cx * cx + cy * cy + cz * cz) / len);
        }
    }
    return worst;
}

double stationarity_lagrangian_residual(const LagrangianFlow& flow,
                                        std::span<const TestFunction> thetas) {
    if (thetas.empty()) throw std::invalid_argument("empty dictionary");
    const Rect window{flow.t.front(), flow.t.back(), flow.zeta.front(), flow.zeta.back()};
    for (const auto& th : thetas)
        if (!window.contains_strictly(th.support()))
            throw std::invalid_argument("theta support must lie strictly inside the sampling window");

    double worst = 0;
    std::vector<double> contribs;
    for (const auto& th : thetas) {
        contribs.clear();
        for (int i = 0; i + 1 < flow.n_t(); ++i)
            for (int j = 0; j + 1 < flow.n_zeta(); ++j) {
                if (!flow.sample_valid(i, j) || !flow.sample_valid(i + 1, j) ||
                    !flow.sample_valid(i, j + 1) || !flow.sample_valid(i + 1, j + 1))
                    continue;
                const double tm = 0.5 * (flow.t[static_cast<std::size_t>(i)] +
                                         flow.t[static_cast<std::size_t>(i + 1)]);
                const double zm = 0.5 * (flow.zeta[static_cast<std::size_t>(j)] +
                                         flow.zeta[static_cast<std::size_t>(j + 1)]);
                const double area = (flow.t[static_cast<std::size_t>(i + 1)] -
                                     flow.t[static_cast<std::size_t>(i)]) *
                                    (flow.zeta[static_cast<std::size_t>(j + 1)] -
                                     flow.zeta[static_cast<std::size_t>(j)]);
                const double d2 = 0.25 * (flow.d2chi_dt2(i, j) + flow.d2chi_dt2(i + 1, j) +
                                          flow.d2chi_dt2(i, j + 1) + flow.d2chi_dt2(i + 1, j + 1));
                const double w = d2 / std::sqrt(1.0 + d2 * d2);
                contribs.push_back(area * w * th.d_eta(tm, zm));  // d_eta = d_t in (t, zeta)
            }
        worst = std::max(worst, std::abs(pairwise_sum(contribs)));
    }
    return worst;
}

void write_flow_csv(const LagrangianFlow& flow, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "t,zeta,chi,dchi_dt,d2chi_dt2\n";
    for (int i = 0; i < flow.n_t(); ++i)
        for (int j = 0; j < flow.n_zeta(); ++j) {
            if (!flow.sample_valid(i, j)) continue;
            out << format_sig(flow.t[static_cast<std::size_t>(i)]) << ','
                << format_sig(flow.zeta[static_cast<std::size_t>(j)]) << ','
                << format_sig(flow.chi(i, j)) << ',' << format_sig(flow.dchi_dt(i, j)) << ','
                << format_sig(flow.d2chi_dt2(i, j)) << '\n';
        }
    if (!out) throw std::runtime_error("write failure on " + path);
}

void write_ruling_csv(const RulingProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "zeta,a,b,da,db\n";
    for (std::size_t j = 0; j < profile.zeta.size(); ++j)
        out << format_sig(profile.zeta[j]) << ',' << format_sig(profile.a[j]) << ','
            << format_sig(profile.b[j]) << ',' << format_sig(profile.da[j]) << ','
            << format_sig(profile.db[j]) << '\n';
    if (!out) throw std::runtime_error("write failure on " + path);
}

}  // namespace igstab
