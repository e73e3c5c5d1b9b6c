#include "igstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "igstab/eigsolve.hpp"

namespace igstab {

namespace {

constexpr double kPairEqualTol = 1e-10;
constexpr double kPairSlack = 1e-9;
constexpr double kPointEqualTol = 1e-8;
constexpr double kPointSlack = 1e-8;
constexpr double kStableThreshold = -1e-10;

// 3 point Gauss rule on [-1, 1].
constexpr double kGaussX[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

void validate_profile(const RulingProfile& p) {
    const std::size_t n = p.zeta.size();
    if (n < 2 || p.a.size() != n || p.b.size() != n || p.da.size() != n || p.db.size() != n)
        throw std::invalid_argument("ruling profile arrays must share a length of at least 2");
    for (std::size_t k = 1; k < n; ++k)
        if (!(p.zeta[k] > p.zeta[k - 1]))
            throw std::invalid_argument("ruling profile zeta nodes must increase strictly");
}

// Linear interpolation in zeta, clamped to the profile range.
struct ProfileInterp {
    const RulingProfile& p;

    double interp(const std::vector<double>& v, double z) const {
        const auto& zs = p.zeta;
        if (z <= zs.front()) return v.front();
        if (z >= zs.back()) return v.back();
        const auto it = std::upper_bound(zs.begin(), zs.end(), z);
        const std::size_t k = static_cast<std::size_t>(it - zs.begin());
        const double w = (z - zs[k - 1]) / (zs[k] - zs[k - 1]);
        return (1.0 - w) * v[k - 1] + w * v[k];
    }

    double a(double z) const { return interp(p.a, z); }
    double da(double z) const { return interp(p.da, z); }
    double db(double z) const { return interp(p.db, z); }
};

// Minimum of h(t) = da t^2/2 + db t + c0 over [t0, t1].
double quad_min(double da, double db, double c0, double t0, double t1) {
    const auto h = [&](double t) { return 0.5 * da * t * t + db * t + c0; };
    double m = std::min(h(t0), h(t1));
    if (da > 0.0) {
        const double tv = -db / da;
        if (tv > t0 && tv < t1) m = std::min(m, h(tv));
    }
    return m;
}

void validate_window(const FormWindow& w) {
    if (!(w.t_min < w.t_max) || !(w.zeta_min < w.zeta_max) || !std::isfinite(w.t_min) ||
        !std::isfinite(w.t_max) || !std::isfinite(w.zeta_min) || !std::isfinite(w.zeta_max))
        throw std::invalid_argument("form window must have finite increasing bounds");
    if (w.n_t < 4 || w.n_zeta < 4)
        throw std::invalid_argument("form window needs at least 4 nodes per axis");
}

// Scans the Jacobian over the window.  The interpolated coefficient pair
// moves linearly between profile nodes, so min_t h is concave in zeta on each
// segment and its minimum over the window sits either at an interior profile
// node or at the interpolated window edge.  Returns the offending zeta and
// minimum when positivity fails.
bool jacobian_positive_on_window(const RulingProfile& profile, const FormWindow& w, double* bad_zeta,
                                 double* bad_min) {
    const ProfileInterp pi{profile};
    std::vector<double> zs = {w.zeta_min, w.zeta_max};
    for (double z : profile.zeta)
        if (z > w.zeta_min && z < w.zeta_max) zs.push_back(z);
    for (double z : zs) {
        const double m = quad_min(pi.da(z), pi.db(z), 1.0, w.t_min, w.t_max);
        if (!(m > 0.0)) {
            if (bad_zeta) *bad_zeta = z;
            if (bad_min) *bad_min = m;
            return false;
        }
    }
    return true;
}

}  // namespace

DiscriminantPairReport discriminant_pairs(const RulingProfile& profile) {
    validate_profile(profile);
    const int nz = static_cast<int>(profile.zeta.size());

    std::vector<int> idx;
    DiscriminantPairReport out;
    if (nz > 1500) {
        const int stride = (nz + 1499) / 1500;
        for (int k = 0; k < nz; k += stride) idx.push_back(k);
        if (idx.back() != nz - 1) idx.push_back(nz - 1);
        out.subsampled = true;
    } else {
        idx.resize(static_cast<std::size_t>(nz));
        for (int k = 0; k < nz; ++k) idx[static_cast<std::size_t>(k)] = k;
    }

    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < idx.size(); ++u) {
        for (std::size_t v = u + 1; v < idx.size(); ++v) {
            const int i = idx[u];
            const int j = idx[v];
            const double daij = profile.a[static_cast<std::size_t>(j)] - profile.a[static_cast<std::size_t>(i)];
            const double dbij = profile.b[static_cast<std::size_t>(j)] - profile.b[static_cast<std::size_t>(i)];
            if (!std::isfinite(daij) || !std::isfinite(dbij)) continue;
            if (std::abs(daij) + std::abs(dbij) < kPairEqualTol) continue;
            const double dz = profile.zeta[static_cast<std::size_t>(j)] - profile.zeta[static_cast<std::size_t>(i)];
            const double margin = 2.0 * daij * dz - dbij * dbij;
            if (margin < worst) {
                worst = margin;
                out.i = i;
                out.j = j;
            }
            if (!(margin > -kPairSlack)) out.pass = false;
        }
    }
    out.margin = std::isfinite(worst) ? worst : 0.0;
    return out;
}

PointwiseDiscriminantReport pointwise_discriminant(const RulingProfile& profile) {
    validate_profile(profile);
    PointwiseDiscriminantReport out;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < profile.zeta.size(); ++k) {
        const double da = profile.da[k];
        const double db = profile.db[k];
        if (!std::isfinite(da) || !std::isfinite(db)) continue;
        if (std::abs(da) + std::abs(db) < kPointEqualTol) continue;
        const double margin = 2.0 * da - db * db;
        if (margin < worst) {
            worst = margin;
            out.worst_index = static_cast<int>(k);
        }
        if (!(margin > -kPointSlack)) out.pass = false;
    }
    out.margin = std::isfinite(worst) ? worst : 0.0;
    return out;
}

JacobianWindow jacobian_positivity(double da, double db) {
    JacobianWindow out;
    const double inf = std::numeric_limits<double>::infinity();
    if (da == 0.0) {
        if (db == 0.0) {
            out.positive_on_reals = true;
            out.t_lo = -inf;
            out.t_hi = inf;
        } else if (db > 0.0) {
            out.t_lo = -1.0 / db;
            out.t_hi = inf;
        } else {
            out.t_lo = -inf;
            out.t_hi = -1.0 / db;
        }
        return out;
    }
    const double disc = db * db - 2.0 * da;
    if (da > 0.0 && disc < 0.0) {
        out.positive_on_reals = true;
        out.t_lo = -inf;
        out.t_hi = inf;
        return out;
    }
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double r1 = (-db - sq) / da;
    const double r2 = (-db + sq) / da;
    const double lo = std::min(r1, r2);
    const double hi = std::max(r1, r2);
    if (da > 0.0) {
        // Parabola opens up and h(0) = 1, so both roots sit on one side of 0.
        if (lo > 0.0) {
            out.t_lo = -inf;
            out.t_hi = lo;
        } else {
            out.t_lo = hi;
            out.t_hi = inf;
        }
    } else {
        // Opens down: the roots straddle 0.
        out.t_lo = lo;
        out.t_hi = hi;
    }
    return out;
}

DiscreteForm assemble_form(const RulingProfile& profile, const FormWindow& window) {
    validate_profile(profile);
    validate_window(window);

    double bad_z = 0.0, bad_m = 0.0;
    if (!jacobian_positive_on_window(profile, window, &bad_z, &bad_m)) {
        std::ostringstream msg;
        msg << "window Jacobian h(t) = a' t^2/2 + b' t + 1 reaches " << bad_m << " at zeta = " << bad_z
            << "; the flow folds inside the requested window";
        throw std::domain_error(msg.str());
    }

    DiscreteForm form;
    form.t = linspace(window.t_min, window.t_max, window.n_t);
    form.zeta = linspace(window.zeta_min, window.zeta_max, window.n_zeta);
    const int nt = window.n_t;
    const int nz = window.n_zeta;
    const int iz_count = nz - 2;
    form.n_interior = (nt - 2) * iz_count;

    const auto dof = [&](int i, int j) -> int {
        if (i < 1 || i > nt - 2 || j < 1 || j > nz - 2) return -1;
        return (i - 1) * iz_count + (j - 1);
    };

    const ProfileInterp pi{profile};

    std::vector<Eigen::Triplet<double>> ts, tp, tm;
    ts.reserve(static_cast<std::size_t>(form.n_interior) * 9);
    tp.reserve(static_cast<std::size_t>(form.n_interior) * 9);
    tm.reserve(static_cast<std::size_t>(form.n_interior) * 9);

    for (int it = 0; it + 1 < nt; ++it) {
        const double ta = form.t[static_cast<std::size_t>(it)];
        const double tb = form.t[static_cast<std::size_t>(it) + 1];
        const double dt = tb - ta;
        for (int iz = 0; iz + 1 < nz; ++iz) {
            const double za = form.zeta[static_cast<std::size_t>(iz)];
            const double zb = form.zeta[static_cast<std::size_t>(iz) + 1];
            const double dz = zb - za;

            double locS[4][4] = {};
            double locP[4][4] = {};
            double locM[4][4] = {};

            for (int gu = 0; gu < 3; ++gu) {
                const double u = 0.5 * (1.0 + kGaussX[gu]);
                const double t = ta + u * dt;
                for (int gv = 0; gv < 3; ++gv) {
                    const double v = 0.5 * (1.0 + kGaussX[gv]);
                    const double z = za + v * dz;
                    const double wgt = kGaussW[gu] * kGaussW[gv] * 0.25 * dt * dz;

                    const double a = pi.a(z);
                    const double dap = pi.da(z);
                    const double dbp = pi.db(z);
                    if (!std::isfinite(a) || !std::isfinite(dap) || !std::isfinite(dbp))
                        throw std::invalid_argument("ruling profile carries non-finite data inside the window");
                    const double h = 0.5 * dap * t * t + dbp * t + 1.0;
                    const double w = std::pow(1.0 + a * a, -1.5);
                    const double pot = (2.0 * dap - dbp * dbp) * w / h;

                    const double N[4] = {(1.0 - u) * (1.0 - v), (1.0 - u) * v, u * (1.0 - v), u * v};
                    const double dN[4] = {-(1.0 - v) / dt, -v / dt, (1.0 - v) / dt, v / dt};

                    for (int r = 0; r < 4; ++r) {
                        for (int c = 0; c < 4; ++c) {
                            locS[r][c] += wgt * dN[r] * dN[c] * h * w;
                            locP[r][c] += wgt * N[r] * N[c] * pot;
                            locM[r][c] += wgt * N[r] * N[c];
                        }
                    }
                }
            }

            const int nodes[4][2] = {{it, iz}, {it, iz + 1}, {it + 1, iz}, {it + 1, iz + 1}};
            for (int r = 0; r < 4; ++r) {
                const int dr = dof(nodes[r][0], nodes[r][1]);
                if (dr < 0) continue;
                for (int c = 0; c < 4; ++c) {
                    const int dc = dof(nodes[c][0], nodes[c][1]);
                    if (dc < 0) continue;
                    ts.emplace_back(dr, dc, locS[r][c]);
                    tp.emplace_back(dr, dc, locP[r][c]);
                    tm.emplace_back(dr, dc, locM[r][c]);
                }
            }
        }
    }

    form.S.resize(form.n_interior, form.n_interior);
    form.P.resize(form.n_interior, form.n_interior);
    form.M.resize(form.n_interior, form.n_interior);
    form.S.setFromTriplets(ts.begin(), ts.end());
    form.P.setFromTriplets(tp.begin(), tp.end());
    form.M.setFromTriplets(tm.begin(), tm.end());
    form.Q = form.S - form.P;
    return form;
}

StabilityReport min_eigenvalue(const DiscreteForm& form, const FormWindow& window) {
    if (form.n_interior <= 0) throw std::invalid_argument("discrete form has no interior degrees of freedom");
    StabilityReport out;
    out.window = window;

    const EigenPair pair = smallest_eigenpair(form.Q, form.M);
    out.lambda_min = pair.lambda;
    out.eig_residual = pair.residual;
    out.factorizations = pair.factorizations;
    out.verdict = pair.lambda >= kStableThreshold ? "stable-on-window" : "unstable";

    const int nt = window.n_t;
    const int nz = window.n_zeta;
    out.witness.rows = nt;
    out.witness.cols = nz;
    out.witness.v.assign(static_cast<std::size_t>(nt) * static_cast<std::size_t>(nz), 0.0);
    for (int i = 1; i <= nt - 2; ++i)
        for (int j = 1; j <= nz - 2; ++j)
            out.witness(i, j) = pair.x[(i - 1) * (nz - 2) + (j - 1)];
    return out;
}

StabilityReport stability_verdict(const RulingProfile& profile, const FormWindow& window) {
    validate_profile(profile);
    validate_window(window);

    const DiscriminantPairReport pairs = discriminant_pairs(profile);
    const PointwiseDiscriminantReport pointwise = pointwise_discriminant(profile);

    double bad_z = 0.0, bad_m = 0.0;
    if (!jacobian_positive_on_window(profile, window, &bad_z, &bad_m)) {
        StabilityReport out;
        out.window = window;
        out.lambda_min = std::numeric_limits<double>::quiet_NaN();
        out.verdict = "degenerate";
        out.pairs_ok = pairs.pass;
        out.pointwise_ok = pointwise.pass;
        std::ostringstream msg;
        msg << "Jacobian h reaches " << bad_m << " at zeta = " << bad_z << " inside the window";
        out.note = msg.str();
        return out;
    }

    const DiscreteForm form = assemble_form(profile, window);
    StabilityReport out = min_eigenvalue(form, window);
    out.pairs_ok = pairs.pass;
    out.pointwise_ok = pointwise.pass;
    return out;
}

HardyResult general_hardy(double hA, double hB, double hC, double t_lo, double t_hi, int n) {
    if (!(t_lo < t_hi) || !std::isfinite(t_lo) || !std::isfinite(t_hi))
        throw std::invalid_argument("hardy window must have finite increasing bounds");
    if (n < 2) throw std::invalid_argument("hardy discretization needs at least 2 elements");
    if (!std::isfinite(hA) || !std::isfinite(hB) || !std::isfinite(hC))
        throw std::invalid_argument("hardy weight coefficients must be finite");
    if (!(quad_min(hA, hB, hC, t_lo, t_hi) > 0.0)) {
        std::ostringstream msg;
        msg << "weight h(t) = " << hA << " t^2/2 + " << hB << " t + " << hC
            << " is not strictly positive on [" << t_lo << ", " << t_hi << "]";
        throw std::domain_error(msg.str());
    }

    HardyResult out;
    out.rigidity_rhs = (2.0 * hA * hC - hB * hB) / 4.0;
    out.t = linspace(t_lo, t_hi, n + 1);

    const auto h = [&](double t) { return 0.5 * hA * t * t + hB * t + hC; };
    const int dofs = n - 1;

    std::vector<Eigen::Triplet<double>> tk, tw;
    tk.reserve(static_cast<std::size_t>(dofs) * 3);
    tw.reserve(static_cast<std::size_t>(dofs) * 3);
    const auto dof = [&](int node) -> int { return (node >= 1 && node <= n - 1) ? node - 1 : -1; };

    for (int e = 0; e < n; ++e) {
        const double x0 = out.t[static_cast<std::size_t>(e)];
        const double x1 = out.t[static_cast<std::size_t>(e) + 1];
        const double dx = x1 - x0;

        // Exact integral of h over the element for the stiffness block.
        const double ih = hA / 6.0 * (x1 * x1 * x1 - x0 * x0 * x0) + 0.5 * hB * (x1 * x1 - x0 * x0) +
                          hC * dx;
        const double kloc = ih / (dx * dx);
        double wloc[2][2] = {};
        for (int g = 0; g < 3; ++g) {
            const double u = 0.5 * (1.0 + kGaussX[g]);
            const double x = x0 + u * dx;
            const double wgt = 0.5 * kGaussW[g] * dx / h(x);
            const double N[2] = {1.0 - u, u};
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) wloc[r][c] += wgt * N[r] * N[c];
        }

        const int nodes[2] = {e, e + 1};
        const double ksign[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
        for (int r = 0; r < 2; ++r) {
            const int dr = dof(nodes[r]);
            if (dr < 0) continue;
            for (int c = 0; c < 2; ++c) {
                const int dc = dof(nodes[c]);
                if (dc < 0) continue;
                tk.emplace_back(dr, dc, kloc * ksign[r][c]);
                tw.emplace_back(dr, dc, wloc[r][c]);
            }
        }
    }

    Eigen::SparseMatrix<double> K(dofs, dofs), W(dofs, dofs);
    K.setFromTriplets(tk.begin(), tk.end());
    W.setFromTriplets(tw.begin(), tw.end());

    const EigenPair pair = smallest_eigenpair(K, W);
    out.rayleigh = pair.lambda;
    out.eig_residual = pair.residual;
    out.factorizations = pair.factorizations;
    out.witness.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = 1; k <= n - 1; ++k) out.witness[static_cast<std::size_t>(k)] = pair.x[k - 1];
    return out;
}

HardyResult hardy_rayleigh(double A, double B, double L, int n) {
    if (!(L > 0.0)) throw std::invalid_argument("hardy window half-width must be positive");
    return general_hardy(A, B, 1.0, -L, L, n);
}

}  // namespace igstab
