#include "igstab/field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "igstab/util.hpp"

namespace igstab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Finite difference along one axis of the node values.  `fetch(k)` reads the
// k-th node on the line, `coord(k)` its coordinate.  Stencils avoid nodes
// holding NaN (singular lines) by switching to one-sided differences; a node
// with fewer than two usable neighbours on either side gets NaN.
template <class Fetch, class Coord>
double axis_derivative(int k, int n, Fetch fetch, Coord coord) {
    auto ok = [&](int m) { return m >= 0 && m < n && std::isfinite(fetch(m)); };
    if (!std::isfinite(fetch(k))) return kNaN;
    if (ok(k - 1) && ok(k + 1))
        return central_derivative(coord(k - 1), coord(k), coord(k + 1),
                                  fetch(k - 1), fetch(k), fetch(k + 1));
    if (ok(k + 1) && ok(k + 2))
        return one_sided_derivative(coord(k), coord(k + 1), coord(k + 2),
                                    fetch(k), fetch(k + 1), fetch(k + 2));
    if (ok(k - 1) && ok(k - 2))
        return one_sided_derivative(coord(k), coord(k - 1), coord(k - 2),
                                    fetch(k), fetch(k - 1), fetch(k - 2));
    return kNaN;
}

}  // namespace

GraphFunction build_graph_function(const ScalarField& f) {
    const GridSpec& s = f.spec();
    GraphFunction g;
    g.f = f;

    const std::vector<double> st(f.singular_tau().begin(), f.singular_tau().end());
    const std::vector<double> se(f.singular_eta().begin(), f.singular_eta().end());

    if (f.has_analytic_partials()) {
        const auto src = *f.source();
        AnalyticSource de{src.d_eta, {}, {}};
        AnalyticSource dt{src.d_tau, {}, {}};
        AnalyticSource ig{[src](double e, double t) {
                              return src.d_eta(e, t) + src.value(e, t) * src.d_tau(e, t);
                          },
                          {},
                          {}};
        g.d_eta = ScalarField::from_function(s, std::move(de), st, se);
        g.d_tau = ScalarField::from_function(s, std::move(dt), st, se);
        g.intrinsic_grad = ScalarField::from_function(s, std::move(ig), st, se);
        return g;
    }

    std::vector<double> de(f.values().size()), dt(f.values().size()), ig(f.values().size());
    for (int i = 0; i < s.n_eta; ++i)
        for (int j = 0; j < s.n_tau; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * s.n_tau + j;
            de[k] = axis_derivative(
                i, s.n_eta, [&](int m) { return f.at(m, j); }, [&](int m) { return s.eta(m); });
            dt[k] = axis_derivative(
                j, s.n_tau, [&](int m) { return f.at(i, m); }, [&](int m) { return s.tau(m); });
            ig[k] = de[k] + f.at(i, j) * dt[k];
        }
    g.d_eta = ScalarField::from_values(s, std::move(de), st, se);
    g.d_tau = ScalarField::from_values(s, std::move(dt), st, se);
    g.intrinsic_grad = ScalarField::from_values(s, std::move(ig), st, se);
    return g;
}

Vec3 graph_embed(const GraphFunction& g, double eta, double tau) {
    const double fv = g.f_at(eta, tau);  // eval() rejects points off the rectangle
    return {fv, eta, tau - 0.5 * eta * fv};
}

PlaneFit plane_fit(const ScalarField& f) {
    const GridSpec& s = f.spec();
    double se = 0, sf = 0, see = 0, sef = 0;
    std::size_t n = 0;
    for (int i = 0; i < s.n_eta; ++i)
        for (int j = 0; j < s.n_tau; ++j) {
            const double v = f.at(i, j);
            if (!std::isfinite(v)) continue;  // nodes on a singular line
            const double e = s.eta(i);
            se += e;
            sf += v;
            see += e * e;
            sef += e * v;
            ++n;
        }
    if (n < 2) throw std::invalid_argument("plane_fit: not enough finite nodes");
    const double den = see - se * se / static_cast<double>(n);
    PlaneFit fit;
    fit.a = den > 0 ? (sef - se * sf / static_cast<double>(n)) / den : 0.0;
    fit.b = (sf - fit.a * se) / static_cast<double>(n);
    double r = 0;
    for (int i = 0; i < s.n_eta; ++i)
        for (int j = 0; j < s.n_tau; ++j) {
            const double v = f.at(i, j);
            if (!std::isfinite(v)) continue;
            r = std::max(r, std::abs(v - fit.a * s.eta(i) - fit.b));
        }
    fit.residual = r;
    return fit;
}

}  // namespace igstab
