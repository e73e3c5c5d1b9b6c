#include "igstab/variation.hpp"

#include <cmath>
#include <stdexcept>

namespace igstab {

namespace {

void require_support_inside(const GraphFunction& g, const Perturbation& phi) {
    if (!g.spec().rect.contains_strictly(phi.support()))
        throw std::invalid_argument("perturbation support must lie strictly inside the grid rectangle");
}

double run_with_error(const Rect& region, const GraphFunction& g,
                      const std::function<double(double, double)>& integrand,
                      const QuadratureOptions& opt, VariationResult& out) {
    const auto st = g.f.singular_tau();
    const auto se = g.f.singular_eta();
    QuadratureOptions fine_opt = opt;
    fine_opt.align_to_grid = opt.align_to_grid && !g.f.has_analytic();
    QuadratureOptions coarse = fine_opt;
    coarse.refine_levels = std::max(opt.refine_levels - 1, 0);
    coarse.min_cells_per_axis = opt.min_cells_per_axis / 2;
    const double fine = integrate_region(region, g.spec(), st, se, integrand, fine_opt);
    const double rough = integrate_region(region, g.spec(), st, se, integrand, coarse);
    out.value = fine;
    out.quadrature_error_estimate = std::abs(fine - rough);
    out.region = region;
    return fine;
}

}  // namespace

VariationResult area(const GraphFunction& g, const Rect& K, const QuadratureOptions& opt) {
    VariationResult res;
    run_with_error(
        K, g,
        [&g](double e, double t) {
            const double G = g.grad_at(e, t);
            return std::sqrt(1.0 + G * G);
        },
        opt, res);
    return res;
}

VariationResult first_variation(const GraphFunction& g, const Perturbation& phi,
                                const QuadratureOptions& opt) {
    require_support_inside(g, phi);
    VariationResult res;
    run_with_error(
        phi.support(), g,
        [&](double e, double t) {
            const double G = g.grad_at(e, t);
            const double W = G / std::sqrt(1.0 + G * G);
            const double p = phi.value(e, t);
            const double grad_phi = phi.d_eta(e, t) + g.f_at(e, t) * phi.d_tau(e, t);
            return W * (grad_phi + g.d_tau_at(e, t) * p);
        },
        opt, res);
    return res;
}

VariationResult second_variation(const GraphFunction& g, const Perturbation& phi,
                                 const QuadratureOptions& opt) {
    require_support_inside(g, phi);
    VariationResult res;
    run_with_error(
        phi.support(), g,
        [&](double e, double t) {
            const double G = g.grad_at(e, t);
            const double one = 1.0 + G * G;
            const double W = G / std::sqrt(one);
            const double p = phi.value(e, t);
            const double dt_p = phi.d_tau(e, t);
            const double grad_phi = phi.d_eta(e, t) + g.f_at(e, t) * dt_p;
            const double v = grad_phi + g.d_tau_at(e, t) * p;
            return v * v / (one * std::sqrt(one)) + W * 2.0 * p * dt_p;
        },
        opt, res);
    return res;
}

double perturbed_area(const GraphFunction& g, const Perturbation& phi, double eps,
                      const QuadratureOptions& opt) {
    require_support_inside(g, phi);
    VariationResult res;
    return run_with_error(
        phi.support(), g,
        [&](double e, double t) {
            // grad_{f + eps phi}(f + eps phi) expanded against the stored partials.
            const double G = g.grad_at(e, t) +
                             eps * (phi.d_eta(e, t) + g.f_at(e, t) * phi.d_tau(e, t) +
                                    phi.value(e, t) * g.d_tau_at(e, t)) +
                             eps * eps * phi.value(e, t) * phi.d_tau(e, t);
            return std::sqrt(1.0 + G * G);
        },
        opt, res);
}

namespace {

// Neville extrapolation to x = 0 of data (x_i, y_i); used with x = eps^2, so
// one pass removes the eps^2 and eps^4 error terms of the centered quotients.
double extrapolate_to_zero(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    for (std::size_t level = 1; level < n; ++level)
        for (std::size_t i = 0; i + level < n; ++i)
            y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
    return y[0];
}

}  // namespace

FdCheck variation_fd_check(const GraphFunction& g, const Perturbation& phi,
                           std::span<const double> eps_sweep, const QuadratureOptions& opt) {
    if (eps_sweep.empty()) throw std::invalid_argument("empty eps sweep");
    FdCheck out;
    const double a0 = perturbed_area(g, phi, 0.0, opt);
    std::vector<double> x, d1, d2;
    for (double eps : eps_sweep) {
        if (!(eps > 0)) throw std::invalid_argument("eps values must be positive");
        const double ap = perturbed_area(g, phi, eps, opt);
        const double am = perturbed_area(g, phi, -eps, opt);
        FdCheckRow row;
        row.eps = eps;
        row.first_diff = (ap - am) / (2.0 * eps);
        row.second_diff = (ap - 2.0 * a0 + am) / (eps * eps);
        out.rows.push_back(row);
        x.push_back(eps * eps);
        d1.push_back(row.first_diff);
        d2.push_back(row.second_diff);
    }
    out.first_extrapolated = extrapolate_to_zero(x, d1);
    out.second_extrapolated = extrapolate_to_zero(x, d2);
    out.first_value = first_variation(g, phi, opt).value;
    out.second_value = second_variation(g, phi, opt).value;
    out.first_error = std::abs(out.first_value - out.first_extrapolated);
    out.second_error = std::abs(out.second_value - out.second_extrapolated);
    return out;
}

}  // namespace igstab
