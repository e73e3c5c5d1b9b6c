#pragma once
// Sub-Riemannian graph area and its first and second variation.
//
// With G = grad_f f and W = G / sqrt(1 + G^2):
//
//     A(K)      = int_K sqrt(1 + G^2)
//     I_f(phi)  = d/deps A(f + eps phi)     = int W (grad_f phi + d_tau f phi)
//     II_f(phi) = d^2/deps^2 A(f + eps phi) = int (grad_f phi + d_tau f phi)^2
//                                                   / (1 + G^2)^{3/2}
//                                           + int W d_tau(phi^2)
//
// where grad_f phi = d_eta phi + f d_tau phi, integrals over the support of
// phi.  (Statements of I_f through the adjoint of grad_f carry the opposite
// sign; here I_f is literally the eps-derivative, which is what the finite
// difference check compares against.)  The I and II integrands are the
// pointwise first and second eps-derivatives of the area integrand of
// f + eps phi, so the cross-check below shares its quadrature nodes with
// area() and the comparison is limited by the difference quotient alone, not
// by the quadrature.

#include <span>
#include <vector>

#include "igstab/bump.hpp"
#include "igstab/field.hpp"
#include "igstab/quadrature.hpp"

namespace igstab {

struct VariationResult {
    double value = 0;
    double quadrature_error_estimate = 0;  // |value - one refinement level coarser|
    Rect region;
};

// Default options for variation integrals: enough midpoints across a bump for
// the compact-support superconvergence of the midpoint rule to bite.
inline QuadratureOptions variation_default_options() {
    return {.refine_levels = 2, .min_cells_per_axis = 128, .singular_depth = 4};
}

// Area of the graph of f over K.  K must lie inside the grid rectangle.
VariationResult area(const GraphFunction& g, const Rect& K, const QuadratureOptions& opt = {});

// First and second variation against phi.  The support of phi must sit
// strictly inside the grid rectangle.
VariationResult first_variation(const GraphFunction& g, const Perturbation& phi,
                                const QuadratureOptions& opt = variation_default_options());
VariationResult second_variation(const GraphFunction& g, const Perturbation& phi,
                                 const QuadratureOptions& opt = variation_default_options());

// Area of the graph of f + eps phi over the support of phi, on the same
// quadrature nodes first/second_variation use.
double perturbed_area(const GraphFunction& g, const Perturbation& phi, double eps,
                      const QuadratureOptions& opt = variation_default_options());

inline std::span<const double> default_eps_sweep() {
    static const double eps[] = {1e-3, 3e-4, 1e-4};
    return eps;
}

struct FdCheckRow {
    double eps = 0;
    double first_diff = 0;   // (A(+eps) - A(-eps)) / (2 eps)
    double second_diff = 0;  // (A(+eps) - 2 A(0) + A(-eps)) / eps^2
};

struct FdCheck {
    std::vector<FdCheckRow> rows;
    double first_extrapolated = 0;   // Richardson in eps^2 through the sweep
    double second_extrapolated = 0;
    double first_value = 0;          // assembled I_f(phi)
    double second_value = 0;         // assembled II_f(phi)
    double first_error = 0;          // |assembled - extrapolated|
    double second_error = 0;
};

FdCheck variation_fd_check(const GraphFunction& g, const Perturbation& phi,
                           std::span<const double> eps_sweep = default_eps_sweep(),
                           const QuadratureOptions& opt = variation_default_options());

}  // namespace igstab
