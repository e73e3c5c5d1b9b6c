#pragma once
// Composite midpoint quadrature over axis-aligned regions of a grid.
//
// Base cells are the grid cells clipped to the region.  Each base cell is
// refined 2^levels times per axis and the integrand is sampled at subcell
// midpoints.  Cells crossing or touching a declared singular line are first
// cut along the line and then split dyadically toward it (depth
// `singular_depth`), so integrand evaluations never land on the line itself
// and the sample density grows geometrically near it.  Cell contributions are
// reduced with pairwise summation in a fixed cell order, which makes the
// result bit-reproducible.
//
// Grid alignment exists for bilinear-sampled fields, whose integrands kink at
// cell edges.  For analytic sources it only breaks the node symmetry that
// lets the midpoint rule cancel odd error terms, so callers holding an
// analytic field should turn `align_to_grid` off.

#include <functional>
#include <span>

#include "igstab/grid.hpp"

namespace igstab {

struct QuadratureOptions {
    int refine_levels = 2;       // midpoint refinement per axis, 2^levels subcells
    int min_cells_per_axis = 0;  // raise refine_levels until the region has this many
    int singular_depth = 4;      // dyadic splits toward each singular line
    bool align_to_grid = true;   // cut base cells along grid lines (sampled fields)
};

// Integral of `integrand` over `region` (must lie inside the grid rectangle).
// Singular line lists usually come from the integrand's field.
double integrate_region(const Rect& region, const GridSpec& grid,
                        std::span<const double> singular_tau,
                        std::span<const double> singular_eta,
                        const std::function<double(double, double)>& integrand,
                        const QuadratureOptions& opt = {});

}  // namespace igstab
