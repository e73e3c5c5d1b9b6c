#pragma once
// Graph functions f(eta, tau) and the pointwise operators attached to them.
//
// The intrinsic gradient of f is the Burgers-type operator
//
//     grad_f f = d_eta f + f d_tau f,
//
// and the graph map into R^3 (exponential coordinates of the first Heisenberg
// group, group law (x,y,z)(x',y',z') = (x+x', y+y', z+z'+(xy'-x'y)/2)) is
//
//     (eta, tau) |-> (f(eta,tau), eta, tau - eta f(eta,tau) / 2).
//
// Partials come from the exact evaluators when the field carries them and
// from second-order finite differences on the node values otherwise (central
// stencils inside, one-sided at the boundary and next to singular lines).

#include "igstab/grid.hpp"

namespace igstab {

struct GraphFunction {
    ScalarField f;
    ScalarField d_eta;
    ScalarField d_tau;
    ScalarField intrinsic_grad;  // d_eta + f d_tau at nodes, same rule pointwise

    const GridSpec& spec() const { return f.spec(); }

    double f_at(double eta, double tau) const { return f.eval(eta, tau); }
    double d_eta_at(double eta, double tau) const { return d_eta.eval(eta, tau); }
    double d_tau_at(double eta, double tau) const { return d_tau.eval(eta, tau); }
    double grad_at(double eta, double tau) const { return intrinsic_grad.eval(eta, tau); }
};

GraphFunction build_graph_function(const ScalarField& f);

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

// Graph point of f at (eta, tau).  Throws std::domain_error outside the grid
// rectangle.
Vec3 graph_embed(const GraphFunction& g, double eta, double tau);

// Least squares fit f ~ a eta + b over all grid nodes; residual is the max
// nodewise deviation.  Vanishing residual characterises restrictions of
// vertical planes {x = a y + b}.
struct PlaneFit {
    double a = 0, b = 0;
    double residual = 0;
};
PlaneFit plane_fit(const ScalarField& f);

}  // namespace igstab
