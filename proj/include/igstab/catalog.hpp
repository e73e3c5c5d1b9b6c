#pragma once

// Worked graph examples with exact evaluators, used by the tests, the
// acceptance suite and the command line driver.
//
//   plane           f = a eta + b, constant intrinsic gradient a
//   young           f = 2 sgn(tau) sqrt|tau|, gradient +-2 glued at tau = 0
//   hyperbolic-fan  f = 2 eta tau / (1 + eta^2), stationary parabola fan
//   tau-log         f = 1 + tau ln tau above tau = 0 and 0 below it
//   sine            f = sin tau, smooth and not stationary
//
// Each entry records the closed-form intrinsic gradient when one is known so
// tests can compare the assembled operator against it, and the axis lines
// where the evaluators stop being smooth.

#include <string>
#include <vector>

#include "igstab/field.hpp"
#include "igstab/grid.hpp"

namespace igstab {

struct CatalogEntry {
    std::string name;
    std::string description;
    Rect rect;
    AnalyticSource source;
    std::vector<double> singular_tau;
    std::vector<double> singular_eta;
    Evaluator closed_form_grad;  // null when no closed form is recorded
    bool stationary = false;
};

const std::vector<std::string>& catalog_names();

// Throws std::invalid_argument for unknown names.  "plane" uses slope 1 and
// offset 0; plane_entry builds the general one.
CatalogEntry catalog_entry(const std::string& name);
CatalogEntry plane_entry(double a, double b);

// Samples the entry on an n_eta x n_tau grid over its rectangle and bundles
// the derivative fields.
GraphFunction catalog_graph(const CatalogEntry& e, int n_eta, int n_tau);

// Decade-by-decade integrals of a moment of d_tau f over strips
// [10^-(k+1), 10^-k] x [eta_lo, eta_hi], k = 0 .. decades-1, going down
// toward tau = 0.  The integrand is |d_tau f|^exponent, or
// exp(exp_kappa |d_tau f|) when exp_kappa > 0.  Strips subdivide
// geometrically and refine until the value settles; integrals that overflow
// to infinity are reported as such.
//
//   integrals[k]   strip value
//   cumulative[k]  integral from 10^-(k+1) up to 1
//   ratios[k]      integrals[k+1] / integrals[k], deeper over shallower
//   diverging      last strip ratio at or above 1 (borderline log growth
//                  counts as diverging)
struct ProbeResult {
    std::vector<double> strip_lo;
    std::vector<double> integrals;
    std::vector<double> cumulative;
    std::vector<double> ratios;
    bool diverging = false;
};

ProbeResult integrability_probe(const CatalogEntry& e, double exponent, double exp_kappa,
                                double eta_lo, double eta_hi, int decades);

}  // namespace igstab
