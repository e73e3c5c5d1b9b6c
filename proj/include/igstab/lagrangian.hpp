#pragma once
// Characteristic flow of a graph function and the quadratic rulings it
// induces.
//
// The Lagrangian change of variables is Psi(t, zeta) = (t, chi(t, zeta)) with
//
//     d_t chi(t, zeta) = f(t, chi(t, zeta)),     chi(eta0, zeta) = zeta.
//
// Differentiating the ODE conjugates the graph operators to flat ones:
//
//     d_t^2 chi          = (grad_f f) o Psi
//     d_zeta d_t chi     = (d_tau f o Psi) d_zeta chi
//
// For stationary f the acceleration is constant along each characteristic, so
// chi is the quadratic ruling
//
//     chi(t, zeta) = a(zeta) (t - eta0)^2 / 2 + b(zeta) (t - eta0) + zeta,
//     a(zeta) = grad_f f(eta0, zeta),  b(zeta) = f(eta0, zeta),
//
// the graph lift of each characteristic is a straight horizontal line, and
// the inverse map has the closed form
//
//     Psi^{-1}(eta, tau) = (eta, tau + grad_f f(eta,tau) eta^2 / 2 - f(eta,tau) eta)
//
// (for eta0 = 0; general eta0 by translation).  Everything below measures how
// far a given f is from that picture.

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "igstab/bump.hpp"
#include "igstab/field.hpp"
#include "igstab/util.hpp"

namespace igstab {

struct TimeSpan {
    double t_min = 0, t_max = 0;
    int n_t = 0;
};

// Two characteristics crossed: chi(t, .) lost monotonicity beyond tolerance.
struct CrossingError : std::runtime_error {
    double t, zeta_lo, zeta_hi;
    CrossingError(double t_, double z1, double z2, const std::string& msg)
        : std::runtime_error(msg), t(t_), zeta_lo(z1), zeta_hi(z2) {}
};

struct LagrangianFlow {
    double eta0 = 0;
    int i_eta0 = 0;              // index of eta0 in t
    std::vector<double> t;       // sample times, sorted, contains eta0 exactly
    std::vector<double> zeta;    // initial heights, sorted
    RowMatrix chi;               // n_t x n_zeta; NaN outside the valid window
    RowMatrix dchi_dt;           // f along the trajectory
    RowMatrix d2chi_dt2;         // grad_f f along the trajectory
    RowMatrix dchi_dzeta;        // difference quotients across zeta
    std::vector<std::pair<int, int>> valid;  // per zeta: inclusive t-index window
    double ode_tolerance = 0;

    int n_t() const { return static_cast<int>(t.size()); }
    int n_zeta() const { return static_cast<int>(zeta.size()); }
    bool sample_valid(int i, int j) const {
        return i >= valid[static_cast<std::size_t>(j)].first &&
               i <= valid[static_cast<std::size_t>(j)].second;
    }
    // Trajectory truncated before reaching the requested span.
    bool trajectory_clipped(int j) const {
        return valid[static_cast<std::size_t>(j)].first > 0 ||
               valid[static_cast<std::size_t>(j)].second < n_t() - 1;
    }
};

// Integrates the characteristic ODE with an embedded Runge-Kutta-Fehlberg
// 4(5) pair, landing exactly on every sample time.  Per-step error control
// against tol * (1 + |chi|).  Trajectories leaving the grid rectangle are
// truncated at the last reached node and marked, never extrapolated: f is
// undefined outside.  Requires [t_min, t_max] inside the grid's eta extent
// and (eta0, zeta) inside the rectangle for every zeta.  If eta0 is not a
// node of the uniform span it is inserted as an extra sample.
LagrangianFlow integrate_flow(const GraphFunction& g, double eta0,
                              std::span<const double> zeta_grid, const TimeSpan& span,
                              double tol = 1e-9);

// Max norms of the two conjugation identities over the valid samples, with
// the t-derivatives recomputed by difference quotients of the stored samples
// (the stored d2chi_dt2 is the right-hand side, so it must not be reused).
//   res1 = max |D_t dchi_dt - grad_f f o Psi|
//   res2 = max |D_zeta dchi_dt - (d_tau f o Psi) D_zeta chi|
struct ConjugationResidual {
    double res1 = 0, res2 = 0;
};
ConjugationResidual conjugation_residual(const LagrangianFlow& flow, const GraphFunction& g);

struct RulingProfile {
    std::vector<double> zeta;
    std::vector<double> a, b;    // acceleration and initial slope per characteristic
    std::vector<double> da, db;  // difference quotients in zeta
};

// Ruling coefficients read off the base line t = eta0:
// a = grad_f f(eta0, zeta), b = f(eta0, zeta).
RulingProfile extract_ruling(const LagrangianFlow& flow, const GraphFunction& g);

// Ruling coefficients recovered from three flow samples per characteristic by
// the explicit inverse of the 3x3 system chi(t_k) = a t_k^2/2 + b t_k + c.
// The requested times snap to the nearest flow samples.  Pairwise gaps below
// 1e-6 of the span are rejected as ill-conditioned.  c should reproduce zeta
// when eta0 = 0; it is returned for that check.
struct VandermondeRuling {
    RulingProfile profile;
    std::vector<double> c;
};
VandermondeRuling vandermonde_extract(const LagrangianFlow& flow, double t1, double t2, double t3);

// Sup over valid samples of |chi - (a (t-eta0)^2/2 + b (t-eta0) + zeta)|.
double ruling_residual(const LagrangianFlow& flow, const RulingProfile& profile);

// Closed-form inverse of Psi built from the field: returns (t, zeta) with
// zeta = tau + grad_f f(eta,tau) (eta-eta0)^2/2 - f(eta,tau) (eta-eta0).
std::pair<double, double> lagrangian_inverse(const GraphFunction& g, double eta, double tau,
                                             double eta0 = 0.0);

// Max distance of the lifted characteristic points from the straight chord
// through their endpoints, in R^3.  Zero characterises ruled graphs.
double horizontal_lift_straightness(const LagrangianFlow& flow, const GraphFunction& g);

// Stationarity functional in flow coordinates: max over the dictionary of
//   | int d_t^2 chi / sqrt(1 + (d_t^2 chi)^2) * d_t theta  dt dzeta |
// by midpoint quadrature on the sample cells.  Each theta must be supported
// strictly inside the sampling window.
double stationarity_lagrangian_residual(const LagrangianFlow& flow,
                                        std::span<const TestFunction> thetas);

// CSV dumps: "t,zeta,chi,dchi_dt,d2chi_dt2" (valid samples only) and
// "zeta,a,b,da,db".
void write_flow_csv(const LagrangianFlow& flow, const std::string& path);
void write_ruling_csv(const RulingProfile& profile, const std::string& path);

}  // namespace igstab
