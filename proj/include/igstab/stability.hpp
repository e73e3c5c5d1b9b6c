#pragma once

// Stability analysis of ruled graphs in flow coordinates.
//
// A stationary graph is carried by its characteristic flow into the family of
// vertical parabolas
//
//   chi(t, zeta) = a(zeta) t^2/2 + b(zeta) t + zeta,
//
// written here in time relative to the flow base point.  The Jacobian of the
// flow map in the zeta direction is the quadratic
//
//   h(t, zeta) = a'(zeta) t^2/2 + b'(zeta) t + 1,
//
// which satisfies h(0, zeta) = 1 by construction.  The second variation of
// the graph area, restricted to perturbations theta(t, zeta) supported in a
// window of flow coordinates, takes the form
//
//   Q(theta) = S(theta) - P(theta)
//   S(theta) = int (d_t theta)^2 h(t, zeta) w(zeta) dt dzeta
//   P(theta) = int theta^2 (2 a'(zeta) - b'(zeta)^2) w(zeta) / h(t, zeta) dt dzeta
//   w(zeta)  = (1 + a(zeta)^2)^(-3/2).
//
// Q >= 0 on a window is the stability statement there.  The potential weight
// 2 a' - b'^2 and the pair discriminant 2 (a_j - a_i)(zeta_j - zeta_i) -
// (b_j - b_i)^2 are the local and global monotonicity quantities of the
// ruling; their signs are checked independently of the quadratic form.
//
// The one dimensional reduction with frozen zeta is the weighted Hardy
// quotient
//
//   R(phi) = int phi'^2 h dt / int phi^2 / h dt,
//
// whose infimum over compactly supported phi on the whole line equals
// (2A - B^2)/4 for h = A t^2/2 + B t + 1.  hardy_rayleigh computes the
// discrete minimum on a symmetric window.

#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "igstab/lagrangian.hpp"
#include "igstab/util.hpp"

namespace igstab {

// Result of the all-pairs discriminant test on a ruling profile.  A pair
// passes when both increments vanish or when
//   2 (a_j - a_i)(zeta_j - zeta_i) > (b_j - b_i)^2
// holds with a small slack for difference-quotient noise.  margin is the
// worst value of the left side minus the right side among non-equal pairs;
// (i, j) locate it.  For profiles with more than ~1500 nodes the pair set is
// subsampled on a uniform stride that always keeps both endpoints.
struct DiscriminantPairReport {
    bool pass = true;
    int i = -1;
    int j = -1;
    double margin = 0.0;
    bool subsampled = false;
};

DiscriminantPairReport discriminant_pairs(const RulingProfile& profile);

// Node-by-node version using the stored derivatives: pass when a' and b'
// both vanish or 2 a' > b'^2 up to slack.  margin is the minimum of
// 2 a' - b'^2 over non-degenerate nodes, worst_index its location.
struct PointwiseDiscriminantReport {
    bool pass = true;
    int worst_index = -1;
    double margin = 0.0;
};

PointwiseDiscriminantReport pointwise_discriminant(const RulingProfile& profile);

// Maximal open interval around t = 0 on which h(t) = da t^2/2 + db t + 1
// stays positive, together with whether that interval is the whole line.
// h(0) = 1, so the interval is never empty.  Infinite ends are reported as
// +-infinity.
struct JacobianWindow {
    bool positive_on_reals = false;
    double t_lo = 0.0;
    double t_hi = 0.0;
};

JacobianWindow jacobian_positivity(double da, double db);

// Discretization window in flow coordinates.  Times are relative to the flow
// base point, matching RulingProfile.  n_t and n_zeta count nodes per axis;
// both must be at least 4 so that interior degrees of freedom exist.
struct FormWindow {
    double t_min = 0.0;
    double t_max = 0.0;
    int n_t = 0;
    double zeta_min = 0.0;
    double zeta_max = 0.0;
    int n_zeta = 0;
};

// Bilinear finite element discretization of the window form with homogeneous
// Dirichlet boundary.  S, P, Q = S - P and the plain mass matrix M act on the
// interior nodes ordered t-major: dof = (i-1) * (n_zeta - 2) + (j - 1) for
// node (i, j).  Profile data is interpolated linearly in zeta and clamped to
// the profile range; element integrals use a 3x3 Gauss rule.
//
// assemble_form refuses windows on which the Jacobian h is not strictly
// positive, since the potential weight 1/h leaves integrability there.
struct DiscreteForm {
    std::vector<double> t;
    std::vector<double> zeta;
    Eigen::SparseMatrix<double> S;
    Eigen::SparseMatrix<double> P;
    Eigen::SparseMatrix<double> Q;
    Eigen::SparseMatrix<double> M;
    int n_interior = 0;
};

DiscreteForm assemble_form(const RulingProfile& profile, const FormWindow& window);

// Smallest eigenvalue diagnosis of an assembled window form.  witness holds
// the minimizing perturbation on the full node grid, boundary zeros included,
// normalized to unit Euclidean norm on the interior.  By construction
// lambda_min equals the Rayleigh quotient of the witness for the pencil
// (Q, M) up to rounding.  verdict is
//   "stable-on-window"  lambda_min >= -1e-10
//   "unstable"          otherwise
//   "degenerate"        the Jacobian h vanishes on the window; no form was
//                       assembled and lambda_min is NaN.
struct StabilityReport {
    double lambda_min = 0.0;
    RowMatrix witness;
    std::string verdict;
    FormWindow window;
    bool pairs_ok = false;
    bool pointwise_ok = false;
    double eig_residual = 0.0;
    int factorizations = 0;
    std::string note;
};

StabilityReport min_eigenvalue(const DiscreteForm& form, const FormWindow& window);

// Full pipeline on a ruling profile: discriminant checks, Jacobian
// positivity scan over the window, assembly, eigenvalue.  Discriminant
// failures are recorded in the flags but do not stop the eigenvalue
// computation; a Jacobian sign change does, with verdict "degenerate".
StabilityReport stability_verdict(const RulingProfile& profile, const FormWindow& window);

// Discrete minimum of the weighted Hardy quotient R(phi) over P1 elements on
// [t_lo, t_hi] with phi = 0 at both ends, h(t) = hA t^2/2 + hB t + hC.
// rigidity_rhs = (2 hA hC - hB^2)/4 is the infimum of R over the whole line
// when hA > 0; the discrete window value always sits at or above it when
// h > 0 on the window.  The stiffness integrals are exact, the 1/h mass uses
// a 3 point Gauss rule per element.  Throws std::domain_error when h is not
// strictly positive on the window.
struct HardyResult {
    double rayleigh = 0.0;
    double rigidity_rhs = 0.0;
    std::vector<double> t;
    std::vector<double> witness;
    double eig_residual = 0.0;
    int factorizations = 0;
};

HardyResult general_hardy(double hA, double hB, double hC, double t_lo, double t_hi, int n);

// Symmetric window specialization with h = A t^2/2 + B t + 1 on [-L, L],
// n elements.
HardyResult hardy_rayleigh(double A, double B, double L, int n);

}  // namespace igstab
