#pragma once
// Compactly supported perturbations for variation quadrature.

#include <functional>
#include <vector>

#include "igstab/grid.hpp"
#include "igstab/util.hpp"

namespace igstab {

// Minimal interface the variation integrals need: values, first partials and
// a bounding box outside of which everything vanishes identically.
class Perturbation {
public:
    virtual ~Perturbation() = default;
    virtual double value(double eta, double tau) const = 0;
    virtual double d_eta(double eta, double tau) const = 0;
    virtual double d_tau(double eta, double tau) const = 0;
    virtual Rect support() const = 0;
    virtual double sup_norm() const = 0;
};

// Tensor product of the standard C-infinity mollifier profile
//
//     B(u) = exp(1 - 1/(1 - u^2))  for |u| < 1,  B(u) = 0 otherwise,
//
// scaled per axis: value = amplitude * B((eta-eta0)/r_eta) * B((tau-tau0)/r_tau).
// B(0) = 1, so |amplitude| is the peak value.  Value and partials vanish
// identically outside the open support box (eta0 +- r_eta) x (tau0 +- r_tau),
// with all derivatives flat on its boundary.
class TestFunction final : public Perturbation {
public:
    TestFunction(double eta0, double tau0, double r_eta, double r_tau, double amplitude);

    double value(double eta, double tau) const override;
    double d_eta(double eta, double tau) const override;
    double d_tau(double eta, double tau) const override;
    Rect support() const override {
        return {eta0_ - r_eta_, eta0_ + r_eta_, tau0_ - r_tau_, tau0_ + r_tau_};
    }
    double sup_norm() const override { return std::abs(amp_); }

    double center_eta() const { return eta0_; }
    double center_tau() const { return tau0_; }
    double amplitude() const { return amp_; }

private:
    double eta0_, tau0_, r_eta_, r_tau_, amp_;
};

// Piecewise bilinear coefficients on a rectangular node grid, optionally read
// through a coordinate map (eta,tau) -> (s,z) first.  Used to push discrete
// eigenvectors from Lagrangian (t, zeta) coordinates back to the graph
// domain.  Partials are central difference quotients of the composed
// evaluator; accurate enough for sign and magnitude checks of quadratic
// forms (the evaluator itself is only piecewise smooth).
class GridPerturbation final : public Perturbation {
public:
    using CoordinateMap = std::function<std::pair<double, double>(double, double)>;

    // coeff(i, j) is the value at node (s_i, z_j); zero is assumed outside
    // the node rectangle.  `support_box` must contain the preimage of the
    // node rectangle under `map` (identity map when empty).
    GridPerturbation(std::vector<double> s_nodes, std::vector<double> z_nodes, RowMatrix coeff,
                     CoordinateMap map, Rect support_box, double fd_step);

    double value(double eta, double tau) const override;
    double d_eta(double eta, double tau) const override;
    double d_tau(double eta, double tau) const override;
    Rect support() const override { return box_; }
    double sup_norm() const override { return sup_; }

private:
    std::vector<double> s_, z_;
    RowMatrix c_;
    CoordinateMap map_;
    Rect box_;
    double h_;
    double sup_;

    double lookup(double s, double z) const;
};

}  // namespace igstab
