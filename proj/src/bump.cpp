#include "igstab/bump.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igstab {

namespace {

// B(u) = exp(1 - 1/(1 - u^2)) on |u| < 1.  The exponent diverges to -inf as
// |u| -> 1, so both B and B' underflow smoothly to exact zero.
double profile(double u) {
    const double w = 1.0 - u * u;
    if (w <= 0.0) return 0.0;
    return std::exp(1.0 - 1.0 / w);
}

double profile_derivative(double u) {
    const double w = 1.0 - u * u;
    if (w <= 0.0) return 0.0;
    return profile(u) * (-2.0 * u / (w * w));
}

}  // namespace

TestFunction::TestFunction(double eta0, double tau0, double r_eta, double r_tau, double amplitude)
    : eta0_(eta0), tau0_(tau0), r_eta_(r_eta), r_tau_(r_tau), amp_(amplitude) {
    if (!(r_eta > 0) || !(r_tau > 0))
        throw std::invalid_argument("test function radii must be positive");
    if (!std::isfinite(eta0) || !std::isfinite(tau0) || !std::isfinite(amplitude))
        throw std::invalid_argument("test function parameters must be finite");
}

double TestFunction::value(double eta, double tau) const {
    return amp_ * profile((eta - eta0_) / r_eta_) * profile((tau - tau0_) / r_tau_);
}

double TestFunction::d_eta(double eta, double tau) const {
    return amp_ / r_eta_ * profile_derivative((eta - eta0_) / r_eta_) *
           profile((tau - tau0_) / r_tau_);
}

double TestFunction::d_tau(double eta, double tau) const {
    return amp_ / r_tau_ * profile((eta - eta0_) / r_eta_) *
           profile_derivative((tau - tau0_) / r_tau_);
}

GridPerturbation::GridPerturbation(std::vector<double> s_nodes, std::vector<double> z_nodes,
                                   RowMatrix coeff, CoordinateMap map, Rect support_box,
                                   double fd_step)
    : s_(std::move(s_nodes)), z_(std::move(z_nodes)), c_(std::move(coeff)), map_(std::move(map)),
      box_(support_box), h_(fd_step) {
    if (static_cast<int>(s_.size()) != c_.rows || static_cast<int>(z_.size()) != c_.cols)
        throw std::invalid_argument("coefficient matrix does not match node grids");
    if (s_.size() < 2 || z_.size() < 2)
        throw std::invalid_argument("grid perturbation needs at least 2 nodes per axis");
    if (!(h_ > 0)) throw std::invalid_argument("finite difference step must be positive");
    sup_ = 0;
    for (double v : c_.v) sup_ = std::max(sup_, std::abs(v));
}

double GridPerturbation::lookup(double s, double z) const {
    if (s <= s_.front() || s >= s_.back() || z <= z_.front() || z >= z_.back()) return 0.0;
    const auto is = std::upper_bound(s_.begin(), s_.end(), s) - s_.begin() - 1;
    const auto iz = std::upper_bound(z_.begin(), z_.end(), z) - z_.begin() - 1;
    const int i = std::clamp<int>(static_cast<int>(is), 0, static_cast<int>(s_.size()) - 2);
    const int j = std::clamp<int>(static_cast<int>(iz), 0, static_cast<int>(z_.size()) - 2);
    const double u = (s - s_[static_cast<std::size_t>(i)]) /
                     (s_[static_cast<std::size_t>(i) + 1] - s_[static_cast<std::size_t>(i)]);
    const double v = (z - z_[static_cast<std::size_t>(j)]) /
                     (z_[static_cast<std::size_t>(j) + 1] - z_[static_cast<std::size_t>(j)]);
    return c_(i, j) * (1 - u) * (1 - v) + c_(i + 1, j) * u * (1 - v) + c_(i, j + 1) * (1 - u) * v +
           c_(i + 1, j + 1) * u * v;
}

double GridPerturbation::value(double eta, double tau) const {
    if (eta <= box_.eta_min || eta >= box_.eta_max || tau <= box_.tau_min || tau >= box_.tau_max)
        return 0.0;
    if (map_) {
        const auto [s, z] = map_(eta, tau);
        return lookup(s, z);
    }
    return lookup(eta, tau);
}

double GridPerturbation::d_eta(double eta, double tau) const {
    return (value(eta + h_, tau) - value(eta - h_, tau)) / (2.0 * h_);
}

double GridPerturbation::d_tau(double eta, double tau) const {
    return (value(eta, tau + h_) - value(eta, tau - h_)) / (2.0 * h_);
}

}  // namespace igstab
