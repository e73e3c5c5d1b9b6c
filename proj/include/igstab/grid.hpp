#pragma once
// Scalar data on a uniform rectangular (eta, tau) grid.
//
// Conventions used throughout the library:
//   * nodes are eta_i = eta_min + i h_eta (i = 0..n_eta-1), same in tau;
//   * storage is row-major with eta as the outer index;
//   * a field may carry an analytic source (exact evaluator and partials);
//     sampled fields are evaluated between nodes by bilinear interpolation;
//   * axis-parallel singular lines (tau = const or eta = const) mark where an
//     evaluator or its partials stop being finite.  Nodes falling on such a
//     line may store NaN and are excluded from finiteness validation; all
//     numerical consumers (quadrature, flows) keep their sample points off
//     the line itself.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace igstab {

struct Rect {
    double eta_min = 0, eta_max = 0, tau_min = 0, tau_max = 0;

    double width() const { return eta_max - eta_min; }
    double height() const { return tau_max - tau_min; }
    bool contains(double eta, double tau) const {
        return eta >= eta_min && eta <= eta_max && tau >= tau_min && tau <= tau_max;
    }
    bool contains(const Rect& inner) const {
        return inner.eta_min >= eta_min && inner.eta_max <= eta_max &&
               inner.tau_min >= tau_min && inner.tau_max <= tau_max;
    }
    bool contains_strictly(const Rect& inner) const {
        return inner.eta_min > eta_min && inner.eta_max < eta_max &&
               inner.tau_min > tau_min && inner.tau_max < tau_max;
    }
};

struct GridSpec {
    Rect rect;
    int n_eta = 0, n_tau = 0;

    double h_eta() const { return rect.width() / (n_eta - 1); }
    double h_tau() const { return rect.height() / (n_tau - 1); }
    double eta(int i) const { return rect.eta_min + h_eta() * i; }
    double tau(int j) const { return rect.tau_min + h_tau() * j; }

    // Throws std::invalid_argument on non-finite bounds, empty extents or
    // fewer than 2 nodes per axis.
    void validate() const;
};

using Evaluator = std::function<double(double, double)>;

// Exact evaluator with optional exact partials.  Partials left empty fall
// back to finite differences on the node values.
struct AnalyticSource {
    Evaluator value;
    Evaluator d_eta;
    Evaluator d_tau;
};

class ScalarField {
public:
    ScalarField() = default;

    static ScalarField from_function(const GridSpec& spec, AnalyticSource src,
                                     std::vector<double> singular_tau = {},
                                     std::vector<double> singular_eta = {});
    static ScalarField from_values(const GridSpec& spec, std::vector<double> values,
                                   std::vector<double> singular_tau = {},
                                   std::vector<double> singular_eta = {});

    const GridSpec& spec() const { return spec_; }
    const std::vector<double>& values() const { return values_; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * spec_.n_tau + j]; }

    bool has_analytic() const { return src_ != nullptr && static_cast<bool>(src_->value); }
    bool has_analytic_partials() const {
        return src_ != nullptr && static_cast<bool>(src_->d_eta) && static_cast<bool>(src_->d_tau);
    }
    const AnalyticSource* source() const { return src_.get(); }

    std::span<const double> singular_tau() const { return sing_tau_; }
    std::span<const double> singular_eta() const { return sing_eta_; }
    bool node_on_singular_line(int i, int j) const;

    // Point evaluation: the analytic evaluator when present, bilinear
    // interpolation of node values otherwise.  Throws std::domain_error when
    // (eta, tau) falls outside the grid rectangle.
    double eval(double eta, double tau) const;

private:
    GridSpec spec_;
    std::vector<double> values_;
    std::shared_ptr<const AnalyticSource> src_;
    std::vector<double> sing_tau_, sing_eta_;

    void validate_nodes() const;
    double bilinear(double eta, double tau) const;
};

// CSV exchange format: header "eta,tau,value", one node per row, row-major by
// eta then tau, every number printed with 17 significant digits.  read
// accepts rows in any order, reconstructs the grid from the distinct
// coordinates and rejects non-uniform or incomplete files.
void write_field_csv(const ScalarField& f, const std::string& path);
ScalarField read_field_csv(const std::string& path);

}  // namespace igstab
