#include "igstab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "igstab/util.hpp"

namespace igstab {

namespace {

bool on_line(double x, std::span<const double> lines, double tol) {
    for (double l : lines)
        if (std::abs(x - l) <= tol) return true;
    return false;
}

}  // namespace

void GridSpec::validate() const {
    if (!std::isfinite(rect.eta_min) || !std::isfinite(rect.eta_max) ||
        !std::isfinite(rect.tau_min) || !std::isfinite(rect.tau_max))
        throw std::invalid_argument("grid rectangle has non-finite bounds");
    if (!(rect.eta_max > rect.eta_min) || !(rect.tau_max > rect.tau_min))
        throw std::invalid_argument("grid rectangle has empty extent");
    if (n_eta < 2 || n_tau < 2)
        throw std::invalid_argument("grid needs at least 2 nodes per axis");
}

bool ScalarField::node_on_singular_line(int i, int j) const {
    const double te = 1e-12 * std::max(1.0, std::abs(spec_.rect.eta_max) + std::abs(spec_.rect.eta_min));
    const double tt = 1e-12 * std::max(1.0, std::abs(spec_.rect.tau_max) + std::abs(spec_.rect.tau_min));
    return on_line(spec_.eta(i), sing_eta_, te) || on_line(spec_.tau(j), sing_tau_, tt);
}

void ScalarField::validate_nodes() const {
    for (int i = 0; i < spec_.n_eta; ++i)
        for (int j = 0; j < spec_.n_tau; ++j) {
            const double v = at(i, j);
            if (!std::isfinite(v) && !node_on_singular_line(i, j)) {
                std::ostringstream msg;
                msg << "non-finite field value at node (" << i << ", " << j << ") = (eta "
                    << spec_.eta(i) << ", tau " << spec_.tau(j) << ")";
                throw std::invalid_argument(msg.str());
            }
        }
}

ScalarField ScalarField::from_function(const GridSpec& spec, AnalyticSource src,
                                       std::vector<double> singular_tau,
                                       std::vector<double> singular_eta) {
    spec.validate();
    if (!src.value) throw std::invalid_argument("analytic source has no value evaluator");
    ScalarField f;
    f.spec_ = spec;
    f.sing_tau_ = std::move(singular_tau);
    f.sing_eta_ = std::move(singular_eta);
    f.values_.resize(static_cast<std::size_t>(spec.n_eta) * spec.n_tau);
    for (int i = 0; i < spec.n_eta; ++i)
        for (int j = 0; j < spec.n_tau; ++j)
            f.values_[static_cast<std::size_t>(i) * spec.n_tau + j] = src.value(spec.eta(i), spec.tau(j));
    f.src_ = std::make_shared<AnalyticSource>(std::move(src));
    f.validate_nodes();
    return f;
}

ScalarField ScalarField::from_values(const GridSpec& spec, std::vector<double> values,
                                     std::vector<double> singular_tau,
                                     std::vector<double> singular_eta) {
    spec.validate();
    if (values.size() != static_cast<std::size_t>(spec.n_eta) * spec.n_tau)
        throw std::invalid_argument("value count does not match grid resolution");
    ScalarField f;
    f.spec_ = spec;
    f.values_ = std::move(values);
    f.sing_tau_ = std::move(singular_tau);
    f.sing_eta_ = std::move(singular_eta);
    f.validate_nodes();
    return f;
}

double ScalarField::eval(double eta, double tau) const {
    if (!spec_.rect.contains(eta, tau)) {
        std::ostringstream msg;
        msg << "point (eta " << eta << ", tau " << tau << ") outside grid rectangle [" << spec_.rect.eta_min
            << ", " << spec_.rect.eta_max << "] x [" << spec_.rect.tau_min << ", " << spec_.rect.tau_max << "]";
        throw std::domain_error(msg.str());
    }
    if (has_analytic()) return src_->value(eta, tau);
    return bilinear(eta, tau);
}

double ScalarField::bilinear(double eta, double tau) const {
    const double he = spec_.h_eta(), ht = spec_.h_tau();
    int i = static_cast<int>(std::floor((eta - spec_.rect.eta_min) / he));
    int j = static_cast<int>(std::floor((tau - spec_.rect.tau_min) / ht));
    i = std::clamp(i, 0, spec_.n_eta - 2);
    j = std::clamp(j, 0, spec_.n_tau - 2);

    // Nodes on a singular line hold NaN.  A stencil with one singular edge
    // shifts one cell away from that edge and extrapolates, so interpolation
    // never reads across the singularity; the result is one-sided but finite.
    auto corner_nan = [&](int ii, int jj) {
        return !std::isfinite(at(ii, jj)) || !std::isfinite(at(ii + 1, jj)) ||
               !std::isfinite(at(ii, jj + 1)) || !std::isfinite(at(ii + 1, jj + 1));
    };
    if (corner_nan(i, j)) {
        const bool tau_lo = !std::isfinite(at(i, j)) || !std::isfinite(at(i + 1, j));
        const bool tau_hi = !std::isfinite(at(i, j + 1)) || !std::isfinite(at(i + 1, j + 1));
        const bool eta_lo = !std::isfinite(at(i, j)) || !std::isfinite(at(i, j + 1));
        const bool eta_hi = !std::isfinite(at(i + 1, j)) || !std::isfinite(at(i + 1, j + 1));
        if (tau_lo && !tau_hi && j + 2 <= spec_.n_tau - 1 && !corner_nan(i, j + 1)) ++j;
        else if (tau_hi && !tau_lo && j - 1 >= 0 && !corner_nan(i, j - 1)) --j;
        else if (eta_lo && !eta_hi && i + 2 <= spec_.n_eta - 1 && !corner_nan(i + 1, j)) ++i;
        else if (eta_hi && !eta_lo && i - 1 >= 0 && !corner_nan(i - 1, j)) --i;
    }

    const double u = (eta - spec_.eta(i)) / he;
    const double v = (tau - spec_.tau(j)) / ht;
    return at(i, j) * (1 - u) * (1 - v) + at(i + 1, j) * u * (1 - v) +
           at(i, j + 1) * (1 - u) * v + at(i + 1, j + 1) * u * v;
}

void write_field_csv(const ScalarField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "eta,tau,value\n";
    const GridSpec& s = f.spec();
    for (int i = 0; i < s.n_eta; ++i)
        for (int j = 0; j < s.n_tau; ++j)
            out << format_sig(s.eta(i)) << ',' << format_sig(s.tau(j)) << ','
                << format_sig(f.at(i, j)) << '\n';
    if (!out) throw std::runtime_error("write failure on " + path);
}

namespace {

std::vector<double> distinct_sorted(std::vector<double> xs, double tol) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    for (double x : xs)
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    return out;
}

int index_of(const std::vector<double>& xs, double x, double tol, const char* axis) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x - tol);
    if (it == xs.end() || std::abs(*it - x) > tol)
        throw std::runtime_error(std::string("CSV coordinate off the reconstructed ") + axis + " grid");
    return static_cast<int>(it - xs.begin());
}

}  // namespace

ScalarField read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    auto strip = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t\r"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
    };
    if (strip(line) != "eta,tau,value")
        throw std::runtime_error(path + ": expected header 'eta,tau,value'");

    std::vector<double> es, ts, vs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip(line).empty()) continue;
        std::istringstream row(line);
        std::string tok;
        double cell[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, tok, ','))
                throw std::runtime_error(path + ": short row at line " + std::to_string(lineno));
            try {
                cell[k] = std::stod(tok);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": bad number at line " + std::to_string(lineno));
            }
        }
        es.push_back(cell[0]);
        ts.push_back(cell[1]);
        vs.push_back(cell[2]);
    }
    if (es.empty()) throw std::runtime_error(path + ": no data rows");

    const double espan = *std::max_element(es.begin(), es.end()) - *std::min_element(es.begin(), es.end());
    const double tspan = *std::max_element(ts.begin(), ts.end()) - *std::min_element(ts.begin(), ts.end());
    const double etol = std::max(1e-12, 1e-9 * espan), ttol = std::max(1e-12, 1e-9 * tspan);
    const std::vector<double> etas = distinct_sorted(es, etol);
    const std::vector<double> taus = distinct_sorted(ts, ttol);
    const int ne = static_cast<int>(etas.size()), nt = static_cast<int>(taus.size());
    if (ne < 2 || nt < 2) throw std::runtime_error(path + ": fewer than 2 distinct coordinates per axis");
    if (es.size() != static_cast<std::size_t>(ne) * nt)
        throw std::runtime_error(path + ": row count does not fill an ne x nt grid");

    const double he = (etas.back() - etas.front()) / (ne - 1);
    const double ht = (taus.back() - taus.front()) / (nt - 1);
    for (int i = 0; i < ne; ++i)
        if (std::abs(etas[static_cast<std::size_t>(i)] - (etas.front() + he * i)) > etol)
            throw std::runtime_error(path + ": eta coordinates are not uniformly spaced");
    for (int j = 0; j < nt; ++j)
        if (std::abs(taus[static_cast<std::size_t>(j)] - (taus.front() + ht * j)) > ttol)
            throw std::runtime_error(path + ": tau coordinates are not uniformly spaced");

    GridSpec spec{{etas.front(), etas.back(), taus.front(), taus.back()}, ne, nt};
    std::vector<double> grid(static_cast<std::size_t>(ne) * nt,
                             std::numeric_limits<double>::quiet_NaN());
    std::vector<char> seen(grid.size(), 0);
    for (std::size_t r = 0; r < es.size(); ++r) {
        const int i = index_of(etas, es[r], etol, "eta");
        const int j = index_of(taus, ts[r], ttol, "tau");
        const std::size_t k = static_cast<std::size_t>(i) * nt + j;
        if (seen[k]) throw std::runtime_error(path + ": duplicate node row");
        seen[k] = 1;
        grid[k] = vs[r];
    }
    for (char c : seen)
        if (!c) throw std::runtime_error(path + ": missing node row");

    // Whole non-finite columns or rows mark singular lines (a derivative
    // field written next to its kink); isolated non-finite nodes still fail
    // validation below.
    std::vector<double> sing_tau, sing_eta;
    for (int j = 0; j < nt; ++j) {
        bool all_nan = true;
        for (int i = 0; i < ne && all_nan; ++i)
            all_nan = !std::isfinite(grid[static_cast<std::size_t>(i) * nt + j]);
        if (all_nan) sing_tau.push_back(taus[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < ne; ++i) {
        bool all_nan = true;
        for (int j = 0; j < nt && all_nan; ++j)
            all_nan = !std::isfinite(grid[static_cast<std::size_t>(i) * nt + j]);
        if (all_nan) sing_eta.push_back(etas[static_cast<std::size_t>(i)]);
    }
    return ScalarField::from_values(spec, std::move(grid), std::move(sing_tau), std::move(sing_eta));
}

}  // namespace igstab
