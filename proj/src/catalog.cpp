#include "igstab/catalog.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "igstab/util.hpp"

namespace igstab {

namespace {

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

CatalogEntry young_entry() {
    CatalogEntry e;
    e.name = "young";
    e.description =
        "f = 2 sgn(tau) sqrt|tau|: intrinsic gradient jumps between -2 and 2 across tau = 0, "
        "characteristics above the line are the parabolas (t + sqrt(zeta))^2";
    e.rect = Rect{-2.0, 3.0, -9.0, 16.0};
    e.singular_tau = {0.0};
    e.source.value = [](double, double tau) {
        return tau >= 0.0 ? 2.0 * std::sqrt(tau) : -2.0 * std::sqrt(-tau);
    };
    e.source.d_eta = [](double, double) { return 0.0; };
    e.source.d_tau = [](double, double tau) {
        if (tau == 0.0) return nan_value();
        return 1.0 / std::sqrt(std::abs(tau));
    };
    e.closed_form_grad = [](double, double tau) {
        if (tau == 0.0) return nan_value();
        return tau > 0.0 ? 2.0 : -2.0;
    };
    e.stationary = true;
    return e;
}

CatalogEntry fan_entry() {
    CatalogEntry e;
    e.name = "hyperbolic-fan";
    e.description =
        "f = 2 eta tau / (1 + eta^2): stationary fan of parabolas chi = zeta (1 + t^2) that "
        "passes the ruling discriminants yet loses stability on wide windows";
    e.rect = Rect{-3.0, 3.0, -24.0, 24.0};
    e.source.value = [](double eta, double tau) { return 2.0 * eta * tau / (1.0 + eta * eta); };
    e.source.d_eta = [](double eta, double tau) {
        const double d = 1.0 + eta * eta;
        return 2.0 * tau * (1.0 - eta * eta) / (d * d);
    };
    e.source.d_tau = [](double eta, double) { return 2.0 * eta / (1.0 + eta * eta); };
    e.closed_form_grad = [](double eta, double tau) { return 2.0 * tau / (1.0 + eta * eta); };
    e.stationary = true;
    return e;
}

CatalogEntry tau_log_entry() {
    CatalogEntry e;
    e.name = "tau-log";
    e.description =
        "f = 1 + tau ln tau above tau = 0 and 0 below: bounded jump with a logarithmic "
        "derivative blow-up along the matching line";
    e.rect = Rect{-2.0, 2.0, -2.0, 2.0};
    e.singular_tau = {0.0};
    e.source.value = [](double, double tau) { return tau > 0.0 ? 1.0 + tau * std::log(tau) : 0.0; };
    e.source.d_eta = [](double, double) { return 0.0; };
    e.source.d_tau = [](double, double tau) {
        if (tau > 0.0) return std::log(tau) + 1.0;
        if (tau < 0.0) return 0.0;
        return nan_value();
    };
    e.closed_form_grad = [](double, double tau) {
        if (tau > 0.0) return (1.0 + tau * std::log(tau)) * (std::log(tau) + 1.0);
        if (tau < 0.0) return 0.0;
        return nan_value();
    };
    e.stationary = false;
    return e;
}

CatalogEntry sine_entry() {
    CatalogEntry e;
    e.name = "sine";
    e.description = "f = sin tau: smooth, not stationary, characteristics are not parabolas";
    e.rect = Rect{-3.0, 3.0, -4.0, 4.0};
    e.source.value = [](double, double tau) { return std::sin(tau); };
    e.source.d_eta = [](double, double) { return 0.0; };
    e.source.d_tau = [](double, double tau) { return std::cos(tau); };
    e.closed_form_grad = [](double, double tau) { return std::sin(tau) * std::cos(tau); };
    e.stationary = false;
    return e;
}

}  // namespace

CatalogEntry plane_entry(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("plane coefficients must be finite");
    CatalogEntry e;
    e.name = "plane";
    std::ostringstream d;
    d << "f = " << a << " eta + " << b << ": restriction of a vertical plane, constant intrinsic gradient";
    e.description = d.str();
    e.rect = Rect{-6.0, 6.0, -40.0, 40.0};
    e.source.value = [a, b](double eta, double) { return a * eta + b; };
    e.source.d_eta = [a](double, double) { return a; };
    e.source.d_tau = [](double, double) { return 0.0; };
    e.closed_form_grad = [a](double, double) { return a; };
    e.stationary = true;
    return e;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {"plane", "young", "hyperbolic-fan", "tau-log",
                                                   "sine"};
    return names;
}

CatalogEntry catalog_entry(const std::string& name) {
    if (name == "plane") return plane_entry(1.0, 0.0);
    if (name == "young") return young_entry();
    if (name == "hyperbolic-fan") return fan_entry();
    if (name == "tau-log") return tau_log_entry();
    if (name == "sine") return sine_entry();
    throw std::invalid_argument("unknown catalog entry: " + name);
}

GraphFunction catalog_graph(const CatalogEntry& e, int n_eta, int n_tau) {
    GridSpec spec{e.rect, n_eta, n_tau};
    spec.validate();
    ScalarField f = ScalarField::from_function(spec, e.source, e.singular_tau, e.singular_eta);
    return build_graph_function(f);
}

ProbeResult integrability_probe(const CatalogEntry& e, double exponent, double exp_kappa,
                                double eta_lo, double eta_hi, int decades) {
    if (!(eta_lo < eta_hi) || eta_lo < e.rect.eta_min || eta_hi > e.rect.eta_max)
        throw std::invalid_argument("probe eta window must sit inside the entry rectangle");
    if (decades < 1 || decades > 14) throw std::invalid_argument("probe depth must be 1..14 decades");
    if (!(e.rect.tau_min <= 0.0) || !(e.rect.tau_max >= 1.0))
        throw std::invalid_argument("probe strips need the entry rectangle to cover (0, 1]");
    if (exp_kappa < 0.0 || !std::isfinite(exp_kappa))
        throw std::invalid_argument("probe exp weight must be finite and non-negative");
    if (exp_kappa == 0.0 && (!(exponent >= 0.0) || !std::isfinite(exponent)))
        throw std::invalid_argument("probe exponent must be finite and non-negative");
    if (!e.source.d_tau) throw std::invalid_argument("probe needs an exact d_tau evaluator");

    const auto integrand = [&](double eta, double tau) {
        const double g = std::abs(e.source.d_tau(eta, tau));
        return exp_kappa > 0.0 ? std::exp(exp_kappa * g) : std::pow(g, exponent);
    };

    const int n_eta_pts = 32;
    const double d_eta = (eta_hi - eta_lo) / n_eta_pts;

    // One geometric strip [lo, 10 lo], subdivided into m geometric cells and
    // sampled at geometric midpoints; m doubles until the value settles.
    const auto strip_integral = [&](double lo) {
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int m = 64; m <= 65536; m *= 2) {
            const double r = std::pow(10.0, 1.0 / m);
            double total = 0.0;
            std::vector<double> cell(static_cast<std::size_t>(m), 0.0);
            double a = lo;
            for (int i = 0; i < m; ++i) {
                const double b = lo * std::pow(10.0, static_cast<double>(i + 1) / m);
                const double tm = a * std::sqrt(r);
                double row = 0.0;
                for (int k = 0; k < n_eta_pts; ++k) {
                    const double em = eta_lo + (k + 0.5) * d_eta;
                    row += integrand(em, tm);
                }
                cell[static_cast<std::size_t>(i)] = row * d_eta * (b - a);
                a = b;
            }
            total = pairwise_sum(cell);
            if (std::isinf(total)) return total;
            if (std::isfinite(prev) && std::abs(total - prev) <= 1e-6 * std::abs(total)) return total;
            prev = total;
        }
        return prev;
    };

    ProbeResult out;
    out.strip_lo.resize(static_cast<std::size_t>(decades));
    out.integrals.resize(static_cast<std::size_t>(decades));
    out.cumulative.resize(static_cast<std::size_t>(decades));
    double cum = 0.0;
    for (int k = 0; k < decades; ++k) {
        const double lo = std::pow(10.0, -(k + 1));
        out.strip_lo[static_cast<std::size_t>(k)] = lo;
        const double v = strip_integral(lo);
        out.integrals[static_cast<std::size_t>(k)] = v;
        cum += v;
        out.cumulative[static_cast<std::size_t>(k)] = cum;
    }
    if (decades > 1) {
        out.ratios.resize(static_cast<std::size_t>(decades) - 1);
        for (int k = 0; k + 1 < decades; ++k) {
            const double shallow = out.integrals[static_cast<std::size_t>(k)];
            const double deep = out.integrals[static_cast<std::size_t>(k) + 1];
            double ratio;
            if (std::isinf(deep))
                ratio = std::numeric_limits<double>::infinity();
            else if (shallow == 0.0)
                ratio = 0.0;
            else
                ratio = deep / shallow;
            out.ratios[static_cast<std::size_t>(k)] = ratio;
        }
        out.diverging = out.ratios.back() >= 0.999;
    }
    return out;
}

}  // namespace igstab
