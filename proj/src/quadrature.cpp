#include "igstab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "igstab/util.hpp"

namespace igstab {

namespace {

// 1-D partition of [lo, hi] induced by the grid lines of one axis.
std::vector<double> base_cuts(double lo, double hi, double origin, double h, int n_nodes) {
    std::vector<double> cuts{lo};
    const int k_lo = static_cast<int>(std::ceil((lo - origin) / h - 1e-12));
    const int k_hi = static_cast<int>(std::floor((hi - origin) / h + 1e-12));
    for (int k = std::max(k_lo, 0); k <= std::min(k_hi, n_nodes - 1); ++k) {
        const double x = origin + h * k;
        if (x > lo + 1e-12 * h && x < hi - 1e-12 * h) cuts.push_back(x);
    }
    cuts.push_back(hi);
    return cuts;
}

// Splits [lo, hi] at every singular line it crosses or touches, then splits
// the pieces dyadically toward each such line.  The innermost piece has width
// (piece width) / 2^depth and its midpoint sits strictly off the line.
void split_toward_lines(double lo, double hi, std::span<const double> lines, int depth,
                        std::vector<std::pair<double, double>>& out) {
    double cut = std::numeric_limits<double>::quiet_NaN();
    for (double l : lines)
        if (l > lo + 1e-14 && l < hi - 1e-14) {
            cut = l;
            break;
        }
    if (std::isfinite(cut)) {
        split_toward_lines(lo, cut, lines, depth, out);
        split_toward_lines(cut, hi, lines, depth, out);
        return;
    }
    bool at_lo = false, at_hi = false;
    for (double l : lines) {
        if (std::abs(l - lo) <= 1e-14 * std::max(1.0, std::abs(lo))) at_lo = true;
        if (std::abs(l - hi) <= 1e-14 * std::max(1.0, std::abs(hi))) at_hi = true;
    }
    if (!at_lo && !at_hi) {
        out.emplace_back(lo, hi);
        return;
    }
    // Dyadic grading toward the touched endpoint(s).
    double a = lo, b = hi;
    std::vector<std::pair<double, double>> pieces;
    for (int d = 0; d < depth; ++d) {
        const double w = (b - a) * 0.5;
        if (at_lo && at_hi) {
            pieces.emplace_back(a, a + w * 0.5);
            pieces.emplace_back(b - w * 0.5, b);
            a += w * 0.5;
            b -= w * 0.5;
        } else if (at_lo) {
            pieces.emplace_back(a + w, b);
            b = a + w;
        } else {
            pieces.emplace_back(a, b - w);
            a = b - w;
        }
    }
    pieces.emplace_back(a, b);
    std::sort(pieces.begin(), pieces.end());
    for (auto& p : pieces) out.push_back(p);
}

bool interval_near_line(double lo, double hi, std::span<const double> lines) {
    for (double l : lines)
        if (l >= lo - 1e-14 && l <= hi + 1e-14) return true;
    return false;
}

}  // namespace

double integrate_region(const Rect& region, const GridSpec& grid,
                        std::span<const double> singular_tau,
                        std::span<const double> singular_eta,
                        const std::function<double(double, double)>& integrand,
                        const QuadratureOptions& opt) {
    grid.validate();
    if (!(region.width() > 0) || !(region.height() > 0))
        throw std::invalid_argument("quadrature region has empty extent");
    const double slack_e = 1e-12 * std::max(1.0, grid.rect.width());
    const double slack_t = 1e-12 * std::max(1.0, grid.rect.height());
    if (region.eta_min < grid.rect.eta_min - slack_e || region.eta_max > grid.rect.eta_max + slack_e ||
        region.tau_min < grid.rect.tau_min - slack_t || region.tau_max > grid.rect.tau_max + slack_t)
        throw std::invalid_argument("quadrature region leaves the grid rectangle");

    std::vector<double> ex{region.eta_min, region.eta_max};
    std::vector<double> ty{region.tau_min, region.tau_max};
    if (opt.align_to_grid) {
        ex = base_cuts(region.eta_min, region.eta_max, grid.rect.eta_min, grid.h_eta(), grid.n_eta);
        ty = base_cuts(region.tau_min, region.tau_max, grid.rect.tau_min, grid.h_tau(), grid.n_tau);
    }

    int levels = std::max(opt.refine_levels, 0);
    if (opt.min_cells_per_axis > 0) {
        const int base = static_cast<int>(std::min(ex.size(), ty.size())) - 1;
        while (base * (1 << levels) < opt.min_cells_per_axis && levels < 12) ++levels;
    }
    const int sub = 1 << levels;

    std::vector<double> contributions;
    contributions.reserve((ex.size() - 1) * (ty.size() - 1));
    std::vector<std::pair<double, double>> epieces, tpieces;
    std::vector<double> samples;

    for (std::size_t ie = 0; ie + 1 < ex.size(); ++ie) {
        for (std::size_t it = 0; it + 1 < ty.size(); ++it) {
            const double e0 = ex[ie], e1 = ex[ie + 1];
            const double t0 = ty[it], t1 = ty[it + 1];

            epieces.clear();
            tpieces.clear();
            if (interval_near_line(e0, e1, singular_eta))
                split_toward_lines(e0, e1, singular_eta, opt.singular_depth, epieces);
            else
                epieces.emplace_back(e0, e1);
            if (interval_near_line(t0, t1, singular_tau))
                split_toward_lines(t0, t1, singular_tau, opt.singular_depth, tpieces);
            else
                tpieces.emplace_back(t0, t1);

            samples.clear();
            for (const auto& [pe0, pe1] : epieces)
                for (const auto& [pt0, pt1] : tpieces) {
                    const double de = (pe1 - pe0) / sub;
                    const double dt = (pt1 - pt0) / sub;
                    const double w = de * dt;
                    for (int a = 0; a < sub; ++a) {
                        const double em = pe0 + de * (a + 0.5);
                        for (int b = 0; b < sub; ++b) {
                            const double tm = pt0 + dt * (b + 0.5);
                            samples.push_back(w * integrand(em, tm));
                        }
                    }
                }
            contributions.push_back(pairwise_sum(samples));
        }
    }
    return pairwise_sum(contributions);
}

}  // namespace igstab
