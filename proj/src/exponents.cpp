#include "igstab/exponents.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace igstab {

namespace {

void require_pq(double p, double q) {
    if (!(p > 2.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be finite and > 2");
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("exponent q must be finite and > 1");
}

}  // namespace

ExponentSet build_exponents(double p, double q) {
    require_pq(p, q);
    ExponentSet e;
    e.p = p;
    e.q = q;
    e.q_conj = q / (q - 1.0);
    e.s = p * q * (p - 2.0) / (p * p + q * (p - 2.0));
    e.alpha = p - 1.0;
    if (q > 2.0) e.beta = 2.0 * q / (q - 2.0);
    e.r = 1.0 / (q / p + 2.0 / (p - 2.0));
    return e;
}

double q_from_p_s(double p, double s) {
    if (!(p > 2.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be finite and > 2");
    if (!(s > 0.0) || !(s < p)) throw std::invalid_argument("inverting s(p, q) needs 0 < s < p");
    return s * p * p / ((p - 2.0) * (p - s));
}

ConditionReport check_conditions(const ExponentSet& e) {
    ConditionReport r;
    r.a1 = e.p * e.p / ((e.p - 1.0) * (e.p - 2.0)) < e.q;
    r.a2 = e.s > e.q_conj;
    if (e.beta) r.a3 = (e.s > *e.beta) && (*e.beta > e.q_conj);
    r.a4 = 1.0 / e.p + 1.0 / e.s + 2.0 / e.alpha <= 1.0;
    return r;
}

bool condition_holds(double p, double q, Condition c) {
    const ExponentSet e = build_exponents(p, q);
    const ConditionReport r = check_conditions(e);
    switch (c) {
        case Condition::A1:
            return r.a1;
        case Condition::A2:
            return r.a2;
        case Condition::A3:
            if (!r.a3) throw std::domain_error("condition A3 needs q > 2 (beta undefined)");
            return *r.a3;
        case Condition::A4:
            return r.a4;
    }
    throw std::invalid_argument("unknown condition");
}

double find_min_p(double q, Condition c) {
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("exponent q must be finite and > 1");
    // Attainability as p -> infinity, where s -> q:
    //   A1: limit of the left side is 1 < q, always attainable.
    //   A2: q > q' needs q > 2.
    //   A3: q > beta = 2q/(q-2) needs q > 4 (and beta > q' holds for q > 2).
    //   A4: limit is 1/q < 1, always attainable.
    if (c == Condition::A2 && !(q > 2.0))
        throw std::domain_error("condition A2 has no threshold for q <= 2 (s stays below q')");
    if (c == Condition::A3 && !(q > 4.0))
        throw std::domain_error("condition A3 has no threshold for q <= 4 (s stays below beta)");

    // Scan p - 2 over a log grid spanning 1e-6 .. 1e9 for the last
    // false-to-true transition, then bisect inside it.
    const int n_grid = 481;
    const double lg_lo = -6.0, lg_hi = 9.0;
    double lo = 0.0, hi = 0.0;
    bool have_bracket = false;
    bool prev_holds = false;
    double prev_p = 0.0;
    for (int k = 0; k < n_grid; ++k) {
        const double u = lg_lo + (lg_hi - lg_lo) * k / (n_grid - 1);
        const double p = 2.0 + std::pow(10.0, u);
        const bool h = condition_holds(p, q, c);
        if (k > 0 && !prev_holds && h) {
            lo = prev_p;
            hi = p;
            have_bracket = true;
        }
        prev_holds = h;
        prev_p = p;
    }
    if (!prev_holds)
        throw std::domain_error("condition is still violated at the top of the search range");
    if (!have_bracket)
        throw std::runtime_error("condition holds on the whole search grid; no threshold bracketed");

    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (condition_holds(mid, q, c))
            hi = mid;
        else
            lo = mid;
    }

    // Monotone tail: the condition must keep holding past the threshold and
    // fail just below it.
    if (condition_holds(lo, q, c))
        throw std::runtime_error("threshold bracket lost its sign change during bisection");
    for (double factor : {1.5, 4.0, 64.0}) {
        const double p = std::min(hi * factor, 2.0 + 1e9);
        if (!condition_holds(p, q, c))
            throw std::runtime_error("condition is not monotone past the computed threshold");
    }
    return hi;
}

}  // namespace igstab
