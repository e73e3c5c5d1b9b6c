#pragma once

// Exponent bookkeeping for the summability thresholds that drive the
// rigidity estimates.  From a pair (p, q) with p > 2, q > 1:
//
//   q' = q / (q - 1)                      conjugate of q
//   s  = p q (p - 2) / (p^2 + q (p - 2))  interpolation exponent
//   alpha = p - 1                         growth exponent
//   beta  = 2 q / (q - 2)                 only for q > 2
//   r  = (q/p + 2/(p - 2))^(-1)           auxiliary exponent
//
// The admissibility conditions, in the order they are labelled throughout:
//
//   A1: p^2 / ((p - 1)(p - 2)) < q        (strict)
//   A2: s > q'                            (strict)
//   A3: s > beta > q'                     (strict, needs q > 2; attainable
//                                          only for q > 4 since s < q)
//   A4: 1/p + 1/s + 2/alpha <= 1          (inclusive)
//
// s increases to q as p grows, so each condition is eventually monotone in p
// and has a sharp threshold p_hat(q); find_min_p locates it by scan plus
// bisection and verifies the monotone tail.

#include <optional>

namespace igstab {

struct ExponentSet {
    double p = 0;
    double q = 0;
    double q_conj = 0;
    double s = 0;
    double alpha = 0;
    std::optional<double> beta;
    double r = 0;
};

// Throws std::invalid_argument unless p > 2 and q > 1.
ExponentSet build_exponents(double p, double q);

// Recovers q from p and s = s(p, q); requires 2 < p and 0 < s < p.
double q_from_p_s(double p, double s);

struct ConditionReport {
    bool a1 = false;
    bool a2 = false;
    std::optional<bool> a3;  // empty when q <= 2 (beta undefined)
    bool a4 = false;
};

ConditionReport check_conditions(const ExponentSet& e);

enum class Condition { A1, A2, A3, A4 };

// Whether the condition holds at (p, q).  A3 with q <= 2 throws
// std::domain_error.
bool condition_holds(double p, double q, Condition c);

// Smallest p > 2 from which the condition holds for all larger p, to a
// relative accuracy of 1e-12.  Throws std::domain_error when no threshold
// exists for the given q (A2 needs q > 2, A3 needs q > 4) and
// std::runtime_error if the condition is not settled monotone past the
// computed point.
double find_min_p(double q, Condition c);

}  // namespace igstab
