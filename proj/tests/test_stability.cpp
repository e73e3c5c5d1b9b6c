#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "igstab/bump.hpp"
#include "igstab/catalog.hpp"
#include "igstab/eigsolve.hpp"
#include "igstab/lagrangian.hpp"
#include "igstab/stability.hpp"
#include "igstab/util.hpp"
#include "igstab/variation.hpp"

using namespace igstab;

namespace {

RulingProfile make_profile(int nz, double z0, double z1, const std::function<double(double)>& af,
                           const std::function<double(double)>& bf,
                           const std::function<double(double)>& daf,
                           const std::function<double(double)>& dbf) {
    RulingProfile p;
    p.zeta = linspace(z0, z1, nz);
    for (double z : p.zeta) {
        p.a.push_back(af(z));
        p.b.push_back(bf(z));
        p.da.push_back(daf(z));
        p.db.push_back(dbf(z));
    }
    return p;
}

RulingProfile fan_profile(int nz) {
    return make_profile(
        nz, -1.0, 1.0, [](double z) { return 2.0 * z; }, [](double) { return 0.0; },
        [](double) { return 2.0; }, [](double) { return 0.0; });
}

RulingProfile plane_profile(int nz) {
    return make_profile(
        nz, -1.0, 1.0, [](double) { return 1.0; }, [](double) { return -0.5; },
        [](double) { return 0.0; }, [](double) { return 0.0; });
}

// Decreasing a(zeta) violates every pair discriminant: 2 da dz = -2 dz^2 < 0.
RulingProfile decreasing_profile(int nz) {
    return make_profile(
        nz, -1.0, 1.0, [](double z) { return -z; }, [](double) { return 0.0; },
        [](double) { return -1.0; }, [](double) { return 0.0; });
}

// Constant a with moving b fails pairs through -db^2 and loses Jacobian
// positivity left of t = -1/db.
RulingProfile shear_profile(int nz) {
    return make_profile(
        nz, 1.0, 2.0, [](double) { return 2.0; }, [](double z) { return 2.0 * std::sqrt(z); },
        [](double) { return 0.0; }, [](double z) { return 1.0 / std::sqrt(z); });
}

double pencil_rayleigh(const DiscreteForm& form, const FormWindow& w, const RowMatrix& witness,
                       double* mass = nullptr) {
    Eigen::VectorXd x(form.n_interior);
    for (int i = 1; i <= w.n_t - 2; ++i)
        for (int j = 1; j <= w.n_zeta - 2; ++j)
            x[(i - 1) * (w.n_zeta - 2) + (j - 1)] = witness(i, j);
    const double qq = x.dot(form.Q * x);
    const double mm = x.dot(form.M * x);
    if (mass) *mass = mm;
    return qq / mm;
}

}  // namespace

TEST_CASE("jacobian positivity windows match the quadratic formula") {
    const double inf = std::numeric_limits<double>::infinity();

    auto w = jacobian_positivity(0.0, 0.0);
    CHECK(w.positive_on_reals);
    CHECK(w.t_lo == -inf);
    CHECK(w.t_hi == inf);

    w = jacobian_positivity(2.0, 0.0);  // t^2 + 1, no real roots
    CHECK(w.positive_on_reals);

    w = jacobian_positivity(0.0, 1.0);  // t + 1
    CHECK_FALSE(w.positive_on_reals);
    CHECK(w.t_lo == doctest::Approx(-1.0));
    CHECK(w.t_hi == inf);

    w = jacobian_positivity(0.0, -2.0);  // 1 - 2t
    CHECK_FALSE(w.positive_on_reals);
    CHECK(w.t_lo == -inf);
    CHECK(w.t_hi == doctest::Approx(0.5));

    w = jacobian_positivity(-2.0, 0.0);  // 1 - t^2
    CHECK_FALSE(w.positive_on_reals);
    CHECK(w.t_lo == doctest::Approx(-1.0));
    CHECK(w.t_hi == doctest::Approx(1.0));

    w = jacobian_positivity(2.0, 2.0);  // (t + 1)^2, double root left of 0
    CHECK_FALSE(w.positive_on_reals);
    CHECK(w.t_lo == doctest::Approx(-1.0));
    CHECK(w.t_hi == inf);
}

TEST_CASE("pair discriminants separate monotone rulings from planted failures") {
    auto flat = discriminant_pairs(plane_profile(21));
    CHECK(flat.pass);
    CHECK(flat.margin == 0.0);  // every pair is coefficient-equal, none scored
    CHECK(flat.i == -1);
    CHECK_FALSE(flat.subsampled);

    auto fan = discriminant_pairs(fan_profile(41));
    CHECK(fan.pass);
    // Worst pair is an adjacent one: margin = 4 dz^2 with dz = 2/40.
    CHECK(fan.j - fan.i == 1);
    CHECK(fan.margin == doctest::Approx(0.01).epsilon(1e-9));

    auto bad = discriminant_pairs(decreasing_profile(21));
    CHECK_FALSE(bad.pass);
    // Worst pair spans the whole profile: 2 (a_j - a_i)(z_j - z_i) = -2 * 2^2.
    CHECK(bad.i == 0);
    CHECK(bad.j == 20);
    CHECK(bad.margin == doctest::Approx(-8.0).epsilon(1e-12));

    auto shear = discriminant_pairs(shear_profile(41));
    CHECK_FALSE(shear.pass);
    CHECK(shear.i == 0);
    CHECK(shear.j == 40);
    // da = 0 pairs score -db^2; endpoints give -(2 sqrt2 - 2)^2 = 8 sqrt2 - 12.
    CHECK(shear.margin == doctest::Approx(8.0 * std::sqrt(2.0) - 12.0).epsilon(1e-9));
}

TEST_CASE("pair scan subsamples very long profiles but still passes monotone data") {
    auto rep = discriminant_pairs(fan_profile(4001));
    CHECK(rep.subsampled);
    CHECK(rep.pass);
    CHECK(rep.margin > 0.0);
}

TEST_CASE("pointwise discriminant uses the stored derivative quotients") {
    auto fan = pointwise_discriminant(fan_profile(41));
    CHECK(fan.pass);
    CHECK(fan.margin == doctest::Approx(4.0));

    auto flat = pointwise_discriminant(plane_profile(21));
    CHECK(flat.pass);
    CHECK(flat.worst_index == -1);

    auto bad = pointwise_discriminant(decreasing_profile(21));
    CHECK_FALSE(bad.pass);
    CHECK(bad.margin == doctest::Approx(-2.0));

    auto shear = pointwise_discriminant(shear_profile(41));
    CHECK_FALSE(shear.pass);
    CHECK(shear.worst_index == 0);  // -db^2 = -1/zeta is worst at zeta = 1
    CHECK(shear.margin == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("profile and window validation reject malformed input") {
    RulingProfile p;
    p.zeta = {0.0, 1.0};
    p.a = {1.0};  // length mismatch
    p.b = {0.0, 0.0};
    p.da = {0.0, 0.0};
    p.db = {0.0, 0.0};
    CHECK_THROWS_AS(discriminant_pairs(p), std::invalid_argument);

    auto fan = fan_profile(11);
    CHECK_THROWS_AS(assemble_form(fan, FormWindow{-1.0, 1.0, 3, -1.0, 1.0, 11}),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_form(fan, FormWindow{1.0, -1.0, 11, -1.0, 1.0, 11}),
                    std::invalid_argument);
}

TEST_CASE("constant profile reduces to the weighted Dirichlet string") {
    // With a' = b' = 0 the form is Q = w int (d_t theta)^2, w = (1 + a^2)^(-3/2),
    // so lambda_min is w (pi / T)^2 up to O(h^2) from above.
    auto p = plane_profile(21);
    FormWindow w{-10.0, 10.0, 101, -1.0, 1.0, 21};
    auto form = assemble_form(p, w);
    auto rep = min_eigenvalue(form, w);

    const double exact = std::pow(2.0, -1.5) * std::pow(M_PI / 20.0, 2.0);
    CHECK(rep.lambda_min >= exact * (1.0 - 1e-12));  // conforming elements bound from above
    CHECK(rep.lambda_min <= exact * 1.001);          // measured overshoot ~8e-5 relative
    CHECK(rep.verdict == "stable-on-window");
    CHECK(rep.eig_residual < 1e-10);

    // Witness respects the Dirichlet boundary and carries the eigenvalue as
    // its Rayleigh quotient through the assembled matrices.
    for (int j = 0; j < w.n_zeta; ++j) {
        CHECK(rep.witness(0, j) == 0.0);
        CHECK(rep.witness(w.n_t - 1, j) == 0.0);
    }
    const double rq = pencil_rayleigh(form, w, rep.witness);
    CHECK(rq == doctest::Approx(rep.lambda_min).epsilon(1e-12));
}

TEST_CASE("expanding fan is unstable on a wide window") {
    auto p = fan_profile(41);
    FormWindow w{-20.0, 20.0, 201, -1.0, 1.0, 41};
    auto rep = stability_verdict(p, w);

    CHECK(rep.verdict == "unstable");
    CHECK(rep.lambda_min == doctest::Approx(-1.990087634125006).epsilon(1e-8));
    CHECK(rep.pairs_ok);      // the ruling is monotone ...
    CHECK(rep.pointwise_ok);  // ... and 2a' - b'^2 = 4 > 0 everywhere
    CHECK(rep.eig_residual < 1e-10);
    CHECK(rep.factorizations > 0);

    auto form = assemble_form(p, w);
    double mass = 0.0;
    const double rq = pencil_rayleigh(form, w, rep.witness, &mass);
    CHECK(mass > 0.0);
    CHECK(rq == doctest::Approx(rep.lambda_min).epsilon(1e-12));
}

TEST_CASE("flow-extracted fan ruling reproduces the synthetic eigenvalue") {
    auto g = catalog_graph(catalog_entry("hyperbolic-fan"), 201, 201);
    auto zeta = linspace(-1.0, 1.0, 41);
    auto flow = integrate_flow(g, 0.0, zeta, TimeSpan{-1.0, 1.0, 41});
    auto profile = extract_ruling(flow, g);

    FormWindow w{-20.0, 20.0, 201, -1.0, 1.0, 41};
    auto rep = stability_verdict(profile, w);
    CHECK(rep.verdict == "unstable");
    CHECK(rep.lambda_min == doctest::Approx(-1.990087634125006).epsilon(1e-6));
    CHECK(rep.pairs_ok);
    CHECK(rep.pointwise_ok);
}

TEST_CASE("vanishing Jacobian inside the window stops the assembly") {
    auto p = shear_profile(41);  // h = t/sqrt(zeta) + 1 crosses zero at t = -sqrt(zeta)
    FormWindow bad{-2.0, 1.0, 61, 1.2, 1.8, 25};

    CHECK_THROWS_WITH_AS(assemble_form(p, bad), doctest::Contains("folds"), std::domain_error);

    auto rep = stability_verdict(p, bad);
    CHECK(rep.verdict == "degenerate");
    CHECK(std::isnan(rep.lambda_min));
    CHECK(rep.note.find("Jacobian") != std::string::npos);
    CHECK_FALSE(rep.pairs_ok);
    CHECK_FALSE(rep.pointwise_ok);
}

TEST_CASE("the same shear profile is stable on a window where h stays positive") {
    auto p = shear_profile(41);
    FormWindow safe{-0.6, 1.5, 85, 1.2, 1.8, 25};
    auto rep = stability_verdict(p, safe);

    CHECK(rep.verdict == "stable-on-window");
    CHECK(rep.lambda_min == doctest::Approx(0.2827634720167131).epsilon(1e-8));
    // Window stability does not rescue the failed ruling discriminants.
    CHECK_FALSE(rep.pairs_ok);
    CHECK_FALSE(rep.pointwise_ok);
}

TEST_CASE("unstable witness pushed back to graph coordinates has negative second variation") {
    auto p = fan_profile(41);
    FormWindow w{-2.5, 2.5, 81, -0.5, 0.5, 33};
    auto form = assemble_form(p, w);
    auto rep = min_eigenvalue(form, w);
    REQUIRE(rep.lambda_min < -1.0);

    // Fan flow map: (t, zeta) -> (eta, tau) = (t, zeta (1 + t^2)).
    auto g = catalog_graph(catalog_entry("hyperbolic-fan"), 241, 241);
    GridPerturbation::CoordinateMap map = [](double eta, double tau) {
        return std::pair<double, double>{eta, tau / (1.0 + eta * eta)};
    };
    const double tau_max = 0.5 * (1.0 + 2.5 * 2.5);
    GridPerturbation witness(linspace(-2.5, 2.5, 81), linspace(-0.5, 0.5, 33), rep.witness, map,
                             Rect{-2.5, 2.5, -tau_max, tau_max}, 1e-5);

    QuadratureOptions opt{3, 256, 4};
    auto ii = second_variation(g, witness, opt);
    CHECK(ii.value < -1e-3);  // measured -2.7e-3; sign is the point here
}

TEST_CASE("hardy quotient on the symmetric window matches the arctangent oracle") {
    // For h = t^2 + 1 the substitution t = tan(s) turns R(phi) into the plain
    // Dirichlet quotient on |s| < atan(L), so inf R = (pi / (2 atan L))^2.
    auto res = hardy_rayleigh(2.0, 0.0, 20.0, 4000);
    const double oracle = std::pow(M_PI / (2.0 * std::atan(20.0)), 2.0);

    CHECK(res.rigidity_rhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(res.rayleigh > oracle);
    CHECK(res.rayleigh < oracle + 1e-4);  // measured gap 6.1e-6 at n = 4000
    CHECK(res.rayleigh > res.rigidity_rhs);
    CHECK(res.eig_residual < 1e-10);

    CHECK(res.t.front() == doctest::Approx(-20.0));
    CHECK(res.t.back() == doctest::Approx(20.0));
    CHECK(res.witness.front() == 0.0);
    CHECK(res.witness.back() == 0.0);
}

TEST_CASE("hardy quotient is invariant under shifting the weight and the window together") {
    const double c = 0.7;
    auto base = general_hardy(2.0, 0.0, 1.0, -5.0, 5.0, 800);
    auto moved = general_hardy(2.0, 2.0 * c, c * c + 1.0, -5.0 - c, 5.0 - c, 800);

    CHECK(std::abs(base.rayleigh - moved.rayleigh) < 1e-10 * (1.0 + std::abs(base.rayleigh)));
    CHECK(base.rigidity_rhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moved.rigidity_rhs == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hardy quotient decreases under nested refinement and stays above the line bound") {
    auto r400 = hardy_rayleigh(2.0, 0.0, 20.0, 400);
    auto r800 = hardy_rayleigh(2.0, 0.0, 20.0, 800);
    auto r1600 = hardy_rayleigh(2.0, 0.0, 20.0, 1600);

    CHECK(r400.rayleigh >= r800.rayleigh);
    CHECK(r800.rayleigh >= r1600.rayleigh);
    CHECK(r1600.rayleigh > 1.0);
}

TEST_CASE("window minima straddle the rigidity threshold uniformly in B^2 / 2A") {
    // rhs = (2A - B^2)/4 is the whole-line infimum; a long window should sit
    // above it by a vanishing margin.  Measured relative gaps at L = 40,
    // n = 8000: 1.6e-2, 1.2e-2, 7.6e-3, 9.3e-4 for ratios 0, .25, .5, .9.
    for (double ratio : {0.0, 0.25, 0.5, 0.9}) {
        const double B = 2.0 * std::sqrt(ratio);
        auto res = hardy_rayleigh(2.0, B, 40.0, 8000);
        const double rhs = (4.0 - B * B) / 4.0;
        CAPTURE(ratio);
        CHECK(res.rigidity_rhs == doctest::Approx(rhs).epsilon(1e-12));
        CHECK(res.rayleigh > rhs);
        CHECK(res.rayleigh - rhs < 0.05 * (1.0 + rhs));
    }
}

TEST_CASE("degenerate weight B^2 = 2A still gives a nonnegative quotient off the zero") {
    // h = (t + 1)^2 vanishes at t = -1; on a window to its right the quotient
    // is positive and the line bound degenerates to zero.
    auto res = general_hardy(2.0, 2.0, 1.0, -0.9, 20.0, 4000);
    CHECK(res.rigidity_rhs == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(res.rayleigh > 0.0);
}

TEST_CASE("hardy rejects windows where the weight is not strictly positive") {
    // h = (t + 1)^2 touches zero at t = -1, inside both windows.
    CHECK_THROWS_AS(hardy_rayleigh(2.0, 2.0, 1.0, 100), std::domain_error);
    CHECK_THROWS_AS(hardy_rayleigh(2.0, 2.0, 2.0, 100), std::domain_error);
    // h = t^2 + 5t + 1 goes negative between its real roots.
    CHECK_THROWS_AS(hardy_rayleigh(2.0, 5.0, 3.0, 100), std::domain_error);

    CHECK_THROWS_AS(hardy_rayleigh(2.0, 0.0, 20.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(hardy_rayleigh(2.0, 0.0, 0.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(general_hardy(std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0, -1.0, 1.0,
                                  100),
                    std::invalid_argument);
}

TEST_CASE("eigensolver reproduces the tridiagonal reference pencil") {
    const int n = 50;
    std::vector<Eigen::Triplet<double>> tq, tm;
    for (int i = 0; i < n; ++i) {
        tq.emplace_back(i, i, 2.0);
        if (i + 1 < n) {
            tq.emplace_back(i, i + 1, -1.0);
            tq.emplace_back(i + 1, i, -1.0);
        }
        tm.emplace_back(i, i, 1.0);
    }
    Eigen::SparseMatrix<double> Q(n, n), M(n, n);
    Q.setFromTriplets(tq.begin(), tq.end());
    M.setFromTriplets(tm.begin(), tm.end());

    auto pair = smallest_eigenpair(Q, M);
    const double exact = 2.0 * (1.0 - std::cos(M_PI / (n + 1)));
    CHECK(pair.lambda == doctest::Approx(exact).epsilon(1e-12));
    CHECK(pair.residual < 1e-12);
    CHECK(pair.x.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pair.x.dot(Q * pair.x) == doctest::Approx(pair.lambda).epsilon(1e-12));

    Eigen::SparseMatrix<double> Z(n, n);  // the zero matrix is not a mass matrix
    CHECK_THROWS_AS(smallest_eigenpair(Q, Z), std::invalid_argument);
}
