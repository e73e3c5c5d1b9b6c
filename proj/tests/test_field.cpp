#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <igstab/bump.hpp>
#include <igstab/catalog.hpp>
#include <igstab/field.hpp>
#include <igstab/grid.hpp>
#include <igstab/util.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <vector>

using namespace igstab;

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("pairwise_sum matches exact sums and beats naive accumulation order") {
    std::vector<double> ones(1000);
    for (int k = 0; k < 1000; ++k) ones[k] = k + 1.0;
    CHECK(pairwise_sum(ones) == 500500.0);

    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
    CHECK(pairwise_sum(std::vector<double>{3.25}) == 3.25);

    // 10^5 copies of 0.1: pairwise error stays within a few ulps of 1e4,
    // at least as good as the naive left-to-right loop.
    std::vector<double> tenths(100000, 0.1);
    double naive = 0.0;
    for (double x : tenths) naive += x;
    CHECK(std::fabs(pairwise_sum(tenths) - 1e4) <= std::fabs(naive - 1e4));
    CHECK(pairwise_sum(tenths) == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("linspace endpoints are exact") {
    auto xs = linspace(0.0, 1.0, 5);
    REQUIRE(xs.size() == 5);
    CHECK(xs[0] == 0.0);
    CHECK(xs[1] == 0.25);
    CHECK(xs[2] == 0.5);
    CHECK(xs[3] == 0.75);
    CHECK(xs[4] == 1.0);

    auto ys = linspace(-3.0, 7.0, 101);
    CHECK(ys.front() == -3.0);
    CHECK(ys.back() == 7.0);

    CHECK(linspace(2.5, 9.0, 1) == std::vector<double>{2.5});
}

TEST_CASE("difference stencils are exact on quadratics, including nonuniform spacing") {
    auto f = [](double x) { return 3.0 * x * x - 2.0 * x + 5.0; };
    // Nodes 0, 0.3, 0.7: derivative at the middle node is 6*0.3 - 2 = -0.2.
    const double d_mid = central_derivative(0.0, 0.3, 0.7, f(0.0), f(0.3), f(0.7));
    CHECK(d_mid == doctest::Approx(-0.2).epsilon(1e-13));
    // One-sided at the first node: derivative is -2.
    const double d_lo = one_sided_derivative(0.0, 0.3, 0.7, f(0.0), f(0.3), f(0.7));
    CHECK(d_lo == doctest::Approx(-2.0).epsilon(1e-13));
}

TEST_CASE("format_sig round-trips doubles bit-exactly") {
    for (double x : {1.0 / 3.0, -2.718281828459045e-7, 6.02214076e23, 0.1}) {
        const double back = std::stod(format_sig(x));
        CHECK(back == x);
    }
}

TEST_CASE("GridSpec validation rejects degenerate grids") {
    Rect r{0.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS((GridSpec{r, 1, 8}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{r, 8, 1}.validate()), std::invalid_argument);
    Rect flat{0.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS((GridSpec{flat, 8, 8}.validate()), std::invalid_argument);

    GridSpec ok{r, 5, 9};
    ok.validate();
    CHECK(ok.eta(0) == 0.0);
    CHECK(ok.eta(4) == 1.0);
    CHECK(ok.h_eta() == doctest::Approx(0.25));
    CHECK(ok.h_tau() == doctest::Approx(0.125));
}

TEST_CASE("bilinear interpolation reproduces bilinear functions exactly") {
    Rect r{0.0, 2.0, -1.0, 1.0};
    GridSpec spec{r, 5, 5};
    auto f = [](double e, double t) { return 3.0 + 2.0 * e - t + 0.5 * e * t; };
    std::vector<double> vals(25);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) vals[i * 5 + j] = f(spec.eta(i), spec.tau(j));
    auto field = ScalarField::from_values(spec, std::move(vals));

    CHECK(field.eval(0.37, 0.21) == doctest::Approx(f(0.37, 0.21)).epsilon(1e-14));
    CHECK(field.eval(1.93, -0.99) == doctest::Approx(f(1.93, -0.99)).epsilon(1e-14));
    CHECK(field.eval(0.0, -1.0) == doctest::Approx(f(0.0, -1.0)).epsilon(1e-14));
    CHECK(field.eval(2.0, 1.0) == doctest::Approx(f(2.0, 1.0)).epsilon(1e-14));

    CHECK_THROWS_AS(field.eval(2.1, 0.0), std::domain_error);
    CHECK_THROWS_AS(field.eval(0.0, -1.0001), std::domain_error);
}

TEST_CASE("NaN nodes are rejected unless they sit on a declared singular line") {
    Rect r{-1.0, 1.0, -1.0, 1.0};
    GridSpec spec{r, 5, 5};
    std::vector<double> vals(25, 1.0);
    vals[2 * 5 + 3] = kNaN;  // interior node off any line
    CHECK_THROWS_AS(ScalarField::from_values(spec, std::vector<double>(vals)), std::invalid_argument);

    // Same NaN position is fine when tau = 0.5 is declared singular.
    auto ok = ScalarField::from_values(spec, std::vector<double>(vals), {0.5});
    CHECK(ok.at(2, 3) != ok.at(2, 3));  // NaN preserved at the node
}

TEST_CASE("stencils shift away from a singular line and extrapolate one-sided") {
    // Values are tau itself, with the tau = 0 column knocked out.  Linear data
    // makes the one-sided extrapolation exact, so the shift is observable.
    Rect r{-1.0, 1.0, -1.0, 1.0};
    GridSpec spec{r, 5, 5};
    std::vector<double> vals(25);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) vals[i * 5 + j] = spec.tau(j);
    for (int i = 0; i < 5; ++i) vals[i * 5 + 2] = kNaN;  // tau = 0
    auto field = ScalarField::from_values(spec, std::move(vals), {0.0});

    CHECK(field.eval(0.3, 0.2) == doctest::Approx(0.2).epsilon(1e-12));    // above the line
    CHECK(field.eval(0.3, -0.2) == doctest::Approx(-0.2).epsilon(1e-12));  // below the line
    CHECK(std::isfinite(field.eval(0.3, 0.0)));                            // on the line: one-sided value
    CHECK(field.eval(-0.9, 0.45) == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("field CSV round trip preserves values and infers singular lines") {
    Rect r{-1.0, 1.0, -1.0, 1.0};
    GridSpec spec{r, 9, 9};
    auto src = AnalyticSource{[](double e, double t) { return std::sin(3 * e) * std::cos(2 * t) + e; }, {}, {}};
    auto field = ScalarField::from_function(spec, src);

    TempFile tmp("igstab_roundtrip.csv");
    write_field_csv(field, tmp.path);
    auto back = read_field_csv(tmp.path);
    REQUIRE(back.spec().n_eta == 9);
    REQUIRE(back.spec().n_tau == 9);
    CHECK(back.spec().rect.eta_min == r.eta_min);
    CHECK(back.spec().rect.tau_max == r.tau_max);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) CHECK(back.at(i, j) == field.at(i, j));

    // A whole-NaN column is read back as a singular tau line, so derivative
    // fields written next to their kink survive the round trip.
    std::vector<double> vals(81);
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) vals[i * 9 + j] = (spec.tau(j) == 0.0) ? kNaN : 1.0 / std::sqrt(std::fabs(spec.tau(j)));
    auto singular = ScalarField::from_values(spec, std::move(vals), {0.0});
    TempFile tmp2("igstab_singular.csv");
    write_field_csv(singular, tmp2.path);
    auto back2 = read_field_csv(tmp2.path);
    CHECK(back2.at(0, 4) != back2.at(0, 4));  // NaN preserved
    CHECK(back2.eval(0.1, 0.3) == doctest::Approx(singular.eval(0.1, 0.3)).epsilon(1e-14));
}

TEST_CASE("read_field_csv rejects malformed input") {
    TempFile tmp("igstab_bad.csv");
    {
        FILE* f = std::fopen(tmp.path.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs("eta,tau,value\n0,0,1\n0,1,2\n1,0,3\n", f);  // missing (1,1)
        std::fclose(f);
    }
    CHECK_THROWS_AS(read_field_csv(tmp.path), std::runtime_error);
    CHECK_THROWS_AS(read_field_csv("/nonexistent/igstab.csv"), std::runtime_error);
}

TEST_CASE("build_graph_function wires analytic derivatives and the intrinsic gradient") {
    auto entry = catalog_entry("hyperbolic-fan");
    auto g = catalog_graph(entry, 61, 61);
    // f = 2 eta tau / (1 + eta^2): intrinsic gradient is 2 tau / (1 + eta^2).
    const double e = 0.7, t = 1.3;
    CHECK(g.f_at(e, t) == doctest::Approx(2 * e * t / (1 + e * e)).epsilon(1e-14));
    CHECK(g.d_tau_at(e, t) == doctest::Approx(2 * e / (1 + e * e)).epsilon(1e-14));
    CHECK(g.grad_at(e, t) == doctest::Approx(2 * t / (1 + e * e)).epsilon(1e-14));
    // Identity grad = d_eta + f d_tau holds pointwise.
    CHECK(g.grad_at(e, t) == doctest::Approx(g.d_eta_at(e, t) + g.f_at(e, t) * g.d_tau_at(e, t)).epsilon(1e-12));
}

TEST_CASE("sampled graphs recover derivatives at second order") {
    Rect r{-3.0, 3.0, -4.0, 4.0};
    GridSpec spec{r, 101, 101};
    std::vector<double> vals(101 * 101);
    for (int i = 0; i < 101; ++i)
        for (int j = 0; j < 101; ++j) vals[i * 101 + j] = std::sin(spec.tau(j));
    auto field = ScalarField::from_values(spec, std::move(vals));
    auto g = build_graph_function(std::move(field));

    // d_tau is a centered difference of sin: error O(h^2) with h = 0.08.
    CHECK(g.d_tau_at(0.0, 1.0) == doctest::Approx(std::cos(1.0)).epsilon(2e-3));
    CHECK(g.d_eta_at(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    // At a node the gradient identity is exact by construction.
    const double e0 = spec.eta(50), t0 = spec.tau(60);
    CHECK(g.grad_at(e0, t0) ==
          doctest::Approx(g.d_eta_at(e0, t0) + g.f_at(e0, t0) * g.d_tau_at(e0, t0)).epsilon(1e-13));
}

TEST_CASE("young catalog entry carries the two-sided square root structure") {
    auto g = catalog_graph(catalog_entry("young"), 121, 121);
    CHECK(g.f_at(0.5, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(g.f_at(0.5, -1.0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(g.d_tau_at(0.5, 0.25) == doctest::Approx(2.0).epsilon(1e-14));  // 1/sqrt(0.25)
    CHECK(g.grad_at(0.3, 2.25) == doctest::Approx(2.0).epsilon(1e-14));
    // Below the line f = -2 sqrt(-tau), d_tau f = 1/sqrt(-tau): gradient -2.
    CHECK(g.grad_at(0.3, -2.25) == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("graph_embed places the graph with the half-commutator offset") {
    auto g = catalog_graph(plane_entry(2.0, -1.0), 31, 31);
    Vec3 p = graph_embed(g, 0.3, 0.7);
    const double f = 2.0 * 0.3 - 1.0;  // -0.4
    CHECK(p.x == doctest::Approx(f).epsilon(1e-14));
    CHECK(p.y == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(p.z == doctest::Approx(0.7 - 0.5 * 0.3 * f).epsilon(1e-14));
}

TEST_CASE("plane_fit recovers affine graphs exactly and flags curved ones") {
    auto flat = catalog_graph(plane_entry(2.0, -1.0), 41, 41);
    auto fit = plane_fit(flat.f);
    CHECK(fit.a == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(fit.b == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(fit.residual < 1e-12);

    auto curved = catalog_graph(catalog_entry("young"), 41, 41);
    CHECK(plane_fit(curved.f).residual > 0.1);
}

TEST_CASE("tensor bumps are compactly supported with analytic derivatives") {
    TestFunction phi(0.25, -0.5, 0.8, 1.2, 1.75);
    CHECK(phi.value(0.25, -0.5) == doctest::Approx(1.75).epsilon(1e-14));
    CHECK(phi.sup_norm() == doctest::Approx(1.75).epsilon(1e-14));

    Rect box = phi.support();
    CHECK(box.eta_min == doctest::Approx(0.25 - 0.8));
    CHECK(box.tau_max == doctest::Approx(-0.5 + 1.2));
    // Vanishes on and outside the support boundary.
    CHECK(phi.value(0.25 + 0.8, -0.5) == 0.0);
    CHECK(phi.value(0.25, -0.5 - 1.2) == 0.0);
    CHECK(phi.value(5.0, 5.0) == 0.0);
    CHECK(phi.d_eta(5.0, 5.0) == 0.0);

    // Analytic derivatives agree with central differences well inside the box.
    const double h = 1e-6;
    for (auto [e, t] : {std::pair{0.4, -0.2}, std::pair{-0.1, 0.1}, std::pair{0.7, -1.1}}) {
        const double de_fd = (phi.value(e + h, t) - phi.value(e - h, t)) / (2 * h);
        const double dt_fd = (phi.value(e, t + h) - phi.value(e, t - h)) / (2 * h);
        CHECK(phi.d_eta(e, t) == doctest::Approx(de_fd).epsilon(1e-5));
        CHECK(phi.d_tau(e, t) == doctest::Approx(dt_fd).epsilon(1e-5));
    }

    CHECK_THROWS_AS(TestFunction(0.0, 0.0, -1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TestFunction(0.0, 0.0, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("grid perturbations interpolate nodal coefficients inside their box") {
    // Single interior hat: value 1 at the center node, 0 at all others.
    std::vector<double> s = linspace(-1.0, 1.0, 5);
    std::vector<double> z = linspace(-1.0, 1.0, 5);
    RowMatrix coeff(5, 5);
    coeff(2, 2) = 1.0;
    GridPerturbation hat(s, z, coeff, {}, Rect{-1.0, 1.0, -1.0, 1.0}, 1e-6);
    CHECK(hat.value(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hat.value(0.25, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(hat.value(1.0, 1.0) == 0.0);
    CHECK(hat.value(3.0, 0.0) == 0.0);  // outside the box
    CHECK(hat.sup_norm() == doctest::Approx(1.0));

    const double h = 1e-6;
    const double d_fd = (hat.value(0.1 + h, 0.2) - hat.value(0.1 - h, 0.2)) / (2 * h);
    CHECK(hat.d_eta(0.1, 0.2) == doctest::Approx(d_fd).epsilon(1e-6));
}
