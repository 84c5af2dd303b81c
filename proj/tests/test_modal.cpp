#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "heatctl/errors.hpp"
#include "heatctl/modal.hpp"
#include "oracles.hpp"

using namespace heatctl;
using std::numbers::pi;

TEST_CASE("eigenvalues and eigenfunctions") {
    CHECK(eigenvalue(0) == 0.0);
    CHECK(eigenvalue(1) == doctest::Approx(9.8696044).epsilon(1e-8));
    CHECK(eigenvalue(3) == 9 * pi * pi);
    CHECK_THROWS_AS((void)eigenvalue(-1), DomainError);

    CHECK(eigenfunction(0, 0.7) == 1.0);
    CHECK(eigenfunction(1, 0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(eigenfunction(2, 0.5) == doctest::Approx(-std::sqrt(2.0)));
    CHECK_THROWS_AS((void)eigenfunction(1, 1.2), DomainError);
    CHECK_THROWS_AS((void)eigenfunction(1, -0.1), DomainError);

    CHECK(input_coeff(0) == 1.0);
    CHECK(input_coeff(3) == doctest::Approx(-std::sqrt(2.0)));
    CHECK(input_coeff(4) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("orthonormality of the first modes") {
    // library quadrature against the delta_nm identity
    for (int n = 0; n <= 20; ++n) {
        const auto row = project_on_modes([n](double x) { return eigenfunction(n, x); }, 0.0, 1.0, 20);
        for (int m = 0; m <= 20; ++m) CHECK(std::abs(row[m] - (n == m ? 1.0 : 0.0)) < 1e-10);
    }
    // and the oracle integrator on a few pairs
    for (auto [n, m] : std::vector<std::pair<int, int>>{{0, 0}, {3, 3}, {7, 2}, {20, 19}, {20, 20}}) {
        const double v = oracle::integrate([=](double x) { return oracle::phi(n, x) * oracle::phi(m, x); }, 0, 1);
        CHECK(std::abs(v - (n == m ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("indicator coefficients: closed form against quadrature") {
    const OutputWeightSpec spec{IndicatorWeight{0.3, 0.9}, std::nullopt};
    const auto c = output_coeffs(spec, 50);
    REQUIRE(c.size() == 51);
    CHECK(c[0] == doctest::Approx(0.6));
    CHECK(c[1] == doctest::Approx(-0.22508).epsilon(1e-4));
    for (int n = 0; n <= 50; ++n) {
        const double q = oracle::integrate([n](double x) { return oracle::phi(n, x); }, 0.3, 0.9);
        CHECK(std::abs(c[n] - q) < 1e-10);
    }
    const auto full = output_coeffs(OutputWeightSpec{IndicatorWeight{0.0, 1.0}, std::nullopt}, 3);
    CHECK(full[0] == doctest::Approx(1.0));
    CHECK(std::abs(full[1]) < 1e-15);
}

TEST_CASE("tabulated weight reproduces the indicator") {
    const OutputWeightSpec ind{IndicatorWeight{0.3, 0.9}, std::nullopt};
    const OutputWeightSpec tab{TableWeight{{{0.3, 1.0}, {0.9, 1.0}}}, std::nullopt};
    const auto a = output_coeffs(ind, 40);
    const auto b = output_coeffs(tab, 40);
    for (int n = 0; n <= 40; ++n) CHECK(std::abs(a[n] - b[n]) < 1e-10);
    CHECK(weight_norm_sq(tab) == doctest::Approx(0.6).epsilon(1e-12));

    // hat function: quadrature vs oracle
    const OutputWeightSpec hat{TableWeight{{{0.2, 0.0}, {0.5, 2.0}, {0.8, 0.0}}}, std::nullopt};
    const auto h = output_coeffs(hat, 30);
    auto w = [](double x) { return x < 0.2 || x > 0.8 ? 0.0 : (x < 0.5 ? (x - 0.2) / 0.3 * 2 : (0.8 - x) / 0.3 * 2); };
    for (int n : {0, 1, 5, 17, 30}) {
        const double ref = oracle::integrate([&](double x) { return w(x) * oracle::phi(n, x); }, 0.2, 0.8);
        CHECK(std::abs(h[n] - ref) < 1e-10);
    }
}

TEST_CASE("weight validation") {
    CHECK_THROWS_AS(OutputWeightSpec({IndicatorWeight{0.5, 0.5}, std::nullopt}).validate(), PreconditionError);
    CHECK_THROWS_AS(OutputWeightSpec({IndicatorWeight{-0.1, 0.5}, std::nullopt}).validate(), PreconditionError);
    CHECK_THROWS_AS(OutputWeightSpec({TableWeight{{{0.5, 1.0}, {0.4, 1.0}}}, std::nullopt}).validate(),
                    PreconditionError);
    CHECK_THROWS_AS(OutputWeightSpec({TableWeight{{{0.5, 1.0}, {1.4, 1.0}}}, std::nullopt}).validate(),
                    PreconditionError);
    CHECK_NOTHROW(OutputWeightSpec({TableWeight{{{0.0, 1.0}, {1.0, 1.0}}}, std::nullopt}).validate());
}

TEST_CASE("tail norm of the measurement weight") {
    const OutputWeightSpec spec{IndicatorWeight{0.3, 0.9}, std::nullopt};
    CHECK(tail_norm_sq(spec, 0) == doctest::Approx(0.24).epsilon(1e-12));
    const double t10 = tail_norm_sq(spec, 10);
    CHECK(t10 > 0.0);
    CHECK(t10 < 0.24);

    // oracle: partial sums of the closed form
    double acc = 0.36;
    for (int n = 1; n <= 10; ++n) {
        const double cn = std::sqrt(2.0) * (std::sin(n * pi * 0.9) - std::sin(n * pi * 0.3)) / (n * pi);
        acc += cn * cn;
    }
    CHECK(t10 == doctest::Approx(0.6 - acc).epsilon(1e-10));

    double prev = tail_norm_sq(spec, 0);
    for (int N = 1; N <= 200; ++N) {
        const double t = tail_norm_sq(spec, N);
        CHECK(t <= prev);
        prev = t;
    }
    CHECK(prev < 2e-3);

    const OutputWeightSpec finite{CoeffWeight{{1.0}}, 1.0};
    CHECK(tail_norm_sq(finite, 5) == 0.0);
}

TEST_CASE("tail bound on the input series") {
    CHECK(tail_input_bound(10) == doctest::Approx(0.020264).epsilon(1e-4));
    CHECK(tail_input_bound(1) == doctest::Approx(2 / (pi * pi)));
    CHECK_THROWS_AS((void)tail_input_bound(0), DomainError);
    int violations = 0;
    for (int N = 1; N <= 100; ++N) {
        double s = 0.0;
        for (int n = 5000; n > N; --n) s += input_coeff(n) * input_coeff(n) / eigenvalue(n);
        if (!(s < tail_input_bound(N))) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("controller dimension") {
    CHECK(select_N0(3, 0) == 0);
    CHECK(select_N0(3, 5) == 0);
    CHECK(select_N0(15, 0) == 1);
    CHECK(select_N0(3, 7.5) == 1);
    CHECK(select_N0(0, 0) == 0);
}

TEST_CASE("initial state projection") {
    const std::vector<double> poly{0, 0, 10, -20, 10};
    const auto z = project_initial_polynomial(poly, 10);
    CHECK(z[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    auto f = [](double x) { return 10 * x * x * (1 - x) * (1 - x); };
    for (int n : {1, 2, 3, 8}) {
        const double ref = oracle::integrate([&](double x) { return f(x) * oracle::phi(n, x); }, 0, 1);
        CHECK(std::abs(z[n] - ref) < 1e-12);
    }
    // symmetric about 1/2, so odd modes vanish
    CHECK(std::abs(z[1]) < 1e-13);

    const auto p2 = project_initial([](double x) { return eigenfunction(2, x); }, 6);
    for (int n = 0; n <= 6; ++n) CHECK(std::abs(p2[n] - (n == 2 ? 1.0 : 0.0)) < 1e-10);

    const auto zero = project_initial([](double) { return 0.0; }, 4);
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("modal model invariants") {
    const auto m = make_modal_model(3.0, OutputWeightSpec{IndicatorWeight{0.3, 0.9}, std::nullopt}, 50);
    CHECK(m.truncation == 50);
    REQUIRE(m.lambdas.size() == 51);
    for (int n = 0; n <= 50; ++n) {
        CHECK(m.lambdas[n] == eigenvalue(n));
        CHECK(m.lambdas[n] == doctest::Approx(static_cast<double>(n) * n * pi * pi).epsilon(1e-15));
        CHECK(m.b[n] != 0.0);
        if (n > 0) CHECK(m.lambdas[n] > m.lambdas[n - 1]);
    }
    double bessel = 0.0;
    for (double v : m.c) bessel += v * v;
    CHECK(m.c_norm_sq >= bessel);
    CHECK(m.tail_norm_sq(0) == doctest::Approx(0.24));
}
