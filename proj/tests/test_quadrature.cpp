#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hardyid/quadrature.hpp"

using namespace hardyid;

namespace {
std::vector<Complex> sample(double (*f)(double), double a, double b, std::size_t n) {
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = Complex{f(a + (b - a) * double(i) / double(n - 1)), 0.0};
    return v;
}
double sq(double t) { return t * t; }
}  // namespace

TEST_CASE("constants integrate exactly") {
    const std::vector<Complex> ones(21, Complex{1.0, 0.0});
    CHECK(std::abs(integrate(ones, 0.1, QuadRule::trapezoid) - 2.0) < 1e-14);
    CHECK(std::abs(integrate(ones, 0.1, QuadRule::simpson) - 2.0) < 1e-14);
}

TEST_CASE("Simpson is exact for quadratics") {
    const auto v = sample(sq, 0.0, 1.0, 101);
    CHECK(std::abs(integrate(v, 0.01, QuadRule::simpson) - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("trapezoid error carries the Euler-Maclaurin term") {
    // for t^2 every subinterval contributes h^3/6, so the composite value is
    // exactly 1/3 + h^2/6
    const auto v = sample(sq, 0.0, 1.0, 101);
    CHECK(std::abs(integrate(v, 0.01, QuadRule::trapezoid) - (1.0 / 3.0 + 1e-4 / 6.0)) < 1e-12);
}

TEST_CASE("sample count preconditions") {
    CHECK_THROWS_AS(integrate(std::vector<Complex>(1), 0.1, QuadRule::trapezoid),
                    BadSampleCount);
    CHECK_THROWS_AS(integrate(std::vector<Complex>(4), 0.1, QuadRule::simpson), BadSampleCount);
    CHECK_THROWS_AS(integrate(std::vector<Complex>(2), 0.1, QuadRule::simpson), BadSampleCount);
}

TEST_CASE("linearity") {
    std::vector<Complex> u(33), v(33);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = Complex{std::sin(0.2 * double(i)), 0.1 * double(i)};
        v[i] = Complex{std::cos(0.3 * double(i)), -0.05 * double(i)};
    }
    const Complex alpha{1.3, -0.4}, beta{-0.7, 2.1};
    std::vector<Complex> combo(33);
    for (std::size_t i = 0; i < u.size(); ++i) combo[i] = alpha * u[i] + beta * v[i];
    for (const auto rule : {QuadRule::trapezoid, QuadRule::simpson}) {
        const Complex lhs = integrate(combo, 0.05, rule);
        const Complex rhs =
            alpha * integrate(u, 0.05, rule) + beta * integrate(v, 0.05, rule);
        CHECK(std::abs(lhs - rhs) < 1e-14);
    }
}

TEST_CASE("convergence orders under grid doubling") {
    const auto err = [](std::size_t n, QuadRule rule) {
        std::vector<Complex> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = double(i) / double(n - 1);
            v[i] = Complex{std::exp(t) * std::sin(3.0 * t), 0.0};
        }
        const double exact = (std::exp(1.0) * (std::sin(3.0) - 3.0 * std::cos(3.0)) + 3.0) / 10.0;
        return std::abs(integrate(v, 1.0 / double(n - 1), rule) - exact);
    };
    const double t_ratio = err(101, QuadRule::trapezoid) / err(201, QuadRule::trapezoid);
    CHECK(t_ratio > 3.5);
    CHECK(t_ratio < 4.5);
    const double s_ratio = err(101, QuadRule::simpson) / err(201, QuadRule::simpson);
    CHECK(s_ratio > 13.0);
    CHECK(s_ratio < 19.0);
}

TEST_CASE("2-D tensor product rules") {
    SECTION("constant over the unit square") {
        Eigen::MatrixXcd ones = Eigen::MatrixXcd::Constant(11, 11, Complex{1.0, 0.0});
        CHECK(std::abs(integrate2d(ones, 0.1, QuadRule::trapezoid) - 1.0) < 1e-14);
        CHECK(std::abs(integrate2d(ones, 0.1, QuadRule::simpson) - 1.0) < 1e-14);
    }
    SECTION("separable integrands factor exactly") {
        const std::size_t n = 41;
        const double dt = 1.0 / double(n - 1);
        std::vector<Complex> f(n), g(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = double(i) * dt;
            f[i] = Complex{std::sin(2.0 * t) + 0.3, 0.2 * t};
            g[i] = Complex{std::cos(t), -t};
        }
        Eigen::MatrixXcd grid(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) grid(r, c) = f[r] * g[c];
        for (const auto rule : {QuadRule::trapezoid, QuadRule::simpson}) {
            const Complex lhs = integrate2d(grid, dt, rule);
            const Complex rhs = integrate(f, dt, rule) * integrate(g, dt, rule);
            CHECK(std::abs(lhs - rhs) < 1e-13);
        }
    }
    SECTION("exp(tau + t) against the closed form") {
        const auto error_at = [](std::size_t n) {
            const double dt = 1.0 / double(n - 1);
            Eigen::MatrixXcd grid(n, n);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c)
                    grid(r, c) = std::exp(Complex{double(r) * dt + double(c) * dt, 0.0});
            const double exact = (std::exp(1.0) - 1.0) * (std::exp(1.0) - 1.0);
            return std::abs(integrate2d(grid, dt, QuadRule::simpson) - exact);
        };
        // tensor-product Simpson error is 2 (e-1) delta_1d with
        // delta_1d <= e h^4 / 180, so ~3.3e-10 at h = 0.01
        CHECK(error_at(101) < 5e-10);
        CHECK(error_at(201) < 1e-10);
    }
}
