#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qgpatch/errors.hpp"
#include "qgpatch/specfun.hpp"

using namespace qgpatch::specfun;
using oracle::pi;

TEST_CASE("pochhammer small cases") {
    CHECK(pochhammer(3.0, 0) == 1.0);
    CHECK(pochhammer(3.0, 4) == 360.0);
    CHECK(pochhammer(0.5, 3) == doctest::Approx(1.875).epsilon(1e-15));
    CHECK(std::isinf(pochhammer(10.0, 400)));
}

TEST_CASE("digamma at integers and half integers") {
    const double euler = 0.57721566490153286061;
    CHECK(digamma(1.0) == doctest::Approx(-euler).epsilon(1e-14));
    CHECK(digamma(0.5) == doctest::Approx(-euler - 2.0 * std::log(2.0)).epsilon(1e-14));
    // psi(x + 1) = psi(x) + 1/x
    for (double x : {0.5, 1.0, 2.5, 7.0, 30.5}) CHECK(digamma(x + 1.0) - digamma(x) == doctest::Approx(1.0 / x).epsilon(1e-13));
    CHECK_THROWS_AS(digamma(0.0), qgpatch::DomainError);
}

TEST_CASE("complete elliptic K against quadrature") {
    // Near k' -> 0 the integrand peaks sharply; use the logarithmic expansion there.
    const double small = 1e-3, L = std::log(4.0 / small);
    CHECK(ellint_K_comp(small) == doctest::Approx(L + 0.25 * small * small * (L - 1.0)).epsilon(1e-12));
    for (double kp : {1.0, 0.6, 0.1}) {
        const double k2 = 1.0 - kp * kp;
        const double ref = oracle::gauss([&](double t) { return 1.0 / std::sqrt(1.0 - k2 * std::sin(t) * std::sin(t)); },
                                         0.0, pi / 2, 200);
        CHECK(ellint_K_comp(kp) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("hyp_Fn examples") {
    const auto r0 = hyp_Fn(1, 0.0);
    CHECK(r0.value == 1.0);
    CHECK(r0.branch == HypBranch::series);
    CHECK(r0.log_part_coefficient == 0.0);

    const auto r = hyp_Fn(3, 0.5);
    const double ref = oracle::hyp2f1_terms(3.5, 3.5, 7.0, 0.5, 200);
    CHECK(std::abs(r.value - ref) <= 1e-13 * ref);
    CHECK(r.branch == HypBranch::series);
    CHECK(r.terms_used > 0);

    CHECK_THROWS_AS(hyp_Fn(1, 1.0), qgpatch::DomainError);
    CHECK_THROWS_AS(hyp_Fn(1, -0.1), qgpatch::DomainError);
    CHECK_THROWS_AS(hyp_Fn(0, 0.3), qgpatch::DomainError);
}

TEST_CASE("hyp_Fn grows at most logarithmically at x -> 1") {
    // Fit value ~ c0 + c1 |ln(1-x)| on [0.9, 0.99], take C = max(|c0|, |c1|).
    for (int n : {1, 2, 5}) {
        double sl = 0, sll = 0, sv = 0, slv = 0;
        int m = 0;
        for (double x = 0.9; x <= 0.99 + 1e-12; x += 0.005, ++m) {
            const double l = -std::log1p(-x), v = hyp_Fn(n, x).value;
            sl += l;
            sll += l * l;
            sv += v;
            slv += l * v;
        }
        const double c1 = (m * slv - sl * sv) / (m * sll - sl * sl), c0 = (sv - c1 * sl) / m;
        const double C = std::max(std::abs(c0), std::abs(c1));
        const auto r = hyp_Fn(n, 0.999);
        CAPTURE(n);
        CAPTURE(c0);
        CAPTURE(c1);
        CHECK(r.value <= C * (1.0 + std::abs(std::log1p(-0.999))));
        CHECK(r.branch != HypBranch::series);
        CHECK(r.log_part_coefficient < 0.0);
    }
}

TEST_CASE("hyp_Fn matches the plain series across branches") {
    for (int n = 1; n <= 40; ++n) {
        for (double x : {0.0, 0.1, 0.4, 0.65, 0.68, 0.7, 0.72, 0.75, 0.85, 0.95}) {
            const auto r = hyp_Fn(n, x);
            CAPTURE(n);
            CAPTURE(x);
            CHECK(r.value >= 1.0);
            CHECK(std::isfinite(r.value));
            if (r.branch == HypBranch::series) CHECK(x <= x_switch);
            else CHECK(x > x_switch);
            if (x <= 0.75) {
                const double ref = oracle::hyp2f1_terms(n + 0.5, n + 0.5, 2.0 * n + 1.0, x, 4000);
                CHECK(std::abs(r.value - ref) <= 1e-12 * ref);
            } else {
                const double ref = oracle::hyp2f1_terms(n + 0.5, n + 0.5, 2.0 * n + 1.0, x, 20000);
                CHECK(std::abs(r.value - ref) <= 1e-11 * ref);
            }
        }
    }
}

TEST_CASE("overlap band: both sides of the switch agree") {
    for (int n : {1, 2, 3, 8, 20}) {
        for (double x = 0.65; x <= 0.75 + 1e-12; x += 0.01) {
            const double ref = hyp2f1_series(n + 0.5, n + 0.5, 2.0 * n + 1.0, x);
            CAPTURE(n);
            CAPTURE(x);
            CHECK(std::abs(hyp_Fn(n, x).value - ref) <= 1e-10 * ref);
        }
    }
}

TEST_CASE("hyp_Fn value stays finite as x -> 1") {
    double prev = 0.0;
    for (double y : {1e-2, 1e-4, 1e-8, 1e-12, 1e-15}) {
        const double v = hyp_Fn_value(3, 1.0 - y, y);
        CHECK(std::isfinite(v));
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("angular_integral examples") {
    CHECK(angular_integral(0, 0.0, 2.0) == doctest::Approx(2.0 * pi).epsilon(1e-15));
    const double r1 = oracle::periodic([](double t) { return std::cos(t) / std::sqrt(2.0 - std::cos(t)); }, 4096);
    CHECK(std::abs(angular_integral(1, 1.0, 2.0) - r1) <= 1e-10);
    const double r2 = oracle::periodic([](double t) { return std::cos(2 * t) * std::pow(1.5 - std::cos(t), -1.5); }, 4096);
    CHECK(std::abs(angular_integral(2, 3.0, 1.5) - r2) <= 1e-10);
    CHECK_THROWS_AS(angular_integral(1, 1.0, 1.0), qgpatch::DomainError);
}

TEST_CASE("angular_integral equals periodic trapezoid on random samples") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> nd(0, 5);
    std::uniform_real_distribution<double> Ad(1.0, 10.0);
    for (int s = 0; s < 10; ++s) {
        const int n = nd(rng);
        const double beta = s % 2 ? 3.0 : 1.0;
        const double A = 1.0 + 1e-3 + (Ad(rng) - 1.0) * (9.0 - 1e-3) / 9.0;
        const double ref = oracle::periodic(
            [&](double t) { return std::cos(n * t) * std::pow(A - std::cos(t), -0.5 * beta); }, 1 << 16);
        CAPTURE(n);
        CAPTURE(beta);
        CAPTURE(A);
        CHECK(std::abs(angular_integral(n, beta, A) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
}
