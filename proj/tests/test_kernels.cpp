#include <doctest.h>

#include <cmath>
#include <random>

#include "nu_oracle.hpp"
#include "oracles.hpp"
#include "qgpatch/errors.hpp"
#include "qgpatch/kernels.hpp"

using namespace qgpatch;
using namespace qgpatch::kernels;
using oracle::pi;

namespace {

const KernelContext& preset() {
    static const KernelContext ctx = make_context(profiles::make_ellipsoid_sphere_config(1.5, 2.0, 1.0));
    return ctx;
}

double alpha1_oracle(double a, double d1) {
    // s = e^x, integrand decays like e^{-3x/2} and e^{x} at the two ends.
    auto f = [&](double x) {
        const double s = std::exp(x);
        return s / ((a * a + s) * (a * a + s) * std::sqrt(d1 * d1 + s));
    };
    return 0.25 * a * a * d1 * oracle::gauss(f, -60.0, 60.0, 400);
}

}  // namespace

TEST_CASE("R_ij examples") {
    const auto ctx = make_context(profiles::make_ellipsoid_sphere_config(2.0, 2.0, 1.0));
    for (double phi : {0.3, 1.0, 2.0}) CHECK(R_ij(ctx, 1, 1, phi, phi) == doctest::Approx(std::pow(4.0 * std::sin(phi), 2)));
    CHECK(R_ij(ctx, 1, 2, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(R_ij(ctx, 2, 2, 0.0, pi) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("H_n equals the angular double-integral kernel") {
    const auto ctx = make_context(profiles::make_ellipsoid_sphere_config(1.0, 1.0, 0.5));
    auto brute = [&](int i, int j, int n, double phi, double psi) {
        const auto& c = ctx.config;
        const double ri = c.profile(i).r(phi), rj = c.profile(j).r(psi);
        const double dz = c.d(i) * std::cos(phi) - c.d(j) * std::cos(psi);
        const double a0 = (ri - rj) * (ri - rj) + dz * dz;
        const double I = oracle::periodic(
            [&](double eta) { return std::cos(n * eta) / std::sqrt(a0 + 2.0 * ri * rj * (1.0 - std::cos(eta))); }, 1 << 14);
        return std::sin(psi) * rj * I / (4.0 * pi * ri);
    };
    // outer surface is the unit sphere
    const double h = H_n(ctx, 1, 1, 2, pi / 3, pi / 4);
    CHECK(std::abs(h - brute(1, 1, 2, pi / 3, pi / 4)) <= 1e-9 * std::abs(h));
    for (int n : {1, 3, 6})
        for (auto [i, j] : {std::pair{1, 2}, {2, 1}, {2, 2}}) {
            const double v = H_n(ctx, i, j, n, 1.1, 0.7);
            CAPTURE(n);
            CAPTURE(i);
            CAPTURE(j);
            CHECK(std::abs(v - brute(i, j, n, 1.1, 0.7)) <= 1e-9 * std::abs(v));
        }
    CHECK_THROWS_AS(H_n(ctx, 1, 1, 2, 0.5, 0.5), SingularKernelError);
    CHECK(kernel_prefactor(1) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("cross kernels stay away from the log singularity") {
    const auto& ctx = preset();
    const double dbar = ctx.config.validated.interaction_bound_delta_bar;
    REQUIRE(dbar < 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-3, pi - 1e-3);
    for (int s = 0; s < 200; ++s) {
        const double phi = u(rng), psi = u(rng);
        const double x = 4.0 * ctx.config.outer.r(phi) * ctx.config.inner.r(psi) / R_ij(ctx, 1, 2, phi, psi);
        CHECK(x <= dbar + 1e-5);
        CHECK(std::isfinite(H_n(ctx, 1, 2, 3, phi, psi)));
        CHECK(H_n(ctx, 2, 1, 3, psi, phi) >= 0.0);
    }
}

TEST_CASE("H_n strictly decreasing in n") {
    const auto& ctx = preset();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.02, pi - 0.02);
    std::uniform_int_distribution<int> idx(1, 2);
    for (int s = 0; s < 50; ++s) {
        const int i = idx(rng), j = idx(rng);
        double phi = u(rng), psi = u(rng);
        if (i == j && std::abs(phi - psi) < 1e-3) psi = phi + 0.1;
        double prev = H_n(ctx, i, j, 1, phi, psi);
        for (int n = 2; n <= 12; ++n) {
            const double v = H_n(ctx, i, j, n, phi, psi);
            CHECK(v < prev);
            CHECK(v > 0.0);
            prev = v;
        }
    }
}

TEST_CASE("kernel symmetry after dividing out the measure") {
    const auto& ctx = preset();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, pi - 0.05);
    for (int s = 0; s < 40; ++s) {
        const double phi = u(rng), psi = u(rng);
        for (int n : {1, 4})
            for (auto [i, j] : {std::pair{1, 1}, {1, 2}, {2, 2}}) {
                const auto& c = ctx.config;
                const double ri = c.profile(i).r(phi), rj = c.profile(j).r(psi);
                const double a = H_n(ctx, i, j, n, phi, psi) / (std::sin(psi) * rj * rj);
                const double b = H_n(ctx, j, i, n, psi, phi) / (std::sin(phi) * ri * ri);
                CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
            }
    }
}

TEST_CASE("alpha1") {
    CHECK(std::abs(alpha1(1.0, 1.0) - 1.0 / 6.0) <= 1e-15);
    CHECK(std::abs(alpha1(2.0, 2.0) - 1.0 / 6.0) <= 1e-15);
    CHECK(std::abs(alpha1(1.0005, 1.0) - alpha1_oracle(1.0005, 1.0)) <= 1e-12);
    for (auto [a, d1] : {std::pair{1.5, 2.0}, {2.0, 1.5}, {1.2, 1.3}, {5.0, 0.3}}) {
        const double ref = alpha1_oracle(a, d1);
        CHECK(std::abs(alpha1(a, d1) - ref) <= 1e-10 * ref);
    }
    double prev = alpha1(1.0, 1.0);
    for (double a = 2.0; a <= 1024.0; a *= 2.0) {
        const double v = alpha1(a, 1.0);
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("nu matches the ellipsoid-sphere closed forms") {
    for (auto [a, d1, d2] : {std::tuple{1.5, 2.0, 1.0}, {2.0, 1.5, 1.0}, {1.2, 1.3, 1.0}}) {
        const auto ctx = make_context(profiles::make_ellipsoid_sphere_config(a, d1, d2));
        const double Om = 0.1;
        for (int k = 0; k <= 16; ++k) {
            const double phi = pi * k / 16;
            CHECK(std::abs(nu(1, Om, phi, ctx) - closed_form_nu(1, Om, phi, a, d1, d2)) <= 1e-6);
            CHECK(std::abs(nu(2, Om, phi, ctx) - closed_form_nu(2, Om, phi, a, d1, d2)) <= 1e-6);
        }
    }
}

TEST_CASE("single sphere self term is 1/3") {
    const auto ctx = make_context(profiles::make_ellipsoid_sphere_config(2.0, 2.0, 1.0));
    for (double phi : {0.0, 0.01, 0.5, 1.2, pi / 2, 2.9, pi})
        CHECK(std::abs(ctx.config.d1 * kernel_integral(ctx, 1, 1, 1, phi) - 1.0 / 3.0) <= 1e-10);
}

TEST_CASE("hypergeometric nu equals the double-integral definition") {
    const auto& ctx = preset();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.05, pi - 0.05);
    for (int s = 0; s < 5; ++s) {
        const int i = 1 + s % 2;
        const double phi = u(rng), Om = 0.15;
        const double ref = oracle::nu_double_integral(ctx.config, i, Om, phi);
        CAPTURE(i);
        CAPTURE(phi);
        CHECK(std::abs(nu(i, Om, phi, ctx) - ref) <= 1e-8);
    }
}

TEST_CASE("omega window") {
    for (auto [a, d1, d2] : {std::tuple{1.5, 2.0, 1.0}, {2.0, 1.5, 1.0}, {1.2, 1.3, 1.0}}) {
        const auto ctx = make_context(profiles::make_ellipsoid_sphere_config(a, d1, d2));
        const auto w = omega_window(ctx, 256);
        const auto cf = closed_form_window(a, d1, d2);
        CHECK(std::abs(w.omega_bar_1 - cf.omega_bar_1) <= 1e-6);
        CHECK(std::abs(w.omega_bar_2 - cf.omega_bar_2) <= 1e-6);
        CHECK(w.gap == doctest::Approx(w.omega_bar_1 - w.omega_bar_2));
        CHECK(w.gap > 0.0);
        if (d1 > a) CHECK(std::abs(cf.gap - (1.0 / 3.0 - std::pow(d2 / a, 3) / 3.0)) <= 1e-14);

        // nu lower bounds inside the window
        for (double t : {0.1, 0.5, 0.9}) {
            const double Om = w.omega_bar_2 + t * w.gap;
            for (int k = 0; k <= 32; ++k) {
                const double phi = pi * k / 32;
                CHECK(nu(1, Om, phi, ctx) >= w.omega_bar_1 - Om - 1e-8);
                CHECK(nu(2, Om, phi, ctx) >= Om - w.omega_bar_2 - 1e-8);
            }
        }
    }
}

TEST_CASE("well separated family: gap tends to the inner self term") {
    double prev = 0.0;
    for (double d1 : {2.0, 4.0, 8.0, 16.0}) {
        const double a = std::pow(d1, 1.2) * 0.8;
        const auto ctx = make_context(profiles::make_ellipsoid_sphere_config(a, d1, 1.0));
        const double gap = omega_window(ctx, 128).gap;
        CHECK(gap > prev);
        CHECK(gap < 1.0 / 3.0);
        prev = gap;
    }
    CHECK(prev > 1.0 / 3.0 - 1e-3);
}

TEST_CASE("nu_1 is flat at the poles") {
    const auto& ctx = preset();
    double prev = 1.0;
    for (double h : {4e-2, 2e-2, 1e-2, 5e-3}) {
        const double d0 = std::abs(nu(1, 0.2, h, ctx) - nu(1, 0.2, 0.0, ctx)) / h;
        const double dpi = std::abs(nu(1, 0.2, pi - h, ctx) - nu(1, 0.2, pi, ctx)) / h;
        CHECK(d0 < prev);
        CHECK(dpi < prev);
        prev = std::max(d0, dpi);
    }
    CHECK(prev < 1e-2);
}
