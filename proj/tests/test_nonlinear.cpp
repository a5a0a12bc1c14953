#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "qgpatch/bifurcation.hpp"
#include "qgpatch/errors.hpp"
#include "qgpatch/nonlinear.hpp"

using namespace qgpatch;
using namespace qgpatch::nonlinear;
using oracle::pi;

namespace {

const profiles::PatchPairConfig& preset() {
    static const auto c = profiles::make_ellipsoid_sphere_config(1.5, 2.0, 1.0);
    return c;
}

std::shared_ptr<const QuadratureGrid> small_grid() {
    static const auto g = std::make_shared<const QuadratureGrid>(spectral::build_grid(32));
    return g;
}

std::vector<double> smooth(const QuadratureGrid& g, int k, double c0, double c1) {
    std::vector<double> v(g.size());
    for (int i = 0; i < g.size(); ++i) v[i] = std::pow(std::sin(g.nodes[i]), k) * (c0 + c1 * std::cos(2 * g.nodes[i]));
    return v;
}

SurfacePerturbation sample_perturbation(std::shared_ptr<const QuadratureGrid> g, int fold, double amp) {
    SurfacePerturbation f(g, fold);
    f.set_mode(1, fold, smooth(*g, fold, amp, 0.3 * amp));
    f.set_mode(2, fold, smooth(*g, fold, -0.6 * amp, 0.2 * amp));
    f.set_mode(1, 2 * fold, smooth(*g, 2 * fold, 0.4 * amp, 0.0));
    return f;
}

}  // namespace

TEST_CASE("surface perturbation bookkeeping") {
    auto g = small_grid();
    SurfacePerturbation f(g, 3);
    CHECK_THROWS_AS(f.set_mode(1, 4, std::vector<double>(g->size(), 0.0)), DomainError);
    CHECK_THROWS_AS(f.set_mode(3, 3, std::vector<double>(g->size(), 0.0)), DomainError);
    CHECK_THROWS_AS(f.set_mode(1, 3, std::vector<double>(3, 0.0)), DomainError);
    f.set_mode(1, 3, smooth(*g, 3, 0.01, 0.002));
    CHECK(f.max_mode() == 3);
    CHECK(f.equatorially_symmetric());
    CHECK(f.sup_norm() == doctest::Approx(0.012).epsilon(1e-2));
    CHECK(f.scaled(2.0).sup_norm() == doctest::Approx(2.0 * f.sup_norm()));

    // Pole values vanish; interior interpolation reproduces the sampled function.
    double v, dv;
    f.interpolate(1, 3, 0.0, v, dv);
    CHECK(std::abs(v) <= 1e-15);
    f.interpolate(1, 3, pi, v, dv);
    CHECK(std::abs(v) <= 1e-15);
    const double x = 1.1;
    f.interpolate(1, 3, x, v, dv);
    const double exact = std::pow(std::sin(x), 3) * (0.01 + 0.002 * std::cos(2 * x));
    CHECK(v == doctest::Approx(exact).epsilon(1e-6));

    SurfacePerturbation a(g, 1);
    std::vector<double> skew(g->size());
    for (int i = 0; i < g->size(); ++i) skew[i] = std::sin(g->nodes[i]) * std::cos(g->nodes[i]);
    a.set_mode(1, 1, skew);
    CHECK_FALSE(a.equatorially_symmetric());
}

TEST_CASE("stream function closed forms of the unperturbed pair") {
    const auto& cfg = preset();
    SurfacePerturbation zero(small_grid());
    NonlinearOptions opt;
    opt.cross_level = 6;
    const auto ec = kernels::ellipsoid_coefficients(1.5, 2.0);
    double err = 0.0;
    for (double R : {0.0, 0.3, 0.7, 1.4, 2.5})
        for (double z : {-0.6, 0.0, 0.35, 1.8}) {
            const Point3 x{R, 0.4, z};
            const double r2 = R * R + z * z;
            const double in2 = r2 < 1.0 ? (r2 - 3.0) / 6.0 : -1.0 / (3.0 * std::sqrt(r2));
            const double p2 = stream_component(2, x, zero, cfg, opt);
            CAPTURE(R);
            CAPTURE(z);
            if (std::abs(std::sqrt(r2) - 1.0) > 0.1) {
                CHECK(std::abs(p2 - in2) <= 1e-6);
                err = std::max(err, std::abs(p2 - in2));
            }
            const double e = R * R / 2.25 + z * z / 4.0;
            if (e < 0.8) {
                const double in1 = ec.alpha1 * R * R + ec.alpha2 * z * z + ec.alpha3;
                const double p1 = stream_component(1, x, zero, cfg, opt);
                CHECK(std::abs(p1 - in1) <= 1e-6);
                err = std::max(err, std::abs(p1 - in1));
            }
        }
    MESSAGE("max closed-form error ", err);
}

TEST_CASE("stream decomposition into the two surfaces") {
    const auto& cfg = preset();
    const auto f = sample_perturbation(small_grid(), 2, 0.01);
    for (const Point3 x : {Point3{0.2, 0.1, 0.3}, Point3{1.2, 2.0, -0.4}, Point3{3.0, 0.0, 0.5}}) {
        const double s = stream_at(x, f, cfg);
        const double t = stream_component(1, x, f, cfg) - stream_component(2, x, f, cfg);
        CHECK(std::abs(s - t) <= 1e-10 * std::max(1.0, std::abs(s)));
    }
}

TEST_CASE("velocity on the unperturbed surfaces reproduces nu") {
    const auto& cfg = preset();
    const auto ctx = kernels::make_context(cfg);
    SurfacePerturbation zero(small_grid());
    double worst = 0.0;
    for (int i = 1; i <= 2; ++i)
        for (double phi : {0.3, 0.9, pi / 2, 2.4}) {
            const double theta = 0.7;
            const auto U = velocity_on_surface(i, phi, theta, zero, cfg);
            const std::complex<double> et = std::complex<double>(0.0, 1.0) * std::polar(1.0, theta);
            const double tangential = U.real() * et.real() + U.imag() * et.imag();
            const double r0 = cfg.profile(i).r(phi);
            const double from_velocity = (i == 1 ? 1.0 : -1.0) * tangential / r0;
            const double ref = kernels::nu(i, 0.0, phi, ctx);
            worst = std::max(worst, std::abs(from_velocity - ref));
            CAPTURE(i);
            CAPTURE(phi);
            CHECK(std::abs(from_velocity - ref) <= 1e-6);
            // purely azimuthal flow
            const std::complex<double> er = std::polar(1.0, theta);
            CHECK(std::abs(U.real() * er.real() + U.imag() * er.imag()) <= 1e-8);
        }
    MESSAGE("velocity-derived nu error ", worst);
}

TEST_CASE("velocity vanishes on the vertical axis") {
    const auto& cfg = preset();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> zd(-2.5, 2.5), cd(-1.0, 1.0);
    std::uniform_int_distribution<int> md(2, 6);
    for (int s = 0; s < 3; ++s) {
        const int m = md(rng);
        SurfacePerturbation f(small_grid(), m);
        f.set_mode(1, m, smooth(*small_grid(), m, 0.01 * cd(rng), 0.005 * cd(rng)));
        f.set_mode(2, m, smooth(*small_grid(), m, 0.01 * cd(rng), 0.005 * cd(rng)));
        for (int k = 0; k < 4; ++k) {
            const double z = zd(rng);
            const auto U = velocity_at({0.0, 0.0, z}, f, cfg);
            CAPTURE(m);
            CAPTURE(z);
            CHECK(std::abs(U) <= 1e-8);
        }
    }
}

TEST_CASE("functional vanishes at the trivial solution") {
    const auto& cfg = preset();
    SurfacePerturbation zero(small_grid(), 3);
    for (double Om : {0.15, 0.25}) {
        const auto F = functional_Ftilde(Om, zero, cfg);
        CHECK(F.mean_removed);
        CHECK(F.sup_norm <= 1e-8);
        CHECK(F.n_theta == 24);
    }
}

TEST_CASE("functional symmetries without the symmetry shortcuts") {
    const auto& cfg = preset();
    const int m = 3;
    const auto f = sample_perturbation(small_grid(), m, 0.01);
    NonlinearOptions opt;
    opt.exploit_symmetry = false;
    const auto F = functional_Ftilde(0.2, f, cfg, opt);
    opt.exploit_symmetry = true;
    const auto Fs = functional_Ftilde(0.2, f, cfg, opt);
    const int N = F.n_phi, NT = F.n_theta;
    REQUIRE(NT == 8 * 2 * m);
    double eq = 0.0, fold = 0.0, mean = 0.0, sine = 0.0, total = 0.0;
    for (int i = 1; i <= 2; ++i)
        for (int k = 0; k < N; ++k) {
            double row = 0.0;
            for (int l = 0; l < NT; ++l) {
                const double v = F.at(i, k, l);
                row += v;
                eq = std::max(eq, std::abs(v - F.at(i, N - 1 - k, l)));
                fold = std::max(fold, std::abs(v - F.at(i, k, (l + NT / m) % NT)));
            }
            mean = std::max(mean, std::abs(row / NT));
            for (int n = 0; n <= NT / 2; ++n) {
                double c = 0.0, s = 0.0;
                for (int l = 0; l < NT; ++l) {
                    c += F.at(i, k, l) * std::cos(2 * pi * n * l / NT);
                    s += F.at(i, k, l) * std::sin(2 * pi * n * l / NT);
                }
                sine += s * s;
                total += c * c + s * s;
            }
        }
    MESSAGE("equatorial defect ", eq, ", fold defect ", fold, ", sine energy ratio ", sine / total);
    CHECK(eq <= 1e-10);
    CHECK(fold <= 1e-10);
    CHECK(mean <= 1e-12);
    CHECK(sine <= 1e-12 * total);
    CHECK(sup_distance(F, Fs) <= 1e-10);
    // shortcut version is exactly periodic
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < NT; ++l) CHECK(Fs.at(1, k, l) == Fs.at(1, k, (l + NT / m) % NT));
}

TEST_CASE("perturbation size guards") {
    const auto& cfg = preset();
    const double eps = default_eps_max(cfg);
    CHECK(eps == doctest::Approx(0.05 * std::min(1.0, std::sqrt(cfg.validated.separation_delta))));
    const auto big = sample_perturbation(small_grid(), 2, 1.0);
    CHECK_THROWS_AS(functional_Ftilde(0.2, big, cfg), PerturbationTooLarge);
    const auto ok = sample_perturbation(small_grid(), 2, 0.5 * eps / big.sup_norm());
    const auto F = functional_Ftilde(0.2, ok, cfg);
    CHECK(F.min_J12 >= 0.25 * cfg.validated.separation_delta);
    // with the size cap lifted, a perturbation pushing the surfaces together trips the distance guard
    NonlinearOptions opt;
    opt.eps_max = 1e9;
    SurfacePerturbation crush(small_grid(), 2);
    crush.set_mode(1, 2, smooth(*small_grid(), 1, -0.45, 0.0));
    crush.set_mode(2, 2, smooth(*small_grid(), 1, 0.3, 0.0));
    CHECK_THROWS_AS(functional_Ftilde(0.2, crush, cfg, opt), PerturbationTooLarge);
}

TEST_CASE("analytic linearization") {
    const spectral::SpectralProblem P(kernels::make_context(preset()), 160);
    const auto pt = bifurcation::find_omega_m(5, P);
    const auto& g = P.grid();

    SUBCASE("kernel direction") {
        SurfacePerturbation f(P.grid_ptr(), 5);
        f.set_mode(1, 5, pt.eigenpair.h1);
        f.set_mode(2, 5, pt.eigenpair.h2);
        const auto L = linearized_matvec(pt.Omega_m, f, P);
        double hmax = 0.0;
        for (double v : pt.eigenpair.h1) hmax = std::max(hmax, std::abs(v));
        CHECK(L.sup_norm <= 1e-7 * hmax);
    }

    SUBCASE("Omega derivative is minus the identity") {
        SurfacePerturbation f(P.grid_ptr(), 5);
        f.set_mode(1, 5, smooth(g, 5, 1.0, 0.2));
        f.set_mode(2, 5, smooth(g, 5, -0.5, 0.1));
        const double d = 1e-4 * P.window().gap;
        const auto Lp = linearized_matvec(pt.Omega_m + d, f, P);
        const auto Lm = linearized_matvec(pt.Omega_m - d, f, P);
        double err = 0.0;
        for (int i = 1; i <= 2; ++i)
            for (int k = 0; k < Lp.n_phi; ++k)
                for (int l = 0; l < Lp.n_theta; ++l) {
                    const double h = f.node_value(i, 5, k) * std::cos(5 * 2 * pi * l / Lp.n_theta);
                    err = std::max(err, std::abs((Lp.at(i, k, l) - Lm.at(i, k, l)) / (2 * d) + h));
                }
        CHECK(err <= 1e-6);
    }

    SUBCASE("central finite difference") {
        SurfacePerturbation f(P.grid_ptr(), 5);
        f.set_mode(1, 5, smooth(g, 5, 0.8, -0.3));
        f.set_mode(2, 5, smooth(g, 5, -0.4, 0.25));
        const double s = 1e-5;
        const auto L = linearized_matvec(pt.Omega_m, f, P);
        const auto Fp = functional_Ftilde(pt.Omega_m, f.scaled(s), P.context().config);
        const auto Fm = functional_Ftilde(pt.Omega_m, f.scaled(-s), P.context().config);
        double err = 0.0;
        for (int i = 0; i < 2; ++i)
            for (std::size_t k = 0; k < L.values[i].size(); ++k)
                err = std::max(err, std::abs((Fp.values[i][k] - Fm.values[i][k]) / (2 * s) - L.values[i][k]));
        MESSAGE("finite-difference relative error ", err / L.sup_norm);
        CHECK(err <= 1e-4 * L.sup_norm);
    }
}
