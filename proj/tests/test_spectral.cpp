#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qgpatch/errors.hpp"
#include "qgpatch/spectral.hpp"

using namespace qgpatch;
using namespace qgpatch::spectral;
using oracle::pi;

namespace {

const SpectralProblem& problem() {
    static const SpectralProblem p(kernels::make_context(profiles::make_ellipsoid_sphere_config(1.5, 2.0, 1.0)), 160);
    return p;
}

double max_asym(const DiscreteOperator& op) {
    const int M = 2 * op.N;
    double d = 0.0;
    for (int r = 0; r < M; ++r)
        for (int c = r + 1; c < M; ++c) d = std::max(d, std::abs(op.at(r, c) - op.at(c, r)));
    return d;
}

}  // namespace

TEST_CASE("quadrature grid") {
    const auto g64 = build_grid(64, 1.0);
    double sw = 0.0;
    for (double w : g64.weights) sw += w;
    CHECK(std::abs(sw - pi) <= 1e-13);
    for (int k = 1; k < g64.size(); ++k) CHECK(g64.nodes[k] > g64.nodes[k - 1]);
    CHECK(g64.nodes.front() > 0.0);
    CHECK(g64.nodes.back() < pi);

    for (int N : {64, 128, 160, 320}) {
        const auto g = build_grid(N, 2.0);
        CHECK(std::abs(g.integrate([](double x) { return std::sin(x); }) - 2.0) <= 1e-12);
    }
    CHECK_THROWS_AS(build_grid(8), DomainError);
    CHECK_THROWS_AS(build_grid(64, 0.5), DomainError);
}

TEST_CASE("log-singular integrals through the product weights") {
    // int_0^pi ln|pi/2 - psi| dpsi = pi (ln(pi/2) - 1)
    const double exact = pi * (std::log(pi / 2) - 1.0);
    const double x0 = 1.0;  // not a panel break
    const double exact1 = x0 * std::log(x0) + (pi - x0) * std::log(pi - x0) - pi;
    double err_plain[2], err_prod[2];
    int idx = 0;
    for (int N : {64, 128}) {
        const auto g = build_grid(N, 2.0);
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += g.weights[k] * std::log(std::abs(pi / 2 - g.nodes[k]));
        err_plain[idx] = std::abs(s - exact);
        const auto lw = g.log_weights(x0), lh = g.log_weights(pi / 2);
        double t = 0.0, th = 0.0;
        for (int k = 0; k < N; ++k) {
            t += lw[k];
            th += lh[k];
        }
        err_prod[idx] = std::max(std::abs(t - exact1), std::abs(th - exact));
        ++idx;
    }
    MESSAGE("plain GL errors ", err_plain[0], " -> ", err_plain[1], ", product weights ", err_prod[0], " -> ", err_prod[1]);
    CHECK(err_prod[0] <= 1e-12);
    CHECK(err_prod[1] <= 1e-12);
    CHECK(err_plain[1] < err_plain[0]);
}

TEST_CASE("assembled operator structure") {
    const auto& P = problem();
    const auto& w = P.window();
    const double mid = w.mid();
    for (int n : {1, 3, 8}) {
        const auto op = P.assemble(n, mid);
        const int N = op.N;
        CHECK(max_asym(op) <= 1e-12);
        // Block signs [+, -; -, +]. Product-integration weights of the near panels on the diagonal
        // blocks are Lagrange moments and may be negative, so only far-field entries are checked there.
        const auto& g = P.grid();
        int bad = 0;
        for (int r = 0; r < 2 * N; ++r)
            for (int c = 0; c < 2 * N; ++c) {
                const double v = op.at(r, c);
                const bool same = (r < N) == (c < N);
                if (same) {
                    const auto [lo, hi] = g.near_panels(r % N);
                    const int pc = g.panel_of[c % N];
                    if (pc >= lo && pc <= hi) continue;
                }
                if (same ? v < 0.0 : v > 0.0) ++bad;
            }
        CHECK(bad == 0);

        const auto b = eigen_bounds(op, P.context());
        double fro = 0.0;
        for (double v : op.matrix) fro += v * v;
        CHECK(std::sqrt(fro) <= b.upper);
        const auto [l1, l2] = top_eigenvalues(op);
        CHECK(l1 >= b.lower - 1e-12);
        CHECK(l1 <= b.upper);
        CHECK(l1 > 0.0);
        CHECK(l2 < l1);

        // quadratic form symmetry
        std::mt19937_64 rng(n);
        std::normal_distribution<double> nd;
        std::vector<double> u(2 * N), v(2 * N);
        for (auto& x : u) x = nd(rng);
        for (auto& x : v) x = nd(rng);
        double suv = 0.0, usv = 0.0;
        for (int r = 0; r < 2 * N; ++r)
            for (int c = 0; c < 2 * N; ++c) {
                suv += op.at(r, c) * u[c] * v[r];
                usv += u[r] * op.at(r, c) * v[c];
            }
        CHECK(std::abs(suv - usv) <= 1e-12 * std::max(1.0, std::abs(suv)));
    }
    CHECK_THROWS_AS(P.assemble(3, w.omega_bar_1 + 1e-3), WindowError);
    CHECK_THROWS_AS(P.assemble(3, w.omega_bar_2 + 1e-9 * w.gap), WindowError);
}

TEST_CASE("symmetrisation preserves the spectrum") {
    const auto& P = problem();
    for (int n : {2, 7}) {
        const auto op = P.assemble(n, P.omega_at(0.4));
        const int M = 2 * op.N;
        const auto A = nystrom_matrix(op);
        Eigen::MatrixXd E(M, M);
        for (int r = 0; r < M; ++r)
            for (int c = 0; c < M; ++c) E(r, c) = A[static_cast<std::size_t>(r) * M + c];
        Eigen::EigenSolver<Eigen::MatrixXd> es(E, false);
        std::vector<double> ev;
        double maxim = 0.0;
        for (int k = 0; k < M; ++k) {
            ev.push_back(es.eigenvalues()[k].real());
            maxim = std::max(maxim, std::abs(es.eigenvalues()[k].imag()));
        }
        std::sort(ev.begin(), ev.end());
        const auto sv = all_eigenvalues(op);
        double d = 0.0;
        for (int k = M - 10; k < M; ++k) d = std::max(d, std::abs(ev[k] - sv[k]));
        CAPTURE(n);
        CHECK(d <= 1e-10);
        CHECK(maxim <= 1e-10);
    }
}

TEST_CASE("top eigenpair: normalisation, signs, simplicity") {
    const auto& P = problem();
    for (int n : {2, 5, 10, 20}) {
        const auto op = P.assemble(n, P.window().mid());
        const auto p = largest_eigenpair(op);
        CAPTURE(n);
        CHECK(p.normalized);
        CHECK(p.sign_ok);
        CHECK(sign_pattern_ok(p));
        CHECK(p.second < p.lambda);
        CHECK(std::abs(inner(op, p.h1, p.h2, p.h1, p.h2) - 1.0) <= 1e-10);
        // h is an eigenvector of the row-wise Nystrom operator, whose top eigenvalue differs
        // from lambda only by the symmetrisation error.
        const int N = op.N;
        const auto R = rowwise_matrix(op);
        double res = 0.0, mx = 0.0;
        for (int r = 0; r < 2 * N; ++r) {
            double s = 0.0;
            for (int c = 0; c < 2 * N; ++c) s += R[static_cast<std::size_t>(r) * 2 * N + c] * (c < N ? p.h1[c] : p.h2[c - N]);
            const double hr = r < N ? p.h1[r] : p.h2[r - N];
            res = std::max(res, std::abs(s - p.lambda * hr));
            mx = std::max(mx, std::abs(hr));
        }
        CHECK(res <= 1e-7 * mx);
    }
}

TEST_CASE("lambda decreasing in n and decaying") {
    const auto& P = problem();
    const double mid = P.window().mid();
    double prev = 1e300;
    for (int n = 2; n <= 12; ++n) {
        const double l = P.lambda(n, mid);
        CHECK(l < prev);
        prev = l;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int n = 10; n <= 40; n += 5, ++m) {
        const double x = std::log(n), y = std::log(P.lambda(n, mid));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    MESSAGE("log-log decay slope on n in [10, 40]: ", slope);
    CHECK(slope <= -0.1);
}

TEST_CASE("derivative in Omega") {
    const auto& P = problem();
    for (int n : {3, 8})
        for (double t : {0.2, 0.5, 0.8}) {
            const double Om = P.omega_at(t), h = 1e-5 * P.window().gap;
            const auto p = P.eigenpair(n, Om);
            const double an = lambda_derivative(P.assemble(n, Om), p);
            const double fd = (P.lambda(n, Om + h) - P.lambda(n, Om - h)) / (2 * h);
            CAPTURE(n);
            CAPTURE(t);
            CHECK(std::abs(an - fd) <= 1e-4 * std::max(std::abs(fd), 1e-3 * p.lambda));
        }
}

TEST_CASE("boundary decay of eigenfunctions") {
    const auto& P = problem();
    const auto p2 = P.eigenpair(2, P.window().mid());
    const auto r2 = boundary_decay_check(p2, 2, P.grid());
    CHECK(r2.passed);
    for (int c = 0; c < 2; ++c)
        for (int pole = 0; pole < 2; ++pole) CHECK(std::abs(r2.endpoint_value[c][pole]) <= 1e-4 * r2.max_abs);

    const auto p6 = P.eigenpair(6, P.window().mid());
    const auto r6 = boundary_decay_check(p6, 6, P.grid());
    CHECK(r6.passed);
    CHECK(r6.envelope_violation <= 10.0);

    EigenPair flat;
    flat.h1.assign(P.grid().size(), 1.0);
    flat.h2.assign(P.grid().size(), -1.0);
    CHECK_FALSE(boundary_decay_check(flat, 2, P.grid()).passed);
}

TEST_CASE("Nystrom convergence under grid doubling") {
    const auto& P = problem();
    const SpectralProblem P2(P.context(), 320, 2.0, {}, P.window());
    const double mid = P.window().mid();
    for (int n : {2, 5, 20}) {
        const double a = P.lambda(n, mid), b = P2.lambda(n, mid);
        CAPTURE(n);
        CHECK(std::abs(a - b) <= 1e-6 * b);
    }
    const auto b1 = eigen_bounds(P.assemble(4, mid), P.context());
    const auto b2 = eigen_bounds(P2.assemble(4, mid), P.context());
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(std::isfinite(b1.hs[i][j]));
            CHECK(std::abs(b1.hs[i][j] - b2.hs[i][j]) <= 1e-4 * b2.hs[i][j]);
        }
}

TEST_CASE("eigen sweep report") {
    const auto& P = problem();
    const auto rep = eigen_sweep({2, 3, 4}, {P.omega_at(0.3), P.omega_at(0.6)}, P);
    CHECK(rep.rows.size() == 6);
    CHECK(rep.decreasing_in_n);
    const auto csv = rep.to_csv();
    CHECK(csv.find("n,Omega,lambda,gap_to_second,sign_ok\n") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
    for (const auto& r : rep.rows) {
        CHECK(r.sign_ok);
        CHECK(r.gap_to_second > 0.0);
    }
}
