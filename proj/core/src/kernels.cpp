#include "qgpatch/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qgpatch/errors.hpp"
#include "qgpatch/parallel.hpp"
#include "qgpatch/quadrature.hpp"
#include "qgpatch/specfun.hpp"

namespace qgpatch::kernels {

namespace {
constexpr double pi = std::numbers::pi;

struct Geometry {
    double R, x, y;
};

// R, x = 4 r_i r_j / R and y = 1 - x formed without cancellation.
Geometry geometry(const KernelContext& ctx, int i, int j, double phi, double psi, double delta, double& ri,
                  double& rj) {
    const auto& c = ctx.config;
    const auto& pi_ = c.profile(i);
    const auto& pj = c.profile(j);
    ri = pi_.r(phi);
    rj = pj.r(psi);
    double dr, dz;
    if (i == j) {
        dr = pi_.increment(phi, delta);
        dz = -2.0 * c.d(i) * std::sin(phi + 0.5 * delta) * std::sin(0.5 * delta);
    } else {
        dr = rj - ri;
        dz = c.d(j) * std::cos(psi) - c.d(i) * std::cos(phi);
    }
    const double s = ri + rj;
    const double dz2 = dz * dz;
    const double R = s * s + dz2;
    Geometry g;
    g.R = R;
    g.y = (dr * dr + dz2) / R;
    g.x = g.y < 0.5 ? 1.0 - g.y : 4.0 * ri * rj / R;
    return g;
}

double kernel_value(const KernelContext& ctx, int i, int j, int n, double phi, double psi, double delta) {
    double ri, rj;
    const Geometry g = geometry(ctx, i, j, phi, psi, delta, ri, rj);
    if (rj == 0.0) return 0.0;
    if (!(g.y > 0.0)) throw SingularKernelError("H_n: diagonal of a self-interaction kernel");
    const double F = specfun::hyp_Fn_value(n, g.x, g.y);
    const double pw = n == 1 ? 1.0 : std::pow(0.25 * g.x, n - 1);
    return kernel_prefactor(n) * std::sin(psi) * rj * rj * pw * F / (g.R * std::sqrt(g.R));
}

}  // namespace

KernelContext make_context(const PatchPairConfig& config) {
    KernelContext ctx;
    ctx.config = config;
    ctx.has_closed_form = config.is_ellipsoid_sphere();
    ctx.alpha1 = ctx.has_closed_form ? alpha1(config.outer.radius(), config.d1)
                                     : std::numeric_limits<double>::quiet_NaN();
    return ctx;
}

double R_ij(const KernelContext& ctx, int i, int j, double phi, double psi) {
    const auto& c = ctx.config;
    const double s = c.profile(i).r(phi) + c.profile(j).r(psi);
    const double v = c.d(i) * std::cos(phi) - c.d(j) * std::cos(psi);
    return s * s + v * v;
}

double kernel_prefactor(int n) {
    // Gamma(n+1/2) / (2 sqrt(pi) n!) = (1/2) prod_{k<=n} (k - 1/2)/k
    double c = 0.5;
    for (int k = 1; k <= n; ++k) c *= (k - 0.5) / k;
    return c;
}

double H_n(const KernelContext& ctx, int i, int j, int n, double phi, double psi) {
    if (i == j && std::abs(phi - psi) < 1e-14) throw SingularKernelError("H_n: |phi - psi| < 1e-14 on a self block");
    return kernel_value(ctx, i, j, n, phi, psi, psi - phi);
}

double H_n_offset(const KernelContext& ctx, int i, int j, int n, double phi, double delta) {
    return kernel_value(ctx, i, j, n, phi, phi + delta, delta);
}

double kernel_integral(const KernelContext& ctx, int i, int j, int n, double phi) {
    const int lo = ctx.de_min_level, hi = ctx.de_max_level;
    const double tol = ctx.de_rel_tol;
    if (i != j) {
        return quad::de_adaptive([&](double a, double) { return kernel_value(ctx, i, j, n, phi, a, a - phi); }, pi,
                                 tol, 1e-300, lo, hi);
    }
    double total = 0.0;
    if (phi > 0.0) {
        // psi = phi - t, t measured from the singular end
        total += quad::de_adaptive(
            [&](double, double t) { return t > 0.0 ? kernel_value(ctx, i, i, n, phi, phi - t, -t) : 0.0; }, phi, tol,
            1e-300, lo, hi);
    }
    if (phi < pi) {
        total += quad::de_adaptive(
            [&](double t, double) { return t > 0.0 ? kernel_value(ctx, i, i, n, phi, phi + t, t) : 0.0; }, pi - phi,
            tol, 1e-300, lo, hi);
    }
    return total;
}

double nu_base(const KernelContext& ctx, int i, double phi) {
    const auto& c = ctx.config;
    return c.d1 * kernel_integral(ctx, i, 1, 1, phi) - c.d2 * kernel_integral(ctx, i, 2, 1, phi);
}

double nu(int i, double Omega, double phi, const KernelContext& ctx) {
    const double b = nu_base(ctx, i, phi) - Omega;
    return i == 1 ? b : -b;
}

double alpha1(double a, double d1) {
    // int_0^inf ds / ((a^2+s)^2 sqrt(d1^2+s)) = d1^-3 g(t), t^2 = (a^2 - d1^2)/d1^2
    const double b = d1;
    const double t2 = (a * a - b * b) / (b * b);
    double g;
    if (std::abs(t2) < 0.01) {
        // sum_k (-1)^k 2(k+1)/(2k+3) t^{2k}
        g = 0.0;
        double p = 1.0;
        for (int k = 0; k < 40; ++k) {
            g += 2.0 * (k + 1) / (2.0 * k + 3) * p;
            p *= -t2;
        }
    } else if (t2 > 0.0) {
        const double t = std::sqrt(t2);
        g = std::atan(t) / (t2 * t) - 1.0 / (t2 * (1.0 + t2));
    } else {
        const double t = std::sqrt(-t2);
        g = 1.0 / (-t2 * (1.0 + t2)) - std::atanh(t) / (-t2 * t);
    }
    return 0.25 * a * a * b * g / (b * b * b);
}

EllipsoidCoefficients ellipsoid_coefficients(double a, double d1) {
    EllipsoidCoefficients e;
    e.alpha1 = alpha1(a, d1);
    // Remaining two integrals on s = u/(1-u), u in [0, 1).
    const double pre = 0.25 * a * a * d1;
    auto f2 = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double s = u / (1.0 - u), ds = 1.0 / ((1.0 - u) * (1.0 - u));
        return ds / ((a * a + s) * std::pow(d1 * d1 + s, 1.5));
    };
    auto f3 = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double s = u / (1.0 - u), ds = 1.0 / ((1.0 - u) * (1.0 - u));
        return ds / ((a * a + s) * std::sqrt(d1 * d1 + s));
    };
    e.alpha2 = pre * quad::adaptive_gk(f2, 0.0, 1.0, 1e-15, 1e-14);
    e.alpha3 = -pre * quad::adaptive_gk(f3, 0.0, 1.0, 1e-15, 1e-14);
    return e;
}

double closed_form_nu(int i, double Omega, double phi, double a, double d1, double d2) {
    const double a1 = alpha1(a, d1);
    if (i == 2) return Omega - 2.0 * a1 + 1.0 / 3.0;
    const double c = std::cos(phi), s = std::sin(phi);
    const double q = d1 * d1 * c * c + a * a * s * s;
    return 2.0 * a1 - d2 * d2 * d2 / (3.0 * q * std::sqrt(q)) - Omega;
}

OmegaWindow closed_form_window(double a, double d1, double d2) {
    const double a1 = alpha1(a, d1);
    const double m = std::min(a, d1);
    OmegaWindow w;
    w.omega_bar_2 = 2.0 * a1 - 1.0 / 3.0;
    w.omega_bar_1 = 2.0 * a1 - d2 * d2 * d2 / (3.0 * m * m * m);
    w.argmin_phi_1 = a < d1 ? pi / 2 : 0.0;
    w.argmax_phi_2 = pi / 2;
    w.gap = w.omega_bar_1 - w.omega_bar_2;
    return w;
}

OmegaWindow omega_window(const KernelContext& ctx, int M) {
    M = std::max(M, 8);
    std::vector<double> phi(M), f1(M), f2(M);
    for (int k = 0; k < M; ++k) phi[k] = 0.5 * pi * (1.0 - std::cos(pi * k / (M - 1)));
    const bool mirror = ctx.config.validated.symmetry_defect <= 1e-10;
    const int half = mirror ? (M + 1) / 2 : M;
    parallel_for(half, [&](std::size_t k) {
        f1[k] = nu_base(ctx, 1, phi[k]);
        f2[k] = nu_base(ctx, 2, phi[k]);
    });
    if (mirror)
        for (int k = half; k < M; ++k) {
            f1[k] = f1[M - 1 - k];
            f2[k] = f2[M - 1 - k];
        }

    // Extremum of sign*f over the scan, refined by the vertex of the parabola
    // through the three neighbouring samples.
    auto extremum = [&](const std::vector<double>& f, int i, double sign, double& at) {
        int best = 0;
        for (int k = 1; k < M; ++k)
            if (sign * f[k] < sign * f[best]) best = k;
        at = phi[best];
        double val = f[best];
        const int c = std::clamp(best, 1, M - 2);
        const double x0 = phi[c - 1], x1 = phi[c], x2 = phi[c + 1];
        const double y0 = f[c - 1], y1 = f[c], y2 = f[c + 1];
        const double den = (x0 - x1) * (x0 - x2) * (x1 - x2);
        const double A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
        const double B = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
        if (sign * A > 0.0) {
            const double v = std::clamp(-B / (2.0 * A), 0.0, pi);
            if (std::abs(v - phi[best]) > 1e-15) {
                const double fv = nu_base(ctx, i, v);
                if (sign * fv < sign * val) {
                    val = fv;
                    at = v;
                }
            }
        }
        return val;
    };
    OmegaWindow w;
    w.omega_bar_1 = extremum(f1, 1, 1.0, w.argmin_phi_1);
    w.omega_bar_2 = extremum(f2, 2, -1.0, w.argmax_phi_2);
    w.gap = w.omega_bar_1 - w.omega_bar_2;
    return w;
}

}  // namespace qgpatch::kernels
