#include "qgpatch/bifurcation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "qgpatch/errors.hpp"
#include "qgpatch/parallel.hpp"

namespace qgpatch::bifurcation {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

BifurcationPoint find_omega_m(int m, const SpectralProblem& problem, const BifurcationOptions& opt) {
    if (m < 1) throw DomainError("find_omega_m: m must be >= 1");
    const auto& w = problem.window();
    BifurcationPoint pt;
    pt.m = m;
    pt.iteration_bound = static_cast<int>(std::ceil(std::log2(w.gap / opt.tol))) + 2;

    double a = w.mid(), b = w.omega_bar_1 - problem.margin();
    double la = problem.lambda(m, a), lb = problem.lambda(m, b);
    if (!(la < 1.0))
        throw NotBracketed("find_omega_m: lambda_m >= 1 at the window midpoint (mode below threshold)", la - 1.0,
                           true);
    if (!(lb > 1.0)) throw NotBracketed("find_omega_m: lambda_m < 1 at the top of the window", 1.0 - lb, false);

    // 1/lambda is close to linear in Omega near the top of the window, so regula falsi on
    // 1/lambda - 1 (Illinois variant) with a bisection fallback converges in a few steps.
    double fa = 1.0 / la - 1.0, fb = 1.0 / lb - 1.0;
    int side = 0;
    double width_prev = b - a;
    double c = a, lc = la;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        c = (a * fb - b * fa) / (fb - fa);
        const bool stalled = it > 2 && (b - a) > 0.5 * width_prev;
        if (it % 3 == 0) width_prev = b - a;
        if (!(c > a && c < b) || stalled) c = 0.5 * (a + b);
        lc = problem.lambda(m, c);
        pt.iterations = it;
        const double fc = 1.0 / lc - 1.0;
        if (std::abs(lc - 1.0) <= opt.tol) break;
        if (fc > 0.0) {
            a = c;
            fa = fc;
            la = lc;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = c;
            fb = fc;
            lb = lc;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b)) break;
    }
    pt.Omega_m = c;
    pt.bracket_lo = a;
    pt.bracket_hi = b;
    pt.lambda_lo = la;
    pt.lambda_hi = lb;
    pt.eigenpair = problem.eigenpair(m, c);
    pt.residual = std::abs(pt.eigenpair.lambda - 1.0);
    pt.transversality_Q = transversality(pt.eigenpair, problem);
    pt.h2_mass_fraction = h2_mass_fraction(pt.eigenpair, problem.grid());
    pt.kernel_margin = 1.0 - problem.lambda(2 * m, c);
    return pt;
}

std::vector<BifurcationPoint> omega_sequence(int m_min, int m_max, const SpectralProblem& problem,
                                             const BifurcationOptions& opt) {
    if (m_min < 1 || m_max < m_min) throw DomainError("omega_sequence: need 1 <= m_min <= m_max");
    std::vector<BifurcationPoint> out(m_max - m_min + 1);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = find_omega_m(m_min + static_cast<int>(i), problem, opt); });
    return out;
}

int operational_m0(const SpectralProblem& problem, int m_max) {
    const double mid = problem.window().mid();
    for (int m = 1; m <= m_max; ++m)
        if (problem.lambda(m, mid) < 1.0) return m;
    return 0;
}

double transversality(const EigenPair& pair, const SpectralProblem& problem) {
    const auto& g = problem.grid();
    const auto& nd = problem.nodes();
    const auto& cfg = problem.context().config;
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        const double ws = g.weights[k] * nd.sin_phi[k];
        s1 += ws * nd.r1[k] * nd.r1[k] * pair.h1[k] * pair.h1[k];
        s2 += ws * nd.r2[k] * nd.r2[k] * pair.h2[k] * pair.h2[k];
    }
    return s1 - cfg.d2 / cfg.d1 * s2;
}

double h2_mass_fraction(const EigenPair& pair, const spectral::QuadratureGrid& grid) {
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < grid.size(); ++k) {
        const double s = std::sin(grid.nodes[k]);
        const double ws3 = grid.weights[k] * s * s * s;
        s1 += ws3 * pair.h1[k] * pair.h1[k];
        s2 += ws3 * pair.h2[k] * pair.h2[k];
    }
    return s2 / (s1 + s2);
}

std::string to_json(const std::vector<BifurcationPoint>& points) {
    std::string out = "[";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        out += i ? ",\n " : "\n ";
        out += "{\"m\": " + std::to_string(p.m) + ", \"Omega_m\": " + fmt(p.Omega_m) + ", \"lambda\": " +
               fmt(p.eigenpair.lambda) + ", \"residual\": " + fmt(p.residual) + ", \"transversality_Q\": " +
               fmt(p.transversality_Q) + ", \"h2_mass_fraction\": " + fmt(p.h2_mass_fraction) +
               ", \"kernel_margin\": " + fmt(p.kernel_margin) + ", \"iterations\": " + std::to_string(p.iterations) +
               ", \"iteration_bound\": " + std::to_string(p.iteration_bound) + ", \"sign_ok\": " +
               (p.eigenpair.sign_ok ? "true" : "false") + "}";
    }
    out += points.empty() ? "]" : "\n]";
    return out;
}

std::string to_csv(const std::vector<BifurcationPoint>& points) {
    std::string out =
        "# m: symmetry fold; Omega_m: angular velocity with lambda_m(Omega_m) = 1; Q_m: transversality mass "
        "difference; kernel_margin: 1 - lambda_2m(Omega_m)\n";
    out += "m,Omega_m,Q_m,kernel_margin\n";
    for (const auto& p : points)
        out += std::to_string(p.m) + "," + fmt(p.Omega_m) + "," + fmt(p.transversality_Q) + "," +
               fmt(p.kernel_margin) + "\n";
    return out;
}

}  // namespace qgpatch::bifurcation
