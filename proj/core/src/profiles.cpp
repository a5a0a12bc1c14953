#include "qgpatch/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qgpatch/errors.hpp"

namespace qgpatch::profiles {

namespace {
constexpr double pi = std::numbers::pi;

double fc_slope(double d0, double d1, double h0, double h1) {
    if (d0 * d1 <= 0.0) return 0.0;
    const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
    return (w1 + w2) / (w1 / d0 + w2 / d1);
}
}  // namespace

RevolutionProfile RevolutionProfile::ellipsoid(double a) {
    if (!(a > 0.0)) throw HypothesisViolation("ellipsoid: semiaxis must be positive");
    RevolutionProfile p;
    p.kind_ = ProfileKind::ellipsoid;
    p.a_ = a;
    return p;
}

RevolutionProfile RevolutionProfile::sphere(double radius) {
    if (!(radius > 0.0)) throw HypothesisViolation("sphere: radius must be positive");
    RevolutionProfile p;
    p.kind_ = ProfileKind::sphere;
    p.a_ = radius;
    return p;
}

RevolutionProfile RevolutionProfile::tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 3) throw HypothesisViolation("tabulated profile: need at least 3 samples");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first > samples[i - 1].first))
            throw HypothesisViolation("tabulated profile: phi must be strictly increasing");
    if (samples.front().first < 0.0 || samples.back().first > pi + 1e-12)
        throw HypothesisViolation("tabulated profile: phi must lie in [0, pi]");
    if (samples.front().first > 1e-14) samples.insert(samples.begin(), {0.0, 0.0});
    if (samples.back().first < pi - 1e-12) samples.push_back({pi, 0.0});
    samples.front() = {0.0, 0.0};
    samples.back() = {pi, 0.0};

    auto t = std::make_shared<Table>();
    const std::size_t n = samples.size();
    for (auto& s : samples) {
        t->x.push_back(s.first);
        t->y.push_back(s.second);
    }
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t->x[i + 1] - t->x[i];
        del[i] = (t->y[i + 1] - t->y[i]) / h[i];
    }
    t->m.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) t->m[i] = fc_slope(del[i - 1], del[i], h[i - 1], h[i]);
    // One-sided three-point stencils at the poles.
    if (n >= 3) {
        t->m[0] = ((2.0 * h[0] + h[1]) * del[0] - h[0] * del[1]) / (h[0] + h[1]);
        t->m[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * del[n - 2] - h[n - 2] * del[n - 3]) / (h[n - 2] + h[n - 3]);
    }
    RevolutionProfile p;
    p.kind_ = ProfileKind::tabulated;
    p.a_ = *std::max_element(t->y.begin(), t->y.end());
    p.table_ = std::move(t);
    return p;
}

RevolutionProfile RevolutionProfile::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw HypothesisViolation("cannot open profile CSV: " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::pair<double, double>> s;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double phi, r;
        if (!(ls >> phi >> r)) throw HypothesisViolation("malformed profile CSV row: " + line);
        s.emplace_back(phi, r);
    }
    return tabulated(std::move(s));
}

double RevolutionProfile::r(double phi) const {
    if (kind_ != ProfileKind::tabulated) return a_ * std::sin(phi);
    const auto& t = *table_;
    if (phi <= 0.0 || phi >= pi) return 0.0;
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), phi);
    const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - t.x.begin() - 1, 0), t.x.size() - 2);
    const double h = t.x[i + 1] - t.x[i], u = (phi - t.x[i]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * t.y[i] + h10 * h * t.m[i] + h01 * t.y[i + 1] + h11 * h * t.m[i + 1];
}

double RevolutionProfile::dr(double phi) const {
    if (kind_ != ProfileKind::tabulated) return a_ * std::cos(phi);
    const auto& t = *table_;
    const double p = std::clamp(phi, 0.0, pi);
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), p);
    const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - t.x.begin() - 1, 0), t.x.size() - 2);
    const double h = t.x[i + 1] - t.x[i], u = (p - t.x[i]) / h;
    const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1;
    const double d01 = -6 * u * u + 6 * u, d11 = 3 * u * u - 2 * u;
    return (d00 * t.y[i] + d01 * t.y[i + 1]) / h + d10 * t.m[i] + d11 * t.m[i + 1];
}

double RevolutionProfile::increment(double phi, double delta) const {
    if (kind_ != ProfileKind::tabulated) return 2.0 * a_ * std::cos(phi + 0.5 * delta) * std::sin(0.5 * delta);
    if (std::abs(delta) < 1e-7) return dr(phi + 0.5 * delta) * delta;
    return r(phi + delta) - r(phi);
}

bool PatchPairConfig::is_ellipsoid_sphere() const {
    return outer.kind() != ProfileKind::tabulated && inner.kind() == ProfileKind::sphere &&
           std::abs(inner.radius() - d2) <= 1e-14 * d2;
}

HypothesisReport validate_hypotheses(const PatchPairConfig& c, int G) {
    HypothesisReport rep;
    G = std::max(G, 64);
    std::vector<double> phi(G + 1);
    for (int k = 0; k <= G; ++k) phi[k] = pi * k / G;
    const RevolutionProfile* prof[2] = {&c.outer, &c.inner};
    const double dd[2] = {c.d1, c.d2};

    double C = 1.0, minratio = std::numeric_limits<double>::infinity(), sym = 0.0, reg = 0.0;
    std::vector<double> r1(G + 1), r2(G + 1);
    for (int k = 0; k <= G; ++k) {
        r1[k] = c.outer.r(phi[k]);
        r2[k] = c.inner.r(phi[k]);
    }
    const double h = pi / G;
    for (int j = 0; j < 2; ++j) {
        const auto& p = *prof[j];
        const std::vector<double>& rr = j == 0 ? r1 : r2;
        for (int k = 1; k < G; ++k) {
            const double ratio = rr[k] / std::sin(phi[k]);
            minratio = std::min(minratio, ratio);
            if (ratio > 0.0) C = std::max({C, ratio, 1.0 / ratio});
            else C = std::numeric_limits<double>::infinity();
            sym = std::max(sym, std::abs(p.r(pi - phi[k]) - rr[k]));
            reg = std::max(reg, std::abs(rr[k + 1] - 2.0 * rr[k] + rr[k - 1]) / (h * h));
        }
        // Arc-chord two-sided bound on all grid pairs.
        for (int k = 0; k <= G; ++k)
            for (int l = k + 1; l <= G; ++l) {
                const double dphi = phi[l] - phi[k];
                const double dc = std::cos(phi[k]) - std::cos(phi[l]);
                const double dr = rr[l] - rr[k];
                const double q = (dr * dr + dd[j] * dd[j] * dc * dc) / (dphi * dphi);
                if (q > 0.0) C = std::max({C, q, 1.0 / q});
                else C = std::numeric_limits<double>::infinity();
            }
    }

    auto sep = [&](double a, double b) {
        const double u = c.outer.r(a) - c.inner.r(b);
        const double v = c.d1 * std::cos(a) - c.d2 * std::cos(b);
        return u * u + v * v;
    };
    double best = std::numeric_limits<double>::infinity(), ba = 0.0, bb = 0.0, dbar = 0.0;
    for (int k = 0; k <= G; ++k)
        for (int l = 0; l <= G; ++l) {
            const double u = r1[k] - r2[l];
            const double v = c.d1 * std::cos(phi[k]) - c.d2 * std::cos(phi[l]);
            const double s = u * u + v * v;
            if (s < best) {
                best = s;
                ba = phi[k];
                bb = phi[l];
            }
            const double w = r1[k] + r2[l];
            const double R = w * w + v * v;
            if (R > 0.0) dbar = std::max(dbar, 4.0 * r1[k] * r2[l] / R);
        }
    // Pattern search refinement of the grid minimum.
    for (double step = h; step > 1e-13; step *= 0.5) {
        bool moved = true;
        while (moved) {
            moved = false;
            for (int dir = 0; dir < 8; ++dir) {
                const double da = (dir == 0 || dir == 4 || dir == 5) ? step : (dir == 1 || dir == 6 || dir == 7) ? -step : 0.0;
                const double db = (dir == 2 || dir == 4 || dir == 6) ? step : (dir == 3 || dir == 5 || dir == 7) ? -step : 0.0;
                const double a = std::clamp(ba + da, 0.0, pi), b = std::clamp(bb + db, 0.0, pi);
                const double s = sep(a, b);
                if (s < best) {
                    best = s;
                    ba = a;
                    bb = b;
                    moved = true;
                }
            }
        }
    }

    rep.chord_constant_C = C;
    rep.separation_delta = std::max(best, 0.0);
    rep.interaction_bound_delta_bar = dbar;
    rep.symmetry_defect = sym;
    rep.regularity_defect = reg;
    rep.min_interior_ratio = minratio;

    if (!(c.d1 > c.d2 && c.d2 > 0.0)) rep.failure = "require d1 > d2 > 0";
    else if (!(minratio > 0.0) || !std::isfinite(C)) rep.failure = "profile must be positive inside (0, pi)";
    else if (!(rep.separation_delta > 0.0)) rep.failure = "interfaces touch (separation delta = 0)";
    else if (!(dbar < 1.0)) rep.failure = "interaction bound delta_bar must be < 1";
    else if (sym > 1e-10) rep.failure = "profile is not equatorially symmetric";
    rep.passed = rep.failure.empty();
    return rep;
}

PatchPairConfig make_config(double d1, double d2, RevolutionProfile outer, RevolutionProfile inner, int grid_size) {
    PatchPairConfig c;
    c.d1 = d1;
    c.d2 = d2;
    c.outer = std::move(outer);
    c.inner = std::move(inner);
    c.validated = validate_hypotheses(c, grid_size);
    if (!c.validated.passed) throw HypothesisViolation("hypothesis check failed: " + c.validated.failure);
    return c;
}

PatchPairConfig make_ellipsoid_sphere_config(double a, double d1, double d2) {
    if (!(d2 > 0.0)) throw HypothesisViolation("require d2 > 0");
    if (!(d1 > d2)) throw HypothesisViolation("require d1 > d2");
    if (!(a > d2)) throw HypothesisViolation("require a > d2 (inner sphere must sit inside the ellipsoid)");
    auto outer = std::abs(a - d1) == 0.0 ? RevolutionProfile::sphere(a) : RevolutionProfile::ellipsoid(a);
    return make_config(d1, d2, outer, RevolutionProfile::sphere(d2));
}

}  // namespace qgpatch::profiles
