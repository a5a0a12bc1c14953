#include "qgpatch/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace qgpatch::quad {

namespace {

Rule make_gl(int q) {
    Rule r;
    r.x.resize(q);
    r.w.resize(q);
    for (int i = 0; i < q; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= q; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = q * (x * p1 - p0) / (x * x - 1.0);
        r.x[q - 1 - i] = x;
        r.w[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

constexpr double de_umax = 3.2;

std::vector<DENode> make_de_level(int level) {
    // Node u = j h with h = 2^-level; at level > 0 only odd j are new.
    const double h = std::ldexp(1.0, -level);
    const int J = static_cast<int>(std::ceil(de_umax / h));
    std::vector<DENode> out;
    const double hp = 0.5 * std::numbers::pi;
    for (int j = -J; j <= J; ++j) {
        if (level > 0 && (j % 2 == 0)) continue;
        const double u = j * h;
        const double sh = hp * std::sinh(u);
        const double ch = hp * std::cosh(u);
        // s = (1 + tanh(sh)) / 2 = 1 / (1 + exp(-2 sh)), sc = 1 / (1 + exp(2 sh))
        const double s = 1.0 / (1.0 + std::exp(-2.0 * sh));
        const double sc = 1.0 / (1.0 + std::exp(2.0 * sh));
        const double cs = std::cosh(sh);
        // d s / d u = ch / (2 cosh^2(sh)); weight uses the unit step, scaled by h later.
        const double w = ch / (2.0 * cs * cs);
        if (!(w > 0.0) || !std::isfinite(w)) continue;
        out.push_back({s, sc, w});
    }
    return out;
}

}  // namespace

const Rule& gauss_legendre(int q) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, make_gl(q)).first;
    return it->second;
}

const std::vector<DENode>& de_level_nodes(int level) {
    static const std::vector<std::vector<DENode>> levels = [] {
        std::vector<std::vector<DENode>> v;
        for (int k = 0; k <= 10; ++k) v.push_back(make_de_level(k));
        return v;
    }();
    if (level < 0 || level > 10) throw std::out_of_range("de_level_nodes: level out of range");
    return levels[level];
}

GKResult gk15(const std::function<double(double)>& f, double a, double b) {
    static const double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                 0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                 0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static const double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                 0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                 0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static const double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * wk[7], rg = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xk[j];
        const double s = f(c - dx) + f(c + dx);
        rk += wk[j] * s;
        if (j % 2 == 1) rg += wg[j / 2] * s;
    }
    return {rk * h, std::abs((rk - rg) * h)};
}

double adaptive_gk(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                   int max_intervals) {
    struct Seg {
        double a, b, v, e;
        bool operator<(const Seg& o) const { return e < o.e; }
    };
    std::priority_queue<Seg> q;
    auto r = gk15(f, a, b);
    q.push({a, b, r.value, r.error});
    double total = r.value, err = r.error;
    int count = 1;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
        Seg s = q.top();
        q.pop();
        const double m = 0.5 * (s.a + s.b);
        auto l = gk15(f, s.a, m), rr = gk15(f, m, s.b);
        total += l.value + rr.value - s.v;
        err += l.error + rr.error - s.e;
        q.push({s.a, m, l.value, l.error});
        q.push({m, s.b, rr.value, rr.error});
        ++count;
    }
    // Re-sum to shed accumulated rounding from the running updates.
    double sum = 0.0;
    while (!q.empty()) {
        sum += q.top().v;
        q.pop();
    }
    return sum;
}

}  // namespace qgpatch::quad
