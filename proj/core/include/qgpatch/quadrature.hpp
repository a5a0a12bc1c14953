#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

namespace qgpatch::quad {

struct Rule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule with q points (cached, thread-safe).
const Rule& gauss_legendre(int q);

// Tanh-sinh nodes on [0, 1]. s and sc = 1 - s are both stored accurately so
// that offsets from either endpoint can be formed without cancellation.
struct DENode {
    double s, sc, w;
};

// Nodes of level k have step 2^-k; level k+1 adds the odd nodes only.
// Returns the nodes new at this level (level 0 returns the full coarse set).
const std::vector<DENode>& de_level_nodes(int level);

// Fixed-level tanh-sinh sum on [0, L] of f(offset from 0, offset from L).
template <class F>
double de_fixed(F&& f, double L, int level) {
    double sum = 0.0;
    for (int k = 0; k <= level; ++k)
        for (const auto& n : de_level_nodes(k)) sum += n.w * f(L * n.s, L * n.sc);
    return L * sum * std::ldexp(1.0, -level);
}

// Tanh-sinh on [0, L] refined by levels until two consecutive estimates agree.
template <class F>
double de_adaptive(F&& f, double L, double rel_tol = 1e-14, double abs_tol = 1e-300,
                   int min_level = 3, int max_level = 8) {
    double raw = 0.0;
    double prev = 0.0, cur = 0.0;
    for (int k = 0; k <= max_level; ++k) {
        for (const auto& n : de_level_nodes(k)) raw += n.w * f(L * n.s, L * n.sc);
        cur = L * raw * std::ldexp(1.0, -k);
        if (k >= min_level && std::abs(cur - prev) <= std::max(abs_tol, rel_tol * std::abs(cur))) break;
        prev = cur;
    }
    return cur;
}

// Gauss-Legendre on [a, b].
template <class F>
double gl(F&& f, double a, double b, int q) {
    const Rule& r = gauss_legendre(q);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
    return h * s;
}

struct GKResult {
    double value, error;
};

GKResult gk15(const std::function<double(double)>& f, double a, double b);

// Globally adaptive Gauss-Kronrod (7/15) bisection.
double adaptive_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   double rel_tol = 1e-13, int max_intervals = 4000);

}  // namespace qgpatch::quad
