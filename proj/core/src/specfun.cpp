#include "qgpatch/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qgpatch/errors.hpp"

namespace qgpatch::specfun {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int series_cap = 10000;

// 2^n (1/2)_n^2 ... all the normalisations below reduce to these products.
//   prod_{k<=n} 8k/(2k-1) = pi * Gamma(2n+1) / Gamma(n+1/2)^2
//   prod_{k<=n} 4k/(2k-1) = (2n)! / ((1/2)_n^2 2^n)
double prod_ratio(int n, double num) {
    double p = 1.0;
    for (int k = 1; k <= n; ++k) p *= num * k / (2.0 * k - 1.0);
    return p;
}

struct Partial {
    double value;
    int terms;
};

Partial fn_series(int n, double x) {
    const double a = n + 0.5, c = 2.0 * n + 1.0;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < series_cap; ++k) {
        const double ratio = (a + k) * (a + k) / ((c + k) * (k + 1.0)) * x;
        term *= ratio;
        sum += term;
        if (ratio < 1.0 && term < 1e-17 * sum) return {sum, k + 2};
    }
    throw DomainError("hyp_Fn: series did not converge within 10000 terms");
}

// c = a + b connection formula around x = 1 (y = 1 - x).
Partial fn_connection(int n, double y, double* log_coef) {
    const double a = n + 0.5;
    const double ly = std::log(y);
    double psi1 = digamma(1.0), psia = digamma(a);
    double c = 1.0, sum = 0.0, logsum = 0.0;
    for (int k = 0; k < series_cap; ++k) {
        const double term = c * (2.0 * psi1 - 2.0 * psia - ly);
        sum += term;
        logsum += c;
        const double ratio = (a + k) * (a + k) / ((k + 1.0) * (k + 1.0)) * y;
        if (k > 0 && ratio < 1.0 && std::abs(term) < 1e-17 * std::abs(sum) && c < 1e-17 * logsum) {
            const double pre = prod_ratio(n, 8.0) / pi;
            if (log_coef) *log_coef = -pre * logsum;
            return {pre * sum, k + 1};
        }
        c *= ratio;
        psi1 += 1.0 / (k + 1.0);
        psia += 1.0 / (a + k);
    }
    throw DomainError("hyp_Fn: connection series did not converge");
}

// F_n from I_n = int_0^{2pi} cos(n t)/sqrt(A - cos t) dt, A = 2/x - 1.
// I_n is the minimal solution of
//   (n+1/2) I_{n+1} = 2 n A I_n - (n-1/2) I_{n-1},
// so it is generated backwards and normalised by I_0 = 2 sqrt(2x) K(sqrt x).
Partial fn_toroidal(int n, double x, double y) {
    const double e = 2.0 * y / x;  // A - 1
    const double A = 1.0 + e;
    const double mu = std::log1p(e + std::sqrt(e * (2.0 + e)));
    const int N = n + static_cast<int>(std::ceil(22.0 / mu)) + 10;
    double up = 0.0, cur = 1.0, at_n = (N == n) ? 1.0 : 0.0;
    for (int k = N; k >= 1; --k) {
        const double down = (2.0 * k * A * cur - (k + 0.5) * up) / (k - 0.5);
        up = cur;
        cur = down;
        if (k - 1 == n) at_n = cur;
        if (std::abs(cur) > 1e250) {
            cur *= 1e-250;
            up *= 1e-250;
            at_n *= 1e-250;
        }
    }
    const double I0 = 2.0 * std::sqrt(2.0 * x) * ellint_K_comp(std::sqrt(y));
    const double In = at_n * (I0 / cur);
    const double value = In * std::pow(2.0 / x, n + 0.5) * prod_ratio(n, 4.0) / (2.0 * pi);
    return {value, N};
}

void check_domain(int n, double x) {
    if (n < 0) throw DomainError("hyp_Fn: n must be >= 0");
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("hyp_Fn: x must lie in [0, 1)");
}

bool connection_is_stable(int n, double y) {
    const double a = n + 0.5;
    return a * a * y <= 1.0;
}

double fn_value_any(int n, double x, double y) {
    if (x <= x_switch) return fn_series(n, x).value;
    if (connection_is_stable(n, y)) return fn_connection(n, y, nullptr).value;
    return fn_toroidal(n, x, y).value;
}

}  // namespace

double pochhammer(double x, unsigned n) {
    double p = 1.0;
    for (unsigned k = 0; k < n; ++k) p *= x + k;
    return p;
}

double digamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) throw DomainError("digamma: pole at non-positive integer");
    if (x < 0.0) return digamma(1.0 - x) - pi / std::tan(pi * x);
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    const double tail =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * 691.0 / 32760)))));
    return shift + std::log(x) - 0.5 / x - tail;
}

double ellint_K_comp(double kprime) {
    if (!(kprime > 0.0)) throw DomainError("ellint_K_comp: k' must be positive");
    double a = 1.0, b = kprime;
    for (int it = 0; it < 64 && std::abs(a - b) > 1e-16 * a; ++it) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return pi / (2.0 * a);
}

const char* to_string(HypBranch b) {
    switch (b) {
        case HypBranch::series: return "series";
        case HypBranch::log_connection: return "log_connection";
        case HypBranch::toroidal_recurrence: return "toroidal_recurrence";
    }
    return "?";
}

HypEvalResult hyp_Fn(int n, double x) { return hyp_Fn(n, x, 1.0 - x); }

HypEvalResult hyp_Fn(int n, double x, double y) {
    if (n < 1) throw DomainError("hyp_Fn: n must be >= 1");
    check_domain(n, x);
    HypEvalResult r;
    if (x <= x_switch) {
        const auto p = fn_series(n, x);
        r.value = p.value;
        r.terms_used = p.terms;
        r.branch = HypBranch::series;
        return r;
    }
    if (connection_is_stable(n, y)) {
        const auto p = fn_connection(n, y, &r.log_part_coefficient);
        r.value = p.value;
        r.terms_used = p.terms;
        r.branch = HypBranch::log_connection;
        return r;
    }
    const auto p = fn_toroidal(n, x, y);
    r.value = p.value;
    r.terms_used = p.terms;
    r.branch = HypBranch::toroidal_recurrence;
    // Coefficient of ln(1-x): -Gamma(2a)/Gamma(a)^2 * 2F1(a, a; 1; y), positive terms.
    const double a = n + 0.5;
    double c = 1.0, s = 1.0;
    for (int k = 0; k < series_cap; ++k) {
        const double ratio = (a + k) * (a + k) / ((k + 1.0) * (k + 1.0)) * y;
        c *= ratio;
        s += c;
        if (ratio < 1.0 && c < 1e-17 * s) break;
    }
    r.log_part_coefficient = -prod_ratio(n, 8.0) / pi * s;
    return r;
}

double hyp_Fn_value(int n, double x, double y) {
    // x may round to 1 when y is below machine epsilon; y carries the information.
    if (n < 0 || !(x >= 0.0) || !(y > 0.0) || x > 1.0) throw DomainError("hyp_Fn: x must lie in [0, 1)");
    return fn_value_any(n, x, y);
}

double hyp2f1_series(double a, double b, double c, double z, int max_terms, int* terms) {
    if (!(std::abs(z) < 1.0)) throw DomainError("hyp2f1_series: |z| must be < 1");
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < max_terms; ++k) {
        const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        term *= ratio;
        sum += term;
        if (std::abs(ratio) < 1.0 && std::abs(term) < 1e-17 * std::abs(sum)) {
            if (terms) *terms = k + 2;
            return sum;
        }
        if (term == 0.0) {
            if (terms) *terms = k + 2;
            return sum;
        }
    }
    throw DomainError("hyp2f1_series: no convergence within " + std::to_string(max_terms) + " terms");
}

double angular_integral(unsigned n, double beta, double A) {
    if (!(A > 1.0)) throw DomainError("angular_integral: A must exceed 1");
    if (beta < 0.0) throw DomainError("angular_integral: beta must be >= 0");
    double coef = 1.0;
    for (unsigned k = 1; k <= n; ++k) coef *= (0.5 * beta + k - 1.0) / (2.0 * k);
    if (coef == 0.0) return 0.0;
    const double z = 2.0 / (1.0 + A);
    double F;
    if (beta == 1.0) {
        F = fn_value_any(static_cast<int>(n), z, (A - 1.0) / (A + 1.0));
    } else {
        F = hyp2f1_series(n + 0.5 * beta, n + 0.5, 2.0 * n + 1.0, z);
    }
    return 2.0 * pi * std::pow(1.0 + A, -0.5 * beta - n) * coef * F;
}

}  // namespace qgpatch::specfun
