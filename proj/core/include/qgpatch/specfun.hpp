#pragma once

#include <cstdint>

namespace qgpatch::specfun {

// x (x+1) ... (x+n-1); overflows to +inf for large n.
double pochhammer(double x, unsigned n);

double digamma(double x);

// Complete elliptic integral of the first kind, parametrised by the
// complementary modulus k' = sqrt(1 - k^2) so that k -> 1 stays accurate.
double ellint_K_comp(double kprime);

enum class HypBranch { series, log_connection, toroidal_recurrence };

const char* to_string(HypBranch b);

struct HypEvalResult {
    double value = 0.0;
    double log_part_coefficient = 0.0;  // multiplies ln(1-x); 0 on the series branch
    HypBranch branch = HypBranch::series;
    int terms_used = 0;
};

inline constexpr double x_switch = 0.7;

// F_n(x) = 2F1(n+1/2, n+1/2; 2n+1; x), n >= 1, 0 <= x < 1.
HypEvalResult hyp_Fn(int n, double x);

// Same, with y = 1 - x supplied separately. Callers that can form 1 - x
// without cancellation should use this form near x = 1.
HypEvalResult hyp_Fn(int n, double x, double y);

// Value only; skips the log coefficient. Used on kernel hot paths.
double hyp_Fn_value(int n, double x, double y);

// Power series for general 2F1(a, b; c; z), |z| < 1. Throws past max_terms.
double hyp2f1_series(double a, double b, double c, double z, int max_terms = 100000,
                     int* terms = nullptr);

// int_0^{2pi} cos(n t) (A - cos t)^{-beta/2} dt via the hypergeometric closed form.
double angular_integral(unsigned n, double beta, double A);

}  // namespace qgpatch::specfun
