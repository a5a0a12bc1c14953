#include "qgpatch/symeig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qgpatch::linalg {

namespace {

// Householder tridiagonalisation in place. On return d holds the diagonal,
// e the subdiagonal in e[1..n-1], and a the orthogonal transform (columns) if vecs.
void tred2(std::vector<double>& a, int n, std::vector<double>& d, std::vector<double>& e, bool vecs) {
    auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int i = n - 1; i > 0; --i) {
        const int l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (int k = 0; k <= l; ++k) scale += std::abs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    if (vecs) A(j, i) = A(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += A(j, k) * A(i, k);
                    for (int k = j + 1; k <= l; ++k) g += A(k, j) * A(i, k);
                    e[j] = g / h;
                    f += e[j] * A(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = A(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) A(j, k) -= f * e[k] + g * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    if (vecs) {
        for (int i = 0; i < n; ++i) {
            const int l = i - 1;
            if (d[i] != 0.0) {
                for (int j = 0; j <= l; ++j) {
                    double g = 0.0;
                    for (int k = 0; k <= l; ++k) g += A(i, k) * A(k, j);
                    for (int k = 0; k <= l; ++k) A(k, j) -= g * A(k, i);
                }
            }
            d[i] = A(i, i);
            A(i, i) = 1.0;
            for (int j = 0; j <= l; ++j) A(j, i) = A(i, j) = 0.0;
        }
    } else {
        for (int i = 0; i < n; ++i) d[i] = A(i, i);
    }
}

// Implicit QL on the tridiagonal (d, e). zt holds eigenvectors as rows.
void tql(std::vector<double>& d, std::vector<double>& e, int n, std::vector<double>* zt) {
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0, m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw std::runtime_error("symmetric_eigen: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    e[i + 1] = r = std::hypot(f, g);
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    d[i + 1] = g + (p = s * r);
                    g = c * r - b;
                    if (zt) {
                        double* zi = zt->data() + static_cast<std::size_t>(i) * n;
                        double* zi1 = zi + n;
                        for (int k = 0; k < n; ++k) {
                            f = zi1[k];
                            zi1[k] = s * zi[k] + c * f;
                            zi[k] = c * zi[k] - s * f;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

SymEigResult symmetric_eigen(std::vector<double> a, int n, bool want_vectors) {
    SymEigResult out;
    if (n == 0) return out;
    std::vector<double> d(n), e(n);
    tred2(a, n, d, e, want_vectors);
    std::vector<double> zt;
    if (want_vectors) {
        zt.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) zt[static_cast<std::size_t>(i) * n + k] = a[static_cast<std::size_t>(k) * n + i];
    }
    tql(d, e, n, want_vectors ? &zt : nullptr);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });
    out.values.resize(n);
    for (int i = 0; i < n; ++i) out.values[i] = d[order[i]];
    if (want_vectors) {
        out.vectors.resize(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            std::copy_n(zt.begin() + static_cast<std::size_t>(order[i]) * n, n,
                        out.vectors.begin() + static_cast<std::size_t>(i) * n);
    }
    return out;
}

}  // namespace qgpatch::linalg
