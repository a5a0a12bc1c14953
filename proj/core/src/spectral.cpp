#include "qgpatch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Dense>

#include "qgpatch/errors.hpp"
#include "qgpatch/parallel.hpp"
#include "qgpatch/quadrature.hpp"
#include "qgpatch/symeig.hpp"

namespace qgpatch::spectral {

namespace {
constexpr double pi = std::numbers::pi;

double graded(double u, double p) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return pi;
    const double a = std::pow(u, p), b = std::pow(1.0 - u, p);
    return pi * a / (a + b);
}

// Fixed-level tanh-sinh over the nodes of all levels up to L.
template <class F>
void de_each(int L, F&& f) {
    const double scale = std::ldexp(1.0, -L);
    for (int lev = 0; lev <= L; ++lev)
        for (const auto& nd : quad::de_level_nodes(lev)) f(nd.s, nd.sc, nd.w * scale);
}

// Adds int_{panel p} kern(psi) L_j(psi) dpsi into acc[0..q) for a target at phi.
// kern(psi, delta) with delta = psi - phi formed from the endpoint offsets.
template <class K>
void panel_product(const QuadratureGrid& g, int p, double phi, int L, K&& kern, double* acc) {
    const double a = g.breaks[p], b = g.breaks[p + 1];
    std::vector<double> basis(g.q);
    auto add = [&](double psi, double delta, double w) {
        const double v = kern(psi, delta) * w;
        if (v == 0.0) return;
        g.lagrange(p, psi, basis.data());
        for (int j = 0; j < g.q; ++j) acc[j] += v * basis[j];
    };
    if (phi > a && phi < b) {
        const double la = phi - a, lb = b - phi;
        de_each(L, [&](double, double sc, double w) {
            const double t = la * sc;
            if (t > 0.0) add(phi - t, -t, la * w);
        });
        de_each(L, [&](double s, double, double w) {
            const double t = lb * s;
            if (t > 0.0) add(phi + t, t, lb * w);
        });
    } else if (b <= phi) {
        const double len = b - a, gapb = b - phi;
        de_each(L, [&](double, double sc, double w) {
            const double t = len * sc;
            const double delta = gapb - t;
            if (delta != 0.0) add(b - t, delta, len * w);
        });
    } else {
        const double len = b - a, gapa = a - phi;
        de_each(L, [&](double s, double, double w) {
            const double t = len * s;
            const double delta = gapa + t;
            if (delta != 0.0) add(a + t, delta, len * w);
        });
    }
}

}  // namespace

std::pair<int, int> QuadratureGrid::near_panels(int k) const {
    const int p = panel_of[k];
    return {std::max(p - 1, 0), std::min(p + 1, panels() - 1)};
}

void QuadratureGrid::lagrange(int p, double psi, double* out) const {
    const auto& ref = quad::gauss_legendre(q);
    const double a = breaks[p], b = breaks[p + 1];
    const double t = (2.0 * psi - a - b) / (b - a);
    for (int j = 0; j < q; ++j)
        if (t == ref.x[j]) {
            std::fill(out, out + q, 0.0);
            out[j] = 1.0;
            return;
        }
    double den = 0.0;
    for (int j = 0; j < q; ++j) {
        out[j] = bary[j] / (t - ref.x[j]);
        den += out[j];
    }
    for (int j = 0; j < q; ++j) out[j] /= den;
}

std::vector<double> QuadratureGrid::log_weights(double phi0) const {
    std::vector<double> w(nodes.size());
    int p0 = 0;
    while (p0 + 1 < panels() && breaks[p0 + 1] <= phi0) ++p0;
    const int lo = std::max(p0 - 1, 0), hi = std::min(p0 + 1, panels() - 1);
    for (int l = 0; l < size(); ++l) {
        const int p = panel_of[l];
        if (p < lo || p > hi) w[l] = weights[l] * std::log(std::abs(phi0 - nodes[l]));
    }
    std::vector<double> acc(q);
    for (int p = lo; p <= hi; ++p) {
        std::fill(acc.begin(), acc.end(), 0.0);
        panel_product(*this, p, phi0, 6, [](double, double delta) { return std::log(std::abs(delta)); }, acc.data());
        for (int j = 0; j < q; ++j) w[first_node(p) + j] = acc[j];
    }
    return w;
}

double QuadratureGrid::integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k) s += weights[k] * f(nodes[k]);
    return s;
}

QuadratureGrid build_grid(int N, double grading) {
    if (N < 16) throw DomainError("build_grid: N must be >= 16");
    if (!(grading >= 1.0)) throw DomainError("build_grid: grading must be >= 1");
    QuadratureGrid g;
    g.grading = grading;
    g.q = 0;
    for (int q = 16; q >= 4; --q)
        if (N % q == 0) {
            g.q = q;
            break;
        }
    if (g.q == 0) throw DomainError("build_grid: N must have a divisor between 4 and 16");
    const int P = N / g.q;
    for (int p = 0; p <= P; ++p) g.breaks.push_back(graded(static_cast<double>(p) / P, grading));
    const auto& ref = quad::gauss_legendre(g.q);
    for (int p = 0; p < P; ++p) {
        const double a = g.breaks[p], b = g.breaks[p + 1];
        for (int j = 0; j < g.q; ++j) {
            g.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * ref.x[j]);
            g.weights.push_back(0.5 * (b - a) * ref.w[j]);
            g.panel_of.push_back(p);
        }
    }
    g.bary.resize(g.q);
    for (int j = 0; j < g.q; ++j)
        g.bary[j] = ((j % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - ref.x[j] * ref.x[j]) * ref.w[j]);

    g.log_table.resize(N);
    for (int k = 0; k < N; ++k) {
        const auto [lo, hi] = g.near_panels(k);
        std::vector<double> acc(g.q);
        for (int p = lo; p <= hi; ++p) {
            std::fill(acc.begin(), acc.end(), 0.0);
            panel_product(g, p, g.nodes[k], 6, [](double, double delta) { return std::log(std::abs(delta)); },
                          acc.data());
            for (int j = 0; j < g.q; ++j) g.log_table[k].emplace_back(g.first_node(p) + j, acc[j]);
        }
    }
    return g;
}

NodeData compute_node_data(const KernelContext& ctx, const QuadratureGrid& grid) {
    NodeData d;
    const int N = grid.size();
    d.sin_phi.resize(N);
    d.r1.resize(N);
    d.r2.resize(N);
    d.nu_base1.resize(N);
    d.nu_base2.resize(N);
    const bool mirror = ctx.config.validated.symmetry_defect <= 1e-10 && grid.panels() % 2 == 0;
    for (int k = 0; k < N; ++k) {
        d.sin_phi[k] = std::sin(grid.nodes[k]);
        d.r1[k] = ctx.config.outer.r(grid.nodes[k]);
        d.r2[k] = ctx.config.inner.r(grid.nodes[k]);
    }
    const int count = mirror ? N / 2 : N;
    parallel_for(count, [&](std::size_t k) {
        d.nu_base1[k] = kernels::nu_base(ctx, 1, grid.nodes[k]);
        d.nu_base2[k] = kernels::nu_base(ctx, 2, grid.nodes[k]);
    });
    if (mirror)
        for (int k = count; k < N; ++k) {
            d.nu_base1[k] = d.nu_base1[N - 1 - k];
            d.nu_base2[k] = d.nu_base2[N - 1 - k];
        }
    return d;
}

std::vector<double> nystrom_weights(const QuadratureGrid& grid, bool singular,
                                    const std::function<double(int, double, double)>& kern,
                                    const NystromOptions& opt) {
    const int N = grid.size();
    std::vector<double> W(static_cast<std::size_t>(N) * N, 0.0);
    parallel_for(N, [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        const double phi = grid.nodes[k];
        double* row = W.data() + static_cast<std::size_t>(k) * N;
        int lo = grid.panels(), hi = -1;
        if (singular) std::tie(lo, hi) = grid.near_panels(k);
        for (int l = 0; l < N; ++l) {
            const int p = grid.panel_of[l];
            if (p >= lo && p <= hi) continue;
            row[l] = grid.weights[l] * kern(k, grid.nodes[l], grid.nodes[l] - phi);
        }
        for (int p = lo; p <= hi; ++p)
            panel_product(grid, p, phi, opt.de_level,
                          [&](double psi, double delta) { return kern(k, psi, delta); }, row + grid.first_node(p));
    });
    return W;
}

KernelMatrices build_kernel_matrices(int n, const KernelContext& ctx, const QuadratureGrid& grid,
                                     std::shared_ptr<const NodeData> nodes, const NystromOptions& opt) {
    KernelMatrices km;
    km.n = n;
    km.N = grid.size();
    km.nodes = nodes;
    const int N = km.N;
    const auto& nd = *nodes;
    auto self_block = [&](int i) {
        auto W = nystrom_weights(
            grid, true,
            [&](int k, double, double delta) { return kernels::H_n_offset(ctx, i, i, n, grid.nodes[k], delta); }, opt);
        const auto& r = i == 1 ? nd.r1 : nd.r2;
        for (int k = 0; k < N; ++k) {
            const double pk = grid.weights[k] * nd.sin_phi[k] * r[k] * r[k];
            for (int l = 0; l < N; ++l) W[static_cast<std::size_t>(k) * N + l] *= pk;
        }
        return W;
    };
    auto symmetrised = [&](std::vector<double> W) {
        for (int k = 0; k < N; ++k)
            for (int l = 0; l < k; ++l) {
                const std::size_t kl = static_cast<std::size_t>(k) * N + l, lk = static_cast<std::size_t>(l) * N + k;
                W[kl] = W[lk] = 0.5 * (W[kl] + W[lk]);
            }
        return W;
    };
    km.R11 = self_block(1);
    km.R22 = self_block(2);
    km.B11 = symmetrised(km.R11);
    km.B22 = symmetrised(km.R22);
    km.B12.assign(static_cast<std::size_t>(N) * N, 0.0);
    parallel_for(N, [&](std::size_t kk) {
        const int k = static_cast<int>(kk);
        const double pk = grid.weights[k] * nd.sin_phi[k] * nd.r1[k] * nd.r1[k];
        for (int l = 0; l < N; ++l)
            km.B12[kk * N + l] = pk * kernels::H_n(ctx, 1, 2, n, grid.nodes[k], grid.nodes[l]) * grid.weights[l];
    });
    return km;
}

DiscreteOperator assemble(std::shared_ptr<const KernelMatrices> kmp, double Omega, const KernelContext& ctx,
                          std::shared_ptr<const QuadratureGrid> grid, const OmegaWindow* window) {
    if (window) {
        const double eps = 1e-6 * window->gap;
        if (!(window->gap > 0.0)) throw WindowError("assemble: empty Omega window");
        if (!(Omega >= window->omega_bar_2 + eps && Omega <= window->omega_bar_1 - eps))
            throw WindowError("assemble: Omega must lie inside the window by at least 1e-6 gap");
    }
    const auto& km = *kmp;
    const int N = km.N;
    const auto& nd = *km.nodes;
    DiscreteOperator op;
    op.blocks = kmp;
    op.n = km.n;
    op.Omega = Omega;
    op.N = N;
    op.grid = grid;
    op.d1 = ctx.config.d1;
    op.d2 = ctx.config.d2;
    op.nu1.resize(N);
    op.nu2.resize(N);
    op.sqrt_measure_1.resize(N);
    op.sqrt_measure_2.resize(N);
    const double ratio = op.d2 / op.d1;
    for (int k = 0; k < N; ++k) {
        op.nu1[k] = nd.nu_base1[k] - Omega;
        op.nu2[k] = Omega - nd.nu_base2[k];
        if (!(op.nu1[k] > 0.0) || !(op.nu2[k] > 0.0))
            throw WindowError("assemble: nu is not positive on the grid (Omega outside the window)");
        const double wk = grid->weights[k] * nd.sin_phi[k];
        op.sqrt_measure_1[k] = std::sqrt(wk * nd.r1[k] * nd.r1[k] * op.nu1[k]);
        op.sqrt_measure_2[k] = std::sqrt(ratio * wk * nd.r2[k] * nd.r2[k] * op.nu2[k]);
    }
    const std::size_t M = 2 * static_cast<std::size_t>(N);
    op.matrix.assign(M * M, 0.0);
    const double c11 = op.d1, c12 = -op.d2, c22 = op.d2 * op.d2 / op.d1;
    for (int k = 0; k < N; ++k) {
        const double a1 = 1.0 / op.sqrt_measure_1[k], a2 = 1.0 / op.sqrt_measure_2[k];
        for (int l = 0; l < N; ++l) {
            const std::size_t kl = static_cast<std::size_t>(k) * N + l;
            op.matrix[k * M + l] = c11 * km.B11[kl] * a1 / op.sqrt_measure_1[l];
            const double v12 = c12 * km.B12[kl] * a1 / op.sqrt_measure_2[l];
            op.matrix[k * M + N + l] = v12;
            op.matrix[(N + l) * M + k] = v12;
            op.matrix[(N + k) * M + N + l] = c22 * km.B22[kl] * a2 / op.sqrt_measure_2[l];
        }
    }
    return op;
}

DiscreteOperator assemble(int n, double Omega, const KernelContext& ctx, const QuadratureGrid& grid) {
    auto g = std::make_shared<const QuadratureGrid>(grid);
    auto nodes = std::make_shared<const NodeData>(compute_node_data(ctx, grid));
    auto km = std::make_shared<const KernelMatrices>(build_kernel_matrices(n, ctx, grid, nodes));
    return assemble(km, Omega, ctx, g, nullptr);
}

std::vector<double> nystrom_matrix(const DiscreteOperator& op) {
    const int N = op.N;
    const std::size_t M = 2 * static_cast<std::size_t>(N);
    std::vector<double> T(op.matrix);
    auto sm = [&](std::size_t i) { return i < static_cast<std::size_t>(N) ? op.sqrt_measure_1[i] : op.sqrt_measure_2[i - N]; };
    for (std::size_t r = 0; r < M; ++r)
        for (std::size_t c = 0; c < M; ++c) T[r * M + c] *= sm(c) / sm(r);
    return T;
}

std::vector<double> rowwise_matrix(const DiscreteOperator& op) {
    const int N = op.N;
    const std::size_t M = 2 * static_cast<std::size_t>(N);
    std::vector<double> T(M * M);
    std::vector<double> e1(N, 0.0), e2(N, 0.0), c1(N), c2(N);
    for (std::size_t c = 0; c < M; ++c) {
        (c < static_cast<std::size_t>(N) ? e1[c] : e2[c - N]) = 1.0;
        apply_rowwise(op, e1, e2, c1, c2);
        (c < static_cast<std::size_t>(N) ? e1[c] : e2[c - N]) = 0.0;
        for (int r = 0; r < N; ++r) {
            T[r * M + c] = c1[r];
            T[(N + r) * M + c] = c2[r];
        }
    }
    return T;
}

void apply_rowwise(const DiscreteOperator& op, const std::vector<double>& h1, const std::vector<double>& h2,
                   std::vector<double>& out1, std::vector<double>& out2) {
    const auto& km = *op.blocks;
    const int N = op.N;
    const double ratio = op.d2 / op.d1;
    out1.assign(N, 0.0);
    out2.assign(N, 0.0);
    for (int k = 0; k < N; ++k) {
        const double* r11 = km.R11.data() + static_cast<std::size_t>(k) * N;
        const double* r22 = km.R22.data() + static_cast<std::size_t>(k) * N;
        const double* b12 = km.B12.data() + static_cast<std::size_t>(k) * N;
        double s1 = 0.0, s2 = 0.0, s12 = 0.0;
        for (int l = 0; l < N; ++l) {
            s1 += r11[l] * h1[l];
            s2 += r22[l] * h2[l];
            s12 += b12[l] * h2[l];
        }
        out1[k] += (op.d1 * s1 - op.d2 * s12) / (op.sqrt_measure_1[k] * op.sqrt_measure_1[k]);
        out2[k] += ratio * op.d2 * s2 / (op.sqrt_measure_2[k] * op.sqrt_measure_2[k]);
        // B21 = B12^T
        const double w = -ratio * op.d1 * h1[k];
        for (int l = 0; l < N; ++l) out2[l] += w * b12[l] / (op.sqrt_measure_2[l] * op.sqrt_measure_2[l]);
    }
}

bool sign_pattern_ok(const EigenPair& p, double rel_tol) {
    double mx = 0.0;
    for (double v : p.h1) mx = std::max(mx, std::abs(v));
    for (double v : p.h2) mx = std::max(mx, std::abs(v));
    const double tol = rel_tol * mx;
    for (double v : p.h1)
        if (v < -tol) return false;
    for (double v : p.h2)
        if (v > tol) return false;
    return true;
}

EigenPair largest_eigenpair(const DiscreteOperator& op) {
    const int M = 2 * op.N;
    auto res = linalg::symmetric_eigen(op.matrix, M, true);
    EigenPair p;
    p.lambda = res.values[M - 1];
    p.second = res.values[M - 2];
    const double* u = res.vectors.data() + static_cast<std::size_t>(M - 1) * M;
    p.h1.resize(op.N);
    p.h2.resize(op.N);
    for (int k = 0; k < op.N; ++k) {
        p.h1[k] = u[k] / op.sqrt_measure_1[k];
        p.h2[k] = u[op.N + k] / op.sqrt_measure_2[k];
    }
    // The symmetric matrix averages the near-field blocks, which perturbs the values at
    // nodes next to the poles. Inverse iteration on the row-wise matrix restores them and
    // makes h an eigenvector of the operator the linearization actually applies.
    {
        const auto T = rowwise_matrix(op);
        Eigen::MatrixXd A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            T.data(), M, M);
        A.diagonal().array() -= p.lambda;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        Eigen::VectorXd x(M);
        for (int k = 0; k < op.N; ++k) {
            x[k] = p.h1[k];
            x[op.N + k] = p.h2[k];
        }
        for (int it = 0; it < 2; ++it) {
            x = lu.solve(x);
            x /= x.cwiseAbs().maxCoeff();
        }
        for (int k = 0; k < op.N; ++k) {
            p.h1[k] = x[k];
            p.h2[k] = x[op.N + k];
        }
    }
    double nrm = 0.0;
    nrm = std::sqrt(inner(op, p.h1, p.h2, p.h1, p.h2));
    for (auto& v : p.h1) v /= nrm;
    for (auto& v : p.h2) v /= nrm;
    int imax = 0;
    for (int k = 1; k < op.N; ++k)
        if (std::abs(p.h1[k]) > std::abs(p.h1[imax])) imax = k;
    if (p.h1[imax] < 0.0) {
        for (auto& v : p.h1) v = -v;
        for (auto& v : p.h2) v = -v;
    }
    p.normalized = std::abs(inner(op, p.h1, p.h2, p.h1, p.h2) - 1.0) < 1e-10;
    p.sign_ok = sign_pattern_ok(p);
    return p;
}

std::vector<double> all_eigenvalues(const DiscreteOperator& op) {
    return linalg::symmetric_eigen(op.matrix, 2 * op.N, false).values;
}

std::pair<double, double> top_eigenvalues(const DiscreteOperator& op) {
    const auto v = all_eigenvalues(op);
    return {v[v.size() - 1], v[v.size() - 2]};
}

double inner(const DiscreteOperator& op, const std::vector<double>& a1, const std::vector<double>& a2,
             const std::vector<double>& b1, const std::vector<double>& b2) {
    double s = 0.0;
    for (int k = 0; k < op.N; ++k) {
        s += op.sqrt_measure_1[k] * op.sqrt_measure_1[k] * a1[k] * b1[k];
        s += op.sqrt_measure_2[k] * op.sqrt_measure_2[k] * a2[k] * b2[k];
    }
    return s;
}

double lambda_derivative(const DiscreteOperator& op, const EigenPair& p) {
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < op.N; ++k) {
        s1 += op.sqrt_measure_1[k] * op.sqrt_measure_1[k] * p.h1[k] * p.h1[k] / op.nu1[k];
        s2 += op.sqrt_measure_2[k] * op.sqrt_measure_2[k] * p.h2[k] * p.h2[k] / op.nu2[k];
    }
    return p.lambda * (s1 - s2);
}

EigenBounds eigen_bounds(const DiscreteOperator& op, const KernelContext& ctx, const NystromOptions& opt) {
    EigenBounds b;
    const auto& g = *op.grid;
    const int N = op.N;
    const auto& cfg = ctx.config;
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            // ||K_ij||^2 = int int H_ij^2 sin(phi) r_i^2(phi) / (nu_i(phi) nu_j(psi) sin(psi) r_j^2(psi))
            auto kern = [&](int k, double psi, double delta) {
                const double h = i == j ? kernels::H_n_offset(ctx, i, j, op.n, g.nodes[k], delta)
                                        : kernels::H_n(ctx, i, j, op.n, g.nodes[k], psi);
                if (h == 0.0) return 0.0;
                const double rj = cfg.profile(j).r(psi);
                return h * (h / (std::sin(psi) * rj * rj));
            };
            const auto V = nystrom_weights(g, i == j, kern, opt);
            const auto& nui = i == 1 ? op.nu1 : op.nu2;
            const auto& nuj = j == 1 ? op.nu1 : op.nu2;
            double s = 0.0;
            for (int k = 0; k < N; ++k) {
                const double rik = cfg.profile(i).r(g.nodes[k]);
                double row = 0.0;
                for (int l = 0; l < N; ++l) row += V[static_cast<std::size_t>(k) * N + l] / nuj[l];
                s += g.weights[k] * std::sin(g.nodes[k]) * rik * rik / nui[k] * row;
            }
            b.hs[i - 1][j - 1] = std::sqrt(s);
        }
    double mx = 0.0;
    for (auto& r : b.hs)
        for (double v : r) mx = std::max(mx, v);
    b.upper = 2.0 * (op.d1 + op.d2) * mx;

    // Test vector h1 = rho / (sin^1/2 r1 nu1^1/2), rho = sin^1/2 / sqrt 2; in S-coordinates u = sqrt(w sin / 2).
    std::vector<double> u(N);
    double uu = 0.0;
    for (int k = 0; k < N; ++k) {
        u[k] = std::sqrt(0.5 * g.weights[k] * std::sin(g.nodes[k]));
        uu += u[k] * u[k];
    }
    double q = 0.0;
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) q += u[k] * op.at(k, l) * u[l];
    b.lower = q / uu;
    return b;
}

SpectralProblem::SpectralProblem(KernelContext ctx, int N, double grading, NystromOptions opt)
    : SpectralProblem(ctx, N, grading, opt, kernels::omega_window(ctx)) {}

SpectralProblem::SpectralProblem(KernelContext ctx, int N, double grading, NystromOptions opt, OmegaWindow window)
    : ctx_(std::move(ctx)), opt_(opt), window_(window) {
    grid_ = std::make_shared<const QuadratureGrid>(build_grid(N, grading));
    nodes_ = std::make_shared<const NodeData>(compute_node_data(ctx_, *grid_));
}

std::shared_ptr<const KernelMatrices> SpectralProblem::matrices(int n) const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
    }
    auto km = std::make_shared<const KernelMatrices>(build_kernel_matrices(n, ctx_, *grid_, nodes_, opt_));
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = cache_.emplace(n, km);
    return it->second;
}

DiscreteOperator SpectralProblem::assemble(int n, double Omega) const {
    return spectral::assemble(matrices(n), Omega, ctx_, grid_, &window_);
}

double SpectralProblem::lambda(int n, double Omega) const { return top_eigenvalues(assemble(n, Omega)).first; }

EigenPair SpectralProblem::eigenpair(int n, double Omega) const { return largest_eigenpair(assemble(n, Omega)); }

std::string SpectralReport::to_csv() const {
    std::string out =
        "# n: angular mode; Omega: angular velocity; lambda: largest eigenvalue of T^n_Omega (dimensionless); "
        "gap_to_second: lambda minus second eigenvalue; sign_ok: top eigenvector has h1>=0, h2<=0\n";
    out += "n,Omega,lambda,gap_to_second,sign_ok\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", r.n, r.Omega, r.lambda, r.gap_to_second,
                      r.sign_ok ? 1 : 0);
        out += buf;
    }
    return out;
}

SpectralReport eigen_sweep(const std::vector<int>& n_list, const std::vector<double>& Omega_list,
                           const SpectralProblem& problem) {
    SpectralReport rep;
    const std::size_t nn = n_list.size(), no = Omega_list.size();
    rep.rows.resize(nn * no);
    for (std::size_t a = 0; a < nn; ++a) {
        problem.matrices(n_list[a]);
        parallel_for(no, [&](std::size_t b) {
            const auto p = problem.eigenpair(n_list[a], Omega_list[b]);
            rep.rows[a * no + b] = {n_list[a], Omega_list[b], p.lambda, p.lambda - p.second, p.sign_ok};
        });
    }
    for (std::size_t b = 0; b < no; ++b)
        for (std::size_t a = 1; a < nn; ++a)
            if ((n_list[a] > n_list[a - 1]) != (rep.rows[a * no + b].lambda < rep.rows[(a - 1) * no + b].lambda))
                rep.decreasing_in_n = false;
    for (std::size_t a = 0; a < nn; ++a)
        for (std::size_t b = 1; b < no; ++b)
            if ((Omega_list[b] > Omega_list[b - 1]) != (rep.rows[a * no + b].lambda > rep.rows[a * no + b - 1].lambda))
                rep.increasing_in_omega = false;
    return rep;
}

BoundaryReport boundary_decay_check(const EigenPair& pair, int n, const QuadratureGrid& grid) {
    BoundaryReport rep;
    const int N = grid.size();
    const std::vector<double>* comp[2] = {&pair.h1, &pair.h2};
    for (int c = 0; c < 2; ++c)
        for (double v : *comp[c]) rep.max_abs = std::max(rep.max_abs, std::abs(v));
    auto env = [&](double phi) {
        const double s = std::sin(phi);
        return std::pow(s, n - 1) + std::sqrt(s);
    };
    // Envelope constant fitted away from the poles, then checked everywhere.
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < N; ++k)
            if (std::sin(grid.nodes[k]) >= 0.5) rep.c_fit = std::max(rep.c_fit, std::abs((*comp[c])[k]) / env(grid.nodes[k]));
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < N; ++k)
            rep.envelope_violation =
                std::max(rep.envelope_violation, std::abs((*comp[c])[k]) / (rep.c_fit * env(grid.nodes[k])));
    // Polynomial extrapolation to each pole from the nearest 3 and 4 nodes.
    auto extrap = [&](const std::vector<double>& h, bool south, int m) {
        double s = 0.0;
        const double target = south ? pi : 0.0;
        for (int a = 0; a < m; ++a) {
            const int ka = south ? N - 1 - a : a;
            double L = 1.0;
            for (int b = 0; b < m; ++b) {
                if (b == a) continue;
                const int kb = south ? N - 1 - b : b;
                L *= (target - grid.nodes[kb]) / (grid.nodes[ka] - grid.nodes[kb]);
            }
            s += L * h[ka];
        }
        return s;
    };
    bool ok = rep.envelope_violation <= 10.0 && rep.max_abs > 0.0;
    for (int c = 0; c < 2; ++c)
        for (int pole = 0; pole < 2; ++pole) {
            const double e3 = extrap(*comp[c], pole == 1, 3), e4 = extrap(*comp[c], pole == 1, 4);
            rep.endpoint_value[c][pole] = e4;
            rep.endpoint_error_estimate[c][pole] = std::abs(e4 - e3);
            if (std::abs(e4) > std::max(10.0 * std::abs(e4 - e3), 1e-4 * rep.max_abs)) ok = false;
        }
    rep.passed = ok;
    return rep;
}

}  // namespace qgpatch::spectral
