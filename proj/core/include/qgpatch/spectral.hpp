#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "qgpatch/kernels.hpp"

namespace qgpatch::spectral {

using kernels::KernelContext;
using kernels::OmegaWindow;

// Composite Gauss-Legendre on graded panels of (0, pi).
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> breaks;   // panel breakpoints, size panels()+1
    std::vector<int> panel_of;    // panel index of each node
    int q = 16;                   // nodes per panel
    double grading = 2.0;
    std::vector<double> bary;     // barycentric weights of the reference nodes
    // Near-panel corrections for int g(psi) ln|phi_k - psi| dpsi, per node k:
    // (node index, weight) pairs replacing the plain weights on the panels adjacent to k.
    std::vector<std::vector<std::pair<int, double>>> log_table;

    int size() const { return static_cast<int>(nodes.size()); }
    int panels() const { return static_cast<int>(breaks.size()) - 1; }
    int first_node(int p) const { return p * q; }
    // Panels whose Nystrom weights for target node k are product-integrated.
    std::pair<int, int> near_panels(int k) const;
    // Lagrange basis of panel p at psi; out has q entries.
    void lagrange(int p, double psi, double* out) const;
    // Full weight vector for int g(psi) ln|phi0 - psi| dpsi for arbitrary phi0.
    std::vector<double> log_weights(double phi0) const;
    double integrate(const std::function<double(double)>& f) const;
};

QuadratureGrid build_grid(int N, double grading = 2.0);

// Omega-independent data at the grid nodes.
struct NodeData {
    std::vector<double> sin_phi, r1, r2;
    std::vector<double> nu_base1, nu_base2;  // nu_1 = base1 - Omega, nu_2 = Omega - base2
};

NodeData compute_node_data(const KernelContext& ctx, const QuadratureGrid& grid);

// Product-integration controls.
struct NystromOptions {
    int de_level = 5;
};

// Omega-independent symmetric bilinear blocks for mode n:
//   B_ii[k][l] ~ w_k sin(phi_k) r_i(phi_k)^2 int H^n_ii(phi_k, psi) L_l(psi) dpsi (symmetrised)
//   B_12[k][l] = w_k sin(phi_k) r_1(phi_k)^2 H^n_12(phi_k, psi_l) w_l
// R_ii are the unsymmetrised row-wise blocks; they reproduce the integral operator
// node by node and are used to map eigenvectors back to function values.
struct KernelMatrices {
    int n = 0;
    int N = 0;
    std::vector<double> B11, B12, B22;
    std::vector<double> R11, R22;
    std::shared_ptr<const NodeData> nodes;
};

KernelMatrices build_kernel_matrices(int n, const KernelContext& ctx, const QuadratureGrid& grid,
                                     std::shared_ptr<const NodeData> nodes, const NystromOptions& opt = {});

// Near-field product-integration matrix of an arbitrary kernel k(phi_k, psi) on block (i, i)
// or (i, j): returns W with int k(phi_k, psi) h(psi) dpsi ~ sum_l W[k][l] h(psi_l).
// kern receives (k, psi, delta = psi - phi_k).
std::vector<double> nystrom_weights(const QuadratureGrid& grid, bool singular,
                                    const std::function<double(int, double, double)>& kern,
                                    const NystromOptions& opt = {});

struct DiscreteOperator {
    int n = 0;
    double Omega = 0.0;
    int N = 0;
    std::vector<double> matrix;  // row-major 2N x 2N
    std::vector<double> sqrt_measure_1, sqrt_measure_2;
    std::vector<double> nu1, nu2;
    double d1 = 0.0, d2 = 0.0;
    std::shared_ptr<const QuadratureGrid> grid;
    std::shared_ptr<const KernelMatrices> blocks;

    double at(int r, int c) const { return matrix[static_cast<std::size_t>(r) * 2 * N + c]; }
};

// S = D^{-1/2} B D^{-1/2}; throws WindowError if nu <= 0 at a node, or if a
// window is given and Omega is within 1e-6 gap of either end.
DiscreteOperator assemble(std::shared_ptr<const KernelMatrices> km, double Omega, const KernelContext& ctx,
                          std::shared_ptr<const QuadratureGrid> grid, const OmegaWindow* window = nullptr);

// Convenience: builds the blocks for this n from scratch.
DiscreteOperator assemble(int n, double Omega, const KernelContext& ctx, const QuadratureGrid& grid);

// Applies the row-wise Nystrom operator: out = T h (h and out hold N values per component).
// Unlike S it keeps each row's own near-field weights (no averaging with the transpose).
void apply_rowwise(const DiscreteOperator& op, const std::vector<double>& h1, const std::vector<double>& h2,
                   std::vector<double>& out1, std::vector<double>& out2);
// D^{-1} B_sym = D^{-1/2} S D^{1/2}, exactly similar to S.
std::vector<double> nystrom_matrix(const DiscreteOperator& op);
// Matrix of apply_rowwise; its spectrum differs from S by the symmetrisation error.
std::vector<double> rowwise_matrix(const DiscreteOperator& op);

struct EigenPair {
    double lambda = 0.0;
    double second = 0.0;  // next eigenvalue below lambda
    std::vector<double> h1, h2;
    bool normalized = false;
    bool sign_ok = false;  // h1 >= -tol, h2 <= tol with tol = 1e-8 max|H|
};

EigenPair largest_eigenpair(const DiscreteOperator& op);
// Two largest eigenvalues without eigenvectors (descending).
std::pair<double, double> top_eigenvalues(const DiscreteOperator& op);
std::vector<double> all_eigenvalues(const DiscreteOperator& op);

// Discrete H_Omega inner product and norm.
double inner(const DiscreteOperator& op, const std::vector<double>& a1, const std::vector<double>& a2,
             const std::vector<double>& b1, const std::vector<double>& b2);
bool sign_pattern_ok(const EigenPair& p, double rel_tol = 1e-8);

// dlambda/dOmega from the normalised eigenvector:
// lambda (int nu1^-1 h1^2 dmu1 - (d2/d1) int nu2^-1 h2^2 dmu2).
double lambda_derivative(const DiscreteOperator& op, const EigenPair& p);

struct EigenBounds {
    double lower = 0.0;        // Rayleigh quotient of (rho / (sin^1/2 r1 nu1^1/2), 0), rho ~ sin^1/2
    double upper = 0.0;        // 2 (d1 + d2) max ||K_ij||_{L2(mu x mu)}
    double hs[2][2] = {{0, 0}, {0, 0}};
};

EigenBounds eigen_bounds(const DiscreteOperator& op, const KernelContext& ctx, const NystromOptions& opt = {});

// Shared, cached spectral setup for one configuration and grid.
class SpectralProblem {
public:
    SpectralProblem(KernelContext ctx, int N, double grading = 2.0, NystromOptions opt = {});
    SpectralProblem(KernelContext ctx, int N, double grading, NystromOptions opt, OmegaWindow window);

    const KernelContext& context() const { return ctx_; }
    const QuadratureGrid& grid() const { return *grid_; }
    std::shared_ptr<const QuadratureGrid> grid_ptr() const { return grid_; }
    const OmegaWindow& window() const { return window_; }
    const NodeData& nodes() const { return *nodes_; }
    const NystromOptions& options() const { return opt_; }

    std::shared_ptr<const KernelMatrices> matrices(int n) const;
    DiscreteOperator assemble(int n, double Omega) const;
    double lambda(int n, double Omega) const;
    EigenPair eigenpair(int n, double Omega) const;
    // Omega at relative position t in the window (0 -> bar2, 1 -> bar1).
    double omega_at(double t) const { return window_.omega_bar_2 + t * window_.gap; }
    double margin() const { return 1e-6 * window_.gap; }

private:
    KernelContext ctx_;
    std::shared_ptr<const QuadratureGrid> grid_;
    std::shared_ptr<const NodeData> nodes_;
    NystromOptions opt_;
    OmegaWindow window_;
    mutable std::mutex mu_;
    mutable std::map<int, std::shared_ptr<const KernelMatrices>> cache_;
};

struct SweepRow {
    int n;
    double Omega, lambda, gap_to_second;
    bool sign_ok;
};

struct SpectralReport {
    std::vector<SweepRow> rows;  // n-major order
    bool decreasing_in_n = true;
    bool increasing_in_omega = true;
    std::string to_csv() const;
};

SpectralReport eigen_sweep(const std::vector<int>& n_list, const std::vector<double>& Omega_list,
                           const SpectralProblem& problem);

struct BoundaryReport {
    double c_fit = 0.0;
    double envelope_violation = 0.0;   // max |h|/(C env) over all nodes
    double endpoint_value[2][2] = {};  // [component][pole]
    double endpoint_error_estimate[2][2] = {};
    double max_abs = 0.0;
    bool passed = false;
};

BoundaryReport boundary_decay_check(const EigenPair& pair, int n, const QuadratureGrid& grid);

}  // namespace qgpatch::spectral
