#pragma once

#include <complex>
#include <map>
#include <memory>
#include <vector>

#include "qgpatch/profiles.hpp"
#include "qgpatch/spectral.hpp"

namespace qgpatch::nonlinear {

using profiles::PatchPairConfig;
using spectral::QuadratureGrid;

// f_j(phi, theta) = sum_k f_{j,k}(phi) cos(k theta), with f_{j,k} sampled at the grid nodes
// and interpolated panel-wise (the pole value 0 is part of the end panels' data).
class SurfacePerturbation {
public:
    SurfacePerturbation(std::shared_ptr<const QuadratureGrid> grid, int fold = 1);

    // surface j in {1, 2}; k must be a positive multiple of fold.
    void set_mode(int j, int k, std::vector<double> values);
    const std::map<int, std::vector<double>>& modes(int j) const { return modes_[j - 1]; }
    int fold() const { return fold_; }
    int max_mode() const;
    const QuadratureGrid& grid() const { return *grid_; }
    std::shared_ptr<const QuadratureGrid> grid_ptr() const { return grid_; }

    double sup_norm() const;  // sum over modes of max |f_{j,k}|, maximised over j
    bool equatorially_symmetric(double tol = 1e-12) const;
    SurfacePerturbation scaled(double s) const;

    // Value at a node and at arbitrary phi for surface j, mode k.
    double node_value(int j, int k, int node) const { return modes_[j - 1].at(k)[node]; }
    void interpolate(int j, int k, double phi, double& value, double& dvalue) const;

private:
    std::shared_ptr<const QuadratureGrid> grid_;
    int fold_;
    std::map<int, std::vector<double>> modes_[2];
    // Per panel: abscissae and barycentric weights (end panels include the pole).
    std::vector<std::vector<double>> px_, pw_;
};

struct NonlinearOptions {
    int self_level = 4;     // tanh-sinh level for the surface carrying the target
    int cross_level = 5;    // tanh-sinh level in phi for the other surface
    int n_eta = 128;        // trapezoid points in eta for the other surface (rounded up to a multiple of fold)
    int n_theta = 0;        // 0: 8 * max populated mode
    bool exploit_symmetry = true;
    double eps_max = -1.0;  // < 0: 0.05 min(d2, sqrt(separation_delta))
};

struct Point3 {
    double R, theta, z;
};

// psi_j = -(1/4 pi) int_{D_j} dy / |x - y| for one surface, psi = psi_1 - psi_2.
double stream_component(int j, const Point3& x, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                        const NonlinearOptions& opt = {});
double stream_at(const Point3& x, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                 const NonlinearOptions& opt = {});
// psi at gamma_i(phi, theta), with the singular rule on surface i.
double stream_on_surface(int i, double phi, double theta, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                         const NonlinearOptions& opt = {});

// Horizontal velocity u + i v.
std::complex<double> velocity_at(const Point3& x, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                                 const NonlinearOptions& opt = {});
std::complex<double> velocity_on_surface(int i, double phi, double theta, const SurfacePerturbation& f,
                                         const PatchPairConfig& cfg, const NonlinearOptions& opt = {});

// Values on the grid nodes x theta_l = 2 pi l / n_theta, row-major [node][l].
struct FunctionalValue {
    int n_phi = 0, n_theta = 0;
    std::vector<double> values[2];
    bool mean_removed = false;
    double sup_norm = 0.0;
    double min_J12 = 0.0;  // smallest squared distance between the surfaces met by the quadrature
    double at(int i, int k, int l) const { return values[i - 1][static_cast<std::size_t>(k) * n_theta + l]; }
};

double default_eps_max(const PatchPairConfig& cfg);

// F~_i = (psi(gamma_i) - Omega r_i^2 / 2 - m_i) / r_{0,i} on the grid.
// Throws PerturbationTooLarge if sup|f| > eps_max or the surfaces come closer than delta / 4.
FunctionalValue functional_Ftilde(double Omega, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                                  const NonlinearOptions& opt = {});

// Analytic Gateaux derivative at (Omega, 0, 0) from the Nystrom operators of each mode.
FunctionalValue linearized_matvec(double Omega, const SurfacePerturbation& direction,
                                  const spectral::SpectralProblem& problem, int n_theta = 0);

double sup_distance(const FunctionalValue& a, const FunctionalValue& b, double scale_b = 1.0);

}  // namespace qgpatch::nonlinear
