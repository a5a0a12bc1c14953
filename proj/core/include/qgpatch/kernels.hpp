#pragma once

#include "qgpatch/profiles.hpp"

namespace qgpatch::kernels {

using profiles::PatchPairConfig;

struct KernelContext {
    PatchPairConfig config;
    // alpha_1(a) of the outer ellipsoid, cached for the ellipsoid/sphere family (NaN otherwise).
    double alpha1 = 0.0;
    bool has_closed_form = false;
    // Tanh-sinh refinement limits for the phi-integrals.
    int de_min_level = 3;
    int de_max_level = 8;
    double de_rel_tol = 1e-14;
};

KernelContext make_context(const PatchPairConfig& config);

struct OmegaWindow {
    double omega_bar_1 = 0.0;
    double omega_bar_2 = 0.0;
    double argmin_phi_1 = 0.0;
    double argmax_phi_2 = 0.0;
    double gap = 0.0;
    double mid() const { return 0.5 * (omega_bar_1 + omega_bar_2); }
};

double R_ij(const KernelContext& ctx, int i, int j, double phi, double psi);

// Kernel H^n_{ij}(phi, psi). Throws SingularKernelError on the diagonal of a self block.
double H_n(const KernelContext& ctx, int i, int j, int n, double phi, double psi);

// Same kernel at psi = phi + delta with the offset supplied exactly; this is
// what the singular quadratures use so that 1 - x keeps full relative precision.
double H_n_offset(const KernelContext& ctx, int i, int j, int n, double phi, double delta);

// 2^{2n-1} (1/2)_n^2 / (2n)!
double kernel_prefactor(int n);

// int_0^pi H^n_{ij}(phi, psi) dpsi, diagonal log singularity resolved by tanh-sinh split at phi.
double kernel_integral(const KernelContext& ctx, int i, int j, int n, double phi);

// Omega-independent part: d1 int H^1_{i1} - d2 int H^1_{i2}.
double nu_base(const KernelContext& ctx, int i, double phi);

// nu_{i,Omega}(phi) = (-1)^{i-1} (nu_base(i, phi) - Omega).
double nu(int i, double Omega, double phi, const KernelContext& ctx);

double alpha1(double a, double d1);

struct EllipsoidCoefficients {
    double alpha1, alpha2, alpha3;
};
// Interior potential coefficients psi_1 = alpha1 (x1^2 + x2^2) + alpha2 x3^2 + alpha3
// of the ellipsoid with semiaxes (a, a, d1).
EllipsoidCoefficients ellipsoid_coefficients(double a, double d1);

// Closed forms for the ellipsoid/sphere family.
double closed_form_nu(int i, double Omega, double phi, double a, double d1, double d2);
OmegaWindow closed_form_window(double a, double d1, double d2);

OmegaWindow omega_window(const KernelContext& ctx, int scan_points = 1024);

}  // namespace qgpatch::kernels
