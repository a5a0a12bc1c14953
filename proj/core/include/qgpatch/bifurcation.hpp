#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qgpatch/spectral.hpp"

namespace qgpatch::bifurcation {

using spectral::EigenPair;
using spectral::SpectralProblem;

struct BifurcationOptions {
    double tol = 1e-10;        // on |lambda - 1|
    int max_iterations = 200;
};

struct BifurcationPoint {
    int m = 0;
    double Omega_m = 0.0;
    EigenPair eigenpair;
    double residual = 0.0;          // |lambda_m(Omega_m) - 1|
    double transversality_Q = 0.0;
    double h2_mass_fraction = 0.0;  // int h2^2 sin^3 / (int h1^2 sin^3 + int h2^2 sin^3)
    double kernel_margin = 0.0;     // 1 - lambda_{2m}(Omega_m)
    int iterations = 0;
    int iteration_bound = 0;        // ceil(log2(gap / tol)) + 2
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double lambda_lo = 0.0, lambda_hi = 0.0;  // lambda_m at the final bracket ends
};

// Solves lambda_m(Omega) = 1 on [Omega_mid, bar1 - 1e-6 gap]. Throws NotBracketed when
// lambda_m >= 1 already at the midpoint (below_threshold) or stays below 1 at the top.
BifurcationPoint find_omega_m(int m, const SpectralProblem& problem, const BifurcationOptions& opt = {});

// Points for m_min..m_max, in order. Propagates NotBracketed.
std::vector<BifurcationPoint> omega_sequence(int m_min, int m_max, const SpectralProblem& problem,
                                             const BifurcationOptions& opt = {});

// Smallest m >= 1 with lambda_m(Omega_mid) < 1, or 0 if none up to m_max.
int operational_m0(const SpectralProblem& problem, int m_max = 400);

// int h1^2 sin r1^2 - (d2/d1) int h2^2 sin r2^2 on the problem grid.
double transversality(const EigenPair& pair, const SpectralProblem& problem);
double h2_mass_fraction(const EigenPair& pair, const spectral::QuadratureGrid& grid);
inline bool transversality_degenerate(double Q, double threshold = 1e-6) { return !(std::abs(Q) > threshold); }

std::string to_json(const std::vector<BifurcationPoint>& points);
std::string to_csv(const std::vector<BifurcationPoint>& points);

}  // namespace qgpatch::bifurcation
