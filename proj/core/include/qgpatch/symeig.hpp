#pragma once

#include <vector>

namespace qgpatch::linalg {

// Dense symmetric eigensolver: Householder reduction to tridiagonal form
// followed by implicit QL with Wilkinson-type shifts. Deterministic.
struct SymEigResult {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // row-major n x n, row i is the eigenvector of values[i]; empty if not requested
};

// a: row-major n x n symmetric matrix (only the lower triangle is read).
SymEigResult symmetric_eigen(std::vector<double> a, int n, bool want_vectors);

}  // namespace qgpatch::linalg
