#pragma once

#include "ssm/types.hpp"

namespace ssm {

/// Factor L with L L^T = S for a symmetric positive semidefinite S.
/// Uses a Cholesky factorization when S is positive definite and falls back to
/// an eigendecomposition with negative eigenvalues clipped to zero.
Mat psd_factor(const Mat& S);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Mat& S);

bool is_diagonal(const Mat& m);

}  // namespace ssm
