#pragma once

#include "ssm/kalman.hpp"
#include "ssm/model.hpp"

namespace ssm {

struct ApproxOptions {
  unsigned max_iter = 100;
  double conv_tol = 1e-8;
  unsigned max_halvings = 10;
};

/// Gaussian model matching the first two derivatives of log g_t at the mode
/// of p(alpha | y). Observation (t, j) is replaced by the pseudo observation
/// pseudo_y with noise sd pseudo_H, where at the mode s
///
///   pseudo_H^2 = -1 / l''(s),   pseudo_y = s + pseudo_H^2 l'(s).
struct GaussianApprox {
  Mat mode;        // n x d, smoothed mean of the approximating model
  Mat signal;      // n x p, s_t = d_t + Z_t mode_t
  Mat pseudo_y;    // n x p, NaN where y is missing
  Mat pseudo_H;    // n x p
  double loglik_gaussian = 0.0;     // log p~(pseudo_y)
  double scaling_correction = 0.0;  // sum_t [log g(y|s) - log g~(pseudo_y|s)]
  bool converged = false;
  unsigned iterations = 0;
  LinearModel model;  // the approximating gaussian model

  /// log p^(y) = log p~(y) + sum_t [log g - log g~], the Laplace estimate with
  /// the remaining expectation term dropped.
  double approx_loglik() const { return loglik_gaussian + scaling_correction; }
};

/// Throws NumericalError on non-convergence or when l'' >= 0 at an iterate.
GaussianApprox gaussian_approximation(const LinearModel& model,
                                      const ApproxOptions& options = {});

/// Same iteration started from a given signal (n x p).
GaussianApprox gaussian_approximation(const LinearModel& model, const Mat& initial_signal,
                                      const ApproxOptions& options = {});

double approx_loglik(const LinearModel& model, const ApproxOptions& options = {});

/// Family-specific starting signal computed from the data.
Mat initial_signal(const LinearModel& model);

}  // namespace ssm
