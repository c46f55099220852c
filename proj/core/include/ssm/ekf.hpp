#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssm/kalman.hpp"
#include "ssm/prior.hpp"

namespace ssm {

/// Nonlinear gaussian state space model given by callbacks
///
///   y_t         = Z(t, alpha_t) + H(t, alpha_t) eps_t,    eps_t ~ N(0, I_p)
///   alpha_{t+1} = T(t, alpha_t) + R(t, alpha_t) eta_t,    eta_t ~ N(0, I_k)
///   alpha_1     ~ N(a1, P1)
///
/// All callbacks receive the hyperparameter vector theta. Missing y are NaN.
struct NonlinearModel {
  using VecFn = std::function<Vec(std::size_t t, const Vec& alpha, const Vec& theta)>;
  using MatFn = std::function<Mat(std::size_t t, const Vec& alpha, const Vec& theta)>;

  Mat y;  // n x p
  std::size_t n_states = 0;
  VecFn Z;
  MatFn H;
  VecFn T;
  MatFn R;
  MatFn Z_jac;  // p x d
  MatFn T_jac;  // d x d
  std::function<Vec(const Vec& theta)> a1;
  std::function<Mat(const Vec& theta)> P1;

  std::vector<Prior> priors;
  std::vector<std::string> names;

  std::size_t n_time() const { return static_cast<std::size_t>(y.rows()); }
  std::size_t n_series() const { return static_cast<std::size_t>(y.cols()); }
  Vec initial_theta() const;
  double log_prior(const Vec& theta) const { return ssm::log_prior(priors, theta); }

  /// log density of the observed entries of y_t given alpha_t.
  double log_obs_density(std::size_t t, const Vec& alpha, const Vec& theta) const;

  /// Throws ModelError on missing callbacks or wrong callback dimensions at theta.
  void validate(const Vec& theta) const;
};

/// Extended Kalman filter. With iekf_iter > 0 the measurement update is
/// relinearized that many extra times about the updated mean; the reported
/// log-likelihood uses the final linearization.
FilterResult ekf(const NonlinearModel& model, const Vec& theta, unsigned iekf_iter = 0);

/// EKF forward pass followed by the linear smoother on the linearized model.
SmootherResult ekf_smoother(const NonlinearModel& model, const Vec& theta,
                            unsigned iekf_iter = 0);

}  // namespace ssm
