#pragma once

#include <vector>

#include "ssm/model.hpp"

namespace ssm {

struct FilterResult {
  Mat at;                // (n+1) x d, predicted means a_t = E[alpha_t | y_{1:t-1}]
  std::vector<Mat> Pt;   // n+1 predicted covariances
  Mat att;               // n x d filtered means
  std::vector<Mat> Ptt;  // n filtered covariances
  double loglik = 0.0;
};

struct SmootherResult {
  Mat alphahat;          // n x d
  std::vector<Mat> Vt;   // n smoothed covariances
};

namespace detail {

/// Quantities of one measurement update kept for the backward pass.
struct UpdateStep {
  std::vector<Eigen::Index> observed;
  Mat Z;     // m x d rows of the (linearized) observation map
  Mat Finv;  // m x m
  Vec v;     // m innovations
  Mat K;     // d x m filter gain P Z' F^-1
  Mat T;     // d x d (linearized) transition applied after the update
};

/// Backward state smoothing recursion
///   r_{t-1} = Z' F^-1 v + L' r_t,  N_{t-1} = Z' F^-1 Z + L' N_t L,  L = T (I - K Z)
///   alphahat_t = a_t + P_t r_{t-1},  V_t = P_t - P_t N_{t-1} P_t
SmootherResult backward_smooth(const FilterResult& filter,
                               const std::vector<UpdateStep>& steps);

/// Joint update with an m x m innovation covariance. Throws NumericalError
/// when F is not positive definite or its reciprocal condition estimate is
/// below 1e-14. Returns the log-likelihood contribution.
double measurement_update(const Vec& a, const Mat& P, const Mat& Zo, const Mat& Ho,
                          const Vec& v, std::size_t t, Vec& att, Mat& Ptt,
                          UpdateStep& step);

}  // namespace detail

/// Kalman filter, smoother and fast mean smoother for a gaussian LinearModel.
/// The model must outlive this object.
class KalmanRecursion {
 public:
  explicit KalmanRecursion(const LinearModel& model);

  const FilterResult& filter() const { return filter_; }
  double loglik() const { return filter_.loglik; }
  SmootherResult smooth() const;

  /// Smoothed means reusing the stored gains with data `y` in place of the
  /// model's observations (same missingness pattern). With `intercepts`
  /// false, a1, c and d are treated as zero.
  Mat smoothed_means(const Mat& y, bool intercepts = true) const;

 private:
  const LinearModel* model_;
  FilterResult filter_;
  std::vector<detail::UpdateStep> steps_;
};

FilterResult kalman_filter(const LinearModel& model);
SmootherResult kalman_smoother(const LinearModel& model);

/// Draw from p(alpha | y) by mean correction: simulate (alpha+, y+) from the
/// model and return alphahat(y) + alpha+ - alphahat(y+). Returns n x d.
Mat simulation_smoother(const LinearModel& model, Rng& rng);
Mat simulation_smoother(const KalmanRecursion& recursion, const LinearModel& model,
                        Rng& rng);

}  // namespace ssm
