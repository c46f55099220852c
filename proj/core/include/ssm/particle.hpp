#pragma once

#include <vector>

#include "ssm/approx.hpp"
#include "ssm/ekf.hpp"
#include "ssm/model.hpp"

namespace ssm {

/// What a bootstrap filter needs from a model: simulable dynamics and a
/// pointwise observation density. Particles are stored column-wise (d x N).
class ParticleModel {
 public:
  virtual ~ParticleModel() = default;
  virtual std::size_t n_time() const = 0;
  virtual std::size_t n_states() const = 0;
  /// Fill every column with a draw from the initial distribution.
  virtual void sample_initial(Mat& particles, Rng& rng) const = 0;
  /// Move each column from time t to t + 1 in place.
  virtual void propagate(std::size_t t, Mat& particles, Rng& rng) const = 0;
  virtual bool has_observation(std::size_t t) const = 0;
  virtual double log_obs_density(std::size_t t, const Eigen::Ref<const Vec>& alpha) const = 0;
};

class LinearParticleModel : public ParticleModel {
 public:
  explicit LinearParticleModel(const LinearModel& model);

  std::size_t n_time() const override { return m_->n_time(); }
  std::size_t n_states() const override { return m_->n_states(); }
  void sample_initial(Mat& particles, Rng& rng) const override;
  void propagate(std::size_t t, Mat& particles, Rng& rng) const override;
  bool has_observation(std::size_t t) const override;
  double log_obs_density(std::size_t t, const Eigen::Ref<const Vec>& alpha) const override {
    return m_->log_obs_density(t, alpha);
  }

 private:
  const LinearModel* m_;
  Mat P1_factor_;
};

class NonlinearParticleModel : public ParticleModel {
 public:
  NonlinearParticleModel(const NonlinearModel& model, Vec theta);

  std::size_t n_time() const override { return m_->n_time(); }
  std::size_t n_states() const override { return m_->n_states; }
  void sample_initial(Mat& particles, Rng& rng) const override;
  void propagate(std::size_t t, Mat& particles, Rng& rng) const override;
  bool has_observation(std::size_t t) const override;
  double log_obs_density(std::size_t t, const Eigen::Ref<const Vec>& alpha) const override {
    return m_->log_obs_density(t, alpha, theta_);
  }

 private:
  const NonlinearModel* m_;
  Vec theta_;
};

struct ParticleOutput {
  double loglik = 0.0;
  std::vector<Mat> particles;  // n entries of d x N
  Mat weights;                 // n x N normalized weights
  std::vector<std::vector<std::size_t>> ancestors;  // ancestors[t][i]: parent at t - 1
  Mat filtered_means;          // n x d

  std::size_t n_particles() const { return static_cast<std::size_t>(weights.cols()); }
};

/// Stratified resampling of `n_out` indices. Weights need not be normalized
/// but must have a positive finite sum.
std::vector<std::size_t> resample(const Vec& weights, std::size_t n_out, Rng& rng);
inline std::vector<std::size_t> resample(const Vec& weights, Rng& rng) {
  return resample(weights, static_cast<std::size_t>(weights.size()), rng);
}

/// Bootstrap filter. Resamples at every observed time point; missing time
/// points keep unit weights and the current cloud.
ParticleOutput bootstrap_filter(const ParticleModel& model, std::size_t N, Rng& rng);
ParticleOutput bootstrap_filter(const LinearModel& model, std::size_t N, Rng& rng);
ParticleOutput bootstrap_filter(const NonlinearModel& model, const Vec& theta,
                                std::size_t N, Rng& rng);

/// Auxiliary particle filter twisted by the approximating gaussian model.
/// Proposals are the approximating model's conditionals p~(alpha_t | alpha_{t-1}, y_{t:n})
/// and the incremental weights g_t / g~_t; an exactly gaussian model yields
/// unit weights and the Kalman likelihood.
ParticleOutput psi_apf(const LinearModel& model, const GaussianApprox& approx,
                       std::size_t N, Rng& rng);

namespace detail {
/// Turns log weights into normalized weights and returns log(mean weight).
double normalize_log_weights(Vec& logw, std::size_t t);
/// True when row t of y has at least one non-missing entry.
bool row_has_data(const Mat& y, std::size_t t);
}  // namespace detail

/// Draw one trajectory (n x d) by sampling a final particle and following
/// its ancestry back to the first time point.
Mat filter_smoother_trace(const ParticleOutput& output, Rng& rng);

}  // namespace ssm
