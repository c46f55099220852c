#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssm/particle.hpp"
#include "ssm/prior.hpp"

namespace ssm {

/// Scalar diffusion dX = mu(X) dt + sigma(X) dB observed at integer times
/// 1..n through obs_logdensity(y_k, X_k, theta). X_0 = x0 is fixed.
struct SdeModel {
  using Fn = std::function<double(double x, const Vec& theta)>;

  Vec y;  // n observations, NaN for missing
  Fn drift;
  Fn diffusion;
  Fn ddiffusion;  // d sigma / dx
  std::function<double(double y, double x, const Vec& theta)> obs_logdensity;

  /// When set, used instead of `priors` for the log prior density.
  std::function<double(const Vec& theta)> log_prior_fn;
  std::vector<Prior> priors;
  std::vector<std::string> names;
  Vec theta_init;  // used when priors is empty

  double x0 = 0.0;
  unsigned level = 4;  // mesh 2^-level between observations
  bool positive = false;

  std::size_t n_time() const { return static_cast<std::size_t>(y.size()); }
  Vec initial_theta() const;
  double log_prior(const Vec& theta) const;
  void validate() const;
};

/// Milstein path from x_start over `span` time units with step 2^-level.
/// Returns span * 2^level + 1 points including the start.
std::vector<double> milstein_simulate(const SdeModel& sde, const Vec& theta,
                                      double x_start, double span, Rng& rng);

/// Same scheme with caller-supplied Brownian increments dB (each N(0, dt)).
std::vector<double> milstein_path(const SdeModel& sde, const Vec& theta, double x_start,
                                  double dt, const std::vector<double>& dB);

/// Euler-Maruyama with the same increments.
std::vector<double> euler_maruyama_path(const SdeModel& sde, const Vec& theta,
                                        double x_start, double dt,
                                        const std::vector<double>& dB);

/// Particle model whose state is X at the observation times.
class SdeParticleModel : public ParticleModel {
 public:
  SdeParticleModel(const SdeModel& sde, Vec theta);

  std::size_t n_time() const override { return sde_->n_time(); }
  std::size_t n_states() const override { return 1; }
  void sample_initial(Mat& particles, Rng& rng) const override;
  void propagate(std::size_t t, Mat& particles, Rng& rng) const override;
  bool has_observation(std::size_t t) const override;
  double log_obs_density(std::size_t t, const Eigen::Ref<const Vec>& alpha) const override;

 private:
  double advance(double x, Rng& rng) const;

  const SdeModel* sde_;
  Vec theta_;
};

/// Bootstrap filter with Milstein propagation between observation times.
ParticleOutput sde_bsf(const SdeModel& sde, const Vec& theta, std::size_t N, Rng& rng);

}  // namespace ssm
