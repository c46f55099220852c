#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ssm/approx.hpp"
#include "ssm/ekf.hpp"
#include "ssm/model.hpp"
#include "ssm/particle.hpp"
#include "ssm/sde.hpp"

namespace ssm {

enum class PfMethod { bsf, psi };

std::string_view to_string(PfMethod m);

struct ParticleEstimate {
  double loglik = 0.0;
  double approx_loglik = kNaN;  // set when the estimator builds an approximation
  Mat states;                   // traced trajectory when requested
};

/// Posterior p(theta | y) as seen by the samplers: a prior plus whichever
/// likelihood evaluations the model class supports.
class PosteriorTarget {
 public:
  virtual ~PosteriorTarget() = default;

  virtual std::vector<std::string> names() const = 0;
  virtual Vec initial_theta() const = 0;
  virtual double log_prior(const Vec& theta) const = 0;
  std::size_t n_params() const { return names().size(); }

  virtual bool supports_exact() const { return false; }
  virtual bool supports_approx() const { return false; }
  virtual bool supports(PfMethod method) const = 0;

  /// Exact marginal log-likelihood.
  virtual double exact_loglik(const Vec& theta) const;
  /// Log-likelihood of the gaussian approximation.
  virtual double approx_loglik(const Vec& theta) const;
  /// One draw of the states given theta, from the exact model or from its
  /// gaussian approximation.
  virtual Mat sample_states(const Vec& theta, Rng& rng, bool approximate) const;
  /// Unbiased likelihood estimate with `N` particles.
  virtual ParticleEstimate estimate(const Vec& theta, std::size_t N, PfMethod method,
                                    Rng& rng, bool trace) const = 0;
};

class LinearTarget : public PosteriorTarget {
 public:
  explicit LinearTarget(BayesianModel model, ApproxOptions options = {});

  std::vector<std::string> names() const override { return model_.names(); }
  Vec initial_theta() const override { return model_.initial_theta(); }
  double log_prior(const Vec& theta) const override { return model_.log_prior(theta); }

  bool supports_exact() const override { return model_.base().all_gaussian(); }
  bool supports_approx() const override { return true; }
  bool supports(PfMethod) const override { return true; }

  double exact_loglik(const Vec& theta) const override;
  double approx_loglik(const Vec& theta) const override;
  Mat sample_states(const Vec& theta, Rng& rng, bool approximate) const override;
  ParticleEstimate estimate(const Vec& theta, std::size_t N, PfMethod method, Rng& rng,
                            bool trace) const override;

  const BayesianModel& model() const { return model_; }

 private:
  BayesianModel model_;
  ApproxOptions options_;
};

/// Approximate inference uses the (iterated) extended Kalman filter.
class NonlinearTarget : public PosteriorTarget {
 public:
  explicit NonlinearTarget(NonlinearModel model, unsigned iekf_iter = 0);

  std::vector<std::string> names() const override { return model_.names; }
  Vec initial_theta() const override { return model_.initial_theta(); }
  double log_prior(const Vec& theta) const override { return model_.log_prior(theta); }

  bool supports_approx() const override { return true; }
  bool supports(PfMethod m) const override { return m == PfMethod::bsf; }

  double approx_loglik(const Vec& theta) const override;
  /// Approximate draws are the EKF smoothed means.
  Mat sample_states(const Vec& theta, Rng& rng, bool approximate) const override;
  ParticleEstimate estimate(const Vec& theta, std::size_t N, PfMethod method, Rng& rng,
                            bool trace) const override;

 private:
  NonlinearModel model_;
  unsigned iekf_iter_;
};

class SdeTarget : public PosteriorTarget {
 public:
  explicit SdeTarget(SdeModel model);

  std::vector<std::string> names() const override;
  Vec initial_theta() const override { return model_.initial_theta(); }
  double log_prior(const Vec& theta) const override { return model_.log_prior(theta); }

  bool supports(PfMethod m) const override { return m == PfMethod::bsf; }
  ParticleEstimate estimate(const Vec& theta, std::size_t N, PfMethod method, Rng& rng,
                            bool trace) const override;

 private:
  SdeModel model_;
};

}  // namespace ssm
