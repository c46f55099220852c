#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssm/distributions.hpp"
#include "ssm/prior.hpp"
#include "ssm/types.hpp"

namespace ssm {

/// State space model with linear-Gaussian state dynamics
///
///   alpha_{t+1} = c_t + T_t alpha_t + R_t eta_t,   eta_t ~ N(0, I_k)
///   alpha_1     ~ N(a1, P1)
///
/// and observations y_{t,j} ~ g_j(. | d_{t,j} + Z_{t,j.} alpha_t). When every
/// series is gaussian the observation noise is H_t eps_t with eps_t ~ N(0, I_p)
/// and H_t may be a full factor; mixing gaussian with other families requires
/// a diagonal H (the diagonal is the noise standard deviation).
///
/// Time-varying components hold 1 or n slices. Missing observations are NaN.
struct LinearModel {
  Mat y;               // n x p
  Slices<Mat> Z;       // p x d
  Slices<Mat> H;       // p x p
  Slices<Mat> T;       // d x d
  Slices<Mat> R;       // d x k
  Slices<Vec> c;       // d
  Slices<Vec> d;       // p
  Vec a1;              // d
  Mat P1;              // d x d
  std::vector<Observation> obs;  // p entries
  Mat u;               // n x p exposures / trials / offsets; empty means ones

  std::size_t n_time() const { return static_cast<std::size_t>(y.rows()); }
  std::size_t n_series() const { return static_cast<std::size_t>(y.cols()); }
  std::size_t n_states() const { return static_cast<std::size_t>(a1.size()); }
  std::size_t n_eta() const { return R.empty() ? 0 : static_cast<std::size_t>(R[0].cols()); }

  bool all_gaussian() const;
  double exposure(std::size_t t, std::size_t j) const {
    return u.size() == 0 ? 1.0 : u(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
  }
  /// Noise sd of a gaussian series in a model with diagonal H.
  double gaussian_sd(std::size_t t, std::size_t j) const {
    const auto jj = static_cast<Eigen::Index>(j);
    return std::abs(H[t](jj, jj));
  }
  /// s_{t,j} = d_{t,j} + Z_{t,j.} alpha
  double signal(std::size_t t, std::size_t j, const Eigen::Ref<const Vec>& alpha) const {
    const auto jj = static_cast<Eigen::Index>(j);
    return d[t](jj) + Z[t].row(jj).dot(alpha);
  }
  /// log g(y_t | alpha_t) summed over observed series.
  double log_obs_density(std::size_t t, const Eigen::Ref<const Vec>& alpha) const;

  /// Single-series observation parameter handed to obs_logdensity.
  double obs_param(std::size_t t, std::size_t j) const;

  friend bool operator==(const LinearModel& a, const LinearModel& b);
};

/// Checks dimensions, slice counts, P1 positive semidefiniteness, family
/// parameters and data supports. Throws ModelError.
void validate_model(const LinearModel& model);

/// Ordered hyperparameter names with the map theta -> model components.
struct ParamMap {
  std::vector<std::string> names;
  std::function<void(const Vec& theta, LinearModel& model)> apply;
};

/// A LinearModel together with priors and a parameter map: the object MCMC
/// works on.
class BayesianModel {
 public:
  BayesianModel(LinearModel base, std::vector<Prior> priors, ParamMap map);

  const LinearModel& base() const { return base_; }
  const std::vector<Prior>& priors() const { return priors_; }
  const std::vector<std::string>& names() const { return map_.names; }
  std::size_t n_params() const { return priors_.size(); }

  Vec initial_theta() const;
  double log_prior(const Vec& theta) const;

  /// Deterministic: copies the base model and applies the parameter map.
  /// Throws ModelError if the result contains non-finite system entries.
  LinearModel update(const Vec& theta) const;

 private:
  LinearModel base_;
  std::vector<Prior> priors_;
  ParamMap map_;
};

struct SimulatedData {
  Mat y;       // n x p
  Mat states;  // n x d
};

/// Draws alpha forward from N(a1, P1) then observations. Entries that are
/// missing in model.y stay missing when `keep_missing` is set.
SimulatedData simulate(const LinearModel& model, Rng& rng, bool keep_missing = false);

}  // namespace ssm
