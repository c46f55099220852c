#pragma once

#include <optional>
#include <variant>

#include "ssm/model.hpp"

namespace ssm {

/// A hyperparameter that is either estimated (prior) or held fixed.
using PriorOrValue = std::variant<double, Prior>;

/// Structural time series: level, optional slope, optional regression on xreg.
///
///   y_t         = mu_t + x_t beta + e_t          (gaussian: e_t ~ N(0, sd_y^2))
///   mu_{t+1}    = mu_t + nu_t + sd_level eta_t
///   nu_{t+1}    = nu_t + sd_slope xi_t
struct StructuralSpec {
  Mat y;                         // n x 1
  PriorOrValue sd_level = 0.0;
  std::optional<PriorOrValue> sd_slope;
  Mat xreg;                      // n x m, optional
  std::vector<PriorOrValue> beta;  // m entries
  std::optional<Vec> a1;
  std::optional<Mat> P1;
};

/// Gaussian observations. Parameter order: sd_y, sd_level, sd_slope, beta.
BayesianModel bsm_lg(const StructuralSpec& spec, const PriorOrValue& sd_y);

/// Non-gaussian observations with exposure u (empty means ones). Parameter
/// order: sd_level, sd_slope, phi, beta. `phi` is required for negbin/gamma.
BayesianModel bsm_ng(const StructuralSpec& spec, Family family,
                     std::optional<PriorOrValue> phi = std::nullopt,
                     const Vec& u = Vec());

/// Stochastic volatility model with AR(1) log-variance
///
///   y_t = exp(alpha_t / 2) eps_t
///   alpha_{t+1} = mu + rho (alpha_t - mu) + sd_ar eta_t
///   alpha_1 ~ N(mu, sd_ar^2 / (1 - rho^2))
///
/// Parameter order: mu, rho, sd_ar.
BayesianModel svm(const Vec& y, const PriorOrValue& mu, const PriorOrValue& rho,
                  const PriorOrValue& sd_ar);

}  // namespace ssm
