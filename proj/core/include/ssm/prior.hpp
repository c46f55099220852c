#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ssm/types.hpp"

namespace ssm {

/// Prior for one hyperparameter. `init` is the starting value of the chain.
///
///   normal      a = mean, b = sd
///   halfnormal  b = scale (support x >= 0)
///   tnormal     a = mean, b = sd, truncated to [lower, upper]
///   gamma       a = shape, b = rate
///   uniform     [lower, upper]
struct Prior {
  enum class Kind { normal, halfnormal, tnormal, gamma, uniform };

  Kind kind = Kind::normal;
  double init = 0.0;
  double a = 0.0;
  double b = 1.0;
  double lower = -kInf;
  double upper = kInf;

  static Prior normal(double init, double mean, double sd);
  static Prior halfnormal(double init, double sd);
  static Prior tnormal(double init, double mean, double sd,
                       double lower = -kInf, double upper = kInf);
  static Prior gamma(double init, double shape, double rate);
  static Prior uniform(double init, double lower, double upper);

  double log_density(double x) const;

  /// Throws ModelError when parameters are invalid or init has zero density.
  void validate() const;
};

std::string_view to_string(Prior::Kind kind);

/// Sum of component log densities; -inf outside the support.
double log_prior(std::span<const Prior> priors, const Vec& theta);

}  // namespace ssm
