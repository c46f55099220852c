#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "ssm/types.hpp"

namespace ssm {

/// Observation families. The signal is s = d_t + Z_t alpha_t.
///
///   gaussian  y ~ N(s, sd^2)                    sd taken from H
///   poisson   y ~ Poisson(u exp(s))
///   binomial  y ~ Binomial(u, logit^-1(s))
///   negbin    y ~ NB(mean u exp(s), size phi)
///   gamma     y ~ Gamma(shape phi, mean u exp(s))
///   svm       y ~ N(0, exp(s))
enum class Family { gaussian, poisson, binomial, negbin, gamma, svm };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

/// Per-series observation description.
struct Observation {
  Family family = Family::gaussian;
  std::optional<double> phi;  // required for negbin and gamma
};

/// log g(y | s). For the gaussian family `phi` is the noise standard
/// deviation; for the others it is the dispersion/shape (ignored when the
/// family has none). `u` is the exposure, number of trials or offset.
double obs_logdensity(Family family, double y, double signal, double phi,
                      double u = 1.0);

struct LogDensityDerivs {
  double value;
  double d1;  // d/ds
  double d2;  // d^2/ds^2
};

LogDensityDerivs obs_logdensity_derivs(Family family, double y, double signal,
                                       double phi, double u = 1.0);

/// Check that y is in the support of the family; returns an error message
/// when it is not.
std::optional<std::string> check_observation(Family family, double y, double u);

/// Draw y given the signal.
double sample_observation(Family family, double signal, double phi, double u,
                          Rng& rng);

}  // namespace ssm
