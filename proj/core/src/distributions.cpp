#include "ssm/distributions.hpp"

#include <cmath>
#include <random>

namespace ssm {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::poisson: return "poisson";
    case Family::binomial: return "binomial";
    case Family::negbin: return "negative binomial";
    case Family::gamma: return "gamma";
    case Family::svm: return "svm";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "gaussian" || name == "normal") return Family::gaussian;
  if (name == "poisson") return Family::poisson;
  if (name == "binomial") return Family::binomial;
  if (name == "negative binomial" || name == "negbin" ||
      name == "negative_binomial")
    return Family::negbin;
  if (name == "gamma") return Family::gamma;
  if (name == "svm") return Family::svm;
  throw ModelError("unknown distribution '" + std::string(name) + "'");
}

namespace {

double log1pexp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double lchoose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double obs_logdensity(Family family, double y, double s, double phi, double u) {
  switch (family) {
    case Family::gaussian: {
      const double z = (y - s) / phi;
      return -0.5 * kLog2Pi - std::log(phi) - 0.5 * z * z;
    }
    case Family::poisson: {
      const double log_mu = std::log(u) + s;
      return y * log_mu - std::exp(log_mu) - std::lgamma(y + 1.0);
    }
    case Family::binomial:
      return lchoose(u, y) + y * s - u * log1pexp(s);
    case Family::negbin: {
      // log(phi + mu) evaluated as log(phi) + log1p(mu / phi)
      const double log_mu = std::log(u) + s;
      const double log_phi_mu = std::log(phi) + log1pexp(log_mu - std::log(phi));
      return std::lgamma(y + phi) - std::lgamma(phi) - std::lgamma(y + 1.0) +
             phi * (std::log(phi) - log_phi_mu) + y * (log_mu - log_phi_mu);
    }
    case Family::gamma: {
      const double log_mu = std::log(u) + s;
      return phi * std::log(phi) - phi * log_mu + (phi - 1.0) * std::log(y) -
             phi * y * std::exp(-log_mu) - std::lgamma(phi);
    }
    case Family::svm:
      return -0.5 * (kLog2Pi + s + y * y * std::exp(-s));
  }
  return kNaN;
}

LogDensityDerivs obs_logdensity_derivs(Family family, double y, double s,
                                       double phi, double u) {
  const double value = obs_logdensity(family, y, s, phi, u);
  switch (family) {
    case Family::gaussian:
      return {value, (y - s) / (phi * phi), -1.0 / (phi * phi)};
    case Family::poisson: {
      const double mu = u * std::exp(s);
      return {value, y - mu, -mu};
    }
    case Family::binomial: {
      const double p = 1.0 / (1.0 + std::exp(-s));
      return {value, y - u * p, -u * p * (1.0 - p)};
    }
    case Family::negbin: {
      const double mu = u * std::exp(s);
      const double r = mu / (phi + mu);
      return {value, y - (y + phi) * r, -(y + phi) * r * phi / (phi + mu)};
    }
    case Family::gamma: {
      const double ratio = y * std::exp(-s) / u;
      return {value, -phi + phi * ratio, -phi * ratio};
    }
    case Family::svm: {
      const double e = 0.5 * y * y * std::exp(-s);
      return {value, -0.5 + e, -e};
    }
  }
  return {kNaN, kNaN, kNaN};
}

std::optional<std::string> check_observation(Family family, double y, double u) {
  if (std::isnan(y)) return std::nullopt;
  const auto is_count = [](double v) { return v >= 0.0 && std::floor(v) == v; };
  switch (family) {
    case Family::gaussian:
    case Family::svm:
      if (!std::isfinite(y)) return "observation must be finite";
      return std::nullopt;
    case Family::poisson:
    case Family::negbin:
      if (!is_count(y)) return "observation must be a nonnegative integer";
      return std::nullopt;
    case Family::binomial:
      if (!is_count(y)) return "observation must be a nonnegative integer";
      if (!is_count(u)) return "number of trials must be a nonnegative integer";
      if (y > u) return "observation exceeds number of trials";
      return std::nullopt;
    case Family::gamma:
      if (!(y > 0.0) || !std::isfinite(y)) return "observation must be positive";
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

// std::poisson_distribution does not terminate for infinite means
double count_mean(double mu) {
  if (!(mu >= 0.0) || mu > 1e15)
    throw NumericalError("count mean " + std::to_string(mu) + " is too large to sample");
  return mu;
}

}  // namespace

double sample_observation(Family family, double s, double phi, double u,
                          Rng& rng) {
  switch (family) {
    case Family::gaussian:
      return s + phi * std_normal(rng);
    case Family::poisson:
      return static_cast<double>(
          std::poisson_distribution<long long>(count_mean(u * std::exp(s)))(rng));
    case Family::binomial:
      return static_cast<double>(std::binomial_distribution<long long>(
          static_cast<long long>(u), 1.0 / (1.0 + std::exp(-s)))(rng));
    case Family::negbin: {
      const double mu = count_mean(u * std::exp(s));
      const double lambda = std::gamma_distribution<double>(phi, mu / phi)(rng);
      return static_cast<double>(std::poisson_distribution<long long>(count_mean(lambda))(rng));
    }
    case Family::gamma: {
      const double mu = u * std::exp(s);
      return std::gamma_distribution<double>(phi, mu / phi)(rng);
    }
    case Family::svm:
      return std::exp(0.5 * s) * std_normal(rng);
  }
  return kNaN;
}

}  // namespace ssm
