#include "ssm/prior.hpp"

#include <cmath>

namespace ssm {

namespace {

double normal_lpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * kLog2Pi - std::log(sd) - 0.5 * z * z;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

Prior Prior::normal(double init, double mean, double sd) {
  return {Kind::normal, init, mean, sd, -kInf, kInf};
}

Prior Prior::halfnormal(double init, double sd) {
  return {Kind::halfnormal, init, 0.0, sd, 0.0, kInf};
}

Prior Prior::tnormal(double init, double mean, double sd, double lower,
                     double upper) {
  return {Kind::tnormal, init, mean, sd, lower, upper};
}

Prior Prior::gamma(double init, double shape, double rate) {
  return {Kind::gamma, init, shape, rate, 0.0, kInf};
}

Prior Prior::uniform(double init, double lower, double upper) {
  return {Kind::uniform, init, 0.0, 0.0, lower, upper};
}

double Prior::log_density(double x) const {
  if (std::isnan(x)) return -kInf;
  switch (kind) {
    case Kind::normal:
      return normal_lpdf(x, a, b);
    case Kind::halfnormal:
      if (x < 0.0) return -kInf;
      return std::log(2.0) + normal_lpdf(x, 0.0, b);
    case Kind::tnormal: {
      if (x < lower || x > upper) return -kInf;
      const double mass =
          normal_cdf((upper - a) / b) - normal_cdf((lower - a) / b);
      return normal_lpdf(x, a, b) - std::log(mass);
    }
    case Kind::gamma:
      if (!(x > 0.0)) return -kInf;
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
    case Kind::uniform:
      if (x < lower || x > upper) return -kInf;
      return -std::log(upper - lower);
  }
  return -kInf;
}

void Prior::validate() const {
  const auto fail = [this](const std::string& msg) {
    throw ModelError(std::string(to_string(kind)) + " prior: " + msg);
  };
  switch (kind) {
    case Kind::normal:
    case Kind::halfnormal:
      if (!(b > 0.0) || !std::isfinite(b)) fail("sd must be positive");
      break;
    case Kind::tnormal:
      if (!(b > 0.0) || !std::isfinite(b)) fail("sd must be positive");
      if (!(lower < upper)) fail("bounds must satisfy lower < upper");
      break;
    case Kind::gamma:
      if (!(a > 0.0) || !(b > 0.0)) fail("shape and rate must be positive");
      break;
    case Kind::uniform:
      if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper))
        fail("bounds must be finite with lower < upper");
      break;
  }
  if (!std::isfinite(log_density(init)))
    fail("initial value " + std::to_string(init) + " has zero prior density");
}

std::string_view to_string(Prior::Kind kind) {
  switch (kind) {
    case Prior::Kind::normal: return "normal";
    case Prior::Kind::halfnormal: return "halfnormal";
    case Prior::Kind::tnormal: return "tnormal";
    case Prior::Kind::gamma: return "gamma";
    case Prior::Kind::uniform: return "uniform";
  }
  return "unknown";
}

double log_prior(std::span<const Prior> priors, const Vec& theta) {
  if (static_cast<Eigen::Index>(priors.size()) != theta.size())
    throw ModelError("log_prior: " + std::to_string(priors.size()) +
                     " priors but theta has length " +
                     std::to_string(theta.size()));
  double lp = 0.0;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    lp += priors[i].log_density(theta(static_cast<Eigen::Index>(i)));
    if (lp == -kInf) return lp;
  }
  return lp;
}

}  // namespace ssm
