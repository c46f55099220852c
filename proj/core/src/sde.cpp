#include "ssm/sde.hpp"

#include <cmath>

namespace ssm {

Vec SdeModel::initial_theta() const {
  if (priors.empty()) return theta_init;
  Vec th(static_cast<Eigen::Index>(priors.size()));
  for (std::size_t i = 0; i < priors.size(); ++i)
    th(static_cast<Eigen::Index>(i)) = priors[i].init;
  return th;
}

double SdeModel::log_prior(const Vec& theta) const {
  if (log_prior_fn) return log_prior_fn(theta);
  return ssm::log_prior(priors, theta);
}

void SdeModel::validate() const {
  if (!drift || !diffusion || !ddiffusion || !obs_logdensity)
    throw ModelError("sde model: drift, diffusion, ddiffusion and obs_logdensity are required");
  if (level > 20) throw ModelError("sde model: level must be at most 20");
  if (!priors.empty() && names.size() != priors.size())
    throw ModelError("sde model: need one name per prior");
  if (!std::isfinite(x0)) throw ModelError("sde model: x0 must be finite");
}

namespace {

inline double milstein_step(const SdeModel& sde, const Vec& theta, double x, double dt,
                            double dB) {
  const double s = sde.diffusion(x, theta);
  double next = x + sde.drift(x, theta) * dt + s * dB +
                0.5 * s * sde.ddiffusion(x, theta) * (dB * dB - dt);
  if (sde.positive) next = std::abs(next);
  return next;
}

inline double euler_step(const SdeModel& sde, const Vec& theta, double x, double dt,
                         double dB) {
  double next = x + sde.drift(x, theta) * dt + sde.diffusion(x, theta) * dB;
  if (sde.positive) next = std::abs(next);
  return next;
}

template <class Step>
std::vector<double> run_path(double x, const std::vector<double>& dB, Step step) {
  std::vector<double> path;
  path.reserve(dB.size() + 1);
  path.push_back(x);
  for (std::size_t j = 0; j < dB.size(); ++j) {
    x = step(x, dB[j]);
    if (!std::isfinite(x)) throw NumericalError("diffusion path is not finite", j);
    path.push_back(x);
  }
  return path;
}

}  // namespace

std::vector<double> milstein_path(const SdeModel& sde, const Vec& theta, double x_start,
                                  double dt, const std::vector<double>& dB) {
  return run_path(x_start, dB, [&](double x, double b) {
    return milstein_step(sde, theta, x, dt, b);
  });
}

std::vector<double> euler_maruyama_path(const SdeModel& sde, const Vec& theta,
                                        double x_start, double dt,
                                        const std::vector<double>& dB) {
  return run_path(x_start, dB, [&](double x, double b) {
    return euler_step(sde, theta, x, dt, b);
  });
}

std::vector<double> milstein_simulate(const SdeModel& sde, const Vec& theta,
                                      double x_start, double span, Rng& rng) {
  const double per_unit = std::ldexp(1.0, static_cast<int>(sde.level));
  const auto steps = static_cast<std::size_t>(std::llround(span * per_unit));
  const double dt = 1.0 / per_unit;
  const double sd = std::sqrt(dt);
  std::vector<double> dB(steps);
  for (auto& b : dB) b = sd * std_normal(rng);
  return milstein_path(sde, theta, x_start, dt, dB);
}

SdeParticleModel::SdeParticleModel(const SdeModel& sde, Vec theta)
    : sde_(&sde), theta_(std::move(theta)) {}

double SdeParticleModel::advance(double x, Rng& rng) const {
  const std::size_t steps = std::size_t{1} << sde_->level;
  const double dt = 1.0 / static_cast<double>(steps);
  const double sd = std::sqrt(dt);
  for (std::size_t j = 0; j < steps; ++j) {
    x = milstein_step(*sde_, theta_, x, dt, sd * std_normal(rng));
    if (!std::isfinite(x)) throw NumericalError("diffusion path is not finite");
  }
  return x;
}

void SdeParticleModel::sample_initial(Mat& particles, Rng& rng) const {
  for (Eigen::Index i = 0; i < particles.cols(); ++i) particles(0, i) = advance(sde_->x0, rng);
}

void SdeParticleModel::propagate(std::size_t, Mat& particles, Rng& rng) const {
  for (Eigen::Index i = 0; i < particles.cols(); ++i)
    particles(0, i) = advance(particles(0, i), rng);
}

bool SdeParticleModel::has_observation(std::size_t t) const {
  return !std::isnan(sde_->y(static_cast<Eigen::Index>(t)));
}

double SdeParticleModel::log_obs_density(std::size_t t,
                                         const Eigen::Ref<const Vec>& alpha) const {
  return sde_->obs_logdensity(sde_->y(static_cast<Eigen::Index>(t)), alpha(0), theta_);
}

ParticleOutput sde_bsf(const SdeModel& sde, const Vec& theta, std::size_t N, Rng& rng) {
  sde.validate();
  return bootstrap_filter(SdeParticleModel(sde, theta), N, rng);
}

}  // namespace ssm
