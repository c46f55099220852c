#include "ssm/target.hpp"

namespace ssm {

std::string_view to_string(PfMethod m) { return m == PfMethod::bsf ? "bsf" : "psi"; }

double PosteriorTarget::exact_loglik(const Vec&) const {
  throw ModelError("exact likelihood is not available for this model");
}

double PosteriorTarget::approx_loglik(const Vec&) const {
  throw ModelError("no gaussian approximation is available for this model");
}

Mat PosteriorTarget::sample_states(const Vec&, Rng&, bool) const {
  throw ModelError("state sampling is not available for this model");
}

LinearTarget::LinearTarget(BayesianModel model, ApproxOptions options)
    : model_(std::move(model)), options_(options) {}

double LinearTarget::exact_loglik(const Vec& theta) const {
  if (!supports_exact()) throw ModelError("exact likelihood requires gaussian observations");
  const LinearModel m = model_.update(theta);
  return KalmanRecursion(m).loglik();
}

double LinearTarget::approx_loglik(const Vec& theta) const {
  const LinearModel m = model_.update(theta);
  // A gaussian model with correlated noise is its own approximation.
  if (m.all_gaussian() && m.n_series() > 1) return KalmanRecursion(m).loglik();
  return gaussian_approximation(m, options_).approx_loglik();
}

Mat LinearTarget::sample_states(const Vec& theta, Rng& rng, bool approximate) const {
  const LinearModel m = model_.update(theta);
  if (!approximate || m.all_gaussian()) return simulation_smoother(m, rng);
  const GaussianApprox ga = gaussian_approximation(m, options_);
  return simulation_smoother(ga.model, rng);
}

ParticleEstimate LinearTarget::estimate(const Vec& theta, std::size_t N, PfMethod method,
                                        Rng& rng, bool trace) const {
  const LinearModel m = model_.update(theta);
  ParticleEstimate out;
  ParticleOutput po;
  if (method == PfMethod::psi) {
    const GaussianApprox ga = gaussian_approximation(m, options_);
    out.approx_loglik = ga.approx_loglik();
    po = psi_apf(m, ga, N, rng);
  } else {
    po = bootstrap_filter(m, N, rng);
  }
  out.loglik = po.loglik;
  if (trace) out.states = filter_smoother_trace(po, rng);
  return out;
}

NonlinearTarget::NonlinearTarget(NonlinearModel model, unsigned iekf_iter)
    : model_(std::move(model)), iekf_iter_(iekf_iter) {
  model_.validate(model_.initial_theta());
}

double NonlinearTarget::approx_loglik(const Vec& theta) const {
  return ekf(model_, theta, iekf_iter_).loglik;
}

Mat NonlinearTarget::sample_states(const Vec& theta, Rng&, bool approximate) const {
  if (!approximate) throw ModelError("exact state sampling is not available for nonlinear models");
  return ekf_smoother(model_, theta, iekf_iter_).alphahat;
}

ParticleEstimate NonlinearTarget::estimate(const Vec& theta, std::size_t N, PfMethod method,
                                           Rng& rng, bool trace) const {
  if (method != PfMethod::bsf)
    throw ModelError("nonlinear models support only the bootstrap filter");
  const ParticleOutput po = bootstrap_filter(model_, theta, N, rng);
  ParticleEstimate out;
  out.loglik = po.loglik;
  if (trace) out.states = filter_smoother_trace(po, rng);
  return out;
}

SdeTarget::SdeTarget(SdeModel model) : model_(std::move(model)) { model_.validate(); }

std::vector<std::string> SdeTarget::names() const {
  if (!model_.names.empty()) return model_.names;
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < model_.initial_theta().size(); ++i)
    out.push_back("theta_" + std::to_string(i + 1));
  return out;
}

ParticleEstimate SdeTarget::estimate(const Vec& theta, std::size_t N, PfMethod method,
                                     Rng& rng, bool trace) const {
  if (method != PfMethod::bsf)
    throw ModelError("diffusion models support only the bootstrap filter");
  const ParticleOutput po = sde_bsf(model_, theta, N, rng);
  ParticleEstimate out;
  out.loglik = po.loglik;
  if (trace) out.states = filter_smoother_trace(po, rng);
  return out;
}

}  // namespace ssm
