#include "ssm/particle.hpp"

#include <cmath>
#include <numeric>

#include "ssm/linalg.hpp"

namespace ssm {

namespace {

// Categorical draw by inversion.
std::size_t draw_index(const Eigen::Ref<const Vec>& w, Rng& rng) {
  const double total = w.sum();
  double u = uniform01(rng) * total;
  const auto N = static_cast<std::size_t>(w.size());
  for (std::size_t i = 0; i < N; ++i) {
    u -= w(static_cast<Eigen::Index>(i));
    if (u < 0.0) return i;
  }
  for (std::size_t i = N; i-- > 0;)
    if (w(static_cast<Eigen::Index>(i)) > 0.0) return i;
  return N - 1;
}

}  // namespace

LinearParticleModel::LinearParticleModel(const LinearModel& model)
    : m_(&model), P1_factor_(psd_factor(model.P1)) {}

void LinearParticleModel::sample_initial(Mat& particles, Rng& rng) const {
  const auto d = static_cast<std::size_t>(m_->n_states());
  for (Eigen::Index i = 0; i < particles.cols(); ++i)
    particles.col(i) = m_->a1 + P1_factor_ * std_normal_vec(d, rng);
}

void LinearParticleModel::propagate(std::size_t t, Mat& particles, Rng& rng) const {
  const Mat& T = m_->T[t];
  const Mat& R = m_->R[t];
  const Vec& c = m_->c[t];
  const std::size_t k = m_->n_eta();
  for (Eigen::Index i = 0; i < particles.cols(); ++i) {
    Vec next = c + T * particles.col(i);
    if (k > 0) next += R * std_normal_vec(k, rng);
    particles.col(i) = next;
  }
}

bool LinearParticleModel::has_observation(std::size_t t) const {
  return detail::row_has_data(m_->y, t);
}

NonlinearParticleModel::NonlinearParticleModel(const NonlinearModel& model, Vec theta)
    : m_(&model), theta_(std::move(theta)) {}

void NonlinearParticleModel::sample_initial(Mat& particles, Rng& rng) const {
  const Vec a1 = m_->a1(theta_);
  const Mat L = psd_factor(m_->P1(theta_));
  for (Eigen::Index i = 0; i < particles.cols(); ++i)
    particles.col(i) = a1 + L * std_normal_vec(m_->n_states, rng);
}

void NonlinearParticleModel::propagate(std::size_t t, Mat& particles, Rng& rng) const {
  for (Eigen::Index i = 0; i < particles.cols(); ++i) {
    const Vec x = particles.col(i);
    const Mat R = m_->R(t, x, theta_);
    particles.col(i) = m_->T(t, x, theta_) +
                       R * std_normal_vec(static_cast<std::size_t>(R.cols()), rng);
  }
}

bool NonlinearParticleModel::has_observation(std::size_t t) const {
  return detail::row_has_data(m_->y, t);
}

std::vector<std::size_t> resample(const Vec& weights, std::size_t n_out, Rng& rng) {
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericalError("cannot resample: weights are all zero or not finite");
  std::vector<std::size_t> idx(n_out);
  const auto N = static_cast<std::size_t>(weights.size());
  const double step = total / static_cast<double>(n_out);
  std::size_t j = 0;
  double cum = weights(0);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double u = (static_cast<double>(i) + uniform01(rng)) * step;
    while (u >= cum && j + 1 < N) cum += weights(static_cast<Eigen::Index>(++j));
    idx[i] = j;
  }
  return idx;
}

namespace detail {

bool row_has_data(const Mat& y, std::size_t t) {
  const auto tt = static_cast<Eigen::Index>(t);
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    if (!std::isnan(y(tt, j))) return true;
  return false;
}

// Normalize log weights in place, returning log of their mean. Throws when
// every weight is zero.
double normalize_log_weights(Vec& logw, std::size_t t) {
  const double mx = logw.maxCoeff();
  if (std::isnan(mx) || logw.hasNaN())
    throw NumericalError("particle weight is NaN", t);
  if (mx == -kInf) throw NumericalError("all particle weights are zero", t);
  if (mx == kInf) throw NumericalError("particle weight is infinite", t);
  logw = (logw.array() - mx).exp().matrix();
  const double s = logw.sum();
  logw /= s;
  return mx + std::log(s / static_cast<double>(logw.size()));
}

}  // namespace detail

ParticleOutput bootstrap_filter(const ParticleModel& model, std::size_t N, Rng& rng) {
  if (N < 1) throw ModelError("particle filter needs at least one particle");
  const std::size_t n = model.n_time();
  const auto d = static_cast<Eigen::Index>(model.n_states());
  const auto NN = static_cast<Eigen::Index>(N);
  ParticleOutput out;
  out.particles.resize(n);
  out.weights = Mat(static_cast<Eigen::Index>(n), NN);
  out.ancestors.assign(n, std::vector<std::size_t>(N));
  out.filtered_means = Mat(static_cast<Eigen::Index>(n), d);
  if (n == 0) return out;

  Mat cloud(d, NN);
  model.sample_initial(cloud, rng);
  std::iota(out.ancestors[0].begin(), out.ancestors[0].end(), std::size_t{0});
  Vec w(NN);
  double loglik = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    const bool obs = model.has_observation(t);
    if (obs) {
      for (Eigen::Index i = 0; i < NN; ++i) w(i) = model.log_obs_density(t, cloud.col(i));
      loglik += detail::normalize_log_weights(w, t);
    } else {
      w.setConstant(1.0 / static_cast<double>(N));
    }
    out.weights.row(tt) = w.transpose();
    out.filtered_means.row(tt) = (cloud * w).transpose();
    out.particles[t] = cloud;
    if (t + 1 == n) break;

    auto& anc = out.ancestors[t + 1];
    if (obs) {
      anc = resample(w, N, rng);
      Mat next(d, NN);
      for (Eigen::Index i = 0; i < NN; ++i)
        next.col(i) = cloud.col(static_cast<Eigen::Index>(anc[static_cast<std::size_t>(i)]));
      cloud = std::move(next);
    } else {
      std::iota(anc.begin(), anc.end(), std::size_t{0});
    }
    model.propagate(t, cloud, rng);
  }
  out.loglik = loglik;
  return out;
}

ParticleOutput bootstrap_filter(const LinearModel& model, std::size_t N, Rng& rng) {
  return bootstrap_filter(LinearParticleModel(model), N, rng);
}

ParticleOutput bootstrap_filter(const NonlinearModel& model, const Vec& theta,
                                std::size_t N, Rng& rng) {
  model.validate(theta);
  return bootstrap_filter(NonlinearParticleModel(model, theta), N, rng);
}

Mat filter_smoother_trace(const ParticleOutput& po, Rng& rng) {
  const std::size_t n = po.particles.size();
  if (n == 0) return Mat();
  const auto d = po.particles[0].rows();
  Mat path(static_cast<Eigen::Index>(n), d);
  std::size_t i = draw_index(po.weights.row(static_cast<Eigen::Index>(n - 1)).transpose(), rng);
  for (std::size_t t = n; t-- > 0;) {
    path.row(static_cast<Eigen::Index>(t)) =
        po.particles[t].col(static_cast<Eigen::Index>(i)).transpose();
    i = po.ancestors[t][i];
  }
  return path;
}

}  // namespace ssm
