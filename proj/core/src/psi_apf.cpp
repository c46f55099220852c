#include <cmath>
#include <numeric>

#include "ssm/linalg.hpp"
#include "ssm/particle.hpp"

namespace ssm {

namespace {

// Proposal alpha_t = M_t alpha_{t-1} + b_t + L_t z, z ~ N(0, I).
// For t = 0 only b_0 and L_0 are used.
struct Proposal {
  Mat M;
  Vec b;
  Mat L;
};

// Backward information filter on the approximating model: Psi_t(alpha) is
// proportional to exp(-alpha' Omega_t alpha / 2 + omega_t' alpha) and equals
// p~(y~_t, ..., y~_n | alpha_t) up to a constant. Proposals combine it with
// the transition density.
std::vector<Proposal> build_proposals(const LinearModel& m, const GaussianApprox& ga) {
  const std::size_t n = m.n_time();
  const auto d = static_cast<Eigen::Index>(m.n_states());
  const auto p = static_cast<Eigen::Index>(m.n_series());
  const Mat I = Mat::Identity(d, d);

  std::vector<Mat> Omega(n);
  std::vector<Vec> omega(n);
  Mat Om_next;
  Vec om_next;
  for (std::size_t t = n; t-- > 0;) {
    const auto tt = static_cast<Eigen::Index>(t);
    Mat Om = Mat::Zero(d, d);
    Vec om = Vec::Zero(d);
    const Mat& Z = m.Z[t];
    for (Eigen::Index j = 0; j < p; ++j) {
      const double yt = ga.pseudo_y(tt, j);
      if (std::isnan(yt)) continue;
      const double prec = 1.0 / (ga.pseudo_H(tt, j) * ga.pseudo_H(tt, j));
      Om.noalias() += prec * Z.row(j).transpose() * Z.row(j);
      om.noalias() += (prec * (yt - m.d[t](j))) * Z.row(j).transpose();
    }
    if (t + 1 < n) {
      const Mat& T = m.T[t];
      const Mat Q = m.R[t] * m.R[t].transpose();
      const Eigen::PartialPivLU<Mat> lu(I + Om_next * Q);
      Mat Ombar = lu.solve(Om_next);
      symmetrize(Ombar);
      const Vec ombar = lu.solve(om_next);
      Om.noalias() += T.transpose() * Ombar * T;
      om.noalias() += T.transpose() * (ombar - Ombar * m.c[t]);
    }
    symmetrize(Om);
    Omega[t] = Om;
    omega[t] = om;
    Om_next = std::move(Om);
    om_next = std::move(om);
  }

  std::vector<Proposal> prop(n);
  for (std::size_t t = 0; t < n; ++t) {
    Proposal& q = prop[t];
    if (t == 0) {
      const Eigen::PartialPivLU<Mat> lu(I + m.P1 * Omega[0]);
      Mat S = lu.solve(m.P1);
      symmetrize(S);
      q.b = lu.solve(m.a1 + m.P1 * omega[0]);
      q.L = psd_factor(S);
    } else {
      const Mat& T = m.T[t - 1];
      const Mat Q = m.R[t - 1] * m.R[t - 1].transpose();
      const Eigen::PartialPivLU<Mat> lu(I + Q * Omega[t]);
      Mat S = lu.solve(Q);
      symmetrize(S);
      q.M = lu.solve(T);
      q.b = lu.solve(m.c[t - 1] + Q * omega[t]);
      q.L = psd_factor(S);
    }
    if (!q.b.allFinite() || !q.L.allFinite() || (t > 0 && !q.M.allFinite()))
      throw NumericalError("twisted proposal is not finite", t);
  }
  return prop;
}

// log g_t - log g~_t summed over observed non-gaussian series. Gaussian
// series have g = g~ exactly and are skipped.
double log_weight(const LinearModel& m, const GaussianApprox& ga, std::size_t t,
                  const Eigen::Ref<const Vec>& alpha) {
  const auto tt = static_cast<Eigen::Index>(t);
  double lw = 0.0;
  for (std::size_t j = 0; j < m.n_series(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double y = m.y(tt, jj);
    const Family f = m.obs[j].family;
    if (std::isnan(y) || f == Family::gaussian) continue;
    const double s = m.signal(t, j, alpha);
    lw += obs_logdensity(f, y, s, m.obs_param(t, j), m.exposure(t, j)) -
          obs_logdensity(Family::gaussian, ga.pseudo_y(tt, jj), s, ga.pseudo_H(tt, jj));
  }
  return lw;
}

}  // namespace

ParticleOutput psi_apf(const LinearModel& m, const GaussianApprox& ga, std::size_t N,
                       Rng& rng) {
  if (N < 1) throw ModelError("particle filter needs at least one particle");
  const std::size_t n = m.n_time();
  const auto d = static_cast<Eigen::Index>(m.n_states());
  const auto NN = static_cast<Eigen::Index>(N);
  if (ga.pseudo_y.rows() != static_cast<Eigen::Index>(n))
    throw ModelError("psi_apf: approximation does not match the model");

  const std::vector<Proposal> prop = build_proposals(m, ga);
  ParticleOutput out;
  out.particles.resize(n);
  out.weights = Mat(static_cast<Eigen::Index>(n), NN);
  out.ancestors.assign(n, std::vector<std::size_t>(N));
  out.filtered_means = Mat(static_cast<Eigen::Index>(n), d);
  if (n == 0) return out;

  Mat cloud(d, NN);
  for (Eigen::Index i = 0; i < NN; ++i)
    cloud.col(i) = prop[0].b + prop[0].L * std_normal_vec(static_cast<std::size_t>(d), rng);
  std::iota(out.ancestors[0].begin(), out.ancestors[0].end(), std::size_t{0});

  Vec w(NN);
  double loglik = ga.loglik_gaussian;
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    const bool obs = detail::row_has_data(m.y, t);
    if (obs) {
      for (Eigen::Index i = 0; i < NN; ++i) w(i) = log_weight(m, ga, t, cloud.col(i));
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
    } else {
      std::iota(anc.begin(), anc.end(), std::size_t{0});
    }
    const Proposal& q = prop[t + 1];
    Mat next(d, NN);
    for (Eigen::Index i = 0; i < NN; ++i) {
      const auto a = static_cast<Eigen::Index>(anc[static_cast<std::size_t>(i)]);
      next.col(i) = q.M * cloud.col(a) + q.b +
                    q.L * std_normal_vec(static_cast<std::size_t>(q.L.cols()), rng);
    }
    cloud = std::move(next);
  }
  out.loglik = loglik;
  return out;
}

}  // namespace ssm
