#include "ssm/ekf.hpp"

#include <cmath>

namespace ssm {

Vec NonlinearModel::initial_theta() const {
  Vec th(static_cast<Eigen::Index>(priors.size()));
  for (std::size_t i = 0; i < priors.size(); ++i)
    th(static_cast<Eigen::Index>(i)) = priors[i].init;
  return th;
}

double NonlinearModel::log_obs_density(std::size_t t, const Vec& alpha,
                                       const Vec& theta) const {
  const auto tt = static_cast<Eigen::Index>(t);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    if (!std::isnan(y(tt, j))) idx.push_back(j);
  if (idx.empty()) return 0.0;
  const Vec mean = Z(t, alpha, theta);
  const Mat Ht = H(t, alpha, theta);
  const Mat HH = Ht * Ht.transpose();
  const auto m = static_cast<Eigen::Index>(idx.size());
  Mat F(m, m);
  Vec v(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    v(a) = y(tt, idx[static_cast<std::size_t>(a)]) - mean(idx[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < m; ++b)
      F(a, b) = HH(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  Eigen::LLT<Mat> llt(F);
  if (llt.info() != Eigen::Success) return -kInf;
  const Vec w = llt.matrixL().solve(v);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(m) * kLog2Pi + logdet + w.squaredNorm());
}

void NonlinearModel::validate(const Vec& theta) const {
  if (!Z || !H || !T || !R || !Z_jac || !T_jac || !a1 || !P1)
    throw ModelError("nonlinear model: all callbacks must be set");
  if (n_states == 0) throw ModelError("nonlinear model: n_states must be positive");
  if (names.size() != priors.size())
    throw ModelError("nonlinear model: need one name per prior");
  const auto d = static_cast<Eigen::Index>(n_states);
  const auto p = y.cols();
  const Vec a = a1(theta);
  const Mat P = P1(theta);
  if (a.size() != d || P.rows() != d || P.cols() != d)
    throw ModelError("nonlinear model: a1/P1 dimensions do not match n_states");
  if (Z(0, a, theta).size() != p || Z_jac(0, a, theta).rows() != p ||
      Z_jac(0, a, theta).cols() != d)
    throw ModelError("nonlinear model: Z or Z_jac has wrong dimensions");
  const Mat Ht = H(0, a, theta);
  if (Ht.rows() != p || Ht.cols() != p)
    throw ModelError("nonlinear model: H must be p x p");
  const Mat Tj = T_jac(0, a, theta);
  if (T(0, a, theta).size() != d || Tj.rows() != d || Tj.cols() != d)
    throw ModelError("nonlinear model: T or T_jac has wrong dimensions");
  if (R(0, a, theta).rows() != d) throw ModelError("nonlinear model: R must have d rows");
}

namespace {

struct EkfPass {
  FilterResult filter;
  std::vector<detail::UpdateStep> steps;
};

EkfPass ekf_pass(const NonlinearModel& m, const Vec& theta, unsigned iekf_iter) {
  const std::size_t n = m.n_time();
  const auto d = static_cast<Eigen::Index>(m.n_states);
  const auto p = static_cast<Eigen::Index>(m.n_series());
  EkfPass out;
  auto& f = out.filter;
  f.at = Mat(static_cast<Eigen::Index>(n) + 1, d);
  f.att = Mat(static_cast<Eigen::Index>(n), d);
  f.Pt.resize(n + 1);
  f.Ptt.resize(n);
  out.steps.resize(n);

  Vec a = m.a1(theta);
  Mat P = m.P1(theta);
  Vec att(d);
  Mat Ptt(d, d);
  double loglik = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    f.at.row(tt) = a.transpose();
    f.Pt[t] = P;
    auto& step = out.steps[t];
    for (Eigen::Index j = 0; j < p; ++j)
      if (!std::isnan(m.y(tt, j))) step.observed.push_back(j);

    if (step.observed.empty()) {
      att = a;
      Ptt = P;
    } else {
      const auto mo = static_cast<Eigen::Index>(step.observed.size());
      Vec lin = a;
      double ll = 0.0;
      for (unsigned it = 0; it <= iekf_iter; ++it) {
        const Vec zval = m.Z(t, lin, theta);
        const Mat Zj = m.Z_jac(t, lin, theta);
        const Mat Ht = m.H(t, lin, theta);
        const Mat HH = Ht * Ht.transpose();
        Mat Zo(mo, d), Ho(mo, mo);
        Vec v(mo);
        for (Eigen::Index i = 0; i < mo; ++i) {
          const Eigen::Index j = step.observed[static_cast<std::size_t>(i)];
          Zo.row(i) = Zj.row(j);
          for (Eigen::Index k = 0; k < mo; ++k)
            Ho(i, k) = HH(j, step.observed[static_cast<std::size_t>(k)]);
          v(i) = m.y(tt, j) - zval(j) - Zj.row(j).dot(a - lin);
        }
        ll = detail::measurement_update(a, P, Zo, Ho, v, t, att, Ptt, step);
        lin = att;
      }
      loglik += ll;
    }
    f.att.row(tt) = att.transpose();
    f.Ptt[t] = Ptt;
    const Mat Tj = m.T_jac(t, att, theta);
    const Mat Rt = m.R(t, att, theta);
    step.T = Tj;
    a = m.T(t, att, theta);
    P = Tj * Ptt * Tj.transpose() + Rt * Rt.transpose();
    symmetrize(P);
    if (!a.allFinite() || !P.allFinite())
      throw NumericalError("extended Kalman filter produced non-finite values", t);
  }
  f.at.row(static_cast<Eigen::Index>(n)) = a.transpose();
  f.Pt[n] = P;
  f.loglik = loglik;
  return out;
}

}  // namespace

FilterResult ekf(const NonlinearModel& model, const Vec& theta, unsigned iekf_iter) {
  model.validate(theta);
  return ekf_pass(model, theta, iekf_iter).filter;
}

SmootherResult ekf_smoother(const NonlinearModel& model, const Vec& theta,
                            unsigned iekf_iter) {
  model.validate(theta);
  const EkfPass pass = ekf_pass(model, theta, iekf_iter);
  return detail::backward_smooth(pass.filter, pass.steps);
}

}  // namespace ssm
