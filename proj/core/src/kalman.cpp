#include "ssm/kalman.hpp"

#include <cmath>

namespace ssm {

namespace detail {

double measurement_update(const Vec& a, const Mat& P, const Mat& Zo, const Mat& Ho,
                          const Vec& v, std::size_t t, Vec& att, Mat& Ptt,
                          UpdateStep& step) {
  const Mat PZt = P * Zo.transpose();
  Mat F = Zo * PZt + Ho;
  symmetrize(F);
  Eigen::LLT<Mat> llt(F);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-14))
    throw NumericalError("innovation covariance is singular", t);
  const auto m = F.rows();
  step.Finv = llt.solve(Mat::Identity(m, m));
  step.K = PZt * step.Finv;
  step.Z = Zo;
  step.v = v;
  att = a + step.K * v;
  Ptt = P - step.K * PZt.transpose();
  symmetrize(Ptt);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(m) * kLog2Pi + logdet + v.dot(step.Finv * v));
}

SmootherResult backward_smooth(const FilterResult& f,
                               const std::vector<UpdateStep>& steps) {
  const auto n = static_cast<Eigen::Index>(steps.size());
  const Eigen::Index d = f.at.cols();
  SmootherResult out{Mat(n, d), std::vector<Mat>(static_cast<std::size_t>(n))};
  Vec r = Vec::Zero(d);
  Mat N = Mat::Zero(d, d);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const auto& s = steps[static_cast<std::size_t>(t)];
    const auto tt = static_cast<std::size_t>(t);
    if (!s.observed.empty()) {
      const Mat L = s.T - (s.T * s.K) * s.Z;
      const Mat ZtFinv = s.Z.transpose() * s.Finv;
      r = (ZtFinv * s.v + L.transpose() * r).eval();
      N = (ZtFinv * s.Z + L.transpose() * N * L).eval();
    } else {
      r = (s.T.transpose() * r).eval();
      N = (s.T.transpose() * N * s.T).eval();
    }
    symmetrize(N);
    const Mat& P = f.Pt[tt];
    out.alphahat.row(t) = (f.at.row(t).transpose() + P * r).transpose();
    Mat V = P - P * N * P;
    symmetrize(V);
    out.Vt[tt] = std::move(V);
  }
  return out;
}

}  // namespace detail

KalmanRecursion::KalmanRecursion(const LinearModel& m) : model_(&m) {
  const std::size_t n = m.n_time();
  const auto d = static_cast<Eigen::Index>(m.n_states());
  const auto p = static_cast<Eigen::Index>(m.n_series());
  filter_.at = Mat(static_cast<Eigen::Index>(n) + 1, d);
  filter_.att = Mat(static_cast<Eigen::Index>(n), d);
  filter_.Pt.resize(n + 1);
  filter_.Ptt.resize(n);
  steps_.resize(n);

  Vec a = m.a1;
  Mat P = m.P1;
  Vec att(d);
  Mat Ptt(d, d);
  double loglik = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    filter_.at.row(tt) = a.transpose();
    filter_.Pt[t] = P;
    auto& step = steps_[t];
    for (Eigen::Index j = 0; j < p; ++j)
      if (!std::isnan(m.y(tt, j))) step.observed.push_back(j);
    step.T = m.T[t];
    if (step.observed.empty()) {
      att = a;
      Ptt = P;
    } else {
      const auto mo = static_cast<Eigen::Index>(step.observed.size());
      const Mat& Zt = m.Z[t];
      const Mat HH = m.H[t] * m.H[t].transpose();
      Mat Zo(mo, d), Ho(mo, mo);
      Vec v(mo);
      for (Eigen::Index i = 0; i < mo; ++i) {
        const Eigen::Index j = step.observed[static_cast<std::size_t>(i)];
        Zo.row(i) = Zt.row(j);
        for (Eigen::Index k = 0; k < mo; ++k)
          Ho(i, k) = HH(j, step.observed[static_cast<std::size_t>(k)]);
        v(i) = m.y(tt, j) - m.d[t](j) - Zt.row(j).dot(a);
      }
      loglik += detail::measurement_update(a, P, Zo, Ho, v, t, att, Ptt, step);
    }
    filter_.att.row(tt) = att.transpose();
    filter_.Ptt[t] = Ptt;
    a = m.c[t] + m.T[t] * att;
    const Mat& Rt = m.R[t];
    P = m.T[t] * Ptt * m.T[t].transpose() + Rt * Rt.transpose();
    symmetrize(P);
  }
  filter_.at.row(static_cast<Eigen::Index>(n)) = a.transpose();
  filter_.Pt[n] = P;
  filter_.loglik = loglik;
}

SmootherResult KalmanRecursion::smooth() const {
  return detail::backward_smooth(filter_, steps_);
}

Mat KalmanRecursion::smoothed_means(const Mat& y, bool intercepts) const {
  const LinearModel& m = *model_;
  const std::size_t n = steps_.size();
  const auto d = static_cast<Eigen::Index>(m.n_states());
  Mat at(static_cast<Eigen::Index>(n), d);
  std::vector<Vec> innov(n);
  Vec a = intercepts ? m.a1 : Vec(Vec::Zero(d));
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    at.row(tt) = a.transpose();
    const auto& s = steps_[t];
    Vec att = a;
    if (!s.observed.empty()) {
      Vec v(static_cast<Eigen::Index>(s.observed.size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Eigen::Index j = s.observed[static_cast<std::size_t>(i)];
        v(i) = y(tt, j) - (intercepts ? m.d[t](j) : 0.0) - s.Z.row(i).dot(a);
      }
      att += s.K * v;
      innov[t] = std::move(v);
    }
    a = s.T * att;
    if (intercepts) a += m.c[t];
  }
  Mat out(static_cast<Eigen::Index>(n), d);
  Vec r = Vec::Zero(d);
  for (std::size_t t = n; t-- > 0;) {
    const auto& s = steps_[t];
    if (!s.observed.empty()) {
      const Mat L = s.T - (s.T * s.K) * s.Z;
      r = (s.Z.transpose() * (s.Finv * innov[t]) + L.transpose() * r).eval();
    } else {
      r = (s.T.transpose() * r).eval();
    }
    const auto tt = static_cast<Eigen::Index>(t);
    out.row(tt) = (at.row(tt).transpose() + filter_.Pt[t] * r).transpose();
  }
  return out;
}

FilterResult kalman_filter(const LinearModel& model) {
  return KalmanRecursion(model).filter();
}

SmootherResult kalman_smoother(const LinearModel& model) {
  return KalmanRecursion(model).smooth();
}

Mat simulation_smoother(const KalmanRecursion& rec, const LinearModel& model, Rng& rng) {
  SimulatedData sim = simulate(model, rng, /*keep_missing=*/true);
  const Mat diff = model.y - sim.y;
  return sim.states + rec.smoothed_means(diff, /*intercepts=*/false);
}

Mat simulation_smoother(const LinearModel& model, Rng& rng) {
  KalmanRecursion rec(model);
  return simulation_smoother(rec, model, rng);
}

}  // namespace ssm
