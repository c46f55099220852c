#include "ssm/model.hpp"

#include <cmath>
#include <sstream>

#include "ssm/linalg.hpp"

namespace ssm {

Mat psd_factor(const Mat& S) {
  if (S.size() == 0) return S;
  Eigen::LLT<Mat> llt(S);
  if (llt.info() == Eigen::Success) {
    Mat L = llt.matrixL();
    if (L.diagonal().minCoeff() > 1e-12 * std::max(1.0, S.diagonal().maxCoeff()))
      return L;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  const Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

double min_eigenvalue(const Mat& S) {
  if (S.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_diagonal(const Mat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

bool LinearModel::all_gaussian() const {
  for (const auto& o : obs)
    if (o.family != Family::gaussian) return false;
  return true;
}

double LinearModel::obs_param(std::size_t t, std::size_t j) const {
  const auto& o = obs[j];
  if (o.family == Family::gaussian) return gaussian_sd(t, j);
  return o.phi.value_or(1.0);
}

double LinearModel::log_obs_density(std::size_t t,
                                    const Eigen::Ref<const Vec>& alpha) const {
  const auto tt = static_cast<Eigen::Index>(t);
  const std::size_t p = n_series();
  const Mat& Ht = H[t];
  if (p > 1 && all_gaussian() && !is_diagonal(Ht)) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      if (!std::isnan(y(tt, j))) idx.push_back(j);
    if (idx.empty()) return 0.0;
    const Mat HH = Ht * Ht.transpose();
    const auto m = static_cast<Eigen::Index>(idx.size());
    Mat F(m, m);
    Vec v(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      v(a) = y(tt, idx[a]) - signal(t, static_cast<std::size_t>(idx[a]), alpha);
      for (Eigen::Index b = 0; b < m; ++b) F(a, b) = HH(idx[a], idx[b]);
    }
    Eigen::LLT<Mat> llt(F);
    if (llt.info() != Eigen::Success) return -kInf;
    const Vec w = llt.matrixL().solve(v);
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * (static_cast<double>(m) * kLog2Pi + logdet + w.squaredNorm());
  }
  double ll = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double yj = y(tt, static_cast<Eigen::Index>(j));
    if (std::isnan(yj)) continue;
    ll += obs_logdensity(obs[j].family, yj, signal(t, j, alpha), obs_param(t, j),
                         exposure(t, j));
  }
  return ll;
}

bool operator==(const LinearModel& a, const LinearModel& b) {
  const auto same = [](const Mat& x, const Mat& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double u = x.data()[i], v = y.data()[i];
      if (!(u == v || (std::isnan(u) && std::isnan(v)))) return false;
    }
    return true;
  };
  if (a.obs.size() != b.obs.size()) return false;
  for (std::size_t j = 0; j < a.obs.size(); ++j)
    if (a.obs[j].family != b.obs[j].family || a.obs[j].phi != b.obs[j].phi) return false;
  return same(a.y, b.y) && a.Z == b.Z && a.H == b.H && a.T == b.T && a.R == b.R &&
         a.c == b.c && a.d == b.d && same(a.a1, b.a1) && same(a.P1, b.P1) &&
         same(a.u, b.u);
}

namespace {

template <class S>
void check_slices(const S& s, const char* name, std::size_t n, Eigen::Index rows,
                  Eigen::Index cols) {
  if (s.empty()) throw ModelError(std::string(name) + " is missing");
  if (s.size() != 1 && s.size() != n) {
    std::ostringstream os;
    os << name << " has " << s.size() << " slices; expected 1 or " << n;
    throw ModelError(os.str());
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& m = s.slice(k);
    if (m.rows() != rows || (cols >= 0 && m.cols() != cols)) {
      std::ostringstream os;
      os << name << " slice " << k << " has shape " << m.rows() << "x" << m.cols()
         << "; expected " << rows << "x" << (cols >= 0 ? cols : m.cols());
      throw ModelError(os.str());
    }
    if (!m.allFinite()) throw ModelError(std::string(name) + " has non-finite entries");
  }
}

}  // namespace

void validate_model(const LinearModel& m) {
  const std::size_t n = m.n_time();
  const auto p = static_cast<Eigen::Index>(m.n_series());
  const auto d = static_cast<Eigen::Index>(m.n_states());
  if (n == 0) throw ModelError("model has no time points");
  if (d == 0) throw ModelError("model has no states");
  if (m.obs.size() != m.n_series())
    throw ModelError("number of observation families (" + std::to_string(m.obs.size()) +
                     ") does not match number of series (" + std::to_string(p) + ")");
  check_slices(m.Z, "Z", n, p, d);
  check_slices(m.H, "H", n, p, p);
  check_slices(m.T, "T", n, d, d);
  check_slices(m.R, "R", n, d, -1);
  const auto k = m.R.slice(0).cols();
  for (const auto& r : m.R)
    if (r.cols() != k) throw ModelError("R slices have differing column counts");
  if (k > d) throw ModelError("R has more columns than states");
  check_slices(m.c, "c", n, d, 1);
  check_slices(m.d, "d", n, p, 1);
  if (m.P1.rows() != d || m.P1.cols() != d)
    throw ModelError("P1 must be " + std::to_string(d) + "x" + std::to_string(d));
  if (!m.a1.allFinite() || !m.P1.allFinite())
    throw ModelError("a1/P1 have non-finite entries");
  if ((m.P1 - m.P1.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, m.P1.cwiseAbs().maxCoeff()))
    throw ModelError("P1 is not symmetric");
  if (min_eigenvalue(m.P1) < -1e-10 * std::max(1.0, m.P1.cwiseAbs().maxCoeff()))
    throw ModelError("P1 is not positive semidefinite");
  if (m.u.size() != 0) {
    if (m.u.rows() != m.y.rows() || m.u.cols() != m.y.cols())
      throw ModelError("u must have the same shape as y");
    if (!(m.u.array() > 0.0).all() || !m.u.allFinite())
      throw ModelError("u must be positive and finite");
  }

  bool mixed = false;
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& o = m.obs[static_cast<std::size_t>(j)];
    if (o.family != Family::gaussian) mixed = true;
    if ((o.family == Family::negbin || o.family == Family::gamma)) {
      if (!o.phi) throw ModelError(std::string(to_string(o.family)) +
                                   " series " + std::to_string(j) + " requires phi");
      if (!(*o.phi > 0.0) || !std::isfinite(*o.phi))
        throw ModelError("phi must be positive");
    }
    if (o.family == Family::svm && (p != 1 || d != 1))
      throw ModelError("svm family requires a single series and a single state");
    for (std::size_t t = 0; t < n; ++t) {
      if (auto err = check_observation(o.family, m.y(static_cast<Eigen::Index>(t), j),
                                       m.exposure(t, static_cast<std::size_t>(j))))
        throw ModelError("y[" + std::to_string(t) + "," + std::to_string(j) + "]: " + *err);
    }
  }
  if (mixed)
    for (const auto& h : m.H)
      if (!is_diagonal(h))
        throw ModelError("non-gaussian models require a diagonal H");
}

BayesianModel::BayesianModel(LinearModel base, std::vector<Prior> priors, ParamMap map)
    : base_(std::move(base)), priors_(std::move(priors)), map_(std::move(map)) {
  validate_model(base_);
  if (map_.names.size() != priors_.size())
    throw ModelError("parameter map has " + std::to_string(map_.names.size()) +
                     " names but " + std::to_string(priors_.size()) + " priors were given");
  for (std::size_t i = 0; i < priors_.size(); ++i) {
    try {
      priors_[i].validate();
    } catch (const ModelError& e) {
      throw ModelError(map_.names[i] + ": " + e.what());
    }
  }
  validate_model(update(initial_theta()));
}

Vec BayesianModel::initial_theta() const {
  Vec theta(static_cast<Eigen::Index>(priors_.size()));
  for (std::size_t i = 0; i < priors_.size(); ++i)
    theta(static_cast<Eigen::Index>(i)) = priors_[i].init;
  return theta;
}

double BayesianModel::log_prior(const Vec& theta) const {
  return ssm::log_prior(priors_, theta);
}

LinearModel BayesianModel::update(const Vec& theta) const {
  if (static_cast<std::size_t>(theta.size()) != priors_.size())
    throw ModelError("theta has length " + std::to_string(theta.size()) + "; expected " +
                     std::to_string(priors_.size()));
  LinearModel m = base_;
  if (map_.apply) map_.apply(theta, m);
  const auto finite = [](const auto& slices) {
    for (const auto& s : slices)
      if (!s.allFinite()) return false;
    return true;
  };
  if (!finite(m.Z) || !finite(m.H) || !finite(m.T) || !finite(m.R) || !finite(m.c) ||
      !finite(m.d) || !m.a1.allFinite() || !m.P1.allFinite())
    throw ModelError("parameter map produced a non-finite model entry");
  for (const auto& o : m.obs)
    if (o.phi && !std::isfinite(*o.phi))
      throw ModelError("parameter map produced a non-finite phi");
  return m;
}

SimulatedData simulate(const LinearModel& m, Rng& rng, bool keep_missing) {
  const std::size_t n = m.n_time();
  const auto p = static_cast<Eigen::Index>(m.n_series());
  const std::size_t k = m.n_eta();
  SimulatedData out{Mat(static_cast<Eigen::Index>(n), p),
                    Mat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m.n_states()))};
  const bool full_h = m.all_gaussian();
  Vec alpha = m.a1 + psd_factor(m.P1) * std_normal_vec(m.n_states(), rng);
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    out.states.row(tt) = alpha.transpose();
    if (full_h) {
      const Vec eps = m.H[t] * std_normal_vec(static_cast<std::size_t>(p), rng);
      out.y.row(tt) = (m.d[t] + m.Z[t] * alpha + eps).transpose();
    } else {
      for (Eigen::Index j = 0; j < p; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        try {
          out.y(tt, j) = sample_observation(m.obs[jj].family, m.signal(t, jj, alpha),
                                            m.obs_param(t, jj), m.exposure(t, jj), rng);
        } catch (const NumericalError& e) {
          throw NumericalError(e.what(), t);
        }
      }
    }
    if (keep_missing)
      for (Eigen::Index j = 0; j < p; ++j)
        if (std::isnan(m.y(tt, j))) out.y(tt, j) = kNaN;
    if (t + 1 < n) alpha = m.c[t] + m.T[t] * alpha + m.R[t] * std_normal_vec(k, rng);
  }
  return out;
}

}  // namespace ssm
