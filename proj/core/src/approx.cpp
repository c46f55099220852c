#include "ssm/approx.hpp"

#include <cmath>

namespace ssm {

Mat initial_signal(const LinearModel& m) {
  const auto n = static_cast<Eigen::Index>(m.n_time());
  const auto p = static_cast<Eigen::Index>(m.n_series());
  Mat s = Mat::Zero(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const Family f = m.obs[static_cast<std::size_t>(j)].family;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double y = m.y(t, j);
      if (std::isnan(y)) continue;
      const double u = m.exposure(static_cast<std::size_t>(t), static_cast<std::size_t>(j));
      switch (f) {
        case Family::gaussian: s(t, j) = y; break;
        case Family::poisson:
        case Family::negbin: s(t, j) = std::log((y + 0.1) / u); break;
        case Family::binomial: {
          const double prob = std::clamp(y / u, 0.01, 0.99);
          s(t, j) = std::log(prob / (1.0 - prob));
          break;
        }
        case Family::gamma: s(t, j) = std::log(y / u); break;
        case Family::svm: s(t, j) = std::log(y * y + 1e-4); break;
      }
    }
  }
  return s;
}

namespace {

struct Sweep {
  double loglik_gaussian = 0.0;
  double scaling = 0.0;
  Mat mode;
  Mat next_signal;
  double objective() const { return loglik_gaussian + scaling; }
};

class Approximator {
 public:
  explicit Approximator(const LinearModel& m) : model_(m), pseudo_(m) {
    const std::size_t n = m.n_time();
    const auto p = static_cast<Eigen::Index>(m.n_series());
    pseudo_.obs.assign(m.n_series(), Observation{Family::gaussian, std::nullopt});
    pseudo_.u = Mat();
    std::vector<Mat> H(n, Mat::Zero(p, p));
    pseudo_.H = Slices<Mat>(std::move(H));
    pseudo_H_ = Mat::Ones(static_cast<Eigen::Index>(n), p);
  }

  // Build the pseudo model at signal s, run the Kalman recursions on it.
  Sweep sweep(const Mat& s) {
    const LinearModel& m = model_;
    const std::size_t n = m.n_time();
    const auto p = static_cast<Eigen::Index>(m.n_series());
    Sweep out;
    for (std::size_t t = 0; t < n; ++t) {
      const auto tt = static_cast<Eigen::Index>(t);
      Mat& Ht = pseudo_.H.slice(t);
      for (Eigen::Index j = 0; j < p; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double y = m.y(tt, j);
        if (std::isnan(y)) {
          pseudo_.y(tt, j) = kNaN;
          Ht(j, j) = 1.0;
          pseudo_H_(tt, j) = 1.0;
          continue;
        }
        const Family f = m.obs[jj].family;
        const double param = m.obs_param(t, jj);
        const double u = m.exposure(t, jj);
        double py, ph;
        if (f == Family::gaussian) {
          py = y;
          ph = param;
        } else {
          const auto der = obs_logdensity_derivs(f, y, s(tt, j), param, u);
          if (!(der.d2 < 0.0) || !std::isfinite(der.d1))
            throw NumericalError("log-density is not strictly concave at the current signal", t);
          const double h2 = -1.0 / der.d2;
          py = s(tt, j) + h2 * der.d1;
          ph = std::sqrt(h2);
        }
        pseudo_.y(tt, j) = py;
        Ht(j, j) = ph;
        pseudo_H_(tt, j) = ph;
        out.scaling += obs_logdensity(f, y, s(tt, j), param, u) -
                       obs_logdensity(Family::gaussian, py, s(tt, j), ph);
      }
    }
    KalmanRecursion rec(pseudo_);
    out.loglik_gaussian = rec.loglik();
    out.mode = rec.smoothed_means(pseudo_.y);
    out.next_signal = Mat(static_cast<Eigen::Index>(n), p);
    for (std::size_t t = 0; t < n; ++t) {
      const auto tt = static_cast<Eigen::Index>(t);
      out.next_signal.row(tt) =
          (m.d[t] + m.Z[t] * out.mode.row(tt).transpose()).transpose();
    }
    if (!std::isfinite(out.objective()) || !out.next_signal.allFinite())
      throw NumericalError("approximation produced a non-finite value");
    return out;
  }

  LinearModel& pseudo() { return pseudo_; }
  const Mat& pseudo_H() const { return pseudo_H_; }

 private:
  const LinearModel& model_;
  LinearModel pseudo_;
  Mat pseudo_H_;
};

}  // namespace

GaussianApprox gaussian_approximation(const LinearModel& model, const Mat& initial,
                                      const ApproxOptions& opt) {
  for (const auto& h : model.H)
    if (!model.all_gaussian() || model.n_series() > 1)
      if (!h.isDiagonal(0.0))
        throw ModelError("gaussian approximation requires a diagonal H");

  Approximator approx(model);
  Mat s = initial;
  Sweep cur = approx.sweep(s);
  unsigned it = 0;
  bool converged = false;
  while (it < opt.max_iter) {
    ++it;
    Mat cand = cur.next_signal;
    Sweep next = approx.sweep(cand);
    if (it > 1) {
      const double floor = cur.objective() - 1e-10 * (1.0 + std::abs(cur.objective()));
      for (unsigned h = 0; h < opt.max_halvings && next.objective() < floor; ++h) {
        cand = 0.5 * (s + cand);
        next = approx.sweep(cand);
      }
    }
    const double rel = std::abs(next.objective() - cur.objective()) /
                       (0.1 + std::abs(next.objective()));
    s = std::move(cand);
    cur = std::move(next);
    if (rel < opt.conv_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NumericalError("gaussian approximation did not converge in " +
                         std::to_string(opt.max_iter) + " iterations");

  // cur was computed at s, so the pseudo model currently held corresponds to s
  GaussianApprox out;
  out.mode = cur.mode;
  out.signal = s;
  out.pseudo_y = approx.pseudo().y;
  out.pseudo_H = approx.pseudo_H();
  out.loglik_gaussian = cur.loglik_gaussian;
  out.scaling_correction = cur.scaling;
  out.converged = true;
  out.iterations = it;
  out.model = approx.pseudo();
  return out;
}

GaussianApprox gaussian_approximation(const LinearModel& model, const ApproxOptions& opt) {
  return gaussian_approximation(model, initial_signal(model), opt);
}

double approx_loglik(const LinearModel& model, const ApproxOptions& opt) {
  return gaussian_approximation(model, opt).approx_loglik();
}

}  // namespace ssm
