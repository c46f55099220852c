#pragma once

#include <cmath>

#include "ssm/builders.hpp"
#include "ssm/model.hpp"

namespace fixtures {

using ssm::Mat;
using ssm::Vec;

inline double unif(ssm::Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * ssm::uniform01(rng);
}

inline Mat random_matrix(ssm::Rng& rng, Eigen::Index r, Eigen::Index c, double scale) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * ssm::std_normal(rng);
  return m;
}

// Random stable LGSSM with dimensions T <= 10, d <= 3, p <= 2, some missing
// values and (optionally) time-varying components.
inline ssm::LinearModel random_lgssm(ssm::Rng& rng, bool time_varying = true) {
  const auto n = static_cast<Eigen::Index>(2 + rng() % 9);
  const auto d = static_cast<Eigen::Index>(1 + rng() % 3);
  const auto p = static_cast<Eigen::Index>(1 + rng() % 2);
  const auto k = static_cast<Eigen::Index>(1 + rng() % static_cast<unsigned>(d));
  const std::size_t slices = time_varying && rng() % 2 ? static_cast<std::size_t>(n) : 1;

  ssm::LinearModel m;
  std::vector<Mat> Z, H, T, R;
  std::vector<Vec> c, dd;
  for (std::size_t s = 0; s < slices; ++s) {
    Z.push_back(random_matrix(rng, p, d, 1.0));
    Mat h = random_matrix(rng, p, p, 0.3);
    h.diagonal().array() = h.diagonal().array().abs() + 0.3;
    H.push_back(h);
    Mat t = random_matrix(rng, d, d, 0.4);
    t.diagonal().array() += 0.5;
    T.push_back(t);
    R.push_back(random_matrix(rng, d, k, 0.5));
    c.push_back(random_matrix(rng, d, 1, 0.2));
    dd.push_back(random_matrix(rng, p, 1, 0.5));
  }
  m.Z = ssm::Slices<Mat>(Z);
  m.H = ssm::Slices<Mat>(H);
  m.T = ssm::Slices<Mat>(T);
  m.R = ssm::Slices<Mat>(R);
  m.c = ssm::Slices<Vec>(c);
  m.d = ssm::Slices<Vec>(dd);
  m.a1 = random_matrix(rng, d, 1, 1.0);
  const Mat A = random_matrix(rng, d, d, 1.0);
  m.P1 = A * A.transpose() + 0.5 * Mat::Identity(d, d);
  m.obs.assign(static_cast<std::size_t>(p), ssm::Observation{});
  m.y = Mat::Zero(n, p);
  ssm::Rng sim_rng(rng());
  m.y = ssm::simulate(m, sim_rng).y;
  for (Eigen::Index t = 0; t < n; ++t)
    for (Eigen::Index j = 0; j < p; ++j)
      if (ssm::uniform01(rng) < 0.15) m.y(t, j) = ssm::kNaN;
  return m;
}

// Scalar random walk plus noise.
inline ssm::LinearModel local_level(const Vec& y, double sd_y, double sd_level,
                                    double a1 = 0.0, double P1 = 10.0) {
  ssm::LinearModel m;
  m.y = y;
  m.Z = Mat(Mat::Ones(1, 1));
  m.H = Mat(Mat::Constant(1, 1, sd_y));
  m.T = Mat(Mat::Ones(1, 1));
  m.R = Mat(Mat::Constant(1, 1, sd_level));
  m.c = Vec(Vec::Zero(1));
  m.d = Vec(Vec::Zero(1));
  m.a1 = Vec::Constant(1, a1);
  m.P1 = Mat::Constant(1, 1, P1);
  m.obs = {ssm::Observation{}};
  return m;
}

// Scalar random walk state with poisson (or other) observations.
inline ssm::LinearModel scalar_ng(const Vec& y, ssm::Family family, double sd_level,
                                  double a1 = 0.0, double P1 = 1.0, double phi = 1.0) {
  ssm::LinearModel m = local_level(y, 0.0, sd_level, a1, P1);
  m.obs = {ssm::Observation{family, phi}};
  return m;
}

// Bivariate poisson observations of one random walk state.
inline ssm::BayesianModel bivariate_poisson(const Mat& y) {
  ssm::LinearModel m;
  m.y = y;
  m.Z = Mat(Mat::Ones(2, 1));
  m.H = Mat(Mat::Zero(2, 2));
  m.T = Mat(Mat::Ones(1, 1));
  m.R = Mat(Mat::Constant(1, 1, 0.1));
  m.c = Vec(Vec::Zero(1));
  m.d = Vec(Vec::Zero(2));
  m.a1 = Vec::Zero(1);
  m.P1 = Mat::Ones(1, 1);
  m.obs.assign(2, ssm::Observation{ssm::Family::poisson, std::nullopt});
  ssm::ParamMap map;
  map.names = {"sigma"};
  map.apply = [](const Vec& th, ssm::LinearModel& model) { model.R.slice(0)(0, 0) = th(0); };
  return ssm::BayesianModel(std::move(m), {ssm::Prior::gamma(0.1, 2.0, 0.01)}, std::move(map));
}

// Data of the bivariate poisson example: x_t = cumulative N(0, 0.2^2) sums,
// two independent poisson(exp(x_t)) series of length 50.
inline Mat bivariate_poisson_data(std::uint64_t seed, Eigen::Index n = 50) {
  ssm::Rng rng(seed);
  Mat y(n, 2);
  double x = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    x += 0.2 * ssm::std_normal(rng);
    for (int j = 0; j < 2; ++j)
      y(t, j) = static_cast<double>(std::poisson_distribution<long>(std::exp(x))(rng));
  }
  return y;
}

}  // namespace fixtures
