#include <cmath>

#include "ssm/mcmc.hpp"

namespace ssm {

namespace {

// In-place rank one update (sign > 0) or downdate of L L^T by x x^T.
void chol_rank_one(Mat& L, Vec x, double sign) {
  const Eigen::Index n = L.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lkk = L(k, k);
    const double r2 = lkk * lkk + sign * x(k) * x(k);
    if (!(r2 > 0.0)) throw NumericalError("adaptation lost positive definiteness");
    const double r = std::sqrt(r2);
    const double c = r / lkk;
    const double s = x(k) / lkk;
    L(k, k) = r;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      L(i, k) = (L(i, k) + sign * s * x(i)) / c;
      x(i) = c * x(i) - s * L(i, k);
    }
  }
}

}  // namespace

Mat ram_step(const Mat& S, const Vec& u, double alpha, double target, double step) {
  const double norm2 = u.squaredNorm();
  const double coef = step * (alpha - target);
  if (coef == 0.0 || norm2 == 0.0) return S;
  Mat out = S;
  const Vec x = std::sqrt(std::abs(coef) / norm2) * (S * u);
  chol_rank_one(out, x, coef > 0.0 ? 1.0 : -1.0);
  return out;
}

}  // namespace ssm
