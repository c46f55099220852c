#pragma once

// Replica of the default R generators (Mersenne-Twister, inversion normals)
// and the rgamma/rpois/rnbinom samplers built on them. Used only to rebuild
// reference simulated datasets draw for draw.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace rcompat {

class RRng {
 public:
  explicit RRng(std::uint32_t seed) { set_seed(seed); }

  void set_seed(std::uint32_t seed) {
    for (int j = 0; j < 50; ++j) seed = 69069u * seed + 1u;
    for (auto& v : dummy_) {
      seed = 69069u * seed + 1u;
      v = seed;
    }
    dummy_[0] = 624;
  }

  double unif_rand() {
    const double x = genrand();
    if (x <= 0.0) return 0.5 * i2_32m1;
    if (1.0 - x <= 0.0) return 1.0 - 0.5 * i2_32m1;
    return x;
  }

  double norm_rand() {
    constexpr double big = 134217728.0;
    double u = unif_rand();
    u = static_cast<int>(big * u) + unif_rand();
    return qnorm(u / big);
  }

  double exp_rand() {
    static const std::array<double, 16> q = [] {
      std::array<double, 16> v{};
      double term = 1.0, sum = 0.0;
      for (int k = 1; k <= 16; ++k) {
        term *= M_LN2 / k;
        sum += term;
        v[static_cast<std::size_t>(k - 1)] = std::min(sum, 1.0);
      }
      v[15] = 1.0;
      return v;
    }();
    double a = 0.0;
    double u = unif_rand();
    while (u <= 0.0 || u >= 1.0) u = unif_rand();
    for (;;) {
      u += u;
      if (u > 1.0) break;
      a += q[0];
    }
    u -= 1.0;
    if (u <= q[0]) return a + u;
    std::size_t i = 0;
    double ustar = unif_rand(), umin = ustar;
    do {
      ustar = unif_rand();
      if (umin > ustar) umin = ustar;
      ++i;
    } while (u > q[i]);
    return a + umin * q[0];
  }

  double runif(double a, double b) {
    if (a == b) return a;
    double u;
    do {
      u = unif_rand();
    } while (u <= 0.0 || u >= 1.0);
    return a + (b - a) * u;
  }

  double rnorm(double mu, double sigma) { return mu + sigma * norm_rand(); }

  // GD algorithm (Ahrens and Dieter 1982); shape >= 1 only.
  double rgamma(double a, double scale) {
    constexpr double sqrt32 = 5.656854;
    constexpr double q1 = 0.04166669, q2 = 0.02083148, q3 = 0.00801191, q4 = 0.00144121,
                     q5 = -7.388e-5, q6 = 2.4511e-4, q7 = 2.424e-4;
    constexpr double a1 = 0.3333333, a2 = -0.250003, a3 = 0.2000062, a4 = -0.1662921,
                     a5 = 0.1423657, a6 = -0.1367177, a7 = 0.1233795;
    if (a != g_.aa) {
      g_.aa = a;
      g_.s2 = a - 0.5;
      g_.s = std::sqrt(g_.s2);
      g_.d = sqrt32 - g_.s * 12.0;
    }
    double t = norm_rand();
    double x = g_.s + 0.5 * t;
    const double ret = x * x;
    if (t >= 0.0) return scale * ret;
    double u = unif_rand();
    if (g_.d * u <= t * t * t) return scale * ret;
    if (a != g_.aaa) {
      g_.aaa = a;
      const double r = 1.0 / a;
      g_.q0 = ((((((q7 * r + q6) * r + q5) * r + q4) * r + q3) * r + q2) * r + q1) * r;
      const double s = g_.s, s2 = g_.s2;
      if (a <= 3.686) {
        g_.b = 0.463 + s + 0.178 * s2;
        g_.si = 1.235;
        g_.c = 0.195 / s - 0.079 + 0.16 * s;
      } else if (a <= 13.022) {
        g_.b = 1.654 + 0.0076 * s2;
        g_.si = 1.68 / s + 0.275;
        g_.c = 0.062 / s + 0.024;
      } else {
        g_.b = 1.77;
        g_.si = 0.75;
        g_.c = 0.1515 / g_.s;
      }
    }
    auto quotient = [&](double tt) {
      const double v = tt / (g_.s + g_.s);
      if (std::fabs(v) <= 0.25)
        return g_.q0 + 0.5 * tt * tt * ((((((a7 * v + a6) * v + a5) * v + a4) * v + a3) * v + a2) * v + a1) * v;
      return g_.q0 - g_.s * tt + 0.25 * tt * tt + (g_.s2 + g_.s2) * std::log(1.0 + v);
    };
    if (x > 0.0) {
      if (std::log(1.0 - u) <= quotient(t)) return scale * ret;
    }
    for (;;) {
      const double e = exp_rand();
      u = unif_rand();
      u = u + u - 1.0;
      t = u < 0.0 ? g_.b - g_.si * e : g_.b + g_.si * e;
      if (t >= -0.71874483771719) {
        const double q = quotient(t);
        if (q > 0.0) {
          const double w = std::expm1(q);
          if (g_.c * std::fabs(u) <= w * std::exp(e - 0.5 * t * t)) break;
        }
      }
    }
    x = g_.s + 0.5 * t;
    return scale * x * x;
  }

  // Ahrens and Dieter (1982) with the table lookup for small means.
  double rpois(double mu) {
    constexpr double a0 = -0.5, a1 = 0.3333333, a2 = -0.2500068, a3 = 0.2000118, a4 = -0.1661269,
                     a5 = 0.1421878, a6 = -0.1384794, a7 = 0.1250060;
    constexpr double one_7 = 0.1428571428571428571, one_12 = 0.0833333333333333333,
                     one_24 = 0.0416666666666666667;
    constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
    static constexpr double fact[] = {1., 1., 2., 6., 24., 120., 720., 5040., 40320., 362880.};
    auto& P = p_;

    if (mu <= 0.0) return 0.0;
    const bool big_mu = mu >= 10.0;
    bool new_big_mu = false;

    if (!(big_mu && mu == P.muprev)) {
      if (big_mu) {
        new_big_mu = true;
        P.muprev = mu;
        P.s = std::sqrt(mu);
        P.d = 6.0 * mu * mu;
        P.big_l = std::floor(mu - 1.1484);
      } else {
        if (mu != P.muprev) {
          P.muprev = mu;
          P.m = std::max(1, static_cast<int>(mu));
          P.l = 0;
          P.q = P.p0 = P.p = std::exp(-mu);
        }
        for (;;) {
          const double u = unif_rand();
          if (u <= P.p0) return 0.0;
          if (P.l > 0) {
            const int j = u > 0.458 ? std::min(P.l, P.m) : 1;
            for (int k = j; k <= P.l; ++k)
              if (u <= P.pp[static_cast<std::size_t>(k)]) return k;
            if (P.l == 35) continue;
          }
          P.l++;
          for (int k = P.l; k <= 35; ++k) {
            P.p *= mu / k;
            P.q += P.p;
            P.pp[static_cast<std::size_t>(k)] = P.q;
            if (u <= P.q) {
              P.l = k;
              return k;
            }
          }
          P.l = 35;
        }
      }
    }

    double pois = -1.0, fk = 0.0, difmuk = 0.0, u = 0.0, E = 0.0;
    const double g = mu + P.s * norm_rand();
    if (g >= 0.0) {
      pois = std::floor(g);
      if (pois >= P.big_l) return pois;
      fk = pois;
      difmuk = mu - fk;
      u = unif_rand();
      if (P.d * u >= difmuk * difmuk * difmuk) return pois;
    }
    if (new_big_mu || mu != P.muprev2) {
      P.muprev2 = mu;
      P.omega = inv_sqrt_2pi / P.s;
      P.b1 = one_24 / mu;
      P.b2 = 0.3 * P.b1 * P.b1;
      P.c3 = one_7 * P.b1 * P.b2;
      P.c2 = P.b2 - 15.0 * P.c3;
      P.c1 = P.b1 - 6.0 * P.b2 + 45.0 * P.c3;
      P.c0 = 1.0 - P.b1 + 3.0 * P.b2 - 15.0 * P.c3;
      P.c = 0.1069 / mu;
    }

    // step F: returns true when the candidate is accepted
    auto accept = [&](bool hat) {
      double px, py;
      if (pois < 10) {
        px = -mu;
        py = std::pow(mu, pois) / fact[static_cast<int>(pois)];
      } else {
        double del = one_12 / fk;
        del = del * (1.0 - 4.8 * del * del);
        const double v = difmuk / fk;
        if (std::fabs(v) <= 0.25)
          px = fk * v * v * (((((((a7 * v + a6) * v + a5) * v + a4) * v + a3) * v + a2) * v + a1) * v + a0) - del;
        else
          px = fk * std::log(1.0 + v) - difmuk - del;
        py = inv_sqrt_2pi / std::sqrt(fk);
      }
      double x = (0.5 - difmuk) / P.s;
      x *= x;
      const double fx = -0.5 * x;
      const double fy = P.omega * (((P.c3 * x + P.c2) * x + P.c1) * x + P.c0);
      if (hat) return P.c * std::fabs(u) <= py * std::exp(px + E) - fy * std::exp(fx + E);
      return fy - u * fy <= py * std::exp(px - fx);
    };

    if (g >= 0.0 && accept(false)) return pois;
    for (;;) {
      E = exp_rand();
      u = 2.0 * unif_rand() - 1.0;
      const double t = 1.8 + (u >= 0.0 ? std::fabs(E) : -std::fabs(E));
      if (t > -0.6744) {
        pois = std::floor(mu + P.s * t);
        fk = pois;
        difmuk = mu - fk;
        if (accept(true)) break;
      }
    }
    return pois;
  }

  double rnbinom_mu(double size, double mu) {
    return mu == 0.0 ? 0.0 : rpois(rgamma(size, mu / size));
  }

  // Wichura's AS241, lower tail, non-log.
  static double qnorm(double p) {
    const double q = p - 0.5;
    double val;
    if (std::fabs(q) <= 0.425) {
      const double r = 0.180625 - q * q;
      return q *
             (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                  45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
               133.14166789178437745) * r + 3.387132872796366608) /
             (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                  21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
               42.313330701600911252) * r + 1.0);
    }
    double r = q < 0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
    } else {
      r -= 5.0;
      val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
  }

 private:
  static constexpr double i2_32m1 = 2.328306437080797e-10;

  double genrand() {
    constexpr int n = 624, m = 397;
    constexpr std::uint32_t matrix_a = 0x9908b0dfu, upper = 0x80000000u, lower = 0x7fffffffu;
    static constexpr std::uint32_t mag01[2] = {0x0u, matrix_a};
    std::uint32_t* mt = dummy_.data() + 1;
    int mti = static_cast<int>(dummy_[0]);
    std::uint32_t y;
    if (mti >= n) {
      int kk;
      for (kk = 0; kk < n - m; ++kk) {
        y = (mt[kk] & upper) | (mt[kk + 1] & lower);
        mt[kk] = mt[kk + m] ^ (y >> 1) ^ mag01[y & 1u];
      }
      for (; kk < n - 1; ++kk) {
        y = (mt[kk] & upper) | (mt[kk + 1] & lower);
        mt[kk] = mt[kk + (m - n)] ^ (y >> 1) ^ mag01[y & 1u];
      }
      y = (mt[n - 1] & upper) | (mt[0] & lower);
      mt[n - 1] = mt[m - 1] ^ (y >> 1) ^ mag01[y & 1u];
      mti = 0;
    }
    y = mt[mti++];
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c5680u;
    y ^= (y << 15) & 0xefc60000u;
    y ^= y >> 18;
    dummy_[0] = static_cast<std::uint32_t>(mti);
    return static_cast<double>(y) * 2.3283064365386963e-10;
  }

  std::array<std::uint32_t, 625> dummy_{};

  struct GammaState {
    double aa = 0, aaa = 0, s = 0, s2 = 0, d = 0, q0 = 0, b = 0, si = 0, c = 0;
  } g_;

  struct PoisState {
    int l = 0, m = 0;
    double b1 = 0, b2 = 0, c = 0, c0 = 0, c1 = 0, c2 = 0, c3 = 0;
    std::array<double, 36> pp{};
    double muprev = 0, muprev2 = 0, s = 0, d = 0, omega = 0, big_l = 0, p0 = 0, p = 0, q = 0;
  } p_;
};

}  // namespace rcompat
