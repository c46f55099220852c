#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ssm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Invalid model description: dimensions, invariants, priors, configuration.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure during a recursion. Carries the offending time index
/// when one is known.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          std::optional<std::size_t> time = std::nullopt)
      : std::runtime_error(time ? what + " (time index " +
                                      std::to_string(*time) + ")"
                                : what),
        time_(time) {}

  std::optional<std::size_t> time() const { return time_; }

 private:
  std::optional<std::size_t> time_;
};

/// Component that is either constant or has one slice per time point.
/// Slice t is addressed as min(t, slices - 1).
template <class T>
class Slices {
 public:
  Slices() = default;
  Slices(T constant) : data_{std::move(constant)} {}  // NOLINT
  explicit Slices(std::vector<T> slices) : data_(std::move(slices)) {}

  const T& operator[](std::size_t t) const {
    return data_[std::min(t, data_.size() - 1)];
  }
  T& slice(std::size_t k) { return data_.at(k); }
  const T& slice(std::size_t k) const { return data_.at(k); }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool time_varying() const { return data_.size() > 1; }

  /// Expand to exactly n slices so individual time points can be edited.
  void expand(std::size_t n) {
    if (data_.size() == 1 && n > 1) data_.assign(n, data_.front());
  }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Slices& a, const Slices& b) {
    if (a.data_.size() != b.data_.size()) return false;
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
      const auto& x = a.data_[i];
      const auto& y = b.data_[i];
      if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double u = x.data()[j], v = y.data()[j];
        if (!(u == v || (std::isnan(u) && std::isnan(v)))) return false;
      }
    }
    return true;
  }

 private:
  std::vector<T> data_;
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream keyed by (seed, stream). Used wherever work is split
/// across tasks so results do not depend on the number of workers.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

inline double std_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline Vec std_normal_vec(std::size_t n, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vec out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = z(rng);
  return out;
}

inline void symmetrize(Mat& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace ssm
