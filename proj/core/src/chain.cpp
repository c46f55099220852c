#include "ssm/chain.hpp"

#include <cmath>
#include <numeric>

namespace ssm {

Mat expand_sample(const Mat& values, const std::vector<std::size_t>& counts) {
  if (static_cast<std::size_t>(values.rows()) != counts.size())
    throw ModelError("expand_sample: need one count per row");
  const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  Mat out(static_cast<Eigen::Index>(n), values.cols());
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) throw ModelError("expand_sample: counts must be positive");
    for (std::size_t k = 0; k < counts[j]; ++k)
      out.row(r++) = values.row(static_cast<Eigen::Index>(j));
  }
  return out;
}

JumpChain compress_chain(const Mat& chain) {
  JumpChain out;
  out.values = Mat(0, chain.cols());
  std::vector<Eigen::Index> starts;
  for (Eigen::Index i = 0; i < chain.rows(); ++i) {
    if (!starts.empty() && chain.row(i) == chain.row(starts.back())) {
      ++out.counts.back();
    } else {
      starts.push_back(i);
      out.counts.push_back(1);
    }
  }
  out.values = Mat(static_cast<Eigen::Index>(starts.size()), chain.cols());
  for (std::size_t j = 0; j < starts.size(); ++j)
    out.values.row(static_cast<Eigen::Index>(j)) = chain.row(starts[j]);
  return out;
}

namespace {

double batch_means_mcse(const Vec& values, const std::vector<std::size_t>& counts) {
  const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  const auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  const std::size_t a = b == 0 ? 0 : n / b;
  if (a < 2) return kNaN;
  std::vector<double> means(a, 0.0);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < counts.size() && pos < a * b; ++j) {
    for (std::size_t k = 0; k < counts[j] && pos < a * b; ++k, ++pos)
      means[pos / b] += values(static_cast<Eigen::Index>(j));
  }
  double grand = 0.0;
  for (auto& m : means) {
    m /= static_cast<double>(b);
    grand += m;
  }
  grand /= static_cast<double>(a);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  const double var = static_cast<double>(b) * ss / static_cast<double>(a - 1);
  return std::sqrt(var / static_cast<double>(n));
}

double ratio_mcse(const Vec& values, const Vec& w, double mean) {
  const auto m = static_cast<std::size_t>(values.size());
  const auto b = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  if (b == 0 || m < 2) return kNaN;
  double total_w = 0.0, ss = 0.0;
  for (std::size_t start = 0; start < m; start += b) {
    double A = 0.0, W = 0.0;
    for (std::size_t j = start; j < std::min(m, start + b); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      A += w(jj) * values(jj);
      W += w(jj);
    }
    ss += (A - mean * W) * (A - mean * W);
    total_w += W;
  }
  return std::sqrt(ss) / total_w;
}

}  // namespace

SummaryRow summarize_values(const Vec& values, const std::vector<std::size_t>& counts,
                            const Vec& weights, bool weighted) {
  SummaryRow row;
  const auto m = values.size();
  Vec w(m);
  for (Eigen::Index j = 0; j < m; ++j)
    w(j) = static_cast<double>(counts[static_cast<std::size_t>(j)]) * weights(j);
  const double W = w.sum();
  if (!(W > 0.0)) {
    row.mean = row.sd = row.mcse = kNaN;
    return row;
  }
  row.mean = w.dot(values) / W;
  // unweighted chains: sample sd of the expanded chain (divisor n - 1)
  const double ss = w.dot((values.array() - row.mean).square().matrix());
  row.sd = std::sqrt(weighted || W <= 1.0 ? ss / W : ss / (W - 1.0));
  row.mcse = weighted ? ratio_mcse(values, w, row.mean) : batch_means_mcse(values, counts);
  return row;
}

std::vector<SummaryRow> summarize(const McmcOutput& out, Variable variable) {
  if (out.n_unique() == 0) throw ModelError("summary of an empty chain");
  std::vector<SummaryRow> rows;
  if (variable == Variable::theta) {
    for (Eigen::Index k = 0; k < out.theta.cols(); ++k) {
      SummaryRow r = summarize_values(out.theta.col(k), out.counts, out.weights, out.weighted);
      r.variable = out.names[static_cast<std::size_t>(k)];
      rows.push_back(std::move(r));
    }
    return rows;
  }
  // Draws whose correction failed have weight 0 and may have no states.
  const Mat* shape = nullptr;
  if (out.states.size() == out.n_unique())
    for (const auto& s : out.states)
      if (s.size() != 0) {
        shape = &s;
        break;
      }
  if (!shape) throw ModelError("no stored states to summarize");
  const Eigen::Index n = shape->rows();
  const Eigen::Index d = shape->cols();
  Vec v(static_cast<Eigen::Index>(out.n_unique()));
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index t = 0; t < n; ++t) {
      for (std::size_t j = 0; j < out.n_unique(); ++j)
        v(static_cast<Eigen::Index>(j)) = out.states[j].size() != 0 ? out.states[j](t, k) : 0.0;
      SummaryRow r = summarize_values(v, out.counts, out.weights, out.weighted);
      r.variable = "state_" + std::to_string(k + 1);
      r.time = static_cast<std::size_t>(t) + 1;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace ssm
