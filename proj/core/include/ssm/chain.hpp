#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssm/mcmc.hpp"

namespace ssm {

struct JumpChain {
  Mat values;                       // m x q unique consecutive rows
  std::vector<std::size_t> counts;  // m
};

/// Repeat row j of `values` counts[j] times.
Mat expand_sample(const Mat& values, const std::vector<std::size_t>& counts);

/// Merge runs of identical consecutive rows.
JumpChain compress_chain(const Mat& chain);

enum class Variable { theta, states };

struct SummaryRow {
  std::string variable;
  std::optional<std::size_t> time;  // 1-based, states only
  double mean = 0.0;
  double sd = 0.0;
  double mcse = 0.0;
};

/// Posterior mean, SD and Monte Carlo standard error. Draw j has weight
/// counts[j] * weights[j]. Unweighted chains use batch means on the expanded
/// chain (batch length ceil(sqrt(n))); weighted chains use the delta method
/// for a ratio estimator over blocks of ceil(sqrt(m)) jump-chain draws.
std::vector<SummaryRow> summarize(const McmcOutput& output, Variable variable);

/// Same estimators on a single quantity with one value per jump-chain draw.
SummaryRow summarize_values(const Vec& values, const std::vector<std::size_t>& counts,
                            const Vec& weights, bool weighted);

}  // namespace ssm
