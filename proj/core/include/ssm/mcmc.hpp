#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssm/target.hpp"

namespace ssm {

enum class McmcType { full, approx, da, pm };

std::string_view to_string(McmcType t);
McmcType mcmc_type_from_string(std::string_view s);
PfMethod pf_method_from_string(std::string_view s);

struct McmcConfig {
  std::size_t iter = 10000;
  std::size_t burnin = 5000;
  McmcType type = McmcType::full;
  std::size_t particles = 10;
  PfMethod method = PfMethod::psi;
  double target_accept = 0.234;
  double gamma = 2.0 / 3.0;
  std::uint64_t seed = 1;
  bool store_states = true;

  /// Throws ModelError on inconsistent settings.
  void validate() const;
};

/// Jump chain: row j of theta was visited counts[j] consecutive times.
struct McmcOutput {
  std::vector<std::string> names;
  Mat theta;                        // m x q unique draws
  std::vector<std::size_t> counts;  // m
  Vec weights;                      // m importance weights, 1 unless post-corrected
  Vec log_prior;                    // m
  Vec loglik;                       // m, value used in the acceptance ratio
  Vec approx_loglik;                // m, NaN when not computed
  std::vector<Mat> states;          // m trajectories (n x d) or empty

  McmcType type = McmcType::full;
  PfMethod method = PfMethod::psi;
  std::size_t particles = 0;
  std::size_t iter = 0;
  std::size_t burnin = 0;
  std::uint64_t seed = 0;
  double acceptance_rate = 0.0;
  std::size_t accepted = 0;         // after burn-in
  std::size_t stage1_accepted = 0;  // delayed acceptance, after burn-in
  Mat S;                            // final proposal factor
  bool weighted = false;
  std::vector<std::string> warnings;

  std::size_t n_unique() const { return counts.size(); }
};

/// Robust adaptive Metropolis update of the lower triangular factor S:
///   S' S'^T = S (I + step (alpha - target) u u^T / |u|^2) S^T.
/// Throws NumericalError when the downdate loses positive definiteness.
Mat ram_step(const Mat& S, const Vec& u, double alpha, double target, double step);

/// Random walk Metropolis with RAM adaptation during burn-in.
McmcOutput run_mcmc(const PosteriorTarget& target, const McmcConfig& config);

/// Importance-sampling correction of an approximate chain. Draw j uses the
/// stream make_stream(seed, j) so the result does not depend on `threads`.
McmcOutput post_correct(const McmcOutput& output, const PosteriorTarget& target,
                        std::size_t particles, std::uint64_t seed, unsigned threads = 1,
                        PfMethod method = PfMethod::psi);

struct SuggestN {
  std::size_t N = 0;
  std::vector<std::pair<std::size_t, double>> sd_table;
  Vec theta_map;
  std::vector<std::string> warnings;
};

/// Smallest N on the ladder for which the standard deviation of the log
/// likelihood estimate at the approximate MAP is below one.
SuggestN suggest_N(const PosteriorTarget& target, const McmcOutput& output,
                   std::uint64_t seed, unsigned threads = 1,
                   std::vector<std::size_t> ladder = {2, 4, 8, 16, 32, 64, 128},
                   std::size_t replications = 100, PfMethod method = PfMethod::psi);

}  // namespace ssm
