#include "ssm/mcmc.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace ssm {

std::string_view to_string(McmcType t) {
  switch (t) {
    case McmcType::full: return "full";
    case McmcType::approx: return "approx";
    case McmcType::da: return "da";
    case McmcType::pm: return "pm";
  }
  return "?";
}

McmcType mcmc_type_from_string(std::string_view s) {
  if (s == "full") return McmcType::full;
  if (s == "approx") return McmcType::approx;
  if (s == "da") return McmcType::da;
  if (s == "pm") return McmcType::pm;
  throw ModelError("unknown mcmc type '" + std::string(s) + "'");
}

PfMethod pf_method_from_string(std::string_view s) {
  if (s == "bsf") return PfMethod::bsf;
  if (s == "psi" || s == "psi_apf") return PfMethod::psi;
  throw ModelError("unknown particle filter '" + std::string(s) + "'");
}

void McmcConfig::validate() const {
  if (iter == 0) throw ModelError("iter must be positive");
  if (burnin >= iter) throw ModelError("burnin must be smaller than iter");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw ModelError("target_accept must lie in (0, 1)");
  if (!(gamma > 0.5 && gamma <= 1.0)) throw ModelError("gamma must lie in (0.5, 1]");
  if ((type == McmcType::pm || type == McmcType::da) && particles < 2)
    throw ModelError("particles must be at least 2");
}

namespace {

// Current or proposed point with everything the acceptance step needs.
struct Point {
  Vec theta;
  double log_prior = -kInf;
  double loglik = -kInf;
  double approx_loglik = kNaN;
  Mat states;
};

bool finite(double x) { return std::isfinite(x); }

class Sampler {
 public:
  Sampler(const PosteriorTarget& target, const McmcConfig& cfg)
      : target_(target), cfg_(cfg), rng_(make_stream(cfg.seed, 0)) {}

  McmcOutput run();

 private:
  // Fills loglik (and approx_loglik for da). Returns false if the point
  // cannot be evaluated.
  bool evaluate_full(Point& p);
  bool evaluate_particle(Point& p);
  void store(const Point& p, McmcOutput& out);

  const PosteriorTarget& target_;
  const McmcConfig& cfg_;
  Rng rng_;
};

bool Sampler::evaluate_full(Point& p) {
  try {
    switch (cfg_.type) {
      case McmcType::full:
        p.loglik = target_.exact_loglik(p.theta);
        break;
      case McmcType::approx:
        p.loglik = target_.approx_loglik(p.theta);
        p.approx_loglik = p.loglik;
        break;
      case McmcType::da:
        p.approx_loglik = target_.approx_loglik(p.theta);
        if (!finite(p.approx_loglik)) return false;
        return evaluate_particle(p);
      case McmcType::pm:
        return evaluate_particle(p);
    }
  } catch (const std::exception&) {
    return false;
  }
  return finite(p.loglik);
}

bool Sampler::evaluate_particle(Point& p) {
  try {
    ParticleEstimate e =
        target_.estimate(p.theta, cfg_.particles, cfg_.method, rng_, cfg_.store_states);
    p.loglik = e.loglik;
    p.states = std::move(e.states);
  } catch (const std::exception&) {
    return false;
  }
  return finite(p.loglik);
}

void Sampler::store(const Point& p, McmcOutput& out) {
  const auto m = static_cast<Eigen::Index>(out.counts.size());
  out.counts.push_back(1);
  out.theta.conservativeResize(m + 1, Eigen::NoChange);
  out.theta.row(m) = p.theta.transpose();
  out.log_prior.conservativeResize(m + 1);
  out.log_prior(m) = p.log_prior;
  out.loglik.conservativeResize(m + 1);
  out.loglik(m) = p.loglik;
  out.approx_loglik.conservativeResize(m + 1);
  out.approx_loglik(m) = p.approx_loglik;
  if (!cfg_.store_states) return;
  switch (cfg_.type) {
    case McmcType::full:
      out.states.push_back(target_.sample_states(p.theta, rng_, false));
      break;
    case McmcType::approx:
      break;  // drawn by post_correct
    case McmcType::da:
    case McmcType::pm:
      out.states.push_back(p.states);
      break;
  }
}

McmcOutput Sampler::run() {
  cfg_.validate();
  const McmcType type = cfg_.type;
  if (type == McmcType::full && !target_.supports_exact())
    throw ModelError("mcmc type 'full' needs an exact likelihood; use approx, da or pm");
  if ((type == McmcType::approx || type == McmcType::da) && !target_.supports_approx())
    throw ModelError("mcmc type '" + std::string(to_string(type)) +
                     "' needs a gaussian approximation of the model");
  if ((type == McmcType::pm || type == McmcType::da) && !target_.supports(cfg_.method))
    throw ModelError("particle filter '" + std::string(to_string(cfg_.method)) +
                     "' is not available for this model");

  const auto q = static_cast<Eigen::Index>(target_.n_params());
  McmcOutput out;
  out.names = target_.names();
  out.theta = Mat(0, q);
  out.type = type;
  out.method = cfg_.method;
  out.particles = (type == McmcType::pm || type == McmcType::da) ? cfg_.particles : 0;
  out.iter = cfg_.iter;
  out.burnin = cfg_.burnin;
  out.seed = cfg_.seed;

  Point cur;
  cur.theta = target_.initial_theta();
  cur.log_prior = target_.log_prior(cur.theta);
  if (!finite(cur.log_prior) || !evaluate_full(cur))
    throw NumericalError("posterior density is not finite at the initial value");

  Mat S = 0.1 * Mat::Identity(q, q);
  std::size_t burnin_accepted = 0;
  bool stored = false;
  for (std::size_t i = 1; i <= cfg_.iter; ++i) {
    const Vec u = std_normal_vec(static_cast<std::size_t>(q), rng_);
    Point prop;
    prop.theta = cur.theta + S * u;
    prop.log_prior = target_.log_prior(prop.theta);

    double alpha = 0.0;
    bool accept = false;
    bool stage1 = false;
    if (finite(prop.log_prior)) {
      if (type == McmcType::da) {
        bool ok = true;
        try {
          prop.approx_loglik = target_.approx_loglik(prop.theta);
        } catch (const std::exception&) {
          ok = false;
        }
        ok = ok && finite(prop.approx_loglik);
        if (ok) {
          const double log_a1 = prop.log_prior + prop.approx_loglik - cur.log_prior -
                                cur.approx_loglik;
          alpha = std::min(1.0, std::exp(log_a1));
          if (std::log(uniform01(rng_)) < log_a1) {
            stage1 = true;
            if (evaluate_particle(prop)) {
              const double log_a2 = (prop.loglik - prop.approx_loglik) -
                                    (cur.loglik - cur.approx_loglik);
              accept = std::log(uniform01(rng_)) < log_a2;
            }
          }
        }
      } else if (evaluate_full(prop)) {
        const double log_a = prop.log_prior + prop.loglik - cur.log_prior - cur.loglik;
        alpha = std::min(1.0, std::exp(log_a));
        accept = std::log(uniform01(rng_)) < log_a;
      }
    }

    if (i <= cfg_.burnin) {
      const double step =
          std::min(1.0, static_cast<double>(q) * std::pow(static_cast<double>(i), -cfg_.gamma));
      S = ram_step(S, u, alpha, cfg_.target_accept, step);
    }
    if (accept) {
      cur = std::move(prop);
      if (i <= cfg_.burnin) ++burnin_accepted;
    }
    if (i > cfg_.burnin) {
      if (stage1) ++out.stage1_accepted;
      if (accept) ++out.accepted;
      if (accept || !stored) {
        store(cur, out);
        stored = true;
      } else {
        ++out.counts.back();
      }
    }
  }
  if (cfg_.burnin > 0 && burnin_accepted == 0)
    out.warnings.push_back("no proposals were accepted during burn-in");
  out.acceptance_rate = static_cast<double>(out.accepted) /
                        static_cast<double>(cfg_.iter - cfg_.burnin);
  out.weights = Vec::Ones(static_cast<Eigen::Index>(out.counts.size()));
  out.S = S;
  return out;
}

// Runs f(j) for j in [0, n) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t j = 0; j < n; ++j) f(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t j; (j = next.fetch_add(1)) < n;) {
        try {
          f(j);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

McmcOutput run_mcmc(const PosteriorTarget& target, const McmcConfig& config) {
  return Sampler(target, config).run();
}

McmcOutput post_correct(const McmcOutput& output, const PosteriorTarget& target,
                        std::size_t particles, std::uint64_t seed, unsigned threads,
                        PfMethod method) {
  if (output.type != McmcType::approx)
    throw ModelError("post-correction needs the output of an approx-type run");
  if (particles < 1) throw ModelError("particles must be positive");
  if (!target.supports(method))
    throw ModelError("particle filter '" + std::string(to_string(method)) +
                     "' is not available for this model");
  const std::size_t m = output.n_unique();
  McmcOutput out = output;
  out.weights = Vec(static_cast<Eigen::Index>(m));
  out.states.assign(m, Mat());
  out.particles = particles;
  out.method = method;
  std::vector<std::string> failures(m);

  parallel_for(m, threads, [&](std::size_t j) {
    Rng rng = make_stream(seed, j);
    const auto jj = static_cast<Eigen::Index>(j);
    const Vec theta = output.theta.row(jj).transpose();
    try {
      ParticleEstimate e = target.estimate(theta, particles, method, rng, true);
      const double w = std::exp(e.loglik - output.approx_loglik(jj));
      out.weights(jj) = std::isfinite(w) ? w : 0.0;
      if (!std::isfinite(w)) failures[j] = "non-finite weight";
      out.states[j] = std::move(e.states);
    } catch (const NumericalError& err) {
      out.weights(jj) = 0.0;
      failures[j] = err.what();
    }
  });
  for (std::size_t j = 0; j < m; ++j)
    if (!failures[j].empty())
      out.warnings.push_back("draw " + std::to_string(j) + " got weight 0: " + failures[j]);
  out.weighted = true;
  return out;
}

SuggestN suggest_N(const PosteriorTarget& target, const McmcOutput& output,
                   std::uint64_t seed, unsigned threads, std::vector<std::size_t> ladder,
                   std::size_t replications, PfMethod method) {
  if (output.n_unique() == 0) throw ModelError("suggest_N needs a non-empty chain");
  if (ladder.empty() || replications < 2)
    throw ModelError("suggest_N needs a ladder and at least two replications");
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < output.theta.rows(); ++j)
    if (output.log_prior(j) + output.loglik(j) > output.log_prior(best) + output.loglik(best))
      best = j;
  SuggestN out;
  out.theta_map = output.theta.row(best).transpose();
  bool found = false;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const std::size_t N = ladder[k];
    std::vector<double> ll(replications);
    parallel_for(replications, threads, [&](std::size_t r) {
      Rng rng = make_stream(seed, k * replications + r);
      ll[r] = target.estimate(out.theta_map, N, method, rng, false).loglik;
    });
    double mean = 0.0;
    for (double v : ll) mean += v;
    mean /= static_cast<double>(replications);
    double ss = 0.0;
    for (double v : ll) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(replications - 1));
    out.sd_table.emplace_back(N, sd);
    if (sd < 1.0 && !found) {
      out.N = N;
      found = true;
    }
  }
  if (!found) {
    out.N = ladder.back();
    out.warnings.push_back("no ladder value reached a standard deviation below one");
  }
  return out;
}

}  // namespace ssm
