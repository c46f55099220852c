#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"
#include "ssm/chain.hpp"
#include "ssm/kalman.hpp"
#include "ssm/mcmc.hpp"

using namespace ssm;

namespace {

// Zero-mean gaussian posterior with covariance Sigma under a flat prior.
class GaussTarget : public PosteriorTarget {
 public:
  explicit GaussTarget(Mat Sigma) : prec_(Sigma.inverse()), init_(Vec::Zero(Sigma.rows())) {}

  std::vector<std::string> names() const override {
    std::vector<std::string> n;
    for (Eigen::Index i = 0; i < init_.size(); ++i) n.push_back("x" + std::to_string(i));
    return n;
  }
  Vec initial_theta() const override { return init_; }
  double log_prior(const Vec&) const override { return 0.0; }
  bool supports_exact() const override { return true; }
  bool supports(PfMethod) const override { return false; }
  double exact_loglik(const Vec& th) const override { return -0.5 * th.dot(prec_ * th); }
  ParticleEstimate estimate(const Vec&, std::size_t, PfMethod, Rng&, bool) const override {
    throw ModelError("no particle filter");
  }

 private:
  Mat prec_;
  Vec init_;
};

// Standard normal restricted to theta < 1 by throwing above it.
class ThrowingTarget : public GaussTarget {
 public:
  ThrowingTarget() : GaussTarget(Mat::Identity(1, 1)) {}
  double exact_loglik(const Vec& th) const override {
    if (th(0) > 1.0) throw NumericalError("out of range");
    return GaussTarget::exact_loglik(th);
  }
};

BayesianModel local_level_model(std::uint64_t seed) {
  LinearModel sim = fixtures::local_level(Vec::Zero(40), 1.0, 0.5);
  Rng rng(seed);
  StructuralSpec spec;
  spec.y = simulate(sim, rng).y;
  spec.sd_level = 0.5;
  spec.a1 = Vec::Zero(1);
  spec.P1 = Mat::Constant(1, 1, 10.0);
  return bsm_lg(spec, Prior::halfnormal(1.0, 2.0));
}

BayesianModel poisson_model(std::uint64_t seed) {
  return fixtures::bivariate_poisson(fixtures::bivariate_poisson_data(seed, 30));
}

}  // namespace

TEST(Ram, ScalarClosedForm) {
  Mat S = Mat::Constant(1, 1, 0.7);
  Vec u = Vec::Constant(1, -1.3);
  for (double alpha : {0.0, 0.234, 0.9}) {
    const Mat S2 = ram_step(S, u, alpha, 0.234, 0.5);
    EXPECT_NEAR(S2(0, 0), 0.7 * std::sqrt(1 + 0.5 * (alpha - 0.234)), 1e-14);
  }
}

TEST(Ram, UpdateMatchesDenseFormula) {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat A = fixtures::random_matrix(rng, 3, 3, 1.0);
    const Mat S = Mat((A * A.transpose() + Mat::Identity(3, 3)).llt().matrixL());
    const Vec u = fixtures::random_matrix(rng, 3, 1, 1.0);
    const double alpha = uniform01(rng);
    const double step = uniform01(rng);
    const Mat S2 = ram_step(S, u, alpha, 0.234, step);
    const Mat target =
        S * (Mat::Identity(3, 3) + step * (alpha - 0.234) * u * u.transpose() / u.squaredNorm()) *
        S.transpose();
    EXPECT_LT((S2 * S2.transpose() - target).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_TRUE(S2.isLowerTriangular(1e-15));
    EXPECT_GT(S2.diagonal().minCoeff(), 0.0);
  }
}

TEST(Mcmc, JumpChainMassAndFrozenAdaptation) {
  const GaussTarget target(Mat::Identity(2, 2));
  McmcConfig cfg;
  cfg.iter = 3000;
  cfg.burnin = 1000;
  cfg.store_states = false;
  cfg.seed = 5;
  const McmcOutput a = run_mcmc(target, cfg);
  EXPECT_EQ(std::accumulate(a.counts.begin(), a.counts.end(), std::size_t{0}), 2000u);
  EXPECT_GE(a.accepted + 1, a.n_unique());
  EXPECT_LE(a.accepted, a.n_unique());
  cfg.iter = 1010;
  const McmcOutput b = run_mcmc(target, cfg);
  EXPECT_EQ(a.S, b.S);
  EXPECT_EQ(a.theta.row(0), b.theta.row(0));
}

TEST(Mcmc, RamReachesTargetAcceptance) {
  Mat Sigma(3, 3);
  Sigma << 4.0, 1.0, 0.5, 1.0, 1.0, 0.2, 0.5, 0.2, 0.25;
  const GaussTarget target(Sigma);
  McmcConfig cfg;
  cfg.iter = 40000;
  cfg.burnin = 20000;
  cfg.store_states = false;
  const McmcOutput out = run_mcmc(target, cfg);
  EXPECT_NEAR(out.acceptance_rate, 0.234, 0.04);
  const Mat cov = expand_sample(out.theta, out.counts);
  const Mat centered = cov.rowwise() - cov.colwise().mean();
  const Mat emp = centered.transpose() * centered / static_cast<double>(cov.rows() - 1);
  EXPECT_LT(((emp - Sigma).array() / Sigma.diagonal().maxCoeff()).abs().maxCoeff(), 0.15);
}

TEST(Mcmc, EvaluationErrorsAreRejections) {
  const ThrowingTarget target;
  McmcConfig cfg;
  cfg.iter = 2000;
  cfg.burnin = 500;
  cfg.store_states = false;
  const McmcOutput out = run_mcmc(target, cfg);
  EXPECT_LE(out.theta.maxCoeff(), 1.0);
  EXPECT_GT(out.accepted, 0u);
}

TEST(Mcmc, FullPosteriorMeanMatchesGrid) {
  const BayesianModel bm = local_level_model(11);
  const LinearTarget target(bm);
  // grid posterior of sd_y
  const int G = 4000;
  double z = 0.0, m1 = 0.0, lmax = -kInf;
  std::vector<double> lp(G);
  for (int g = 0; g < G; ++g) {
    Vec th(1);
    th << 4.0 * (g + 0.5) / G;
    lp[static_cast<std::size_t>(g)] = bm.log_prior(th) + kalman_filter(bm.update(th)).loglik;
    lmax = std::max(lmax, lp[static_cast<std::size_t>(g)]);
  }
  for (int g = 0; g < G; ++g) {
    const double w = std::exp(lp[static_cast<std::size_t>(g)] - lmax);
    z += w;
    m1 += w * 4.0 * (g + 0.5) / G;
  }
  const double oracle_mean = m1 / z;

  McmcConfig cfg;
  cfg.iter = 30000;
  cfg.burnin = 5000;
  cfg.seed = 2;
  cfg.store_states = false;
  const McmcOutput out = run_mcmc(target, cfg);
  const auto rows = summarize(out, Variable::theta);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mean, oracle_mean, 5 * rows[0].mcse);
}

TEST(Mcmc, FullAndPseudoMarginalAgree) {
  const BayesianModel bm = local_level_model(12);
  const LinearTarget target(bm);
  McmcConfig cfg;
  cfg.iter = 20000;
  cfg.burnin = 5000;
  cfg.seed = 3;
  cfg.store_states = false;
  const auto full = summarize(run_mcmc(target, cfg), Variable::theta)[0];
  cfg.type = McmcType::pm;
  cfg.method = PfMethod::bsf;
  cfg.particles = 50;
  const auto pm = summarize(run_mcmc(target, cfg), Variable::theta)[0];
  EXPECT_NEAR(full.mean, pm.mean, 5 * std::hypot(full.mcse, pm.mcse));
}

TEST(Mcmc, DelayedAcceptanceIsSubsetOfStageOne) {
  const LinearTarget target(poisson_model(2));
  McmcConfig cfg;
  cfg.iter = 1500;
  cfg.burnin = 500;
  cfg.type = McmcType::da;
  cfg.method = PfMethod::bsf;
  cfg.particles = 10;
  const McmcOutput out = run_mcmc(target, cfg);
  EXPECT_LE(out.accepted, out.stage1_accepted);
  EXPECT_EQ(out.states.size(), out.n_unique());
  EXPECT_TRUE(out.approx_loglik.allFinite());

  // psi-APF is exact on a gaussian model, so stage two never rejects.
  const LinearTarget gauss(local_level_model(3));
  cfg.method = PfMethod::psi;
  const McmcOutput g = run_mcmc(gauss, cfg);
  EXPECT_EQ(g.accepted, g.stage1_accepted);
}

TEST(PostCorrect, GaussianWeightsAreOne) {
  const LinearTarget target(local_level_model(4));
  McmcConfig cfg;
  cfg.iter = 1000;
  cfg.burnin = 200;
  cfg.type = McmcType::approx;
  const McmcOutput out = run_mcmc(target, cfg);
  EXPECT_TRUE(out.states.empty());
  const McmcOutput pc = post_correct(out, target, 10, 7);
  ASSERT_TRUE(pc.weighted);
  EXPECT_LT((pc.weights.array() - 1.0).abs().maxCoeff(), 1e-9);
  EXPECT_EQ(pc.states.size(), pc.n_unique());
}

TEST(PostCorrect, IndependentOfThreadCount) {
  const LinearTarget target(poisson_model(5));
  McmcConfig cfg;
  cfg.iter = 600;
  cfg.burnin = 200;
  cfg.type = McmcType::approx;
  const McmcOutput out = run_mcmc(target, cfg);
  const McmcOutput a = post_correct(out, target, 10, 99, 1);
  const McmcOutput b = post_correct(out, target, 10, 99, 8);
  EXPECT_EQ(a.weights, b.weights);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t j = 0; j < a.states.size(); ++j) EXPECT_EQ(a.states[j], b.states[j]);
  EXPECT_GT(a.weights.minCoeff(), 0.0);
}

TEST(PostCorrect, RejectsNonApproxChains) {
  const GaussTarget target(Mat::Identity(1, 1));
  McmcConfig cfg;
  cfg.iter = 100;
  cfg.burnin = 10;
  cfg.store_states = false;
  EXPECT_THROW(post_correct(run_mcmc(target, cfg), target, 10, 1), ModelError);
}

TEST(SuggestN, GaussianModelNeedsTwoParticles) {
  const LinearTarget target(local_level_model(6));
  McmcConfig cfg;
  cfg.iter = 500;
  cfg.burnin = 100;
  cfg.type = McmcType::approx;
  const McmcOutput out = run_mcmc(target, cfg);
  const SuggestN s = suggest_N(target, out, 1, 1, {2, 4, 8}, 20);
  EXPECT_EQ(s.N, 2u);
  EXPECT_EQ(s.sd_table.size(), 3u);
  for (const auto& [N, sd] : s.sd_table) EXPECT_LT(sd, 1e-8);
}

TEST(SuggestN, SdTableDecreases) {
  const LinearTarget target(poisson_model(7));
  McmcConfig cfg;
  cfg.iter = 500;
  cfg.burnin = 100;
  cfg.type = McmcType::approx;
  const McmcOutput out = run_mcmc(target, cfg);
  const SuggestN s = suggest_N(target, out, 1, 1, {2, 8, 32, 128}, 50, PfMethod::bsf);
  EXPECT_GT(s.sd_table.front().second, s.sd_table.back().second);
  double best = -kInf;
  for (Eigen::Index j = 0; j < out.theta.rows(); ++j)
    best = std::max(best, out.log_prior(j) + out.loglik(j));
  const double at_map = target.log_prior(s.theta_map) + target.approx_loglik(s.theta_map);
  EXPECT_NEAR(at_map, best, 1e-10);
}

TEST(McmcConfig, Validation) {
  McmcConfig cfg;
  cfg.burnin = cfg.iter;
  EXPECT_THROW(cfg.validate(), ModelError);
  cfg = McmcConfig{};
  cfg.particles = 1;
  cfg.type = McmcType::pm;
  EXPECT_THROW(cfg.validate(), ModelError);
  EXPECT_EQ(mcmc_type_from_string("da"), McmcType::da);
  EXPECT_EQ(pf_method_from_string("psi_apf"), PfMethod::psi);
  EXPECT_THROW(mcmc_type_from_string("gibbs"), ModelError);
}
