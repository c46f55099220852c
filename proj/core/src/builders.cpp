#include "ssm/builders.hpp"

#include <cmath>

namespace ssm {

namespace {

double value_of(const PriorOrValue& p) {
  return std::holds_alternative<double>(p) ? std::get<double>(p)
                                           : std::get<Prior>(p).init;
}

// Collects estimated parameters; add() returns the theta slot or -1 if fixed.
struct ParamCollector {
  std::vector<Prior> priors;
  std::vector<std::string> names;

  int add(const std::string& name, const PriorOrValue& p) {
    if (!std::holds_alternative<Prior>(p)) return -1;
    priors.push_back(std::get<Prior>(p));
    names.push_back(name);
    return static_cast<int>(priors.size()) - 1;
  }
};

double observed_variance(const Mat& y) {
  double sum = 0.0, sum2 = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double v = y.data()[i];
    if (std::isnan(v)) continue;
    sum += v;
    sum2 += v * v;
    ++n;
  }
  if (n < 2) return 1.0;
  const double mean = sum / n;
  return (sum2 - n * mean * mean) / (n - 1);
}

struct TrendSlots {
  int level = -1;
  int slope = -1;
  std::vector<int> beta;
  Vec beta_value;  // current values; estimated entries overwritten from theta
  Mat xreg;

  void apply(const Vec& theta, LinearModel& m) const {
    if (level >= 0) m.R.slice(0)(0, 0) = theta(level);
    if (slope >= 0) m.R.slice(0)(1, 1) = theta(slope);
    if (xreg.cols() == 0) return;
    Vec b = beta_value;
    bool changed = false;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const int idx = beta[static_cast<std::size_t>(i)];
      if (idx >= 0) {
        b(i) = theta(idx);
        changed = true;
      }
    }
    if (!changed) return;
    const Vec xb = xreg * b;
    for (Eigen::Index t = 0; t < xb.size(); ++t)
      m.d.slice(static_cast<std::size_t>(t))(0) = xb(t);
  }
};

LinearModel trend_model(const StructuralSpec& spec, double default_p1,
                        TrendSlots& slots) {
  if (spec.y.cols() != 1) throw ModelError("structural models take a single series");
  const Eigen::Index n = spec.y.rows();
  const bool has_slope = spec.sd_slope.has_value();
  const Eigen::Index d = has_slope ? 2 : 1;

  LinearModel m;
  m.y = spec.y;
  Mat Z = Mat::Zero(1, d);
  Z(0, 0) = 1.0;
  m.Z = Z;
  Mat T = Mat::Identity(d, d);
  if (has_slope) T(0, 1) = 1.0;
  m.T = T;
  Mat R = Mat::Zero(d, d);
  R(0, 0) = value_of(spec.sd_level);
  if (has_slope) R(1, 1) = value_of(*spec.sd_slope);
  m.R = R;
  m.c = Vec(Vec::Zero(d));
  m.H = Mat(Mat::Zero(1, 1));
  m.a1 = spec.a1.value_or(Vec::Zero(d));
  m.P1 = spec.P1.value_or(Mat(default_p1 * Mat::Identity(d, d)));

  if (spec.xreg.size() != 0 && spec.xreg.rows() != n)
    throw ModelError("xreg must have one row per time point");
  if (static_cast<Eigen::Index>(spec.beta.size()) != spec.xreg.cols())
    throw ModelError("need one beta per xreg column");
  slots.xreg = spec.xreg;
  slots.beta_value = Vec(spec.xreg.cols());
  for (Eigen::Index i = 0; i < slots.beta_value.size(); ++i)
    slots.beta_value(i) = value_of(spec.beta[static_cast<std::size_t>(i)]);
  if (spec.xreg.cols() > 0) {
    if (!spec.xreg.allFinite()) throw ModelError("xreg has non-finite entries");
    const Vec xb = spec.xreg * slots.beta_value;
    std::vector<Vec> slices(static_cast<std::size_t>(n));
    for (Eigen::Index t = 0; t < n; ++t)
      slices[static_cast<std::size_t>(t)] = Vec::Constant(1, xb(t));
    m.d = Slices<Vec>(std::move(slices));
  } else {
    m.d = Vec(Vec::Zero(1));
  }
  return m;
}

void add_betas(const StructuralSpec& spec, ParamCollector& pc, TrendSlots& slots) {
  for (std::size_t i = 0; i < spec.beta.size(); ++i)
    slots.beta.push_back(pc.add(spec.xreg.cols() == 1 ? "beta" : "beta_" + std::to_string(i + 1),
                                spec.beta[i]));
}

}  // namespace

BayesianModel bsm_lg(const StructuralSpec& spec, const PriorOrValue& sd_y) {
  TrendSlots slots;
  LinearModel m = trend_model(spec, 1e3 * std::max(1.0, observed_variance(spec.y)), slots);
  m.H = Mat(Mat::Constant(1, 1, value_of(sd_y)));
  m.obs = {Observation{Family::gaussian, std::nullopt}};

  ParamCollector pc;
  const int sd_y_slot = pc.add("sd_y", sd_y);
  slots.level = pc.add("sd_level", spec.sd_level);
  if (spec.sd_slope) slots.slope = pc.add("sd_slope", *spec.sd_slope);
  add_betas(spec, pc, slots);

  ParamMap map;
  map.names = pc.names;
  map.apply = [slots, sd_y_slot](const Vec& theta, LinearModel& model) {
    if (sd_y_slot >= 0) model.H.slice(0)(0, 0) = theta(sd_y_slot);
    slots.apply(theta, model);
  };
  return BayesianModel(std::move(m), std::move(pc.priors), std::move(map));
}

BayesianModel bsm_ng(const StructuralSpec& spec, Family family,
                     std::optional<PriorOrValue> phi, const Vec& u) {
  if (family == Family::gaussian || family == Family::svm)
    throw ModelError("bsm_ng takes a non-gaussian, non-svm distribution");
  const bool needs_phi = family == Family::negbin || family == Family::gamma;
  if (needs_phi && !phi)
    throw ModelError(std::string(to_string(family)) + " distribution requires phi");

  TrendSlots slots;
  LinearModel m = trend_model(spec, 100.0, slots);
  Observation o{family, std::nullopt};
  if (needs_phi) o.phi = value_of(*phi);
  m.obs = {o};
  if (u.size() != 0) {
    if (u.size() != spec.y.rows()) throw ModelError("u must have one entry per time point");
    m.u = u;
  }

  ParamCollector pc;
  slots.level = pc.add("sd_level", spec.sd_level);
  if (spec.sd_slope) slots.slope = pc.add("sd_slope", *spec.sd_slope);
  const int phi_slot = needs_phi ? pc.add("phi", *phi) : -1;
  add_betas(spec, pc, slots);

  ParamMap map;
  map.names = pc.names;
  map.apply = [slots, phi_slot](const Vec& theta, LinearModel& model) {
    slots.apply(theta, model);
    if (phi_slot >= 0) model.obs[0].phi = theta(phi_slot);
  };
  return BayesianModel(std::move(m), std::move(pc.priors), std::move(map));
}

BayesianModel svm(const Vec& y, const PriorOrValue& mu, const PriorOrValue& rho,
                  const PriorOrValue& sd_ar) {
  const auto fill = [](LinearModel& m, double mu_v, double rho_v, double sd_v) {
    if (!(std::abs(rho_v) < 1.0)) throw ModelError("svm: rho must lie in (-1, 1)");
    m.T.slice(0)(0, 0) = rho_v;
    m.c.slice(0)(0) = mu_v * (1.0 - rho_v);
    m.R.slice(0)(0, 0) = sd_v;
    m.a1(0) = mu_v;
    m.P1(0, 0) = sd_v * sd_v / (1.0 - rho_v * rho_v);
  };
  LinearModel m;
  m.y = y;
  m.Z = Mat(Mat::Ones(1, 1));
  m.H = Mat(Mat::Zero(1, 1));
  m.T = Mat(Mat::Zero(1, 1));
  m.R = Mat(Mat::Zero(1, 1));
  m.c = Vec(Vec::Zero(1));
  m.d = Vec(Vec::Zero(1));
  m.a1 = Vec::Zero(1);
  m.P1 = Mat::Zero(1, 1);
  m.obs = {Observation{Family::svm, std::nullopt}};
  const double rho0 = value_of(rho);
  fill(m, value_of(mu), rho0, value_of(sd_ar));

  ParamCollector pc;
  const int mu_slot = pc.add("mu", mu);
  const int rho_slot = pc.add("rho", rho);
  const int sd_slot = pc.add("sd_ar", sd_ar);
  const double mu0 = value_of(mu), sd0 = value_of(sd_ar);

  ParamMap map;
  map.names = pc.names;
  map.apply = [=](const Vec& theta, LinearModel& model) {
    fill(model, mu_slot >= 0 ? theta(mu_slot) : mu0,
         rho_slot >= 0 ? theta(rho_slot) : rho0, sd_slot >= 0 ? theta(sd_slot) : sd0);
  };
  return BayesianModel(std::move(m), std::move(pc.priors), std::move(map));
}

}  // namespace ssm
