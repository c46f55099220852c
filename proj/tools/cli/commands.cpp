#include "commands.hpp"

#include <chrono>
#include <fstream>

#include "run_io.hpp"
#include "ssm/approx.hpp"
#include "ssm/kalman.hpp"

namespace ssm::cli {

namespace fs = std::filesystem;

namespace {

std::uint64_t seed_for(const Options& opt, const RunConfig& cfg) {
  return opt.seed.value_or(cfg.seed);
}

fs::path output_dir(const Options& opt, const RunConfig& cfg) {
  if (!opt.out.empty()) return opt.out;
  if (!cfg.output_dir.empty()) {
    fs::path p = cfg.output_dir;
    return p.is_relative() ? cfg.base_dir / p : p;
  }
  throw ConfigError("output_dir", "no output directory; pass --out or set output_dir");
}

RunConfig config_for_run(const Options& opt) {
  if (!opt.config.empty()) return load_config(opt.config);
  const fs::path rj = opt.run / "run.json";
  const json doc = read_json(rj);
  if (!doc.contains("config")) throw ConfigError("--run", "run.json has no config echo; pass --config");
  return parse_config(doc, opt.run);
}

void require_run(const Options& opt) {
  if (opt.run.empty()) throw ConfigError("--run", "this command needs --run DIR");
  if (!fs::is_directory(opt.run)) throw ConfigError("--run", "'" + opt.run.string() + "' is not a directory");
}

void record_timing(const fs::path& dir, const std::string& key, double seconds) {
  const fs::path p = dir / "timing.json";
  json t = json::object();
  if (fs::exists(p)) {
    try {
      t = read_json(p);
    } catch (const std::exception&) {
      t = json::object();
    }
  }
  t[key] = seconds;
  write_json(p, t);
}

double since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json theta_json(const std::vector<std::string>& names, const Vec& theta) {
  json j = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = theta(static_cast<Eigen::Index>(i));
  return j;
}

void check_compatible(const McmcOutput& out, const BayesianModel& model) {
  if (out.names != model.names())
    throw ConfigError("--run", "run parameters do not match the model in the config");
}

// Filtering and smoothing share the model handling: exact Kalman recursions
// for gaussian models, the approximating gaussian model otherwise.
struct Pass {
  LinearModel model;
  double loglik;
  bool approximate;
};

Pass prepare_pass(const BayesianModel& bm) {
  const LinearModel m = bm.update(bm.initial_theta());
  if (m.all_gaussian()) return {m, kalman_filter(m).loglik, false};
  const GaussianApprox ga = gaussian_approximation(m);
  return {ga.model, ga.approx_loglik(), true};
}

void write_moments(const fs::path& path, const Mat& means, const std::vector<Mat>& covs) {
  const Eigen::Index n = means.rows(), d = means.cols();
  std::vector<std::string> header = {"time"};
  for (Eigen::Index k = 0; k < d; ++k) header.push_back("mean_" + std::to_string(k + 1));
  for (Eigen::Index k = 0; k < d; ++k) header.push_back("var_" + std::to_string(k + 1));
  Mat rows(n, 1 + 2 * d);
  for (Eigen::Index t = 0; t < n; ++t) {
    rows(t, 0) = static_cast<double>(t + 1);
    rows.row(t).segment(1, d) = means.row(t);
    rows.row(t).tail(d) = covs[static_cast<std::size_t>(t)].diagonal().transpose();
  }
  write_csv(path, header, rows);
}

void filter_or_smooth(const Options& opt, std::ostream& log, bool smooth) {
  const RunConfig cfg = load_config(opt.config);
  const ModelSetup setup = build_model(cfg);
  const fs::path dir = output_dir(opt, cfg);
  fs::create_directories(dir);
  const Pass pass = prepare_pass(setup.model);
  const std::string name = smooth ? "smooth" : "filter";
  if (smooth) {
    const SmootherResult s = kalman_smoother(pass.model);
    write_moments(dir / (name + ".csv"), s.alphahat, s.Vt);
  } else {
    const FilterResult f = kalman_filter(pass.model);
    write_moments(dir / (name + ".csv"), f.att, f.Ptt);
  }
  json info;
  info["loglik"] = pass.loglik;
  info["loglik_type"] = pass.approximate ? "approximate" : "exact";
  info["n_time"] = pass.model.n_time();
  info["n_states"] = pass.model.n_states();
  info["theta"] = theta_json(setup.model.names(), setup.model.initial_theta());
  write_json(dir / (name + ".json"), info);
  log << name << ": loglik " << format_number(pass.loglik) << " ("
      << info["loglik_type"].get<std::string>() << "), wrote " << (dir / (name + ".csv")).string() << "\n";
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ModelError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  return 1;
}

void cmd_simulate(const Options& opt, std::ostream& log) {
  const RunConfig cfg = load_config(opt.config);
  const ModelSetup setup = build_model(cfg, true);
  const fs::path dir = output_dir(opt, cfg);
  fs::create_directories(dir);
  Rng rng = make_stream(seed_for(opt, cfg), 0);
  const LinearModel m = setup.model.update(setup.model.initial_theta());
  const SimulatedData sim = simulate(m, rng);

  std::vector<std::string> header = setup.y_columns;
  header.insert(header.end(), setup.extra_columns.begin(), setup.extra_columns.end());
  for (std::size_t k = 0; k < m.n_states(); ++k) header.push_back("state_" + std::to_string(k + 1));
  Mat rows(sim.y.rows(), static_cast<Eigen::Index>(header.size()));
  rows << sim.y, setup.extra, sim.states;
  write_csv(dir / "simulated.csv", header, rows);
  log << "simulate: " << sim.y.rows() << " rows, wrote " << (dir / "simulated.csv").string() << "\n";
}

void cmd_filter(const Options& opt, std::ostream& log) { filter_or_smooth(opt, log, false); }
void cmd_smooth(const Options& opt, std::ostream& log) { filter_or_smooth(opt, log, true); }

void cmd_mcmc(const Options& opt, std::ostream& log) {
  RunConfig cfg = load_config(opt.config);
  const ModelSetup setup = build_model(cfg);
  const fs::path dir = output_dir(opt, cfg);
  cfg.mcmc.seed = seed_for(opt, cfg);
  const LinearTarget target(setup.model);
  const auto start = std::chrono::steady_clock::now();
  const McmcOutput out = run_mcmc(target, cfg.mcmc);
  const double secs = since(start);
  json echo = cfg.raw;
  echo["seed"] = cfg.mcmc.seed;
  save_run(dir, out, echo);
  record_timing(dir, "mcmc_seconds", secs);
  log << "mcmc (" << to_string(out.type) << "): acceptance " << format_number(out.acceptance_rate)
      << ", " << out.n_unique() << " unique draws, wrote " << dir.string() << "\n";
  for (const auto& w : out.warnings) log << "warning: " << w << "\n";
}

void cmd_post_correct(const Options& opt, std::ostream& log) {
  require_run(opt);
  const RunConfig cfg = config_for_run(opt);
  const ModelSetup setup = build_model(cfg);
  const McmcOutput run = load_run(opt.run);
  check_compatible(run, setup.model);
  if (run.type != McmcType::approx)
    throw ConfigError("--run", "post-correct needs an approx-type run, found '" +
                                   std::string(to_string(run.type)) + "'");
  const std::uint64_t seed = seed_for(opt, cfg);
  const LinearTarget target(setup.model);
  const auto start = std::chrono::steady_clock::now();
  const McmcOutput out = post_correct(run, target, cfg.pc_particles, seed, opt.threads, cfg.pc_method);
  const double secs = since(start);
  const fs::path dir = opt.out.empty() ? opt.run : opt.out;
  json extra;
  extra["post_correction"] = {{"particles", cfg.pc_particles},
                              {"method", std::string(to_string(cfg.pc_method))},
                              {"seed", seed}};
  json echo = cfg.raw;
  if (!echo.contains("seed")) echo["seed"] = run.seed;
  save_run(dir, out, echo, extra);
  record_timing(dir, "post_correct_seconds", secs);
  log << "post-correct: " << out.n_unique() << " draws reweighted with " << cfg.pc_particles
      << " particles, wrote " << dir.string() << "\n";
  for (const auto& w : out.warnings) log << "warning: " << w << "\n";
}

void cmd_suggest_n(const Options& opt, std::ostream& log) {
  require_run(opt);
  const RunConfig cfg = config_for_run(opt);
  const ModelSetup setup = build_model(cfg);
  const McmcOutput run = load_run(opt.run);
  check_compatible(run, setup.model);
  const LinearTarget target(setup.model);
  const SuggestN s = suggest_N(target, run, seed_for(opt, cfg), opt.threads, cfg.ladder,
                               cfg.replications, cfg.pc_method);
  json j;
  j["N"] = s.N;
  j["sd_table"] = json::array();
  for (const auto& [N, sd] : s.sd_table) j["sd_table"].push_back({{"N", N}, {"sd", sd}});
  j["theta_map"] = theta_json(run.names, s.theta_map);
  j["method"] = std::string(to_string(cfg.pc_method));
  j["warnings"] = s.warnings;
  const fs::path dir = opt.out.empty() ? opt.run : opt.out;
  fs::create_directories(dir);
  write_json(dir / "suggest_n.json", j);
  log << j.dump(2) << "\n";
}

json summary_json(const McmcOutput& out) {
  json rows = json::array();
  auto add = [&](const std::vector<SummaryRow>& rs) {
    for (const auto& r : rs) {
      json x = {{"variable", r.variable}, {"mean", r.mean}, {"sd", r.sd}, {"mcse", r.mcse}};
      x["time"] = r.time ? json(*r.time) : json(nullptr);
      rows.push_back(x);
    }
  };
  add(summarize(out, Variable::theta));
  if (!out.states.empty()) add(summarize(out, Variable::states));
  return rows;
}

void cmd_summary(const Options& opt, std::ostream& log) {
  require_run(opt);
  const McmcOutput out = load_run(opt.run);
  const fs::path dir = opt.out.empty() ? opt.run : opt.out;
  fs::create_directories(dir);
  std::vector<SummaryRow> rows = summarize(out, Variable::theta);
  if (!out.states.empty()) {
    const auto st = summarize(out, Variable::states);
    rows.insert(rows.end(), st.begin(), st.end());
  }
  {
    std::ofstream csv(dir / "summary.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write '" + (dir / "summary.csv").string() + "'");
    csv << "variable,time,mean,sd,mcse\n";
    for (const auto& r : rows)
      csv << r.variable << "," << (r.time ? std::to_string(*r.time) : "NA") << ","
          << format_number(r.mean) << "," << format_number(r.sd) << "," << format_number(r.mcse) << "\n";
  }
  const json j = summary_json(out);
  write_json(dir / "summary.json", j);
  log << "summary of " << out.n_unique() << " draws (" << (out.weighted ? "weighted" : "unweighted")
      << "), wrote " << (dir / "summary.csv").string() << "\n";
  for (const auto& r : rows)
    if (!r.time) log << "  " << r.variable << ": mean " << format_number(r.mean) << ", sd "
                     << format_number(r.sd) << ", mcse " << format_number(r.mcse) << "\n";
}

}  // namespace ssm::cli
