#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using Command = void (*)(const ssm::cli::Options&, std::ostream&);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for state space models"};
  app.require_subcommand(1);
  ssm::cli::Options opt;
  std::uint64_t seed = 0;

  struct Spec {
    const char* name;
    const char* help;
    Command fn;
    bool needs_config;
    bool uses_run;
  };
  const Spec specs[] = {
      {"simulate", "simulate data from the configured model", ssm::cli::cmd_simulate, true, false},
      {"filter", "Kalman filter (approximate for non-gaussian models)", ssm::cli::cmd_filter, true, false},
      {"smooth", "Kalman smoother (approximate for non-gaussian models)", ssm::cli::cmd_smooth, true, false},
      {"mcmc", "run MCMC and write theta.csv, states.csv and run.json", ssm::cli::cmd_mcmc, true, false},
      {"post-correct", "importance-sampling correction of an approx run", ssm::cli::cmd_post_correct, false, true},
      {"suggest-n", "choose the particle count for post-correction", ssm::cli::cmd_suggest_n, false, true},
      {"summary", "posterior means, SDs and MCSEs of a run", ssm::cli::cmd_summary, false, true},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    if (s.name != std::string("summary")) {
      auto* c = sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
      if (s.needs_config) c->required();
      sub->add_option("--seed", seed, "random seed (overrides the config)");
      sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1u, 1024u));
    }
    sub->add_option("--out", opt.out, "output directory");
    if (s.uses_run) sub->add_option("--run", opt.run, "directory of a previous run")->required();
    subs.emplace_back(sub, s.fn);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (const auto& [sub, fn] : subs) {
    if (!sub->parsed()) continue;
    if (const auto* o = sub->get_option_no_throw("--seed"); o && o->count()) opt.seed = seed;
    try {
      fn(opt, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "ssm " << sub->get_name() << ": " << e.what() << "\n";
      return ssm::cli::exit_code_for(e);
    }
  }
  return 0;
}
