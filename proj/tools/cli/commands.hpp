#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"

namespace ssm::cli {

struct Options {
  std::filesystem::path config;  // may be empty for commands reading a run dir
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::filesystem::path out;
  std::filesystem::path run;
};

/// Each command writes its files and a short report to `log`. Errors are
/// thrown: ConfigError/ModelError for bad input, NumericalError for failed
/// recursions, std::runtime_error for I/O.
void cmd_simulate(const Options& opt, std::ostream& log);
void cmd_filter(const Options& opt, std::ostream& log);
void cmd_smooth(const Options& opt, std::ostream& log);
void cmd_mcmc(const Options& opt, std::ostream& log);
void cmd_post_correct(const Options& opt, std::ostream& log);
void cmd_suggest_n(const Options& opt, std::ostream& log);
void cmd_summary(const Options& opt, std::ostream& log);

/// Summary table of a run directory as written by cmd_summary.
json summary_json(const McmcOutput& out);

/// Maps an exception from a command to the process exit code.
int exit_code_for(const std::exception& e);

}  // namespace ssm::cli
