#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssm/mcmc.hpp"

namespace ssm::cli {

using json = nlohmann::json;

/// Invalid configuration. what() is a single line naming the JSON path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error("config error at " + path + ": " + msg) {}
};

struct DataTable {
  std::vector<std::string> header;
  Mat values;  // rows x columns, NaN for missing

  Eigen::Index column(const std::string& name) const;  // -1 when absent
};

/// Model built from the "model" section together with the data it uses.
struct ModelSetup {
  std::string family;  // bsm_lg, bsm_ng, svm, ssm_custom
  std::vector<std::string> y_columns;
  std::vector<std::string> extra_columns;  // xreg and exposure columns, kept by simulate
  Mat extra;                               // n x extra_columns.size()
  BayesianModel model;
};

struct RunConfig {
  json raw;  // config with data_path made absolute; echoed into run.json
  std::filesystem::path base_dir;

  McmcConfig mcmc;
  std::size_t pc_particles = 10;
  PfMethod pc_method = PfMethod::psi;
  std::vector<std::size_t> ladder = {2, 4, 8, 16, 32, 64, 128};
  std::size_t replications = 100;
  std::size_t simulate_n = 0;  // rows to simulate when there is no data file
  std::string output_dir;
  std::uint64_t seed = 1;
};

/// Parses and validates everything except the model itself. Accepts either
/// a config document or a run.json whose "config" member is one.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir);

/// Builds the model. When `allow_missing_y` is set, absent response columns
/// (or a missing data file) give an all-missing response, as needed by simulate.
ModelSetup build_model(const RunConfig& cfg, bool allow_missing_y = false);

/// Reads a CSV with a header row. NA, NaN and empty cells are missing.
DataTable read_csv(const std::filesystem::path& path,
                   const std::string& field = "model.data_path");

Prior parse_prior(const json& j, const std::string& path);

}  // namespace ssm::cli
