#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "ssm/chain.hpp"

namespace ssm::cli {

/// Formats a double with 17 significant digits; NaN becomes NA.
std::string format_number(double v);

/// Writes rows with a header; each row must have header.size() entries.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Mat& rows);

void write_json(const std::filesystem::path& path, const json& doc);
json read_json(const std::filesystem::path& path);

/// theta.csv, states.csv (when states were stored) and the run metadata.
void save_run(const std::filesystem::path& dir, const McmcOutput& out, const json& config_echo,
              const json& extra = json::object());

/// Rebuilds the McmcOutput written by save_run.
McmcOutput load_run(const std::filesystem::path& dir);

/// Run metadata as stored in run.json.
json run_metadata(const McmcOutput& out);

}  // namespace ssm::cli
