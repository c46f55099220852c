#include "run_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>

namespace ssm::cli {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void check_written(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

DataTable read_table(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("--run", "'" + path.string() + "' does not exist");
  return read_csv(path, "--run");
}

Eigen::Index need_column(const DataTable& t, const std::string& name, const fs::path& p) {
  const Eigen::Index k = t.column(name);
  if (k < 0) throw ConfigError("--run", p.filename().string() + " has no column '" + name + "'");
  return k;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

void write_csv(const fs::path& path, const std::vector<std::string>& header, const Mat& rows) {
  auto out = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n";
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << format_number(rows(i, j));
    out << "\n";
  }
  check_written(out, path);
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << "\n";
  check_written(out, path);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--run", "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error&) {
    throw ConfigError("--run", "'" + path.string() + "' is not valid JSON");
  }
}

json run_metadata(const McmcOutput& out) {
  json j;
  j["names"] = out.names;
  j["mcmc_type"] = std::string(to_string(out.type));
  j["method"] = std::string(to_string(out.method));
  j["particles"] = out.particles;
  j["iter"] = out.iter;
  j["burnin"] = out.burnin;
  j["seed"] = out.seed;
  j["acceptance_rate"] = out.acceptance_rate;
  j["accepted"] = out.accepted;
  j["stage1_accepted"] = out.stage1_accepted;
  j["n_unique"] = out.n_unique();
  j["weighted"] = out.weighted;
  j["proposal_factor"] = matrix_json(out.S);
  j["warnings"] = out.warnings;
  return j;
}

void save_run(const fs::path& dir, const McmcOutput& out, const json& config_echo,
              const json& extra) {
  fs::create_directories(dir);
  const auto m = static_cast<Eigen::Index>(out.n_unique());
  const auto q = out.theta.cols();

  std::vector<std::string> header = {"draw", "count", "weight"};
  header.insert(header.end(), out.names.begin(), out.names.end());
  for (const char* h : {"log_prior", "loglik", "approx_loglik"}) header.emplace_back(h);
  Mat rows(m, 3 + q + 3);
  for (Eigen::Index j = 0; j < m; ++j) {
    rows(j, 0) = static_cast<double>(j + 1);
    rows(j, 1) = static_cast<double>(out.counts[static_cast<std::size_t>(j)]);
    rows(j, 2) = out.weights(j);
    rows.row(j).segment(3, q) = out.theta.row(j);
    rows(j, 3 + q) = out.log_prior(j);
    rows(j, 4 + q) = out.loglik(j);
    rows(j, 5 + q) = out.approx_loglik(j);
  }
  write_csv(dir / "theta.csv", header, rows);

  const fs::path states_path = dir / "states.csv";
  Eigen::Index d = 0, total = 0;
  for (const auto& s : out.states) {
    if (s.size() == 0) continue;
    d = s.cols();
    total += s.rows();
  }
  if (d > 0) {
    std::vector<std::string> sh = {"draw", "time"};
    for (Eigen::Index k = 0; k < d; ++k) sh.push_back("state_" + std::to_string(k + 1));
    Mat srows(total, 2 + d);
    Eigen::Index r = 0;
    for (std::size_t j = 0; j < out.states.size(); ++j) {
      const Mat& s = out.states[j];
      for (Eigen::Index t = 0; t < s.rows(); ++t, ++r) {
        srows(r, 0) = static_cast<double>(j + 1);
        srows(r, 1) = static_cast<double>(t + 1);
        srows.row(r).tail(d) = s.row(t);
      }
    }
    write_csv(states_path, sh, srows);
  } else if (fs::exists(states_path)) {
    fs::remove(states_path);
  }

  json run = run_metadata(out);
  for (const auto& [k, v] : extra.items()) run[k] = v;
  run["config"] = config_echo;
  write_json(dir / "run.json", run);
}

McmcOutput load_run(const fs::path& dir) {
  const json run = read_json(dir / "run.json");
  McmcOutput out;
  try {
    out.names = run.at("names").get<std::vector<std::string>>();
    out.type = mcmc_type_from_string(run.at("mcmc_type").get<std::string>());
    out.method = pf_method_from_string(run.at("method").get<std::string>());
    out.particles = run.at("particles").get<std::size_t>();
    out.iter = run.at("iter").get<std::size_t>();
    out.burnin = run.at("burnin").get<std::size_t>();
    out.seed = run.at("seed").get<std::uint64_t>();
    out.acceptance_rate = run.at("acceptance_rate").get<double>();
    out.accepted = run.at("accepted").get<std::size_t>();
    out.stage1_accepted = run.at("stage1_accepted").get<std::size_t>();
    out.weighted = run.at("weighted").get<bool>();
    out.warnings = run.at("warnings").get<std::vector<std::string>>();
    const auto& S = run.at("proposal_factor");
    out.S = Mat(static_cast<Eigen::Index>(S.size()), static_cast<Eigen::Index>(S.empty() ? 0 : S[0].size()));
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = 0; j < S[i].size(); ++j)
        out.S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = S[i][j].get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("--run", "run.json is incomplete: " + std::string(e.what()));
  }

  const fs::path tp = dir / "theta.csv";
  const DataTable th = read_table(tp);
  const Eigen::Index m = th.values.rows();
  const auto q = static_cast<Eigen::Index>(out.names.size());
  const Eigen::Index c_count = need_column(th, "count", tp), c_w = need_column(th, "weight", tp);
  out.theta = Mat(m, q);
  for (Eigen::Index k = 0; k < q; ++k)
    out.theta.col(k) = th.values.col(need_column(th, out.names[static_cast<std::size_t>(k)], tp));
  out.counts.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) out.counts[static_cast<std::size_t>(j)] = static_cast<std::size_t>(th.values(j, c_count));
  out.weights = th.values.col(c_w);
  out.log_prior = th.values.col(need_column(th, "log_prior", tp));
  out.loglik = th.values.col(need_column(th, "loglik", tp));
  out.approx_loglik = th.values.col(need_column(th, "approx_loglik", tp));

  const fs::path sp = dir / "states.csv";
  if (fs::exists(sp)) {
    const DataTable st = read_table(sp);
    const Eigen::Index c_draw = need_column(st, "draw", sp);
    const Eigen::Index d = st.values.cols() - 2;
    std::map<Eigen::Index, std::vector<Eigen::Index>> rows_of;
    for (Eigen::Index r = 0; r < st.values.rows(); ++r)
      rows_of[static_cast<Eigen::Index>(st.values(r, c_draw))].push_back(r);
    out.states.assign(static_cast<std::size_t>(m), Mat());
    for (const auto& [draw, rows] : rows_of) {
      if (draw < 1 || draw > m) throw ConfigError("--run", "states.csv refers to unknown draw " + std::to_string(draw));
      Mat s(static_cast<Eigen::Index>(rows.size()), d);
      for (std::size_t t = 0; t < rows.size(); ++t) s.row(static_cast<Eigen::Index>(t)) = st.values.row(rows[t]).tail(d);
      out.states[static_cast<std::size_t>(draw - 1)] = std::move(s);
    }
  }
  return out;
}

}  // namespace ssm::cli
