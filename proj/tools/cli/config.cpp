#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "ssm/builders.hpp"

namespace ssm::cli {

namespace fs = std::filesystem;

Eigen::Index DataTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<Eigen::Index>(i);
  return -1;
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  const auto e = s.find_last_not_of(" \t\r\"");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// ---- JSON access with paths ------------------------------------------------

std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}
std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
    throw ConfigError(path, "expected a non-negative integer");
  const double v = j.get<double>();
  if (v < 0) throw ConfigError(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> strings(const json& j, const std::string& path) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) throw ConfigError(path, "expected a string or an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(text(j[i], at(path, i)));
  return out;
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(at(path, k), "unknown field");
}

const json& require(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) throw ConfigError(at(path, key), "missing required field");
  return j.at(key);
}

Vec vector_of(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], at(path, i));
  return v;
}

Mat matrix_of(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw ConfigError(path, "expected a matrix given as an array of rows");
  Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(at(path, r), "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], at(at(path, r), c));
  }
  return m;
}

int depth(const json& j) {
  int d = 0;
  const json* p = &j;
  while (p->is_array() && !p->empty()) {
    ++d;
    p = &(*p)[0];
  }
  return d;
}

// 2-d array: constant matrix; 3-d array: one matrix per time point.
Slices<Mat> matrix_slices(const json& j, const std::string& path) {
  if (depth(j) == 3) {
    std::vector<Mat> s;
    for (std::size_t t = 0; t < j.size(); ++t) s.push_back(matrix_of(j[t], at(path, t)));
    return Slices<Mat>(std::move(s));
  }
  return matrix_of(j, path);
}

Slices<Vec> vector_slices(const json& j, const std::string& path) {
  if (depth(j) == 2) {
    std::vector<Vec> s;
    for (std::size_t t = 0; t < j.size(); ++t) s.push_back(vector_of(j[t], at(path, t)));
    return Slices<Vec>(std::move(s));
  }
  return vector_of(j, path);
}

PriorOrValue prior_or_value(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  return parse_prior(j, path);
}

std::uint64_t seed_of(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer()) throw ConfigError(path, "expected an unsigned integer");
  if (j.is_number_integer() && j.get<long long>() < 0) throw ConfigError(path, "expected an unsigned integer");
  return j.get<std::uint64_t>();
}

// ---- data ------------------------------------------------------------------

struct Data {
  DataTable table;
  bool present = false;
  std::string name;
};

Vec column_of(const Data& d, const std::string& col, const std::string& path) {
  const Eigen::Index k = d.table.column(col);
  if (k < 0) throw ConfigError(path, "column '" + col + "' not found in " + d.name);
  return d.table.values.col(k);
}

// ---- structural families ---------------------------------------------------

StructuralSpec structural(const json& m, const Data& data, const Mat& y,
                          std::vector<std::string>& extra) {
  StructuralSpec spec;
  spec.y = y;
  spec.sd_level = prior_or_value(require(m, "model", "sd_level"), "model.sd_level");
  if (m.contains("sd_slope")) spec.sd_slope = prior_or_value(m["sd_slope"], "model.sd_slope");
  if (m.contains("xreg")) {
    const auto cols = strings(m["xreg"], "model.xreg");
    spec.xreg = Mat(y.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) {
      spec.xreg.col(static_cast<Eigen::Index>(i)) = column_of(data, cols[i], at("model.xreg", i));
      extra.push_back(cols[i]);
    }
    const json& b = require(m, "model", "beta");
    if (!b.is_array() || b.size() != cols.size())
      throw ConfigError("model.beta", "expected one entry per xreg column");
    for (std::size_t i = 0; i < b.size(); ++i) spec.beta.push_back(prior_or_value(b[i], at("model.beta", i)));
  } else if (m.contains("beta")) {
    throw ConfigError("model.beta", "given without xreg");
  }
  if (m.contains("a1")) spec.a1 = vector_of(m["a1"], "model.a1");
  if (m.contains("P1")) spec.P1 = matrix_of(m["P1"], "model.P1");
  return spec;
}

// ---- custom family -----------------------------------------------------------

struct Target {
  std::string comp;
  std::vector<std::size_t> idx;
};

Target parse_target(const std::string& s, const std::string& path) {
  static const std::regex re(R"(^\s*(Z|H|T|R|c|d|a1|P1|phi)\s*\[\s*(\d+(?:\s*,\s*\d+)*)\s*\]\s*$)");
  std::smatch mt;
  if (!std::regex_match(s, mt, re))
    throw ConfigError(path, "cannot parse target '" + s + "' (expected e.g. R[0,0,0])");
  Target t{mt[1], {}};
  std::stringstream ss(mt[2].str());
  std::string part;
  while (std::getline(ss, part, ',')) t.idx.push_back(static_cast<std::size_t>(std::stoul(trim(part))));
  return t;
}

// Checks a target against the base model; returns a setter.
std::function<void(double, LinearModel&)> resolve(const Target& tg, const LinearModel& m,
                                                   const std::string& path) {
  const auto bad = [&](const std::string& msg) { return ConfigError(path, msg); };
  const std::size_t k = tg.idx.size();
  auto mat_target = [&](Slices<Mat> LinearModel::*member) -> std::function<void(double, LinearModel&)> {
    const Slices<Mat>& s = m.*member;
    if (k != 2 && k != 3) throw bad(tg.comp + " takes [row,col] or [row,col,time]");
    const Eigen::Index r = static_cast<Eigen::Index>(tg.idx[0]), c = static_cast<Eigen::Index>(tg.idx[1]);
    if (r >= s[0].rows() || c >= s[0].cols()) throw bad("index out of range for " + tg.comp);
    if (k == 3) {
      const std::size_t t = tg.idx[2];
      if (t >= s.size()) throw bad(tg.comp + " has " + std::to_string(s.size()) + " time slice(s)");
      return [member, r, c, t](double v, LinearModel& mm) { (mm.*member).slice(t)(r, c) = v; };
    }
    return [member, r, c](double v, LinearModel& mm) {
      for (auto& x : mm.*member) x(r, c) = v;
    };
  };
  auto vec_target = [&](Slices<Vec> LinearModel::*member) -> std::function<void(double, LinearModel&)> {
    const Slices<Vec>& s = m.*member;
    if (k != 1 && k != 2) throw bad(tg.comp + " takes [row] or [row,time]");
    const Eigen::Index r = static_cast<Eigen::Index>(tg.idx[0]);
    if (r >= s[0].size()) throw bad("index out of range for " + tg.comp);
    if (k == 2) {
      const std::size_t t = tg.idx[1];
      if (t >= s.size()) throw bad(tg.comp + " has " + std::to_string(s.size()) + " time slice(s)");
      return [member, r, t](double v, LinearModel& mm) { (mm.*member).slice(t)(r) = v; };
    }
    return [member, r](double v, LinearModel& mm) {
      for (auto& x : mm.*member) x(r) = v;
    };
  };
  if (tg.comp == "Z") return mat_target(&LinearModel::Z);
  if (tg.comp == "H") return mat_target(&LinearModel::H);
  if (tg.comp == "T") return mat_target(&LinearModel::T);
  if (tg.comp == "R") return mat_target(&LinearModel::R);
  if (tg.comp == "c") return vec_target(&LinearModel::c);
  if (tg.comp == "d") return vec_target(&LinearModel::d);
  if (tg.comp == "a1") {
    if (k != 1 || static_cast<Eigen::Index>(tg.idx[0]) >= m.a1.size()) throw bad("a1 takes one index in range");
    const auto r = static_cast<Eigen::Index>(tg.idx[0]);
    return [r](double v, LinearModel& mm) { mm.a1(r) = v; };
  }
  if (tg.comp == "P1") {
    if (k != 2 || static_cast<Eigen::Index>(std::max(tg.idx[0], tg.idx[1])) >= m.P1.rows())
      throw bad("P1 takes two indices in range");
    const auto r = static_cast<Eigen::Index>(tg.idx[0]), c = static_cast<Eigen::Index>(tg.idx[1]);
    return [r, c](double v, LinearModel& mm) { mm.P1(r, c) = v; };
  }
  // phi
  if (k != 1 || tg.idx[0] >= m.obs.size()) throw bad("phi takes one series index in range");
  const std::size_t j = tg.idx[0];
  return [j](double v, LinearModel& mm) { mm.obs[j].phi = v; };
}

BayesianModel custom(const json& m, const Data& data, const Mat& y,
                     std::vector<std::string>& extra) {
  LinearModel lm;
  lm.y = y;
  const auto p = static_cast<std::size_t>(y.cols());
  lm.Z = matrix_slices(require(m, "model", "Z"), "model.Z");
  lm.T = matrix_slices(require(m, "model", "T"), "model.T");
  lm.R = matrix_slices(require(m, "model", "R"), "model.R");
  lm.a1 = vector_of(require(m, "model", "a1"), "model.a1");
  lm.P1 = matrix_of(require(m, "model", "P1"), "model.P1");
  const auto d = lm.a1.size();
  lm.H = m.contains("H") ? matrix_slices(m["H"], "model.H")
                         : Slices<Mat>(Mat(Mat::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))));
  lm.c = m.contains("c") ? vector_slices(m["c"], "model.c") : Slices<Vec>(Vec(Vec::Zero(d)));
  lm.d = m.contains("d") ? vector_slices(m["d"], "model.d")
                         : Slices<Vec>(Vec(Vec::Zero(static_cast<Eigen::Index>(p))));

  std::vector<std::string> dist(p, "gaussian");
  if (m.contains("distribution")) {
    dist = strings(m["distribution"], "model.distribution");
    if (dist.size() == 1 && p > 1) dist.assign(p, dist[0]);
    if (dist.size() != p) throw ConfigError("model.distribution", "expected one entry per response column");
  }
  lm.obs.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    try {
      lm.obs[j].family = family_from_string(dist[j]);
    } catch (const ModelError& e) {
      throw ConfigError(at("model.distribution", j), e.what());
    }
  }
  if (m.contains("phi")) {
    const json& ph = m["phi"];
    if (!ph.is_array() || ph.size() != p) throw ConfigError("model.phi", "expected one entry per response column");
    for (std::size_t j = 0; j < p; ++j)
      if (!ph[j].is_null()) lm.obs[j].phi = number(ph[j], at("model.phi", j));
  }
  if (m.contains("u")) {
    const auto cols = strings(m["u"], "model.u");
    if (cols.size() != p) throw ConfigError("model.u", "expected one column per response column");
    lm.u = Mat(y.rows(), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
      lm.u.col(static_cast<Eigen::Index>(j)) = column_of(data, cols[j], at("model.u", j));
      extra.push_back(cols[j]);
    }
  }

  std::vector<Prior> priors;
  ParamMap map;
  std::vector<std::vector<std::function<void(double, LinearModel&)>>> setters;
  if (m.contains("parameters")) {
    const json& ps = m["parameters"];
    if (!ps.is_array()) throw ConfigError("model.parameters", "expected an array");
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const std::string path = at("model.parameters", k);
      only_keys(ps[k], path, {"name", "prior", "targets"});
      map.names.push_back(text(require(ps[k], path, "name"), at(path, "name")));
      priors.push_back(parse_prior(require(ps[k], path, "prior"), at(path, "prior")));
      const auto targets = strings(require(ps[k], path, "targets"), at(path, "targets"));
      if (targets.empty()) throw ConfigError(at(path, "targets"), "needs at least one target");
      setters.emplace_back();
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::string tp = at(at(path, "targets"), i);
        setters.back().push_back(resolve(parse_target(targets[i], tp), lm, tp));
      }
    }
  }
  map.apply = [setters](const Vec& theta, LinearModel& model) {
    for (std::size_t k = 0; k < setters.size(); ++k)
      for (const auto& set : setters[k]) set(theta(static_cast<Eigen::Index>(k)), model);
  };
  return BayesianModel(std::move(lm), std::move(priors), std::move(map));
}

}  // namespace

// ---- public ----------------------------------------------------------------

Prior parse_prior(const json& j, const std::string& path) {
  only_keys(j, path, {"family", "init", "params"});
  const std::string fam = text(require(j, path, "family"), at(path, "family"));
  const double init = number(require(j, path, "init"), at(path, "init"));
  const Vec p = vector_of(require(j, path, "params"), at(path, "params"));
  auto need = [&](Eigen::Index n, const char* what) {
    if (p.size() != n)
      throw ConfigError(at(path, "params"), fam + " prior takes " + what);
  };
  Prior pr;
  if (fam == "normal") {
    need(2, "[mean, sd]");
    pr = Prior::normal(init, p(0), p(1));
  } else if (fam == "halfnormal") {
    need(1, "[sd]");
    pr = Prior::halfnormal(init, p(0));
  } else if (fam == "tnormal") {
    need(4, "[mean, sd, lower, upper]");
    pr = Prior::tnormal(init, p(0), p(1), p(2), p(3));
  } else if (fam == "gamma") {
    need(2, "[shape, rate]");
    pr = Prior::gamma(init, p(0), p(1));
  } else if (fam == "uniform") {
    need(2, "[min, max]");
    pr = Prior::uniform(init, p(0), p(1));
  } else {
    throw ConfigError(at(path, "family"), "unknown prior family '" + fam + "'");
  }
  try {
    pr.validate();
  } catch (const ModelError& e) {
    throw ConfigError(path, e.what());
  }
  return pr;
}

DataTable read_csv(const fs::path& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field, "cannot open '" + path.string() + "'");
  DataTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(field, "'" + path.string() + "' is empty");
  t.header = split(line);
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ConfigError(field, path.filename().string() + " line " + std::to_string(lineno) +
                                               ": expected " + std::to_string(t.header.size()) + " cells");
    std::vector<double> row;
    for (const auto& c : cells) {
      if (c.empty() || c == "NA" || c == "NaN" || c == "nan") {
        row.push_back(kNaN);
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw ConfigError(field, path.filename().string() + " line " + std::to_string(lineno) +
                                                 ": cannot parse '" + c + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  t.values = Mat(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return t;
}

RunConfig parse_config(const json& input, const fs::path& base_dir) {
  const json& doc = input.contains("config") && !input.contains("model") ? input["config"] : input;
  only_keys(doc, "", {"model", "mcmc", "post_correct", "suggest_n", "simulate", "output_dir", "seed"});
  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.raw = doc;
  const json& model = require(doc, "", "model");
  if (!model.is_object()) throw ConfigError("model", "expected an object");
  if (model.contains("data_path")) {
    fs::path dp = text(model["data_path"], "model.data_path");
    if (dp.is_relative()) dp = fs::absolute(base_dir / dp).lexically_normal();
    cfg.raw["model"]["data_path"] = dp.string();
  }

  if (doc.contains("mcmc")) {
    const json& m = doc["mcmc"];
    only_keys(m, "mcmc", {"iter", "burnin", "mcmc_type", "particles", "method", "target_accept",
                          "gamma", "store_states"});
    if (m.contains("iter")) cfg.mcmc.iter = count(m["iter"], "mcmc.iter");
    if (m.contains("burnin")) cfg.mcmc.burnin = count(m["burnin"], "mcmc.burnin");
    if (m.contains("particles")) cfg.mcmc.particles = count(m["particles"], "mcmc.particles");
    if (m.contains("target_accept")) cfg.mcmc.target_accept = number(m["target_accept"], "mcmc.target_accept");
    if (m.contains("gamma")) cfg.mcmc.gamma = number(m["gamma"], "mcmc.gamma");
    if (m.contains("store_states")) {
      if (!m["store_states"].is_boolean()) throw ConfigError("mcmc.store_states", "expected true or false");
      cfg.mcmc.store_states = m["store_states"].get<bool>();
    }
    try {
      if (m.contains("mcmc_type")) cfg.mcmc.type = mcmc_type_from_string(text(m["mcmc_type"], "mcmc.mcmc_type"));
    } catch (const ModelError& e) {
      throw ConfigError("mcmc.mcmc_type", e.what());
    }
    try {
      if (m.contains("method")) cfg.mcmc.method = pf_method_from_string(text(m["method"], "mcmc.method"));
    } catch (const ModelError& e) {
      throw ConfigError("mcmc.method", e.what());
    }
    try {
      cfg.mcmc.validate();
    } catch (const ModelError& e) {
      throw ConfigError("mcmc", e.what());
    }
  }
  if (doc.contains("post_correct")) {
    const json& p = doc["post_correct"];
    only_keys(p, "post_correct", {"particles", "method"});
    if (p.contains("particles")) cfg.pc_particles = count(p["particles"], "post_correct.particles");
    if (cfg.pc_particles < 1) throw ConfigError("post_correct.particles", "must be positive");
    try {
      if (p.contains("method")) cfg.pc_method = pf_method_from_string(text(p["method"], "post_correct.method"));
    } catch (const ModelError& e) {
      throw ConfigError("post_correct.method", e.what());
    }
  } else {
    cfg.pc_particles = cfg.mcmc.particles;
    cfg.pc_method = cfg.mcmc.method;
  }
  if (doc.contains("suggest_n")) {
    const json& s = doc["suggest_n"];
    only_keys(s, "suggest_n", {"ladder", "replications"});
    if (s.contains("ladder")) {
      const json& l = s["ladder"];
      if (!l.is_array() || l.empty()) throw ConfigError("suggest_n.ladder", "expected a non-empty array");
      cfg.ladder.clear();
      for (std::size_t i = 0; i < l.size(); ++i) {
        cfg.ladder.push_back(count(l[i], at("suggest_n.ladder", i)));
        if (cfg.ladder.back() < 1) throw ConfigError(at("suggest_n.ladder", i), "must be positive");
      }
    }
    if (s.contains("replications")) {
      cfg.replications = count(s["replications"], "suggest_n.replications");
      if (cfg.replications < 2) throw ConfigError("suggest_n.replications", "must be at least 2");
    }
  }
  if (doc.contains("simulate")) {
    only_keys(doc["simulate"], "simulate", {"n"});
    if (doc["simulate"].contains("n")) cfg.simulate_n = count(doc["simulate"]["n"], "simulate.n");
  }
  if (doc.contains("output_dir")) cfg.output_dir = text(doc["output_dir"], "output_dir");
  if (doc.contains("seed")) cfg.seed = seed_of(doc["seed"], "seed");
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    throw ConfigError("<root>", "invalid JSON in " + path.filename().string() + ": " + msg);
  }
  return parse_config(doc, fs::absolute(path).parent_path());
}

ModelSetup build_model(const RunConfig& cfg, bool allow_missing_y) {
  const json& m = cfg.raw.at("model");
  only_keys(m, "model", {"family", "data_path", "columns", "distribution", "sd_y", "sd_level",
                         "sd_slope", "phi", "xreg", "beta", "u", "a1", "P1", "mu", "rho", "sd_ar",
                         "Z", "H", "T", "R", "c", "d", "parameters"});
  const std::string family = text(require(m, "model", "family"), "model.family");
  if (family != "bsm_lg" && family != "bsm_ng" && family != "svm" && family != "ssm_custom")
    throw ConfigError("model.family", "expected one of bsm_lg, bsm_ng, svm, ssm_custom; got '" + family + "'");

  Data data;
  if (m.contains("data_path")) {
    const fs::path p = text(m["data_path"], "model.data_path");
    data.table = read_csv(p);
    data.present = true;
    data.name = p.filename().string();
  } else if (!allow_missing_y) {
    throw ConfigError("model.data_path", "missing required field");
  }

  std::vector<std::string> cols = {"y"};
  if (m.contains("columns")) cols = strings(m["columns"], "model.columns");
  if (cols.empty()) throw ConfigError("model.columns", "needs at least one column");
  if (family != "ssm_custom" && cols.size() != 1)
    throw ConfigError("model.columns", family + " models take a single response column");

  Eigen::Index n = data.present ? data.table.values.rows() : static_cast<Eigen::Index>(cfg.simulate_n);
  if (n == 0) throw ConfigError(data.present ? "model.data_path" : "simulate.n", "no time points");
  Mat y = Mat::Constant(n, static_cast<Eigen::Index>(cols.size()), kNaN);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Eigen::Index k = data.present ? data.table.column(cols[j]) : -1;
    if (k >= 0) {
      y.col(static_cast<Eigen::Index>(j)) = data.table.values.col(k);
    } else if (!allow_missing_y) {
      throw ConfigError(at("model.columns", j), "column '" + cols[j] + "' not found in " + data.name);
    }
  }

  std::vector<std::string> extra;
  auto make = [&]() -> BayesianModel {
    if (family == "bsm_lg") {
      const StructuralSpec spec = structural(m, data, y, extra);
      return bsm_lg(spec, prior_or_value(require(m, "model", "sd_y"), "model.sd_y"));
    }
    if (family == "bsm_ng") {
      const StructuralSpec spec = structural(m, data, y, extra);
      Family f;
      try {
        f = family_from_string(text(require(m, "model", "distribution"), "model.distribution"));
      } catch (const ModelError& e) {
        throw ConfigError("model.distribution", e.what());
      }
      std::optional<PriorOrValue> phi;
      if (m.contains("phi")) phi = prior_or_value(m["phi"], "model.phi");
      Vec u;
      if (m.contains("u")) {
        const std::string col = text(m["u"], "model.u");
        u = column_of(data, col, "model.u");
        extra.push_back(col);
      }
      return bsm_ng(spec, f, phi, u);
    }
    if (family == "svm")
      return svm(y.col(0), prior_or_value(require(m, "model", "mu"), "model.mu"),
                 prior_or_value(require(m, "model", "rho"), "model.rho"),
                 prior_or_value(require(m, "model", "sd_ar"), "model.sd_ar"));
    return custom(m, data, y, extra);
  };
  std::optional<BayesianModel> bm;
  try {
    bm.emplace(make());
    LinearModel check = bm->update(bm->initial_theta());
    validate_model(check);
  } catch (const ModelError& e) {
    throw ConfigError("model", e.what());
  }
  ModelSetup setup{family, cols, extra, Mat(), std::move(*bm)};
  setup.extra = Mat(n, static_cast<Eigen::Index>(setup.extra_columns.size()));
  for (std::size_t i = 0; i < setup.extra_columns.size(); ++i)
    setup.extra.col(static_cast<Eigen::Index>(i)) = column_of(data, setup.extra_columns[i], "model");
  return setup;
}

}  // namespace ssm::cli
