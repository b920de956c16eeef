#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsheat/domain.hpp"
#include "dsheat/evolution.hpp"

namespace dsheat::app {

using json = nlohmann::ordered_json;

/// Parse-time rejection; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class InitKind { DeltaCenter, ConstantInterior, SineMode, File, Random };

struct InitSpec {
  InitKind kind = InitKind::ConstantInterior;
  MultiIndex mode;             // SineMode
  std::string path;            // File
  std::uint64_t seed = 0;      // Random
  double max_amplitude = 1.0;  // Random
};

struct SweepGrid {
  std::vector<double> alpha;
  std::vector<double> delta;
  std::vector<double> amplitude;
  int threads = 1;
};

struct ExperimentConfig {
  std::vector<int> extents;
  double alpha = 1.0;
  double delta = 1.0;
  std::size_t steps = 100;
  InitSpec init;
  double amplitude = 1.0;
  double eps_blow = 0.0;
  double comparison_slack = 1e-12;
  double threshold_tol = 1e-3;
  std::optional<SweepGrid> sweep;
  std::string output_dir = "out";
  std::filesystem::path base_dir;  // relative init file paths resolve here

  BoxDomain domain() const { return BoxDomain(extents); }
  Params params() const { return Params(alpha, delta); }
};

inline const char* to_string(InitKind k) {
  switch (k) {
    case InitKind::DeltaCenter: return "delta_center";
    case InitKind::ConstantInterior: return "constant_interior";
    case InitKind::SineMode: return "sine_mode";
    case InitKind::File: return "file";
    case InitKind::Random: return "random";
  }
  return "?";
}

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + "." + key, "missing required field");
  return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

inline double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) throw ConfigError(path, "must be > 0, got " + v.dump());
  return x;
}

inline double nonnegative(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (x < 0.0) throw ConfigError(path, "must be >= 0, got " + v.dump());
  return x;
}

inline std::uint64_t unsigned_int(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

inline std::vector<int> int_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_number_integer()) throw ConfigError(p, "expected an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

inline std::vector<double> positive_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(positive(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline InitSpec parse_init(const json& v, const std::vector<int>& extents) {
  const std::string path = "config.init";
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  const json& kind = require(v, "kind", path);
  if (!kind.is_string()) throw ConfigError(path + ".kind", "expected a string");
  const auto name = kind.get<std::string>();
  InitSpec spec;
  if (name == "delta_center") {
    spec.kind = InitKind::DeltaCenter;
  } else if (name == "constant_interior") {
    spec.kind = InitKind::ConstantInterior;
  } else if (name == "sine_mode") {
    spec.kind = InitKind::SineMode;
    spec.mode = int_list(require(v, "mode", path), path + ".mode");
    if (spec.mode.size() != extents.size())
      throw ConfigError(path + ".mode", "needs one entry per axis");
    for (std::size_t k = 0; k < extents.size(); ++k)
      if (spec.mode[k] < 1 || spec.mode[k] >= extents[k])
        throw ConfigError(path + ".mode[" + std::to_string(k) + "]",
                          "must satisfy 0 < mode < N_" + std::to_string(k + 1));
  } else if (name == "file") {
    spec.kind = InitKind::File;
    const json& p = require(v, "path", path);
    if (!p.is_string()) throw ConfigError(path + ".path", "expected a string");
    spec.path = p.get<std::string>();
  } else if (name == "random") {
    spec.kind = InitKind::Random;
    spec.seed = unsigned_int(require(v, "seed", path), path + ".seed");
    spec.max_amplitude = nonnegative(require(v, "max_amplitude", path), path + ".max_amplitude");
  } else {
    throw ConfigError(path + ".kind", "unknown profile kind '" + name +
                                          "' (expected delta_center, constant_interior, "
                                          "sine_mode, file or random)");
  }
  return spec;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
  ExperimentConfig cfg;
  cfg.extents = int_list(require(doc, "extents", "config"), "config.extents");
  for (std::size_t k = 0; k < cfg.extents.size(); ++k)
    if (cfg.extents[k] < 2)
      throw ConfigError("config.extents[" + std::to_string(k) + "]", "must be >= 2");
  if (doc.contains("dims")) {
    const auto d = unsigned_int(doc.at("dims"), "config.dims");
    if (d != cfg.extents.size())
      throw ConfigError("config.dims", "does not match the length of config.extents");
  }
  cfg.alpha = positive(require(doc, "alpha", "config"), "config.alpha");
  cfg.delta = positive(require(doc, "delta", "config"), "config.delta");
  if (doc.contains("steps")) cfg.steps = unsigned_int(doc.at("steps"), "config.steps");
  cfg.init = parse_init(require(doc, "init", "config"), cfg.extents);
  if (doc.contains("amplitude")) cfg.amplitude = nonnegative(doc.at("amplitude"), "config.amplitude");

  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) throw ConfigError("config.tolerances", "expected an object");
    if (t.contains("eps_blow"))
      cfg.eps_blow = nonnegative(t.at("eps_blow"), "config.tolerances.eps_blow");
    if (t.contains("comparison_slack"))
      cfg.comparison_slack =
          nonnegative(t.at("comparison_slack"), "config.tolerances.comparison_slack");
    if (t.contains("threshold_tol")) {
      cfg.threshold_tol = positive(t.at("threshold_tol"), "config.tolerances.threshold_tol");
      if (cfg.threshold_tol >= 1.0)
        throw ConfigError("config.tolerances.threshold_tol", "must be < 1");
    }
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    if (!s.is_object()) throw ConfigError("config.sweep", "expected an object");
    SweepGrid grid;
    grid.alpha = s.contains("alpha") ? positive_list(s.at("alpha"), "config.sweep.alpha")
                                     : std::vector<double>{cfg.alpha};
    grid.delta = s.contains("delta") ? positive_list(s.at("delta"), "config.sweep.delta")
                                     : std::vector<double>{cfg.delta};
    if (s.contains("amplitude")) {
      const json& a = s.at("amplitude");
      if (!a.is_array() || a.empty())
        throw ConfigError("config.sweep.amplitude", "expected a nonempty array of numbers");
      for (std::size_t i = 0; i < a.size(); ++i)
        grid.amplitude.push_back(
            nonnegative(a[i], "config.sweep.amplitude[" + std::to_string(i) + "]"));
    } else {
      grid.amplitude = {cfg.amplitude};
    }
    if (s.contains("threads")) {
      grid.threads = static_cast<int>(unsigned_int(s.at("threads"), "config.sweep.threads"));
      if (grid.threads < 1) throw ConfigError("config.sweep.threads", "must be >= 1");
    }
    cfg.sweep = std::move(grid);
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (!o.is_object()) throw ConfigError("config.output", "expected an object");
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) throw ConfigError("config.output.dir", "expected a string");
      cfg.output_dir = o.at("dir").get<std::string>();
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  auto cfg = parse_config(doc);
  cfg.base_dir = path.parent_path();
  return cfg;
}

/// Echo of the resolved configuration for reports.
inline json config_to_json(const ExperimentConfig& cfg) {
  json init{{"kind", to_string(cfg.init.kind)}};
  switch (cfg.init.kind) {
    case InitKind::SineMode: init["mode"] = cfg.init.mode; break;
    case InitKind::File: init["path"] = cfg.init.path; break;
    case InitKind::Random:
      init["seed"] = cfg.init.seed;
      init["max_amplitude"] = cfg.init.max_amplitude;
      break;
    default: break;
  }
  return json{{"extents", cfg.extents},
              {"alpha", cfg.alpha},
              {"delta", cfg.delta},
              {"steps", cfg.steps},
              {"init", init},
              {"amplitude", cfg.amplitude},
              {"tolerances",
               {{"eps_blow", cfg.eps_blow},
                {"comparison_slack", cfg.comparison_slack},
                {"threshold_tol", cfg.threshold_tol}}}};
}

}  // namespace dsheat::app
