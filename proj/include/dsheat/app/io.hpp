#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsheat/app/config.hpp"
#include "dsheat/domain.hpp"
#include "dsheat/random.hpp"
#include "dsheat/spectral.hpp"

namespace dsheat::app {

/// 17 significant digits, enough to read back the identical double.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Writes through a sibling temp file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Field files: {"extents": [...], "values": [...]} with one value per site of
// the box, lexicographic over all sites (boundary included).

inline json field_to_json(const Field& f) {
  json values = json::array();
  for (double v : f.values()) values.push_back(v);
  return json{{"extents", f.domain().extents()}, {"values", std::move(values)}};
}

inline Field field_from_json(const json& doc, const std::string& where = "field") {
  if (!doc.is_object() || !doc.contains("extents") || !doc.contains("values"))
    throw ConfigError(where, "field file needs 'extents' and 'values'");
  std::vector<int> extents;
  try {
    extents = doc.at("extents").get<std::vector<int>>();
  } catch (const json::exception&) {
    throw ConfigError(where + ".extents", "expected an array of integers");
  }
  BoxDomain dom = [&] {
    try {
      return BoxDomain(extents);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ".extents", e.what());
    }
  }();
  const json& values = doc.at("values");
  if (!values.is_array() || values.size() != dom.site_count())
    throw ConfigError(where + ".values", "expected " + std::to_string(dom.site_count()) +
                                             " numbers (one per site)");
  std::vector<double> data;
  data.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_number())
      throw ConfigError(where + ".values[" + std::to_string(i) + "]", "expected a number");
    data.push_back(values[i].get<double>());
  }
  return Field(std::move(dom), std::move(data));
}

inline void write_field_file(const std::filesystem::path& path, const Field& f) {
  write_file_atomic(path, field_to_json(f).dump(1) + "\n");
}

inline Field read_field_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return field_from_json(doc, path.string());
}

/// The unscaled profile named by `spec` (amplitude not applied).
inline Field make_profile(const BoxDomain& dom, const InitSpec& spec,
                          const std::filesystem::path& base_dir = {}) {
  switch (spec.kind) {
    case InitKind::DeltaCenter: {
      Field f(dom);
      MultiIndex center;
      for (int e : dom.extents()) center.push_back(e / 2);
      f.at(center) = 1.0;
      return f;
    }
    case InitKind::ConstantInterior:
      return Field::from_interior(dom, [](const MultiIndex&) { return 1.0; });
    case InitKind::SineMode:
      return ModeTable(dom).mode_field(spec.mode);
    case InitKind::File: {
      std::filesystem::path p = spec.path;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      Field f = read_field_file(p);
      if (!(f.domain() == dom))
        throw ConfigError("config.init.path", "field file extents do not match config.extents");
      return f;
    }
    case InitKind::Random: {
      SplitMix64 rng(spec.seed);
      Field f(dom);
      for (std::size_t flat : dom.interior_flat()) f[flat] = spec.max_amplitude * rng.uniform();
      return f;
    }
  }
  throw std::logic_error("make_profile: unhandled kind");
}

inline Field initial_field(const ExperimentConfig& cfg) {
  return make_profile(cfg.domain(), cfg.init, cfg.base_dir).scaled(cfg.amplitude);
}

}  // namespace dsheat::app
