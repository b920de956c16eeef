#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dsheat/app/config.hpp"
#include "dsheat/app/io.hpp"
#include "dsheat/evolution.hpp"
#include "dsheat/majorant.hpp"
#include "dsheat/spectral.hpp"

// Subcommand bodies shared by the CLI and the tests. Each writes its
// artifacts under `out` and returns the process exit status.

namespace dsheat::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitFalsified = 3;

namespace fs = std::filesystem;

namespace detail {

inline std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

inline json outcome_json(const BlowupReport& r) {
  if (r.blew_up()) {
    const auto& b = r.blowup();
    return json{{"outcome", "blew_up"}, {"s0", b.step}, {"n0", b.site}, {"g", b.g}};
  }
  return json{{"outcome", "survived"}, {"steps", std::get<Survived>(r.outcome).steps}};
}

inline json bound_json(const BoundReport& b) {
  json out{{"regime", to_string(b.regime)},
           {"bound_value", b.bound_value},
           {"b_max", b.b_max},
           {"certifies_global_existence", b.certifies()}};
  out["s0_tail"] = b.s0_tail ? json(*b.s0_tail) : json(nullptr);
  return out;
}

/// Bound for raw data under raw parameters (normalizes first).
inline BoundReport bound_for(const Field& a, const Params& p) {
  const auto [scaled, norm] = normalize_scaling(a, p);
  return certify(scaled, norm.alpha());
}

}  // namespace detail

inline int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out) {
  const Field a = initial_field(cfg);
  const Params p = cfg.params();
  const auto report = simulate(a, p, cfg.steps, StepOptions{cfg.eps_blow});

  std::string csv = "step,max_f,max_g,blowup_flag\n";
  for (const auto& rec : report.trace) {
    const bool hit = report.blew_up() && rec.step == report.blowup().step;
    csv += std::to_string(rec.step) + "," + format_double(rec.max_f) + "," +
           format_double(rec.max_g) + "," + (hit ? "1" : "0") + "\n";
  }
  write_file_atomic(out / "trajectory.csv", csv);
  write_field_file(out / "initial_field.json", a);

  json doc{{"command", "simulate"}};
  doc.update(detail::outcome_json(report));
  doc["threshold"] = p.threshold();
  doc["config"] = config_to_json(cfg);
  write_file_atomic(out / "report.json", detail::dump(doc));
  return report.blew_up() ? kExitBlowup : kExitOk;
}

inline int cmd_verify(const ExperimentConfig& cfg, const fs::path& out) {
  const Field a = initial_field(cfg);
  const Params p = cfg.params();
  const auto [scaled, norm] = normalize_scaling(a, p);
  const auto verdict = verify_comparison(scaled, norm.alpha(), cfg.steps, cfg.comparison_slack);
  const auto trace = compute_trace(scaled, norm.alpha(), cfg.steps);

  json doc{{"command", "verify"},
           {"holds", verdict.holds},
           {"scaling_factor", scaling_factor(p)},
           {"steps_requested", verdict.steps_requested},
           {"steps_checked", verdict.steps_checked()},
           {"truncated", verdict.truncated}};
  doc["defined_up_to"] = verdict.defined_up_to ? json(*verdict.defined_up_to) : json(nullptr);
  if (!verdict.defined_up_to)
    doc["note"] = "majorant undefined at every step: P_0 >= 1";
  else if (verdict.truncated)
    doc["note"] = "majorant undefined after step " + std::to_string(*verdict.defined_up_to) +
                  ": partial sum reaches 1";
  doc["min_margin"] = verdict.margins.empty()
                          ? json(nullptr)
                          : json(*std::min_element(verdict.margins.begin(), verdict.margins.end()));
  doc["margins"] = verdict.margins;
  doc["m"] = trace.m;
  doc["partial_sums"] = verdict.partial_sums;
  if (verdict.failure) {
    const auto& f = *verdict.failure;
    doc["failure"] = json{{"step", f.step}, {"site", f.site}, {"majorant", f.majorant},
                          {"solution", f.solution}, {"reason", f.reason}};
  } else {
    doc["failure"] = nullptr;
  }
  doc["config"] = config_to_json(cfg);
  write_file_atomic(out / "verify.json", detail::dump(doc));

  std::string csv = "step,m,partial_sum,margin\n";
  for (std::size_t s = 0; s < trace.m.size(); ++s) {
    csv += std::to_string(s) + "," + format_double(trace.m[s]) + "," +
           format_double(trace.partial_sums[s]) + "," +
           (s < verdict.margins.size() ? format_double(verdict.margins[s]) : "") + "\n";
  }
  write_file_atomic(out / "verify_trace.csv", csv);
  return verdict.holds ? kExitOk : kExitFalsified;
}

inline int cmd_bound(const ExperimentConfig& cfg, const fs::path& out) {
  const Field a = initial_field(cfg);
  const Params p = cfg.params();
  json doc{{"command", "bound"}};
  doc.update(detail::bound_json(detail::bound_for(a, p)));
  doc["alpha"] = p.alpha();
  doc["scaling_factor"] = scaling_factor(p);
  doc["config"] = config_to_json(cfg);
  write_file_atomic(out / "bound.json", detail::dump(doc));
  return kExitOk;
}

inline int cmd_threshold(const ExperimentConfig& cfg, const fs::path& out) {
  const Field profile = make_profile(cfg.domain(), cfg.init, cfg.base_dir);
  const auto res = find_threshold(profile, cfg.params(), cfg.steps, cfg.threshold_tol,
                                  StepOptions{cfg.eps_blow});
  json doc{{"command", "threshold"},
           {"lambda_star", res.lambda_star},
           {"bracketed", res.bracketed},
           {"ceiling", res.ceiling},
           {"lower", res.lower},
           {"upper", res.upper},
           {"tol", cfg.threshold_tol},
           {"steps", cfg.steps},
           {"config", config_to_json(cfg)}};
  write_file_atomic(out / "threshold.json", detail::dump(doc));

  std::string csv = "iteration,amplitude,blew_up,step\n";
  for (std::size_t i = 0; i < res.probes.size(); ++i) {
    const auto& pr = res.probes[i];
    csv += std::to_string(i) + "," + format_double(pr.amplitude) + "," +
           (pr.blew_up ? "1" : "0") + "," + std::to_string(pr.step) + "\n";
  }
  write_file_atomic(out / "threshold_trace.csv", csv);
  return kExitOk;
}

/// One row per (alpha, delta, amplitude), alpha slowest, amplitude fastest.
inline int cmd_sweep(const ExperimentConfig& cfg, const fs::path& out) {
  const SweepGrid grid = cfg.sweep.value_or(SweepGrid{{cfg.alpha}, {cfg.delta}, {cfg.amplitude}});
  const Field profile = make_profile(cfg.domain(), cfg.init, cfg.base_dir);

  struct Point {
    double alpha, delta, amplitude;
  };
  std::vector<Point> points;
  for (double al : grid.alpha)
    for (double de : grid.delta)
      for (double am : grid.amplitude) points.push_back({al, de, am});

  std::vector<std::string> rows(points.size());
  auto run_point = [&](std::size_t i) {
    const Point& pt = points[i];
    const Params p(pt.alpha, pt.delta);
    const Field a = profile.scaled(pt.amplitude);
    const auto report = simulate(a, p, cfg.steps, StepOptions{cfg.eps_blow});
    const auto bound = detail::bound_for(a, p);
    const std::size_t step =
        report.blew_up() ? report.blowup().step : std::get<Survived>(report.outcome).steps;
    rows[i] = format_double(pt.alpha) + "," + format_double(pt.delta) + "," +
              format_double(pt.amplitude) + "," + (report.blew_up() ? "blew_up" : "survived") +
              "," + std::to_string(step) + "," + to_string(bound.regime) + "," +
              format_double(bound.bound_value) + "\n";
  };

  const auto workers = static_cast<std::size_t>(std::max(1, grid.threads));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < points.size(); i = next++) run_point(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::string csv = "alpha,delta,amplitude,outcome,step,bound_regime,bound_value\n";
  for (const auto& r : rows) csv += r;
  write_file_atomic(out / "sweep.csv", csv);
  return kExitOk;
}

}  // namespace dsheat::app
