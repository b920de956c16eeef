#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsheat/domain.hpp"
#include "dsheat/evolution.hpp"
#include "dsheat/spectral.hpp"

// Everything here works on the normalized system (alpha * delta = 1,
// threshold 1). Use normalize_scaling() on raw data first.

namespace dsheat {

/// m_s = max over the interior of the linear solution h^s, and the running
/// sums P_s = sum_{k<=s} |m_k|^alpha.
struct MajorantTrace {
  double alpha = 1.0;
  std::vector<double> m;
  std::vector<double> partial_sums;
  // Largest s with P_s < 1; empty when already P_0 >= 1.
  std::optional<std::size_t> defined_up_to;

  std::size_t horizon() const { return m.empty() ? 0 : m.size() - 1; }
  bool defined_everywhere() const { return defined_up_to && *defined_up_to == horizon(); }
  bool defined_at(std::size_t s) const { return defined_up_to && s <= *defined_up_to; }
};

inline MajorantTrace compute_trace(const Field& a, double alpha, std::size_t steps) {
  require_solution_field(a, "compute_trace");
  if (!(alpha > 0.0)) throw std::invalid_argument("compute_trace: alpha must be > 0");
  MajorantTrace trace;
  trace.alpha = alpha;
  trace.m.reserve(steps + 1);
  trace.partial_sums.reserve(steps + 1);
  Field h = a;
  Field next(a.domain());
  double sum = 0.0;
  for (std::size_t s = 0; s <= steps; ++s) {
    if (s > 0) {
      for (std::size_t flat : h.domain().interior_flat()) next[flat] = neighbor_average(h, flat);
      std::swap(h, next);
    }
    const double m = h.max_interior();
    sum += nonneg_pow(std::abs(m), alpha);
    trace.m.push_back(m);
    trace.partial_sums.push_back(sum);
    if (sum < 1.0) trace.defined_up_to = s;
  }
  return trace;
}

/// f̄^s = h^s / (1 - P_s)^(1/alpha). Throws std::domain_error when P_s >= 1.
inline Field majorant_field(const MajorantTrace& trace, const Field& h_s, std::size_t s) {
  if (!trace.defined_at(s))
    throw std::domain_error("majorant_field: undefined at step " + std::to_string(s) +
                            " (partial sum has reached 1)");
  const double denom = 1.0 - trace.partial_sums[s];
  const double scale = trace.alpha == 1.0 ? denom : std::pow(denom, 1.0 / trace.alpha);
  Field out = h_s;
  for (double& v : out.values()) v /= scale;
  return out;
}

struct ComparisonFailure {
  std::size_t step = 0;
  MultiIndex site;
  double majorant = 0.0;
  double solution = 0.0;
  std::string reason;
};

struct ComparisonVerdict {
  bool holds = true;
  std::size_t steps_requested = 0;
  std::optional<std::size_t> defined_up_to;
  bool truncated = false;             // majorant undefined before steps_requested
  std::vector<double> margins;        // min over interior n of (f̄^s_n - f^s_n), s = 0.. checked
  std::vector<double> partial_sums;   // P_s over the whole requested horizon
  std::optional<ComparisonFailure> failure;

  std::size_t steps_checked() const { return margins.size(); }
};

/**
 * Runs the nonlinear solution (alpha, delta = 1/alpha) next to its majorant
 * and checks, for every s <= min(steps, defined_up_to), that f^s exists and
 * f̄^s_n >= f^s_n - slack * max(1, f̄^s_n) on every site.
 *
 * A failure is recorded, not thrown; it can only come from a bug.
 */
inline ComparisonVerdict verify_comparison(const Field& a, double alpha, std::size_t steps,
                                           double slack = 1e-12) {
  const MajorantTrace trace = compute_trace(a, alpha, steps);
  ComparisonVerdict verdict;
  verdict.steps_requested = steps;
  verdict.defined_up_to = trace.defined_up_to;
  verdict.partial_sums = trace.partial_sums;
  verdict.truncated = !trace.defined_everywhere();
  if (!trace.defined_up_to) return verdict;

  const std::size_t last = std::min(steps, *trace.defined_up_to);
  const Params p = Params::normalized(alpha);
  const BoxDomain& dom = a.domain();
  Field h = a;
  Field f = a;
  Field next(dom);
  for (std::size_t s = 0; s <= last; ++s) {
    if (s > 0) {
      h = apply_averaging(h);
      const auto res = detail::advance(f, p, StepOptions{}, &next);
      if (res.blew_up) {
        verdict.holds = false;
        verdict.failure = ComparisonFailure{s - 1, dom.multi_index(res.blowup_flat),
                                            std::numeric_limits<double>::quiet_NaN(),
                                            res.blowup_g,
                                            "nonlinear solution blew up while P_s < 1"};
        return verdict;
      }
      std::swap(f, next);
    }
    const Field bar = majorant_field(trace, h, s);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t flat = 0; flat < dom.site_count(); ++flat) {
      const double diff = bar[flat] - f[flat];
      if (dom.is_interior(flat)) margin = std::min(margin, diff);
      if (diff < -slack * std::max(1.0, bar[flat]) && !verdict.failure) {
        verdict.holds = false;
        verdict.failure = ComparisonFailure{s, dom.multi_index(flat), bar[flat], f[flat],
                                            "majorant below solution"};
      }
    }
    verdict.margins.push_back(margin);
    if (verdict.failure) return verdict;
  }
  return verdict;
}

enum class BoundRegime { AlphaAtMostOne, AlphaAboveOne };

inline const char* to_string(BoundRegime r) {
  return r == BoundRegime::AlphaAtMostOne ? "alpha_le_1" : "alpha_gt_1";
}

/// Upper bound on sum_{k>=0} |m_k|^alpha. A value below 1 certifies that the
/// nonlinear solution never blows up.
struct BoundReport {
  BoundRegime regime = BoundRegime::AlphaAtMostOne;
  double bound_value = 0.0;
  std::optional<std::size_t> s0_tail;  // alpha > 1 only
  double b_max = 0.0;

  bool certifies() const { return bound_value < 1.0; }
};

/// B^alpha * sum_{n'} 1 / (1 - |c_{n'}|^alpha), from (x+y)^a <= x^a + y^a.
inline BoundReport bound_alpha_le_1(double b_max, const ModeTable& modes, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("bound_alpha_le_1: needs 0 < alpha <= 1");
  double sum = 0.0;
  for (double c : modes.eigenvalues()) sum += 1.0 / (1.0 - nonneg_pow(std::abs(c), alpha));
  return {BoundRegime::AlphaAtMostOne, nonneg_pow(std::abs(b_max), alpha) * sum, std::nullopt,
          b_max};
}

/// Smallest s with sum_{n'} |c_{n'}|^s < 1 (0^0 counts as 1).
inline std::size_t tail_start(const ModeTable& modes) {
  for (std::size_t s = 0;; ++s) {
    double sum = 0.0;
    for (double c : modes.eigenvalues()) sum += std::pow(std::abs(c), static_cast<double>(s));
    if (sum < 1.0) return s;
  }
}

/**
 * sum_{k<s0} |m_k|^alpha + B^alpha sum_{n'} |c_{n'}|^{s0} / (1 - |c_{n'}|),
 * with s0 = tail_start(modes). `m_prefix` must hold at least m_0..m_{s0-1}.
 */
inline BoundReport bound_alpha_gt_1(double b_max, const ModeTable& modes, double alpha,
                                    const std::vector<double>& m_prefix) {
  if (!(alpha > 1.0)) throw std::invalid_argument("bound_alpha_gt_1: needs alpha > 1");
  const std::size_t s0 = tail_start(modes);
  if (m_prefix.size() < s0)
    throw std::invalid_argument("bound_alpha_gt_1: need m_0..m_" + std::to_string(s0 - 1) +
                                ", got " + std::to_string(m_prefix.size()) + " values");
  double head = 0.0;
  for (std::size_t k = 0; k < s0; ++k) head += nonneg_pow(std::abs(m_prefix[k]), alpha);
  double tail = 0.0;
  for (double c : modes.eigenvalues()) {
    const double ac = std::abs(c);
    tail += std::pow(ac, static_cast<double>(s0)) / (1.0 - ac);
  }
  return {BoundRegime::AlphaAboveOne, head + nonneg_pow(std::abs(b_max), alpha) * tail, s0,
          b_max};
}

/// Picks the regime from alpha and evaluates the bound for normalized data `a`.
inline BoundReport certify(const Field& a, double alpha) {
  const ModeTable modes(a.domain());
  const double b_max = analyze(modes, a).max_abs();
  if (alpha <= 1.0) return bound_alpha_le_1(b_max, modes, alpha);
  const auto trace = compute_trace(a, alpha, tail_start(modes));
  return bound_alpha_gt_1(b_max, modes, alpha, trace.m);
}

struct ThresholdProbe {
  double amplitude = 0.0;
  bool blew_up = false;
  std::size_t step = 0;  // blow-up step, or the survived horizon
};

struct ThresholdResult {
  double lambda_star = 0.0;
  bool bracketed = false;  // false: no blow-up even at the ceiling
  double ceiling = 0.0;    // amplitude where max(amplitude * profile) = threshold
  double lower = 0.0;      // last surviving amplitude
  double upper = 0.0;      // last blowing-up amplitude
  std::vector<ThresholdProbe> probes;
};

/**
 * Bisection on the amplitude of `profile` for the onset of blow-up within
 * `steps` steps. On return (when bracketed), lambda_star * (1 + tol)
 * blows up and lambda_star * (1 - tol) survives, by monotonicity of the
 * dynamics in the initial data.
 */
inline ThresholdResult find_threshold(const Field& profile, const Params& p, std::size_t steps,
                                      double tol, const StepOptions& opt = {}) {
  require_solution_field(profile, "find_threshold");
  if (!(tol > 0.0) || !(tol < 1.0))
    throw std::invalid_argument("find_threshold: tol must lie in (0, 1)");
  const double peak = profile.max_value();
  if (!(peak > 0.0)) throw std::invalid_argument("find_threshold: profile is identically zero");

  ThresholdResult result;
  result.ceiling = p.threshold() / peak;
  auto probe = [&](double amplitude) {
    const auto report = simulate(profile.scaled(amplitude), p, steps, opt);
    ThresholdProbe pr{amplitude, report.blew_up(),
                      report.blew_up() ? report.blowup().step : steps};
    result.probes.push_back(pr);
    return pr.blew_up;
  };

  if (!probe(result.ceiling)) {
    result.lambda_star = result.ceiling;
    result.lower = result.ceiling;
    result.upper = result.ceiling;
    return result;
  }
  result.bracketed = true;
  double lo = 0.0;
  double hi = result.ceiling;
  for (int iter = 0; iter < 200 && hi - lo > tol * 0.5 * (lo + hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    (probe(mid) ? hi : lo) = mid;
  }
  result.lower = lo;
  result.upper = hi;
  result.lambda_star = 0.5 * (lo + hi);
  return result;
}

}  // namespace dsheat
