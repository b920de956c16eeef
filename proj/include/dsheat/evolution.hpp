#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dsheat/domain.hpp"

namespace dsheat {

/// Raised when an input breaks an operation's precondition (nonzero
/// boundary, negative or non-finite values). Never used to signal blow-up.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// x^a for x >= 0 and real a > 0, with 0^a = 0.
inline double nonneg_pow(double x, double a) {
  if (x == 0.0) return 0.0;
  return std::pow(x, a);
}

/// alpha, delta and the blow-up level (alpha*delta)^(-1/alpha).
class Params {
 public:
  Params(double alpha, double delta) : alpha_(alpha), delta_(delta) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("Params: alpha must be a finite number > 0");
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw std::invalid_argument("Params: delta must be a finite number > 0");
    alpha_delta_ = alpha * delta;
    threshold_ = alpha_delta_ == 1.0 ? 1.0 : std::pow(alpha_delta_, -1.0 / alpha);
  }

  /// (alpha, 1/alpha) with alpha*delta and the threshold pinned to exactly 1.
  static Params normalized(double alpha) {
    Params p(alpha, 1.0 / alpha);
    p.alpha_delta_ = 1.0;
    p.threshold_ = 1.0;
    return p;
  }

  double alpha() const { return alpha_; }
  double delta() const { return delta_; }
  double alpha_delta() const { return alpha_delta_; }
  double threshold() const { return threshold_; }

  /// The map x -> x / (1 - alpha*delta*x^alpha)^(1/alpha).
  double amplify(double g) const {
    const double denom = 1.0 - alpha_delta_ * nonneg_pow(g, alpha_);
    return g / (alpha_ == 1.0 ? denom : std::pow(denom, 1.0 / alpha_));
  }

 private:
  double alpha_;
  double delta_;
  double alpha_delta_;
  double threshold_;
};

/// Throws ContractViolation unless f is finite, nonnegative and zero on the boundary.
inline void require_solution_field(const Field& f, const char* who) {
  const BoxDomain& dom = f.domain();
  for (std::size_t flat = 0; flat < dom.site_count(); ++flat) {
    const double v = f[flat];
    if (!std::isfinite(v))
      throw ContractViolation(std::string(who) + ": non-finite value at " +
                              to_string(dom.multi_index(flat)));
    if (v < 0.0)
      throw ContractViolation(std::string(who) + ": negative value at " +
                              to_string(dom.multi_index(flat)));
    if (dom.is_boundary(flat) && v != 0.0)
      throw ContractViolation(std::string(who) + ": nonzero boundary value at " +
                              to_string(dom.multi_index(flat)));
  }
}

struct BlowupSignal {
  MultiIndex site;  // lexicographically first offending interior site
  double g = 0.0;
};

struct StepOptions {
  // Blow-up is also declared when 1 - alpha*delta*g^alpha <= eps_blow.
  double eps_blow = 0.0;
};

namespace detail {

struct StepOutcome {
  bool blew_up = false;
  std::size_t blowup_flat = 0;
  double blowup_g = 0.0;
  double max_g = 0.0;
};

// Evaluates g on the interior and, unless some site blows up, writes the next
// step into `next`. `next` must share the domain of `f`.
inline StepOutcome advance(const Field& f, const Params& p, const StepOptions& opt,
                           Field* next) {
  StepOutcome out;
  const double ad = p.alpha_delta();
  for (std::size_t flat : f.domain().interior_flat()) {
    const double g = neighbor_average(f, flat);
    out.max_g = std::max(out.max_g, g);
    const double denom = 1.0 - ad * nonneg_pow(g, p.alpha());
    if (!out.blew_up && (g >= p.threshold() || denom <= opt.eps_blow)) {
      out.blew_up = true;
      out.blowup_flat = flat;
      out.blowup_g = g;
    }
    if (!out.blew_up && next)
      (*next)[flat] = g / (p.alpha() == 1.0 ? denom : std::pow(denom, 1.0 / p.alpha()));
  }
  return out;
}

}  // namespace detail

/**
 * One step of f^{s+1}_n = g^s_n / {1 - alpha*delta*(g^s_n)^alpha}^{1/alpha}
 * on the interior, zero on the boundary.
 *
 * Returns the next field, or a BlowupSignal naming the lexicographically
 * first interior site whose neighbor average reaches the threshold.
 */
inline std::variant<Field, BlowupSignal> step_nonlinear(const Field& f, const Params& p,
                                                        const StepOptions& opt = {}) {
  require_solution_field(f, "step_nonlinear");
  Field next(f.domain());
  const auto res = detail::advance(f, p, opt, &next);
  if (res.blew_up)
    return BlowupSignal{f.domain().multi_index(res.blowup_flat), res.blowup_g};
  return next;
}

struct BlewUpAt {
  std::size_t step = 0;
  MultiIndex site;
  double g = 0.0;
};

struct Survived {
  std::size_t steps = 0;
};

struct TraceRecord {
  std::size_t step = 0;
  double max_f = 0.0;
  double max_g = 0.0;  // max over the interior of g^step
};

struct BlowupReport {
  std::variant<BlewUpAt, Survived> outcome;
  std::vector<TraceRecord> trace;
  Field last_field;  // f^{s0} when blown up, f^{steps} otherwise

  bool blew_up() const { return std::holds_alternative<BlewUpAt>(outcome); }
  const BlewUpAt& blowup() const { return std::get<BlewUpAt>(outcome); }
};

/**
 * Iterates the nonlinear update from `a`.
 *
 * g^s is checked for s = 0..max_steps. The first step where some interior
 * g reaches the threshold is reported as BlewUpAt (equality counts);
 * otherwise the result is Survived(max_steps), which only says that the
 * solution exists through step max_steps + 1.
 */
inline BlowupReport simulate(const Field& a, const Params& p, std::size_t max_steps,
                             const StepOptions& opt = {}) {
  require_solution_field(a, "simulate");
  Field current = a;
  Field next(a.domain());
  std::vector<TraceRecord> trace;
  trace.reserve(max_steps + 1);
  for (std::size_t s = 0;; ++s) {
    const bool last = s == max_steps;
    const auto res = detail::advance(current, p, opt, last ? nullptr : &next);
    trace.push_back({s, current.max_value(), res.max_g});
    if (res.blew_up) {
      BlewUpAt hit{s, a.domain().multi_index(res.blowup_flat), res.blowup_g};
      return {hit, std::move(trace), std::move(current)};
    }
    if (last) return {Survived{max_steps}, std::move(trace), std::move(current)};
    std::swap(current, next);
  }
}

/// (alpha*delta)^(1/alpha) a with parameters (alpha, 1/alpha), so the
/// threshold of the returned system is 1.
inline double scaling_factor(const Params& p) {
  const double ad = p.alpha_delta();
  return ad == 1.0 ? 1.0 : std::pow(ad, 1.0 / p.alpha());
}

inline std::pair<Field, Params> normalize_scaling(const Field& a, const Params& p) {
  return {a.scaled(scaling_factor(p)), Params::normalized(p.alpha())};
}

}  // namespace dsheat
