// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>

#include "dsheat/app/commands.hpp"
#include "test_support.hpp"

namespace {

using namespace dsheat;
using namespace dsheat::app;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Field constant_line(double v) {
  return Field::from_interior(BoxDomain({4}), [v](const MultiIndex&) { return v; });
}

Verdict golden_blowup() {
  const Field a = constant_line(0.9);
  const auto t0 = Clock::now();
  const auto report = simulate(a, Params(1.0, 1.0), 10);
  const double elapsed = seconds_since(t0);
  if (!report.blew_up()) return {false, "no blow-up detected"};
  const auto& b = report.blowup();
  // 0.9/(1-0.9) is 9.000000000000002 in double; the halving is exact.
  const double hand = (0.9 / (1.0 - 0.9)) / 2.0;
  const bool ok = b.step == 1 && b.site == MultiIndex{1} && b.g == hand &&
                  std::abs(b.g - 4.5) <= 4 * std::numeric_limits<double>::epsilon() * 4.5 &&
                  elapsed < 1e-3;
  return {ok, fmt("s0=%zu n0=%s g=%.17g (4.5 within 4 ulp) runtime=%.1f us", b.step,
                  to_string(b.site).c_str(), b.g, elapsed * 1e6)};
}

Verdict golden_step() {
  const auto next = step_nonlinear(constant_line(0.4), Params(1.0, 1.0));
  if (!std::holds_alternative<Field>(next)) return {false, "unexpected blow-up"};
  const Field& f = std::get<Field>(next);
  const double expected[] = {0.0, 0.25, 2.0 / 3.0, 0.25, 0.0};
  double err = 0.0;
  for (std::size_t i = 0; i < 5; ++i) err = std::max(err, std::abs(f[i] - expected[i]));
  return {err <= 1e-15, fmt("max error %.3g", err)};
}

Verdict lemma_suite() {
  const auto t0 = Clock::now();
  const auto suite = testing::lemma_suite(20240601, 100);
  double worst = std::numeric_limits<double>::infinity();
  int failures = 0;
  std::size_t checked = 0;
  for (const auto& inst : suite) {
    const auto v = verify_comparison(inst.a, inst.alpha, 50, 1e-12);
    if (!v.holds) ++failures;
    checked += v.steps_checked();
    for (double m : v.margins) {
      worst = std::min(worst, m);
      if (m < -1e-12) ++failures;
    }
  }
  const double elapsed = seconds_since(t0);
  return {failures == 0 && elapsed < 10.0,
          fmt("%d violations over %zu checked steps, min margin %.3g, runtime %.2f s", failures,
              checked, worst, elapsed)};
}

Verdict certificate_soundness() {
  int certified = 0, violations = 0;
  for (const auto& inst : testing::lemma_suite(20240601, 100)) {
    if (!certify(inst.a, inst.alpha).certifies()) continue;
    ++certified;
    if (simulate(inst.a, Params::normalized(inst.alpha), 10000).blew_up()) ++violations;
  }
  return {violations == 0 && certified > 0,
          fmt("%d certified instances survived 10^4 steps, %d violations", certified - violations,
              violations)};
}

Verdict spectral_equivalence() {
  SplitMix64 rng(5150);
  double worst_path = 0.0, worst_eigen = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const BoxDomain dom = testing::random_domain(rng, 3, 2, 8);
    const Field a = testing::random_field(dom, rng, 0.0, 1.0);
    const ModeTable modes(dom);
    const auto b = analyze(modes, a);
    Field direct = a;
    for (std::size_t s = 0; s <= 50; ++s) {
      worst_path = std::max(worst_path, testing::max_abs_diff(synthesize(modes, b, s), direct));
      direct = apply_averaging(direct);
    }
    worst_path = std::max(
        worst_path, testing::max_abs_diff(synthesize(modes, b, 50), step_linear_direct(a, 50)));
    const auto mode_list = dom.interior_sites();
    for (std::size_t i = 0; i < mode_list.size(); ++i) {
      const Field phi = modes.mode_field(mode_list[i]);
      const Field mphi = apply_averaging(phi);
      for (std::size_t flat = 0; flat < dom.site_count(); ++flat)
        worst_eigen =
            std::max(worst_eigen, std::abs(mphi[flat] - modes.eigenvalues()[i] * phi[flat]));
    }
  }
  return {worst_path <= 1e-9 && worst_eigen <= 1e-12,
          fmt("max path deviation %.3g, max eigen residual %.3g", worst_path, worst_eigen)};
}

Verdict round_trips() {
  SplitMix64 rng(6160);
  double worst_field = 0.0, worst_coeff = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const BoxDomain dom = testing::random_domain(rng, 3, 2, 8);
    const ModeTable modes(dom);
    const Field a = testing::random_field(dom, rng, -1.0, 1.0);
    worst_field =
        std::max(worst_field, testing::max_abs_diff(synthesize(modes, analyze(modes, a), 0), a));
    SpectralCoeffs b{dom, {}};
    for (std::size_t i = 0; i < dom.interior_count(); ++i) b.coeffs.push_back(rng.uniform(-1, 1));
    const auto again = analyze(modes, synthesize(modes, b, 0));
    for (std::size_t i = 0; i < b.coeffs.size(); ++i)
      worst_coeff = std::max(worst_coeff, std::abs(again.coeffs[i] - b.coeffs[i]));
  }
  return {worst_field <= 1e-10 && worst_coeff <= 1e-10,
          fmt("field round trip %.3g, coefficient round trip %.3g", worst_field, worst_coeff)};
}

Verdict bound_arithmetic() {
  const double value = bound_alpha_le_1(1.0, ModeTable(BoxDomain({4})), 1.0).bound_value;
  const double closed = 2.0 / (1.0 - std::numbers::sqrt2 / 2.0) + 1.0;
  int violations = 0;
  double tightest = 0.0;
  for (const auto& inst : testing::lemma_suite(20240601, 100)) {
    const double p_s = compute_trace(inst.a, inst.alpha, 1000).partial_sums.back();
    const double bound = certify(inst.a, inst.alpha).bound_value;
    if (p_s > bound) ++violations;
    if (bound > 0) tightest = std::max(tightest, p_s / bound);
  }
  const bool ok = std::abs(value - closed) <= 1e-6 && std::abs(value - 7.8284271) <= 1e-6 &&
                  violations == 0;
  return {ok, fmt("bound %.10f, dominance violations %d, max P_S/bound %.4f", value, violations,
                  tightest)};
}

Verdict monotonicity() {
  SplitMix64 rng(8080);
  const double alphas[] = {0.5, 1.0, 2.0};
  int bad_sweeps = 0, bad_brackets = 0, bracketed = 0;
  for (int combo = 0; combo < 20; ++combo) {
    const BoxDomain dom = testing::random_domain(rng, 2, 2, 7);
    Field profile = testing::random_field(dom, rng, 0.0, 1.0);
    if (combo % 4 == 0) profile = ModeTable(dom).mode_field(dom.interior_sites().front());
    const Params p(alphas[combo % 3], rng.uniform(0.5, 2.0));
    const std::size_t steps = 200;

    bool seen_blowup = false;
    for (int k = 1; k <= 40; ++k) {
      const double amp = 0.05 * k * p.threshold() / profile.max_value();
      const bool blew = simulate(profile.scaled(amp), p, steps).blew_up();
      if (seen_blowup && !blew) ++bad_sweeps;
      seen_blowup |= blew;
    }

    const double tol = 1e-3;
    const auto r = find_threshold(profile, p, steps, tol);
    if (!r.bracketed) {
      if (simulate(profile.scaled(r.ceiling), p, steps).blew_up()) ++bad_brackets;
      continue;
    }
    ++bracketed;
    const bool lower_survives = !simulate(profile.scaled(r.lower), p, steps).blew_up();
    const bool upper_blows = simulate(profile.scaled(r.upper), p, steps).blew_up();
    const bool narrow = r.upper - r.lower <= tol * r.lambda_star * (1 + 1e-12);
    bool probes_consistent = true;
    for (const auto& probe : r.probes) {
      if (probe.amplitude <= r.lower && probe.blew_up) probes_consistent = false;
      if (probe.amplitude >= r.upper && !probe.blew_up) probes_consistent = false;
    }
    if (!(lower_survives && upper_blows && narrow && probes_consistent)) ++bad_brackets;
  }
  return {bad_sweeps == 0 && bad_brackets == 0,
          fmt("20 combos, %d non-monotone transitions, %d inconsistent brackets (%d bracketed)",
              bad_sweeps, bad_brackets, bracketed)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  return files;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "dsheat_acceptance_determinism";
  fs::remove_all(root);
  std::vector<ExperimentConfig> configs;
  configs.push_back(load_config(fs::path(DSHEAT_CONFIG_DIR) / "sweep_2d.json"));
  ExperimentConfig random = load_config(fs::path(DSHEAT_CONFIG_DIR) / "small_random_3d.json");
  random.steps = 300;
  random.init.max_amplitude = 1.0;
  random.sweep = SweepGrid{{0.5, 1.0, 2.0}, {0.5, 1.0}, {}, 4};
  for (int k = 0; k <= 20; ++k) random.sweep->amplitude.push_back(0.1 * k);
  configs.push_back(random);

  int mismatches = 0;
  std::size_t files = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    ExperimentConfig cfg = configs[c];
    const fs::path a = root / std::to_string(c) / "a", b = root / std::to_string(c) / "b";
    for (const auto& cmd : {cmd_sweep, cmd_simulate, cmd_verify, cmd_bound, cmd_threshold}) {
      cmd(cfg, a);
    }
    cfg.sweep->threads = 1;  // a serial rerun must match the parallel one
    for (const auto& cmd : {cmd_sweep, cmd_simulate, cmd_verify, cmd_bound, cmd_threshold}) {
      cmd(cfg, b);
    }
    const auto sa = snapshot(a), sb = snapshot(b);
    files += sa.size();
    if (sa != sb) ++mismatches;
  }
  fs::remove_all(root);
  return {mismatches == 0 && files > 0,
          fmt("%zu output files compared across serial and parallel reruns, %d configs differ",
              files, mismatches)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"golden blow-up", golden_blowup},
      {"golden step values", golden_step},
      {"majorant comparison suite", lemma_suite},
      {"certificate soundness", certificate_soundness},
      {"spectral equivalence", spectral_equivalence},
      {"transform round trip", round_trips},
      {"bound arithmetic and dominance", bound_arithmetic},
      {"amplitude monotonicity and threshold brackets", monotonicity},
      {"sweep determinism", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", index, name,
                v.detail.c_str());
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
