#pragma once

// Shared generators and independent oracles for the test suites. Nothing
// here calls into the code paths it is used to check.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "dsheat/domain.hpp"
#include "dsheat/random.hpp"

namespace dsheat::testing {

inline BoxDomain random_domain(SplitMix64& rng, int max_dims, int min_extent, int max_extent) {
  const int d = rng.uniform_int(1, max_dims);
  std::vector<int> ext;
  for (int k = 0; k < d; ++k) ext.push_back(rng.uniform_int(min_extent, max_extent));
  return BoxDomain(ext);
}

/// Interior values uniform in [lo, hi), boundary zero.
inline Field random_field(const BoxDomain& dom, SplitMix64& rng, double lo, double hi) {
  Field f(dom);
  for (std::size_t flat : dom.interior_flat()) f[flat] = rng.uniform(lo, hi);
  return f;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Dense interpolation matrix A[i][j] = prod_k sin(mode_j,k pi site_i,k / N_k),
/// rows indexed by interior site, columns by mode, both lexicographic.
inline Eigen::MatrixXd sine_matrix(const BoxDomain& dom) {
  const auto sites = dom.interior_sites();
  Eigen::MatrixXd A(sites.size(), sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = 0; j < sites.size(); ++j) {
      double v = 1.0;
      for (int k = 0; k < dom.dims(); ++k)
        v *= std::sin(sites[j][k] * std::numbers::pi * sites[i][k] / dom.extent(k));
      A(i, j) = v;
    }
  return A;
}

/// Coefficients by a dense LU solve of the sine interpolation system.
inline std::vector<double> dense_coefficients(const Field& a) {
  const BoxDomain& dom = a.domain();
  const auto flats = dom.interior_flat();
  Eigen::VectorXd rhs(flats.size());
  for (std::size_t i = 0; i < flats.size(); ++i) rhs(i) = a[flats[i]];
  const Eigen::VectorXd b = sine_matrix(dom).partialPivLu().solve(rhs);
  return {b.data(), b.data() + b.size()};
}

/// Neighbor average written out with explicit multi-index arithmetic.
inline double brute_neighbor_average(const Field& f, const MultiIndex& n) {
  double sum = 0.0;
  const int d = static_cast<int>(n.size());
  for (int k = 0; k < d; ++k) {
    MultiIndex up = n, down = n;
    ++up[k];
    --down[k];
    sum += f.at(up) + f.at(down);
  }
  return sum / (2.0 * d);
}

struct SuiteInstance {
  Field a;  // normalized data (alpha * delta = 1)
  double alpha;
};

/// d in {1,2,3}, N_k in [2,6], alpha in {0.5, 1, 2}, interior uniform in [0, 0.05).
inline std::vector<SuiteInstance> lemma_suite(std::uint64_t seed, int count) {
  SplitMix64 rng(seed);
  const double alphas[] = {0.5, 1.0, 2.0};
  std::vector<SuiteInstance> out;
  for (int i = 0; i < count; ++i) {
    const BoxDomain dom = random_domain(rng, 3, 2, 6);
    const double alpha = alphas[rng.uniform_int(0, 2)];
    out.push_back({random_field(dom, rng, 0.0, 0.05), alpha});
  }
  return out;
}

}  // namespace dsheat::testing
