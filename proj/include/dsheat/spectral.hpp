#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsheat/domain.hpp"
#include "dsheat/evolution.hpp"

namespace dsheat {

/// c = (1/d) sum_k cos(mode_k pi / N_k) for an interior mode.
inline double eigenvalue(const BoxDomain& domain, const MultiIndex& mode) {
  if (!domain.is_interior(mode))
    throw std::invalid_argument("eigenvalue: mode " + to_string(mode) + " is not interior");
  double sum = 0.0;
  for (int k = 0; k < domain.dims(); ++k)
    sum += std::cos(mode[static_cast<std::size_t>(k)] * std::numbers::pi / domain.extent(k));
  return sum / domain.dims();
}

/**
 * Discrete sine modes of the Dirichlet averaging operator on a box.
 *
 * Mode n' (an interior multi-index) has values prod_k sin(n'_k pi n_k / N_k)
 * at site n and eigenvalue eigenvalue(domain, n'). Modes and interior sites
 * share the lexicographic ordering of BoxDomain::interior_flat(). The table
 * keeps one (N_k - 1) x (N_k - 1) sine matrix per axis; products are formed
 * on demand.
 */
class ModeTable {
 public:
  explicit ModeTable(BoxDomain domain) : domain_(std::move(domain)) {
    const int d = domain_.dims();
    sines_.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const int n = domain_.extent(k);
      auto& table = sines_[static_cast<std::size_t>(k)];
      table.resize(static_cast<std::size_t>((n - 1) * (n - 1)));
      for (int m = 1; m < n; ++m)
        for (int j = 1; j < n; ++j)
          table[static_cast<std::size_t>((m - 1) * (n - 1) + (j - 1))] =
              std::sin(m * std::numbers::pi * j / n);
    }
    eigenvalues_.reserve(domain_.interior_count());
    for (std::size_t flat : domain_.interior_flat())
      eigenvalues_.push_back(eigenvalue(domain_, domain_.multi_index(flat)));
  }

  const BoxDomain& domain() const { return domain_; }
  std::size_t size() const { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  double max_abs_eigenvalue() const {
    double m = 0.0;
    for (double c : eigenvalues_) m = std::max(m, std::abs(c));
    return m;
  }

  /// sin(mode pi site / N_axis), 1 <= mode, site <= N_axis - 1.
  double axis_sine(int axis, int mode, int site) const {
    const int n = domain_.extent(axis);
    return sines_[static_cast<std::size_t>(axis)]
                 [static_cast<std::size_t>((mode - 1) * (n - 1) + (site - 1))];
  }

  double mode_value(const MultiIndex& mode, const MultiIndex& site) const {
    double v = 1.0;
    for (int k = 0; k < domain_.dims(); ++k)
      v *= axis_sine(k, mode[static_cast<std::size_t>(k)], site[static_cast<std::size_t>(k)]);
    return v;
  }

  /// The field of a single mode; zero on the boundary.
  Field mode_field(const MultiIndex& mode) const {
    if (!domain_.is_interior(mode))
      throw std::invalid_argument("mode_field: mode " + to_string(mode) + " is not interior");
    return Field::from_interior(domain_,
                                [&](const MultiIndex& n) { return mode_value(mode, n); });
  }

  /// out[i] = sum_j prod_k S_k[i_k][j_k] in[j] over interior-shaped arrays.
  /// S_k is symmetric, so the same map serves analysis and synthesis.
  std::vector<double> apply_sines(std::vector<double> values) const {
    const int d = domain_.dims();
    std::vector<double> scratch(values.size());
    // Strides of the interior array (shape N_k - 1), last axis fastest.
    std::vector<std::size_t> strides(static_cast<std::size_t>(d), 1);
    for (int k = d - 1; k > 0; --k)
      strides[static_cast<std::size_t>(k - 1)] =
          strides[static_cast<std::size_t>(k)] * static_cast<std::size_t>(domain_.extent(k) - 1);
    for (int k = 0; k < d; ++k) {
      const std::size_t len = static_cast<std::size_t>(domain_.extent(k) - 1);
      const std::size_t st = strides[static_cast<std::size_t>(k)];
      const auto& table = sines_[static_cast<std::size_t>(k)];
      for (std::size_t base = 0; base < values.size(); ++base) {
        if ((base / st) % len != 0) continue;  // visit each line along axis k once
        for (std::size_t i = 0; i < len; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < len; ++j) acc += table[i * len + j] * values[base + j * st];
          scratch[base + i * st] = acc;
        }
      }
      std::swap(values, scratch);
    }
    return values;
  }

 private:
  BoxDomain domain_;
  std::vector<std::vector<double>> sines_;
  std::vector<double> eigenvalues_;
};

/// Coefficients B_{n'} of a field in the sine basis, lexicographic in n'.
struct SpectralCoeffs {
  BoxDomain domain;
  std::vector<double> coeffs;

  double max_abs() const {
    double m = 0.0;
    for (double b : coeffs) m = std::max(m, std::abs(b));
    return m;
  }
};

/// One step of h_n <- (1/2d) sum_k (h_{n+e_k} + h_{n-e_k}); boundary stays 0.
inline Field apply_averaging(const Field& h) {
  if (!h.boundary_is_zero())
    throw ContractViolation("apply_averaging: boundary values must be zero");
  Field out(h.domain());
  for (std::size_t flat : h.domain().interior_flat()) out[flat] = neighbor_average(h, flat);
  return out;
}

/// Iterates apply_averaging `steps` times.
inline Field step_linear_direct(const Field& a, std::size_t steps) {
  if (!a.boundary_is_zero())
    throw ContractViolation("step_linear_direct: boundary values must be zero");
  Field h = a;
  Field next(a.domain());
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t flat : h.domain().interior_flat()) next[flat] = neighbor_average(h, flat);
    std::swap(h, next);
  }
  return h;
}

/**
 * Sine coefficients of the interior values of `a`.
 *
 * Uses orthogonality of the discrete sine modes,
 *   sum_{n=1}^{N-1} sin(m pi n / N) sin(m' pi n / N) = (N/2) delta_{m m'},
 * so B = prod_k (2 / N_k) * S a. Boundary values of `a` are ignored.
 */
inline SpectralCoeffs analyze(const ModeTable& modes, const Field& a) {
  const BoxDomain& dom = modes.domain();
  if (!(a.domain() == dom)) throw std::invalid_argument("analyze: field and mode table differ");
  std::vector<double> interior;
  interior.reserve(dom.interior_count());
  for (std::size_t flat : dom.interior_flat()) interior.push_back(a[flat]);
  auto coeffs = modes.apply_sines(std::move(interior));
  double norm = 1.0;
  for (int k = 0; k < dom.dims(); ++k) norm *= 2.0 / dom.extent(k);
  for (double& b : coeffs) b *= norm;
  return {dom, std::move(coeffs)};
}

inline SpectralCoeffs analyze(const Field& a) { return analyze(ModeTable(a.domain()), a); }

/// h^s_n = sum_{n'} B_{n'} c_{n'}^s prod_k sin(n'_k pi n_k / N_k).
inline Field synthesize(const ModeTable& modes, const SpectralCoeffs& b, std::size_t s) {
  const BoxDomain& dom = modes.domain();
  if (!(b.domain == dom) || b.coeffs.size() != modes.size())
    throw std::invalid_argument("synthesize: coefficients and mode table differ");
  std::vector<double> weighted(b.coeffs.size());
  const double power = static_cast<double>(s);
  for (std::size_t i = 0; i < weighted.size(); ++i)
    weighted[i] = b.coeffs[i] * std::pow(modes.eigenvalues()[i], power);
  const auto interior = modes.apply_sines(std::move(weighted));
  Field out(dom);
  const auto flats = dom.interior_flat();
  for (std::size_t i = 0; i < flats.size(); ++i) out[flats[i]] = interior[i];
  return out;
}

inline Field synthesize(const SpectralCoeffs& b, std::size_t s) {
  return synthesize(ModeTable(b.domain), b, s);
}

}  // namespace dsheat
