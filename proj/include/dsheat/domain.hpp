#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dsheat {

using MultiIndex = std::vector<int>;

inline std::string to_string(const MultiIndex& n) {
  std::string out = "(";
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(n[k]);
  }
  return out + ")";
}

/**
 * The box lattice {n in Z^d : 0 <= n_k <= N_k}.
 *
 * Sites are stored in lexicographic order over (n_1, ..., n_d), last axis
 * fastest. A site is interior when 0 < n_k < N_k on every axis; everything
 * else is boundary. Interior sites are cached as flat indices in the same
 * lexicographic order, which is also the mode order used by the spectral
 * code.
 */
class BoxDomain {
 public:
  explicit BoxDomain(std::vector<int> extents) {
    auto layout = std::make_shared<Layout>();
    layout->extents = std::move(extents);
    auto& ext = layout->extents;
    if (ext.empty())
      throw std::invalid_argument("BoxDomain: need at least one axis");
    for (std::size_t k = 0; k < ext.size(); ++k) {
      if (ext[k] < 2)
        throw std::invalid_argument("BoxDomain: extent N_" + std::to_string(k + 1) +
                                    " = " + std::to_string(ext[k]) + " must be >= 2");
    }
    auto& strides = layout->strides;
    strides.assign(ext.size(), 1);
    for (std::size_t k = ext.size() - 1; k > 0; --k)
      strides[k - 1] = strides[k] * static_cast<std::size_t>(ext[k] + 1);
    layout->site_count = strides[0] * static_cast<std::size_t>(ext[0] + 1);

    layout->is_interior.assign(layout->site_count, false);
    MultiIndex n(ext.size(), 0);
    for (std::size_t flat = 0; flat < layout->site_count; ++flat) {
      bool inside = true;
      for (std::size_t k = 0; k < n.size(); ++k)
        inside = inside && n[k] > 0 && n[k] < ext[k];
      if (inside) {
        layout->is_interior[flat] = true;
        layout->interior.push_back(flat);
      }
      for (std::size_t k = n.size(); k-- > 0;) {
        if (++n[k] <= ext[k]) break;
        n[k] = 0;
      }
    }
    layout_ = std::move(layout);
  }

  int dims() const { return static_cast<int>(layout_->extents.size()); }
  const std::vector<int>& extents() const { return layout_->extents; }
  int extent(int axis) const { return layout_->extents.at(static_cast<std::size_t>(axis)); }

  /// Offset in flat storage of a unit step along `axis`.
  std::size_t stride(int axis) const { return layout_->strides.at(static_cast<std::size_t>(axis)); }

  std::size_t site_count() const { return layout_->site_count; }

  std::size_t interior_count() const {
    std::size_t count = 1;
    for (int e : layout_->extents) count *= static_cast<std::size_t>(e - 1);
    return count;
  }

  bool contains(const MultiIndex& n) const {
    if (n.size() != layout_->extents.size()) return false;
    for (std::size_t k = 0; k < n.size(); ++k)
      if (n[k] < 0 || n[k] > layout_->extents[k]) return false;
    return true;
  }

  bool is_interior(const MultiIndex& n) const {
    return contains(n) && layout_->is_interior[flat_index(n)];
  }
  bool is_interior(std::size_t flat) const { return layout_->is_interior.at(flat); }
  bool is_boundary(std::size_t flat) const { return !layout_->is_interior.at(flat); }

  std::size_t flat_index(const MultiIndex& n) const {
    if (!contains(n))
      throw std::out_of_range("BoxDomain: site " + to_string(n) + " outside the box");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < n.size(); ++k)
      flat += static_cast<std::size_t>(n[k]) * layout_->strides[k];
    return flat;
  }

  MultiIndex multi_index(std::size_t flat) const {
    if (flat >= layout_->site_count) throw std::out_of_range("BoxDomain: flat index out of range");
    MultiIndex n(layout_->extents.size());
    for (std::size_t k = 0; k < n.size(); ++k) {
      n[k] = static_cast<int>(flat / layout_->strides[k]);
      flat %= layout_->strides[k];
    }
    return n;
  }

  /// Flat indices of the interior, lexicographic.
  std::span<const std::size_t> interior_flat() const { return layout_->interior; }

  /// Interior sites, lexicographic.
  std::vector<MultiIndex> interior_sites() const {
    std::vector<MultiIndex> out;
    out.reserve(layout_->interior.size());
    for (std::size_t flat : layout_->interior) out.push_back(multi_index(flat));
    return out;
  }

  /// Position of an interior flat index within interior_flat(), i.e. the
  /// index of the matching mode / coefficient.
  std::size_t interior_rank(std::size_t flat) const {
    auto it = std::lower_bound(layout_->interior.begin(), layout_->interior.end(), flat);
    if (it == layout_->interior.end() || *it != flat)
      throw std::invalid_argument("BoxDomain: site is not interior");
    return static_cast<std::size_t>(it - layout_->interior.begin());
  }

  friend bool operator==(const BoxDomain& a, const BoxDomain& b) {
    return a.layout_ == b.layout_ || a.layout_->extents == b.layout_->extents;
  }

 private:
  // Immutable after construction; copies of a BoxDomain share it.
  struct Layout {
    std::vector<int> extents;
    std::vector<std::size_t> strides;
    std::size_t site_count = 0;
    std::vector<bool> is_interior;
    std::vector<std::size_t> interior;
  };
  std::shared_ptr<const Layout> layout_;
};

/// Real values on every site of a BoxDomain, boundary included.
class Field {
 public:
  explicit Field(BoxDomain domain)
      : domain_(std::move(domain)), values_(domain_.site_count(), 0.0) {}

  Field(BoxDomain domain, std::vector<double> values)
      : domain_(std::move(domain)), values_(std::move(values)) {
    if (values_.size() != domain_.site_count())
      throw std::invalid_argument("Field: expected " + std::to_string(domain_.site_count()) +
                                  " values, got " + std::to_string(values_.size()));
  }

  const BoxDomain& domain() const { return domain_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }
  double at(const MultiIndex& n) const { return values_[domain_.flat_index(n)]; }
  double& at(const MultiIndex& n) { return values_[domain_.flat_index(n)]; }

  double max_value() const { return *std::max_element(values_.begin(), values_.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  double max_interior() const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t flat : domain_.interior_flat()) m = std::max(m, values_[flat]);
    return m;
  }

  bool boundary_is_zero() const {
    for (std::size_t flat = 0; flat < values_.size(); ++flat)
      if (domain_.is_boundary(flat) && values_[flat] != 0.0) return false;
    return true;
  }

  Field scaled(double factor) const {
    Field out = *this;
    for (double& v : out.values_) v *= factor;
    return out;
  }

  /// Builds a field from a function of the multi-index; the boundary is
  /// forced to zero.
  static Field from_interior(const BoxDomain& domain,
                             const std::function<double(const MultiIndex&)>& fn) {
    Field out(domain);
    for (std::size_t flat : domain.interior_flat()) out[flat] = fn(domain.multi_index(flat));
    return out;
  }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  BoxDomain domain_;
  std::vector<double> values_;
};

/// g_n = (1/2d) * sum_k (f_{n+e_k} + f_{n-e_k}) at an interior flat index.
inline double neighbor_average(const Field& f, std::size_t flat) {
  const BoxDomain& dom = f.domain();
  double sum = 0.0;
  for (int k = 0; k < dom.dims(); ++k) {
    const std::size_t st = dom.stride(k);
    sum += f[flat + st] + f[flat - st];
  }
  return sum / (2.0 * dom.dims());
}

inline double neighbor_average(const Field& f, const MultiIndex& n) {
  if (!f.domain().is_interior(n))
    throw std::invalid_argument("neighbor_average: site " + to_string(n) + " is not interior");
  return neighbor_average(f, f.domain().flat_index(n));
}

}  // namespace dsheat
