#pragma once

/// \file multi_index.hpp
/// Sparse multi-indices over a finite or unbounded number of discretization
/// parameters.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolyak/error.hpp"

namespace smolyak {

/// Number of discretization parameters of a method: either a fixed count or
/// "unbounded", in which case indices are finitely supported sequences.
class Dimension {
 public:
  static constexpr Dimension finite(std::size_t d) { return Dimension(d); }
  static constexpr Dimension unbounded() { return Dimension(kUnbounded); }

  constexpr bool is_finite() const { return size_ != kUnbounded; }
  /// Number of parameters; only meaningful when is_finite().
  constexpr std::size_t size() const { return size_; }
  /// Whether parameter `dim` (0-based) exists in this ambient space.
  constexpr bool contains(std::size_t dim) const { return dim < size_; }

  friend constexpr bool operator==(Dimension, Dimension) = default;

  std::string to_string() const {
    return is_finite() ? std::to_string(size_) : std::string("unbounded");
  }

 private:
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();
  constexpr explicit Dimension(std::size_t d) : size_(d) {}
  std::size_t size_;
};

/// A multi-index i = (i_0, i_1, ...) with finitely many nonzero entries.
///
/// Only nonzero entries are stored, sorted by dimension, so the same type
/// serves both finite and unbounded ambient dimension. Dense access returns 0
/// for absent dimensions.
class MultiIndex {
 public:
  using value_type = std::uint32_t;
  struct Entry {
    std::size_t dim;
    value_type value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  MultiIndex() = default;

  /// Dense construction: MultiIndex{2, 0, 1}.
  MultiIndex(std::initializer_list<value_type> dense)
      : MultiIndex(from_dense(std::span<const value_type>(dense.begin(), dense.size()))) {}

  static MultiIndex from_dense(std::span<const value_type> dense) {
    MultiIndex result;
    for (std::size_t d = 0; d < dense.size(); ++d)
      if (dense[d] != 0) result.entries_.push_back({d, dense[d]});
    return result;
  }

  static MultiIndex from_dense(const std::vector<value_type>& dense) {
    return from_dense(std::span<const value_type>(dense));
  }

  /// Sparse construction; entries may come in any order but dimensions must
  /// be distinct. Zero values are discarded.
  static MultiIndex from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.dim < b.dim; });
    MultiIndex result;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (k > 0 && entries[k].dim == entries[k - 1].dim)
        throw InvalidArgument("duplicate dimension " + std::to_string(entries[k].dim) +
                              " in multi-index");
      if (entries[k].value != 0) result.entries_.push_back(entries[k]);
    }
    return result;
  }

  /// The unit index e_dim.
  static MultiIndex unit(std::size_t dim) {
    MultiIndex result;
    result.entries_.push_back({dim, 1});
    return result;
  }

  value_type operator[](std::size_t dim) const {
    auto it = find(dim);
    return (it != entries_.end() && it->dim == dim) ? it->value : 0;
  }

  void set(std::size_t dim, value_type value) {
    auto it = find(dim);
    if (it != entries_.end() && it->dim == dim) {
      if (value == 0)
        entries_.erase(it);
      else
        it->value = value;
    } else if (value != 0) {
      entries_.insert(it, Entry{dim, value});
    }
  }

  MultiIndex incremented(std::size_t dim, value_type by = 1) const {
    MultiIndex result = *this;
    result.set(dim, (*this)[dim] + by);
    return result;
  }

  /// i - e_dim; requires i_dim > 0.
  MultiIndex decremented(std::size_t dim) const {
    const value_type v = (*this)[dim];
    if (v == 0)
      throw InvalidArgument("cannot decrement zero entry " + std::to_string(dim));
    MultiIndex result = *this;
    result.set(dim, v - 1);
    return result;
  }

  std::span<const Entry> entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  std::uint64_t l1() const {
    std::uint64_t s = 0;
    for (const auto& e : entries_) s += e.value;
    return s;
  }

  /// One past the largest dimension with a nonzero entry (0 for the zero index).
  std::size_t extent() const { return entries_.empty() ? 0 : entries_.back().dim + 1; }

  bool fits(Dimension ambient) const { return !ambient.is_finite() || extent() <= ambient.size(); }

  std::vector<value_type> to_dense(std::size_t d) const {
    if (extent() > d)
      throw InvalidArgument("multi-index " + to_string() + " does not fit dimension " +
                            std::to_string(d));
    std::vector<value_type> dense(d, 0);
    for (const auto& e : entries_) dense[e.dim] = e.value;
    return dense;
  }

  /// Componentwise i <= j.
  bool componentwise_leq(const MultiIndex& other) const {
    for (const auto& e : entries_)
      if (e.value > other[e.dim]) return false;
    return true;
  }

  /// "(1,0,2)" style for small extents, "{3:1,70:2}" for sparse indices.
  std::string to_string() const {
    std::string s;
    if (extent() <= 8) {
      s = "(";
      const std::size_t n = std::max<std::size_t>(extent(), 1);
      for (std::size_t d = 0; d < n; ++d) {
        if (d) s += ',';
        s += std::to_string((*this)[d]);
      }
      return s + ")";
    }
    s = "{";
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (k) s += ',';
      s += std::to_string(entries_[k].dim) + ":" + std::to_string(entries_[k].value);
    }
    return s + "}";
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<Entry>::iterator find(std::size_t dim) {
    return std::lower_bound(entries_.begin(), entries_.end(), dim,
                            [](const Entry& e, std::size_t d) { return e.dim < d; });
  }
  std::vector<Entry>::const_iterator find(std::size_t dim) const {
    return std::lower_bound(entries_.begin(), entries_.end(), dim,
                            [](const Entry& e, std::size_t d) { return e.dim < d; });
  }

  std::vector<Entry> entries_;
};

/// Lexicographic comparison of the dense representations.
inline std::strong_ordering lexicographic_compare(const MultiIndex& a, const MultiIndex& b) {
  auto ea = a.entries();
  auto eb = b.entries();
  std::size_t p = 0, q = 0;
  while (p < ea.size() || q < eb.size()) {
    const std::size_t da = p < ea.size() ? ea[p].dim : std::numeric_limits<std::size_t>::max();
    const std::size_t db = q < eb.size() ? eb[q].dim : std::numeric_limits<std::size_t>::max();
    const std::size_t dim = std::min(da, db);
    const auto va = da == dim ? ea[p].value : 0u;
    const auto vb = db == dim ? eb[q].value : 0u;
    if (va != vb) return va <=> vb;
    if (da == dim) ++p;
    if (db == dim) ++q;
  }
  return std::strong_ordering::equal;
}

/// Canonical total order: by |i|_1, then lexicographic. Every reduction in the
/// library runs in this order.
inline std::strong_ordering canonical_compare(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.l1() <=> b.l1(); c != 0) return c;
  return lexicographic_compare(a, b);
}

struct CanonicalLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return canonical_compare(a, b) < 0;
  }
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& i) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull;
    for (const auto& e : i.entries()) {
      h ^= std::hash<std::size_t>{}(e.dim) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h ^= std::hash<std::uint32_t>{}(e.value) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace smolyak
