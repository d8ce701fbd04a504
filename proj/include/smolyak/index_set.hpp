#pragma once

/// \file index_set.hpp
/// Finite multi-index sets, downward closure and level-set construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "smolyak/error.hpp"
#include "smolyak/multi_index.hpp"

namespace smolyak {

/// Default cap on the number of dimensions examined when an unbounded
/// ambient space is involved.
inline constexpr std::size_t kDefaultDimensionCap = 64;

/// A finite set of multi-indices, stored sorted in canonical order.
///
/// Immutable after construction; the downward-closure flag is computed once.
class IndexSet {
 public:
  explicit IndexSet(Dimension ambient = Dimension::unbounded()) : ambient_(ambient) {}

  IndexSet(Dimension ambient, std::vector<MultiIndex> members)
      : ambient_(ambient), members_(std::move(members)) {
    for (const auto& i : members_)
      if (!i.fits(ambient_))
        throw InvalidArgument("multi-index " + i.to_string() + " exceeds ambient dimension " +
                              ambient_.to_string());
    std::sort(members_.begin(), members_.end(), CanonicalLess{});
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    downward_closed_ = compute_downward_closed();
  }

  static IndexSet from_dense(std::size_t d, const std::vector<std::vector<MultiIndex::value_type>>& rows) {
    std::vector<MultiIndex> members;
    members.reserve(rows.size());
    for (const auto& r : rows) {
      if (r.size() != d)
        throw InvalidArgument("dense multi-index of length " + std::to_string(r.size()) +
                              " in a set of dimension " + std::to_string(d));
      members.push_back(MultiIndex::from_dense(r));
    }
    return IndexSet(Dimension::finite(d), std::move(members));
  }

  Dimension dimension() const { return ambient_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const MultiIndex> members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool contains(const MultiIndex& i) const {
    return std::binary_search(members_.begin(), members_.end(), i, CanonicalLess{});
  }

  bool is_downward_closed() const { return downward_closed_; }

  /// Sorted dimensions in which some member has a nonzero entry.
  std::vector<std::size_t> used_dimensions() const {
    std::vector<std::size_t> dims;
    for (const auto& i : members_)
      for (const auto& e : i.entries()) dims.push_back(e.dim);
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    return dims;
  }

  /// Copy with one more member.
  IndexSet with(const MultiIndex& i) const {
    std::vector<MultiIndex> members = members_;
    members.push_back(i);
    return IndexSet(ambient_, std::move(members));
  }

  bool is_subset_of(const IndexSet& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end(), CanonicalLess{});
  }

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.ambient_ == b.ambient_ && a.members_ == b.members_;
  }

 private:
  bool compute_downward_closed() const {
    for (const auto& i : members_)
      for (const auto& e : i.entries())
        if (!contains(i.decremented(e.dim))) return false;
    return true;
  }

  Dimension ambient_;
  std::vector<MultiIndex> members_;
  bool downward_closed_ = true;
};

inline bool is_downward_closed(const IndexSet& set) { return set.is_downward_closed(); }

/// { i - e_j : i_j > 0 }, in canonical order.
inline std::vector<MultiIndex> backward_neighbors(const MultiIndex& i) {
  std::vector<MultiIndex> result;
  result.reserve(i.support_size());
  for (const auto& e : i.entries()) result.push_back(i.decremented(e.dim));
  std::sort(result.begin(), result.end(), CanonicalLess{});
  return result;
}

/// All j outside `set` whose backward neighbors all lie in `set`, in
/// canonical order.
///
/// For an unbounded ambient dimension, dimension 0 and every dimension used by
/// a member are searched, plus the smallest dimension never used (one
/// representative for all interchangeable unused dimensions).
inline std::vector<MultiIndex> admissible_forward_neighbors(const IndexSet& set) {
  if (!set.is_downward_closed())
    throw InvalidArgument("admissible_forward_neighbors requires a downward-closed set");
  if (set.empty()) return {MultiIndex{}};

  std::vector<std::size_t> dims;
  if (set.dimension().is_finite()) {
    for (std::size_t d = 0; d < set.dimension().size(); ++d) dims.push_back(d);
  } else {
    dims = set.used_dimensions();
    if (dims.empty() || dims.front() != 0) dims.insert(dims.begin(), 0);
    std::size_t fresh = 0;
    while (std::binary_search(dims.begin(), dims.end(), fresh)) ++fresh;
    dims.insert(std::lower_bound(dims.begin(), dims.end(), fresh), fresh);
  }

  std::vector<MultiIndex> result;
  for (const auto& i : set) {
    for (std::size_t d : dims) {
      MultiIndex j = i.incremented(d);
      if (set.contains(j)) continue;
      bool admissible = true;
      for (const auto& e : j.entries())
        if (!set.contains(j.decremented(e.dim))) {
          admissible = false;
          break;
        }
      if (admissible) result.push_back(std::move(j));
    }
  }
  std::sort(result.begin(), result.end(), CanonicalLess{});
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

namespace detail {

// Inclusion test for sum_j weight_j * i_j <= L with a relative slack so that
// exactly representable boundary cases (e.g. 1/3 + 2/3) are not lost.
inline bool within_level(double weighted_sum, double level) {
  return weighted_sum <= level + 1e-12 * std::max(1.0, std::abs(level));
}

inline void enumerate_level_set(std::span<const double> weights, std::span<const std::size_t> dims,
                                double level, std::size_t pos, double partial,
                                MultiIndex& current, std::vector<MultiIndex>& out) {
  if (pos == dims.size()) {
    out.push_back(current);
    return;
  }
  const std::size_t dim = dims[pos];
  for (MultiIndex::value_type v = 0;; ++v) {
    const double s = partial + weights[pos] * v;
    if (!within_level(s, level)) break;
    current.set(dim, v);
    enumerate_level_set(weights, dims, level, pos + 1, s, current, out);
  }
  current.set(dim, 0);
}

}  // namespace detail

/// { i in N^d : sum_j weights_j i_j <= level }.
inline IndexSet weighted_level_set(std::span<const double> weights, double level) {
  for (double w : weights)
    if (!(w > 0)) throw InvalidArgument("weighted_level_set: weights must be positive");
  if (!(level >= 0)) throw InvalidArgument("weighted_level_set: level must be nonnegative");
  std::vector<std::size_t> dims(weights.size());
  for (std::size_t d = 0; d < dims.size(); ++d) dims[d] = d;
  std::vector<MultiIndex> members;
  MultiIndex current;
  if (!weights.empty())
    detail::enumerate_level_set(weights, dims, level, 0, 0.0, current, members);
  else
    members.emplace_back();
  return IndexSet(Dimension::finite(weights.size()), std::move(members));
}

inline IndexSet weighted_level_set(const std::vector<double>& weights, double level) {
  return weighted_level_set(std::span<const double>(weights), level);
}

/// Finitely supported version: { i : sum_j weight(j) i_j <= level } over an
/// unbounded number of dimensions. `weight` (0-based dimension) must be
/// nondecreasing; scanning stops at the first dimension whose weight exceeds
/// the level. Throws if that does not happen within `dimension_cap`
/// dimensions.
inline IndexSet weighted_level_set(const std::function<double(std::size_t)>& weight, double level,
                                   std::size_t dimension_cap = kDefaultDimensionCap) {
  if (!(level >= 0)) throw InvalidArgument("weighted_level_set: level must be nonnegative");
  std::vector<double> active;
  double previous = 0;
  for (std::size_t d = 0;; ++d) {
    if (d == dimension_cap)
      throw InvalidArgument("weighted_level_set: weights do not exceed the level within " +
                            std::to_string(dimension_cap) + " dimensions; set may be infinite");
    const double w = weight(d);
    if (!(w > 0)) throw InvalidArgument("weighted_level_set: weights must be positive");
    if (w < previous) throw InvalidArgument("weighted_level_set: weights must be nondecreasing");
    previous = w;
    if (!detail::within_level(w, level)) break;
    active.push_back(w);
  }
  std::vector<std::size_t> dims(active.size());
  for (std::size_t d = 0; d < dims.size(); ++d) dims[d] = d;
  std::vector<MultiIndex> members;
  MultiIndex current;
  if (!active.empty())
    detail::enumerate_level_set(active, dims, level, 0, 0.0, current, members);
  else
    members.emplace_back();
  return IndexSet(Dimension::unbounded(), std::move(members));
}

/// The simplex { |i|_1 <= level } in d dimensions.
inline IndexSet simplex_set(std::size_t d, unsigned level) {
  return weighted_level_set(std::vector<double>(d, 1.0), static_cast<double>(level));
}

/// The box { 0 <= i <= bound } componentwise, bound given densely.
inline IndexSet box_set(const std::vector<MultiIndex::value_type>& bound) {
  std::vector<MultiIndex> members;
  std::vector<MultiIndex::value_type> cur(bound.size(), 0);
  if (bound.empty()) return IndexSet(Dimension::finite(0), {MultiIndex{}});
  while (true) {
    members.push_back(MultiIndex::from_dense(cur));
    std::size_t d = 0;
    while (d < bound.size() && cur[d] == bound[d]) cur[d++] = 0;
    if (d == bound.size()) break;
    ++cur[d];
  }
  return IndexSet(Dimension::finite(bound.size()), std::move(members));
}

}  // namespace smolyak
