#pragma once

/// \file value_space.hpp
/// Normed vector spaces that evaluators map into.
///
/// A value type V participates by specializing ValueTraits<V> with
///   zero_like(v)        the additive identity shaped like v
///   axpy(a, x, acc)     acc += a * x
///   norm(v)             a norm of v
/// Scalars and dense vectors (sup norm) are provided.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "smolyak/error.hpp"

namespace smolyak {

template <class V>
struct ValueTraits;

template <>
struct ValueTraits<double> {
  static double zero_like(double) { return 0.0; }
  static void axpy(double a, const double& x, double& acc) { acc += a * x; }
  static double norm(double x) { return std::abs(x); }
};

/// Finite-dimensional samples of a function, with the maximum norm.
template <>
struct ValueTraits<std::vector<double>> {
  static std::vector<double> zero_like(const std::vector<double>& v) {
    return std::vector<double>(v.size(), 0.0);
  }
  static void axpy(double a, const std::vector<double>& x, std::vector<double>& acc) {
    if (x.size() != acc.size())
      throw InvalidArgument("vector length mismatch: " + std::to_string(x.size()) + " vs " +
                            std::to_string(acc.size()));
    for (std::size_t k = 0; k < x.size(); ++k) acc[k] += a * x[k];
  }
  static double norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

template <class V>
concept ValueSpace = std::copyable<V> && requires(const V& x, V& acc, double a) {
  { ValueTraits<V>::zero_like(x) } -> std::convertible_to<V>;
  ValueTraits<V>::axpy(a, x, acc);
  { ValueTraits<V>::norm(x) } -> std::convertible_to<double>;
};

template <ValueSpace V>
V zero_like(const V& v) {
  return ValueTraits<V>::zero_like(v);
}

template <ValueSpace V>
V add(const V& a, const V& b) {
  V r = a;
  ValueTraits<V>::axpy(1.0, b, r);
  return r;
}

template <ValueSpace V>
V scale(double alpha, const V& a) {
  V r = ValueTraits<V>::zero_like(a);
  ValueTraits<V>::axpy(alpha, a, r);
  return r;
}

template <ValueSpace V>
V subtract(const V& a, const V& b) {
  V r = a;
  ValueTraits<V>::axpy(-1.0, b, r);
  return r;
}

template <ValueSpace V>
double norm(const V& v) {
  return ValueTraits<V>::norm(v);
}

}  // namespace smolyak
