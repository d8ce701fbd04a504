#pragma once

/// \file evaluator.hpp
/// The black-box interface to a multi-parameter numerical method
/// N : multi-index -> (value, work).

#include <concepts>
#include <string>
#include <type_traits>
#include <utility>

#include "smolyak/error.hpp"
#include "smolyak/multi_index.hpp"
#include "smolyak/value_space.hpp"

namespace smolyak {

template <class V>
struct Evaluation {
  V value;
  double work = 1.0;
};

/// An evaluator exposes its value type, its ambient dimension and a const,
/// deterministic evaluate(). Work must be strictly positive.
template <class E>
concept Evaluator = requires(const E& e, const MultiIndex& i) {
  typename E::value_type;
  requires ValueSpace<typename E::value_type>;
  { e.dimension() } -> std::convertible_to<Dimension>;
  { e.evaluate(i) } -> std::convertible_to<Evaluation<typename E::value_type>>;
};

/// An evaluator failed; carries the offending index and the work accounted
/// before the failure.
class EvaluationError : public Error {
 public:
  EvaluationError(MultiIndex index, std::string detail, double work_spent = 0.0)
      : Error("evaluation failed at " + index.to_string() + ": " + detail),
        index_(std::move(index)),
        detail_(std::move(detail)),
        work_spent_(work_spent) {}

  const MultiIndex& index() const { return index_; }
  /// The underlying failure message, without the index prefix.
  const std::string& detail() const { return detail_; }
  double work_spent() const { return work_spent_; }

 private:
  MultiIndex index_;
  std::string detail_;
  double work_spent_;
};

/// Adapts a callable to the Evaluator concept. The callable receives the
/// multi-index and returns either V (unit work) or Evaluation<V>.
template <ValueSpace V, class F>
class FunctionEvaluator {
 public:
  using value_type = V;

  FunctionEvaluator(Dimension dim, F fn) : dim_(dim), fn_(std::move(fn)) {}

  Dimension dimension() const { return dim_; }

  Evaluation<V> evaluate(const MultiIndex& i) const {
    if (!i.fits(dim_))
      throw InvalidArgument("index " + i.to_string() + " outside dimension " + dim_.to_string());
    if constexpr (std::is_convertible_v<std::invoke_result_t<const F&, const MultiIndex&>,
                                        Evaluation<V>>) {
      return fn_(i);
    } else {
      return Evaluation<V>{fn_(i), 1.0};
    }
  }

 private:
  Dimension dim_;
  F fn_;
};

template <ValueSpace V, class F>
FunctionEvaluator<V, F> make_evaluator(Dimension dim, F fn) {
  return FunctionEvaluator<V, F>(dim, std::move(fn));
}

}  // namespace smolyak
