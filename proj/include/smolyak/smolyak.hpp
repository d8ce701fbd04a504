#pragma once

/// \file smolyak.hpp
/// Umbrella header. json_io.hpp is separate since it needs nlohmann/json.

#include "smolyak/cache.hpp"
#include "smolyak/decomposition.hpp"
#include "smolyak/engine.hpp"
#include "smolyak/error.hpp"
#include "smolyak/evaluator.hpp"
#include "smolyak/index_set.hpp"
#include "smolyak/mlmc.hpp"
#include "smolyak/models.hpp"
#include "smolyak/multi_index.hpp"
#include "smolyak/parallel.hpp"
#include "smolyak/quadrature.hpp"
#include "smolyak/random.hpp"
#include "smolyak/synthetic.hpp"
#include "smolyak/truncation.hpp"
#include "smolyak/value_space.hpp"
