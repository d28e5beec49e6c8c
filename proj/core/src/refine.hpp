#pragma once

#include <cmath>
#include <string>

#include "fsad/error.hpp"
#include "fsad/params.hpp"

namespace fsad::detail {

/// Evaluates fn(spec) and doubles the cell count until two successive values agree
/// within the requested tolerances. max_refinements == 0 returns the first value unchecked.
template <class Fn>
double converge(const QuadratureSpec& spec, Fn&& fn, const std::string& what) {
  spec.validate();
  QuadratureSpec current = spec;
  double value = fn(current);
  double indicator = 0.0;
  for (int r = 0; r < spec.max_refinements; ++r) {
    current = current.refined();
    const double finer = fn(current);
    indicator = std::abs(finer - value);
    value = finer;
    if (indicator <= std::max(spec.rel_tol * std::abs(finer), spec.abs_tol)) return value;
  }
  if (spec.max_refinements > 0) {
    throw NumericError(what + ": refinement budget exhausted before reaching rel_tol", value, indicator);
  }
  return value;
}

}  // namespace fsad::detail
