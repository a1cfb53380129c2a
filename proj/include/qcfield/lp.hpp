#pragma once

// Feasibility of small systems A x <= b.

#include <optional>

#include "qcfield/types.hpp"

namespace qcfield::lp {

struct HalfSpaces {
  RMat A;  // m x d
  RVec b;  // m
};

/// Incremental clipping of a convex polygon (d = 2). `start` is an initial
/// bounding box known to contain the feasible set. Returns the vertex mean.
std::optional<RVec> clip_feasible(const HalfSpaces& hs, const Box& start);

/// Phase-1 simplex with Bland's rule on x = x+ - x-. Returns a feasible
/// vertex or nothing.
std::optional<RVec> simplex_feasible(const HalfSpaces& hs);

/// max_i (A x - b)_i, clamped at zero.
double max_violation(const HalfSpaces& hs, const RVec& x);

}  // namespace qcfield::lp
