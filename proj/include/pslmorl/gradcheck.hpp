#pragma once

#include <functional>

#include "pslmorl/mlp.hpp"

namespace pslmorl {

// Central-difference gradient of f at x, step h per coordinate.
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                  const Vector& x, double h = 1e-5);

// |a - b| / max(|a|, |b|, floor) using Euclidean norms; the floor keeps the
// ratio meaningful for near-zero gradients.
double relative_error(const Vector& analytic, const Vector& numeric,
                      double floor = 1e-8);

}  // namespace pslmorl
