#pragma once

#include <vector>

namespace vgp {

/// Divided difference of f(x) = exp(-beta x) over the given nodes, repeats allowed.
/// Evaluated as the top-right entry of exp(-beta T), where T is upper bidiagonal with the
/// nodes on its diagonal and ones above it.
double divided_differences(double beta, const std::vector<double>& nodes);

/// Same value as exp(log_abs) * (-1)^q, for callers that need to avoid underflow.
struct LogDividedDifference {
  double log_abs;
  int sign;
};
LogDividedDifference log_divided_differences(double beta, const std::vector<double>& nodes);

}  // namespace vgp
