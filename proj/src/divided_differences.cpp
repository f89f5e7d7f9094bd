#include "vgp/divided_differences.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "vgp/errors.hpp"

namespace vgp {

namespace {

// exp of an upper-triangular matrix by Taylor series on a scaled copy, then squaring.
Eigen::MatrixXd expm_upper(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  double norm = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) norm = std::max(norm, a.row(i).cwiseAbs().sum());
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd x = a / std::ldexp(1.0, squarings);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  // with ||x|| <= 0.5, 20 terms put the truncation error below 1e-20 relative
  for (int k = 1; k <= 20; ++k) {
    term = Eigen::MatrixXd((term * x).triangularView<Eigen::Upper>()) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-300) break;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).triangularView<Eigen::Upper>();
  return result;
}

}  // namespace

LogDividedDifference log_divided_differences(double beta, const std::vector<double>& nodes) {
  if (nodes.empty()) throw ValidationError("divided_differences: need at least one node");
  for (double x : nodes)
    if (!std::isfinite(x)) throw ValidationError("divided_differences: nodes must be finite");
  const int q = static_cast<int>(nodes.size()) - 1;
  // shifting by the smallest node keeps every entry of the exponential bounded
  const double shift = *std::min_element(nodes.begin(), nodes.end());
  if (q == 0 || beta == 0.0) {
    if (q == 0) return {-beta * shift, 1};
    return {-INFINITY, q % 2 ? -1 : 1};
  }
  // The superdiagonal is scaled by 1/c, a diagonal similarity that divides the
  // top-right entry by c^q; it keeps the matrix norm near beta times the node spread.
  const double c = std::max(1.0, std::abs(beta));
  const Eigen::Index n = q + 1;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t(i, i) = -beta * (nodes[static_cast<std::size_t>(i)] - shift);
    if (i + 1 < n) t(i, i + 1) = -beta / c;
  }
  const double corner = expm_upper(t)(0, n - 1);
  const int sign = corner < 0.0 ? -1 : 1;
  if (corner == 0.0) return {-INFINITY, q % 2 ? -1 : 1};
  return {std::log(std::abs(corner)) + q * std::log(c) - beta * shift, sign};
}

double divided_differences(double beta, const std::vector<double>& nodes) {
  if (beta == 0.0) return nodes.size() == 1 ? 1.0 : 0.0;
  const auto r = log_divided_differences(beta, nodes);
  return r.sign * std::exp(r.log_abs);
}

}  // namespace vgp
