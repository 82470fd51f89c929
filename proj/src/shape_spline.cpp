#include "pgo/shape_spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "pgo/errors.hpp"

namespace pgo {

double basis(int i, int k, double u, const std::vector<double>& knots) {
  const int n_basis = static_cast<int>(knots.size()) - k - 1;
  if (i < 0 || i >= n_basis)
    throw IndexOutOfRange("basis index " + std::to_string(i) +
                          " outside [0, " + std::to_string(n_basis) + ")");
  if (k == 0) {
    if (knots[i] <= u && u < knots[i + 1]) return 1.0;
    // Closed final span: the last value of the knot vector belongs to the
    // rightmost non-empty interval.
    if (u == knots.back() && knots[i] < knots[i + 1] && u <= knots[i + 1])
      return 1.0;
    return 0.0;
  }
  double left = 0.0, right = 0.0;
  const double ld = knots[i + k] - knots[i];
  if (ld > 0.0) left = (u - knots[i]) / ld * basis(i, k - 1, u, knots);
  const double rd = knots[i + k + 1] - knots[i + 1];
  if (rd > 0.0)
    right = (knots[i + k + 1] - u) / rd * basis(i + 1, k - 1, u, knots);
  return left + right;
}

double eval_spline(const SplineDef& s, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.control_points.size(); ++i)
    acc += basis(static_cast<int>(i), s.degree, u, s.knots) *
           s.control_points[i];
  return acc;
}

std::vector<double> clamped_uniform_knots(int n_ctrl, int degree) {
  const int n_interior = n_ctrl - degree - 1;
  std::vector<double> knots;
  knots.reserve(n_ctrl + degree + 1);
  for (int i = 0; i <= degree; ++i) knots.push_back(0.0);
  for (int i = 1; i <= n_interior; ++i)
    knots.push_back(static_cast<double>(i) / (n_interior + 1));
  for (int i = 0; i <= degree; ++i) knots.push_back(1.0);
  return knots;
}

void validate_spline(const SplineDef& s, bool require_concave) {
  const auto& d = s.control_points;
  const auto& u = s.knots;
  const int k = s.degree;
  if (k < 1 || d.size() < static_cast<std::size_t>(k) + 1 ||
      u.size() != d.size() + k + 1)
    throw std::invalid_argument("spline: knot/control point count mismatch");
  for (std::size_t i = 1; i < u.size(); ++i)
    if (u[i] < u[i - 1]) throw std::invalid_argument("spline: knots decrease");
  for (int i = 0; i <= k; ++i)
    if (u[i] != 0.0 || u[u.size() - 1 - i] != 1.0)
      throw std::invalid_argument("spline: knot vector is not clamped");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0.0 || d[i] > 1.0)
      throw std::invalid_argument("spline: control point outside [0,1]");
    if (i > 0 && d[i] < d[i - 1] - 1e-15)
      throw std::invalid_argument("spline: control points decrease");
  }
  if (std::abs(d.back() - 1.0) > 1e-15)
    throw std::invalid_argument("spline: terminal control point must be 1");
  if (require_concave) {
    for (std::size_t i = 2; i < d.size(); ++i)
      if (d[i] - 2.0 * d[i - 1] + d[i - 2] > 1e-12)
        throw std::invalid_argument("spline: control polygon not concave");
    // Curve concavity is governed by the derivative control points
    // k * (d[i+1] - d[i]) / (u[i+k+1] - u[i+1]); require them nonincreasing.
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      const double span = u[i + k + 1] - u[i + 1];
      if (span <= 0.0) continue;
      const double slope = k * (d[i + 1] - d[i]) / span;
      if (slope > prev + 1e-12)
        throw std::invalid_argument("spline: curve not concave (slopes rise)");
      prev = slope;
    }
  }
}

ShapeFunction make_shape_function(double alpha, double mu_init,
                                  const SplinePolygons& polys) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw AlphaOutOfRange(alpha);
  if (polys.d0.size() != polys.d1.size())
    throw std::invalid_argument("spline: polygon size mismatch");

  ShapeFunction sf;
  sf.alpha = alpha;
  sf.spline.degree = polys.degree;
  sf.spline.knots =
      clamped_uniform_knots(static_cast<int>(polys.d0.size()), polys.degree);
  auto& d = sf.spline.control_points;
  d.resize(polys.d0.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = (1.0 - alpha) * polys.d0[i] + alpha * polys.d1[i];
  validate_spline(sf.spline, /*require_concave=*/true);

  if (mu_init > 0.0) {
    d[0] = mu_init;
    for (auto& v : d) v = std::max(v, mu_init);
    validate_spline(sf.spline, /*require_concave=*/false);
  }
  return sf;
}

double shape_mu(const ShapeFunction& sf, double t) {
  const double mu = eval_spline(sf.spline, std::clamp(t, 0.0, 1.0));
  return std::clamp(mu, 0.0, 1.0);
}

}  // namespace pgo
