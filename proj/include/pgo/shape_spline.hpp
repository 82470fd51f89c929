// Clamped B-spline machinery behind the graduation schedule: a family of
// monotone concave curves mapping normalized progress t in [0,1] to the
// kernel's mu, blended between an inlier polygon D0 and an outlier polygon D1
// by the interpolation parameter alpha.
#pragma once

#include <vector>

namespace pgo {

struct SplineDef {
  int degree = 3;
  std::vector<double> control_points;
  std::vector<double> knots;
};

struct ShapeFunction {
  double alpha = 0.0;
  SplineDef spline;
};

// The two base polygons; configurable, defaults chosen so the curves rise
// fast early and flatten into 1. With the clamped knot vector the curve's
// slope is governed by divided differences (raw differences over knot spans),
// so both polygons keep those nonincreasing as well; otherwise the shrinking
// end spans would re-accelerate the curve near t = 1.
struct SplinePolygons {
  int degree = 3;
  std::vector<double> d0 = {0.0, 0.27, 0.52, 0.76, 0.92, 1.0};
  std::vector<double> d1 = {0.0, 0.42, 0.72, 0.90, 0.97, 1.0};
};

// Cox-de Boor basis N_i^k(u); 0/0 terms are 0 and the final knot span is
// closed, so the basis sums to 1 at u = 1 as well.
// Throws IndexOutOfRange if i is not a valid basis index for (k, knots).
double basis(int i, int k, double u, const std::vector<double>& knots);

double eval_spline(const SplineDef& s, double u);

std::vector<double> clamped_uniform_knots(int n_ctrl, int degree);

// Checks the SplineDef invariants (knot/control count relation, clamping,
// monotone control points in [0,1], terminal point of 1). Concavity of the
// control polygon is required only for base polygons; mu_init clipping may
// flatten the start, which keeps monotonicity but not strict concavity.
void validate_spline(const SplineDef& s, bool require_concave);

// Blend D0/D1 at alpha, then raise the start of the polygon to mu_init
// (first control point replaced, the rest clipped upward).
// Throws AlphaOutOfRange for alpha outside [0, 1].
ShapeFunction make_shape_function(double alpha, double mu_init = 0.0,
                                  const SplinePolygons& polys = {});

// mu = spline(t); nondecreasing in t, 1 at t = 1.
double shape_mu(const ShapeFunction& sf, double t);

}  // namespace pgo
