// SIG robust kernel: rho(r; mu) = c^2 r^2 / (2 (c^2 + (r^2)^mu)).
// mu = 0 gives a (scaled) quadratic, mu = 1 gives Geman-McClure; raising mu
// from 0 to 1 graduates non-convexity in.
#pragma once

#include <cmath>

namespace pgo {

struct KernelParams {
  double c = 3.0;   // shape constant; inliers within 3 sigma
  double mu = 0.0;  // graduation control in [0, 1]
};

namespace detail {

// Shared by the scalar API and the scalar batch backend so they cannot drift.
// x is the squared residual norm.
inline double sig_rho_x(double x, double mu, double c) {
  const double c2 = c * c;
  return 0.5 * c2 * x / (c2 + std::pow(x, mu));
}

// IRLS weight rho'(r)/r as a function of x = r^2; the r -> 0 limit falls out
// of pow(0, mu) = 0 for mu > 0 and pow(0, 0) = 1.
inline double sig_weight_x(double x, double mu, double c) {
  const double c2 = c * c;
  const double p = std::pow(x, mu);
  const double den = c2 + p;
  return c2 * (c2 + (1.0 - mu) * p) / (den * den);
}

}  // namespace detail

double rho(double r, const KernelParams& p);
double weight(double r, const KernelParams& p);

// Diagnostic: worst negative curvature of rho(.; mu, c) over [0, r_max],
// estimated by central finite differences at n_samples points with step
// r_max / (100 * n_samples). Returns 0 for convex kernels.
double nonconvexity(double mu, double c, double r_max, int n_samples);

}  // namespace pgo
