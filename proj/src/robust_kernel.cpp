#include "pgo/robust_kernel.hpp"

#include <algorithm>
#include <limits>

namespace pgo {

double rho(double r, const KernelParams& p) {
  return detail::sig_rho_x(r * r, p.mu, p.c);
}

double weight(double r, const KernelParams& p) {
  return detail::sig_weight_x(r * r, p.mu, p.c);
}

double nonconvexity(double mu, double c, double r_max, int n_samples) {
  const KernelParams p{c, mu};
  const double h = r_max / (100.0 * n_samples);
  // Even extension of rho lets the stencil cross r = 0.
  auto f = [&](double r) { return rho(std::abs(r), p); };
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const double r = r_max * i / (n_samples - 1.0);
    const double d2 = (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h);
    worst = std::min(worst, d2);
  }
  return std::max(0.0, -worst);
}

}  // namespace pgo
