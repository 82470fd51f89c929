#include "pgo/chi2.hpp"

#include <cmath>
#include <limits>

#include "pgo/errors.hpp"

namespace pgo {
namespace {

// Series representation, valid and fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(double x, int dof) {
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_quantile(double p, int dof) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidProbability(p);
  if (dof < 1) throw InvalidProbability(p);

  // Bracket, then bisect to 1e-12, polishing with Newton once the interval
  // is small. The CDF is strictly increasing so this is safe.
  double lo = 0.0;
  double hi = std::max(8.0, dof + 10.0 * std::sqrt(2.0 * dof));
  while (chi2_cdf(hi, dof) < p) hi *= 2.0;

  const double a = 0.5 * dof;
  const double log_norm = -a * std::log(2.0) - std::lgamma(a);
  auto pdf = [&](double x) {
    return std::exp(log_norm + (a - 1.0) * std::log(x) - 0.5 * x);
  };

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    double f = chi2_cdf(x, dof) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    // Newton step from the midpoint, falling back to bisection whenever it
    // leaves the bracket.
    double mid = 0.5 * (lo + hi);
    double d = pdf(mid);
    double next = mid;
    if (d > 0.0) {
      double newton = mid - (chi2_cdf(mid, dof) - p) / d;
      if (newton > lo && newton < hi) next = newton;
    }
    if (hi - lo < 1e-12 * (1.0 + mid)) {
      x = mid;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace pgo
