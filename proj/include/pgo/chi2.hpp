// Chi-square CDF and quantile via the regularized lower incomplete gamma
// function. Self-contained, double precision.
#pragma once

namespace pgo {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
// Series expansion for x < a + 1, continued fraction otherwise.
double gamma_p(double a, double x);

// CDF of the chi-square distribution with `dof` degrees of freedom.
double chi2_cdf(double x, int dof);

// Quantile: x such that chi2_cdf(x, dof) == p, to absolute tolerance 1e-9.
// Throws InvalidProbability unless 0 < p < 1 and dof >= 1.
double chi2_quantile(double p, int dof);

}  // namespace pgo
