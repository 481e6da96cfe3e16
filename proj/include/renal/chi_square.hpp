#pragma once

namespace renal {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a + 1, continued fraction otherwise; absolute
// error well below 1e-10 over the ranges used here.
double regularized_gamma_p(double a, double x);

// P(X <= x) for X ~ chi-square with dof degrees of freedom.
// Throws InvalidInputError for non-finite or negative x, or dof < 1.
double chi_square_cdf(double x, int dof);

// Density of the chi-square distribution.
double chi_square_pdf(double x, int dof);

// Inverse of chi_square_cdf: the x with cdf(x) = prob, located by a
// Wilson-Hilferty seed refined with safeguarded Newton iterations inside a
// verified bracket. Throws InvalidInputError unless 0 < prob < 1.
double chi_square_quantile(double prob, int dof);

// Inverse standard normal CDF (rational approximation, ~1e-9 accurate).
// Used to seed the quantile search; exposed for reuse in tests.
double normal_quantile(double p);

}  // namespace renal
