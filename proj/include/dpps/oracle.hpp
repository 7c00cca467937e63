#pragma once

#include "dpps/operators.hpp"
#include "dpps/prior.hpp"

namespace dpps {

// Closed-form restoration posterior p(x0 | y) for a linear-Gaussian
// measurement y = A x0 + sigma_y eps. Dense linear algebra, small problems
// only (guarded by the dense_matrix entry cap).
struct OracleSolution {
  Vec posterior_mean;
  Mat posterior_covariance;
};

// Gaussian prior:
//   mean = mu0 + Sigma0 A^T (A Sigma0 A^T + sigma_y^2 I)^{-1} (y - A mu0)
//   cov  = Sigma0 - Sigma0 A^T (A Sigma0 A^T + sigma_y^2 I)^{-1} A Sigma0
// sigma_y = 0 is allowed when the system is nonsingular; a rank-deficient
// noiseless system raises an error.
OracleSolution gaussian_restoration_oracle(const GaussianPrior& p, const LinearOperator& A,
                                           const Vec& y, double sigma_y);

// Mixture prior: the posterior is again a mixture (component-wise conjugate
// posteriors, weights rescaled by the evidence N(y; A mu_k, A Sigma_k A^T +
// sigma_y^2 I)); mean and covariance are the mixture moments. Dispatches to
// the Gaussian case for GaussianPrior.
OracleSolution restoration_oracle(const PriorModel& p, const LinearOperator& A, const Vec& y,
                                  double sigma_y);

double mse(const Vec& a, const Vec& b);

// 10 log10(peak^2 / mse); +infinity when the inputs coincide.
double psnr(const Vec& a, const Vec& b, double peak = 1.0);

}  // namespace dpps
