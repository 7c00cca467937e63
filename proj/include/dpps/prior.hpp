#pragma once

#include "dpps/operators.hpp"
#include "dpps/rng.hpp"
#include "dpps/schedule.hpp"
#include "dpps/types.hpp"

#include <memory>
#include <vector>

namespace dpps {

// Analytic data priors with closed-form diffused marginals. For a component
// N(mu, Sigma) the marginal at noise level abar is
//   p_t = N(sqrt(abar) mu, M),  M = abar Sigma + (1 - abar) I
// and everything below reduces to solves against M. A full covariance is
// eigendecomposed once at construction so per-level solves stay O(d^2) with
// no per-timestep factorization.
class Covariance {
 public:
  enum class Kind { Isotropic, Diagonal, Full };

  static Covariance isotropic(double variance, Index dim);
  static Covariance diagonal(Vec variances);
  static Covariance full(const Mat& sigma);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }

  Vec solve_marginal(double abar, const Vec& v) const;   // M^{-1} v
  double logdet_marginal(double abar) const;             // log det M
  Vec tweedie_gain(double abar, const Vec& v) const;     // sqrt(abar) Sigma M^{-1} v
  Vec sqrt_apply(const Vec& eps) const;                  // Sigma^{1/2} eps
  Mat dense() const;

 private:
  Covariance(Kind k, Index d) : kind_(k), dim_(d) {}

  Kind kind_;
  Index dim_;
  double iso_ = 1.0;   // Isotropic
  Vec diag_;           // Diagonal: variances
  Mat evecs_;          // Full: Sigma = evecs * diag(evals) * evecs^T
  Vec evals_;
};

struct PriorCapabilities {
  bool exact_denoiser_jacobian = false;
};

class PriorModel {
 public:
  virtual ~PriorModel() = default;

  const Shape& shape() const { return shape_; }
  Index dim() const { return shape_size(shape_); }

  virtual PriorCapabilities capabilities() const = 0;

  // Noise predicted at level abar: -sqrt(1-abar) * grad log p_t(x).
  virtual Vec epsilon(const Vec& x_t, double abar) const = 0;

  // Posterior mean E[x0 | x_t] via x0_hat = (x_t - sqrt(1-abar) eps) / sqrt(abar).
  Vec denoise(const Vec& x_t, double abar) const;

  // (d x0_hat / d x_t)^T v. Symmetric for every prior here, so this equals
  // the forward Jacobian-vector product. Throws CapabilityError by default.
  virtual Vec denoiser_jacobian_vec(const Vec& x_t, double abar, const Vec& v) const;

  virtual double log_density(const Vec& x_t, double abar) const = 0;

  virtual Vec sample(Rng& rng) const = 0;

 protected:
  explicit PriorModel(Shape s) : shape_(std::move(s)) {
    require(dim() >= 1, "prior: empty shape");
  }
  void check_point(const Vec& x, double abar) const;

  Shape shape_;
};

class GaussianPrior final : public PriorModel {
 public:
  GaussianPrior(Shape shape, Vec mean, Covariance cov);

  const Vec& mean() const { return mean_; }
  const Covariance& covariance() const { return cov_; }

  PriorCapabilities capabilities() const override { return {true}; }
  Vec epsilon(const Vec& x_t, double abar) const override;
  Vec denoiser_jacobian_vec(const Vec& x_t, double abar, const Vec& v) const override;
  double log_density(const Vec& x_t, double abar) const override;
  Vec sample(Rng& rng) const override;

 private:
  Vec mean_;
  Covariance cov_;
};

struct GmmComponent {
  double weight;
  Vec mean;
  Covariance cov;
};

class GmmPrior final : public PriorModel {
 public:
  GmmPrior(Shape shape, std::vector<GmmComponent> components);

  const std::vector<GmmComponent>& components() const { return comps_; }

  PriorCapabilities capabilities() const override { return {true}; }
  Vec epsilon(const Vec& x_t, double abar) const override;
  Vec denoiser_jacobian_vec(const Vec& x_t, double abar, const Vec& v) const override;
  double log_density(const Vec& x_t, double abar) const override;
  Vec sample(Rng& rng) const override;

 private:
  // Responsibilities and per-component scores at (x_t, abar); log-sum-exp
  // stabilized so far-from-all-modes points keep finite weights.
  void responsibilities(const Vec& x_t, double abar, Vec& gamma, std::vector<Vec>& scores) const;

  std::vector<GmmComponent> comps_;
};

Vec predict_epsilon(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s);
Vec denoise(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s);

// Gradient w.r.t. x_t of r(x_t) = ||y - A x0_hat(x_t)||_2 (unsquared):
//   (1/r) * J^T A^T (A x0_hat - y)
// Guarded to zero when r < 1e-12 (the direction is undefined at r = 0).
// Falls back to central differences on the scalar r with step
// 1e-5 * max(1, ||x_t||_inf) when the prior lacks an exact Jacobian.
Vec guidance_gradient(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s,
                      const Vec& y, const LinearOperator& A);

}  // namespace dpps
