#include "dpps/prior.hpp"

#include <cmath>
#include <limits>

namespace dpps {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kResidualGuard = 1e-12;

inline void check_abar(double abar) {
  require(abar > 0.0 && abar <= 1.0, "prior: alpha_bar outside (0,1]");
}
}  // namespace

// ---------------------------------------------------------------------------
// Covariance

Covariance Covariance::isotropic(double variance, Index dim) {
  require(variance > 0.0, "covariance: variance must be positive");
  require(dim >= 1, "covariance: dim must be >= 1");
  Covariance c(Kind::Isotropic, dim);
  c.iso_ = variance;
  return c;
}

Covariance Covariance::diagonal(Vec variances) {
  require(variances.size() >= 1, "covariance: empty diagonal");
  require((variances.array() > 0.0).all(), "covariance: diagonal entries must be positive");
  Covariance c(Kind::Diagonal, variances.size());
  c.diag_ = std::move(variances);
  return c;
}

Covariance Covariance::full(const Mat& sigma) {
  require(sigma.rows() == sigma.cols() && sigma.rows() >= 1, "covariance: matrix must be square");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10 * (1.0 + sigma.cwiseAbs().maxCoeff()),
          "covariance: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sigma + sigma.transpose()));
  require(es.info() == Eigen::Success, "covariance: eigendecomposition failed");
  require(es.eigenvalues().minCoeff() > 0.0, "covariance: matrix is not positive-definite");
  Covariance c(Kind::Full, sigma.rows());
  c.evecs_ = es.eigenvectors();
  c.evals_ = es.eigenvalues();
  return c;
}

Vec Covariance::solve_marginal(double abar, const Vec& v) const {
  switch (kind_) {
    case Kind::Isotropic:
      return v / (abar * iso_ + (1.0 - abar));
    case Kind::Diagonal:
      return v.array() / (abar * diag_.array() + (1.0 - abar));
    case Kind::Full: {
      Vec w = evecs_.transpose() * v;
      w.array() /= abar * evals_.array() + (1.0 - abar);
      return evecs_ * w;
    }
  }
  throw Error("covariance: bad kind");
}

double Covariance::logdet_marginal(double abar) const {
  switch (kind_) {
    case Kind::Isotropic:
      return dim_ * std::log(abar * iso_ + (1.0 - abar));
    case Kind::Diagonal:
      return (abar * diag_.array() + (1.0 - abar)).log().sum();
    case Kind::Full:
      return (abar * evals_.array() + (1.0 - abar)).log().sum();
  }
  throw Error("covariance: bad kind");
}

Vec Covariance::tweedie_gain(double abar, const Vec& v) const {
  const double sab = std::sqrt(abar);
  switch (kind_) {
    case Kind::Isotropic:
      return sab * iso_ / (abar * iso_ + (1.0 - abar)) * v;
    case Kind::Diagonal:
      return sab * (diag_.array() / (abar * diag_.array() + (1.0 - abar))) * v.array();
    case Kind::Full: {
      Vec w = evecs_.transpose() * v;
      w.array() *= sab * evals_.array() / (abar * evals_.array() + (1.0 - abar));
      return evecs_ * w;
    }
  }
  throw Error("covariance: bad kind");
}

Vec Covariance::sqrt_apply(const Vec& eps) const {
  switch (kind_) {
    case Kind::Isotropic:
      return std::sqrt(iso_) * eps;
    case Kind::Diagonal:
      return diag_.array().sqrt() * eps.array();
    case Kind::Full: {
      Vec w = evecs_.transpose() * eps;
      w.array() *= evals_.array().sqrt();
      return evecs_ * w;
    }
  }
  throw Error("covariance: bad kind");
}

Mat Covariance::dense() const {
  switch (kind_) {
    case Kind::Isotropic:
      return iso_ * Mat::Identity(dim_, dim_);
    case Kind::Diagonal:
      return diag_.asDiagonal();
    case Kind::Full:
      return evecs_ * evals_.asDiagonal() * evecs_.transpose();
  }
  throw Error("covariance: bad kind");
}

// ---------------------------------------------------------------------------
// PriorModel

void PriorModel::check_point(const Vec& x, double abar) const {
  check_abar(abar);
  require(x.size() == dim(), "prior: point length " + std::to_string(x.size()) +
                                 " does not match shape " + shape_str(shape_));
}

Vec PriorModel::denoise(const Vec& x_t, double abar) const {
  check_point(x_t, abar);
  const Vec eps = epsilon(x_t, abar);
  return (x_t - std::sqrt(1.0 - abar) * eps) / std::sqrt(abar);
}

Vec PriorModel::denoiser_jacobian_vec(const Vec&, double, const Vec&) const {
  throw CapabilityError("prior: exact denoiser Jacobian not available");
}

// ---------------------------------------------------------------------------
// GaussianPrior

GaussianPrior::GaussianPrior(Shape shape, Vec mean, Covariance cov)
    : PriorModel(std::move(shape)), mean_(std::move(mean)), cov_(std::move(cov)) {
  require(mean_.size() == dim(), "gaussian prior: mean length does not match shape");
  require(cov_.dim() == dim(), "gaussian prior: covariance dim does not match shape");
}

Vec GaussianPrior::epsilon(const Vec& x_t, double abar) const {
  check_point(x_t, abar);
  // score = -M^{-1} (x - sqrt(abar) mu);  eps = -sqrt(1-abar) score
  const Vec centered = x_t - std::sqrt(abar) * mean_;
  return std::sqrt(1.0 - abar) * cov_.solve_marginal(abar, centered);
}

Vec GaussianPrior::denoiser_jacobian_vec(const Vec& x_t, double abar, const Vec& v) const {
  check_point(x_t, abar);
  require(v.size() == dim(), "jacobian_vec: vector length mismatch");
  // d x0_hat / d x_t = sqrt(abar) Sigma M^{-1}, constant in x_t.
  return cov_.tweedie_gain(abar, v);
}

double GaussianPrior::log_density(const Vec& x_t, double abar) const {
  check_point(x_t, abar);
  const Vec centered = x_t - std::sqrt(abar) * mean_;
  const double quad = centered.dot(cov_.solve_marginal(abar, centered));
  return -0.5 * (quad + cov_.logdet_marginal(abar) + dim() * kLog2Pi);
}

Vec GaussianPrior::sample(Rng& rng) const {
  return mean_ + cov_.sqrt_apply(rng.normal_vec(dim()));
}

// ---------------------------------------------------------------------------
// GmmPrior

GmmPrior::GmmPrior(Shape shape, std::vector<GmmComponent> components)
    : PriorModel(std::move(shape)), comps_(std::move(components)) {
  require(!comps_.empty(), "gmm prior: no components");
  double wsum = 0.0;
  for (const auto& c : comps_) {
    require(c.weight > 0.0, "gmm prior: weights must be positive");
    require(c.mean.size() == dim(), "gmm prior: component mean length does not match shape");
    require(c.cov.dim() == dim(), "gmm prior: component covariance dim does not match shape");
    wsum += c.weight;
  }
  require(std::abs(wsum - 1.0) <= 1e-12, "gmm prior: weights must sum to 1");
}

void GmmPrior::responsibilities(const Vec& x_t, double abar, Vec& gamma,
                                std::vector<Vec>& scores) const {
  const std::size_t K = comps_.size();
  gamma.resize(static_cast<Index>(K));
  scores.resize(K);
  Vec logw(static_cast<Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const Vec centered = x_t - std::sqrt(abar) * comps_[k].mean;
    const Vec minv = comps_[k].cov.solve_marginal(abar, centered);
    scores[k] = -minv;
    const double logN =
        -0.5 * (centered.dot(minv) + comps_[k].cov.logdet_marginal(abar) + dim() * kLog2Pi);
    logw[static_cast<Index>(k)] = std::log(comps_[k].weight) + logN;
  }
  const double m = logw.maxCoeff();
  gamma = (logw.array() - m).exp();
  gamma /= gamma.sum();
}

Vec GmmPrior::epsilon(const Vec& x_t, double abar) const {
  check_point(x_t, abar);
  Vec gamma;
  std::vector<Vec> scores;
  responsibilities(x_t, abar, gamma, scores);
  Vec score = Vec::Zero(dim());
  for (std::size_t k = 0; k < comps_.size(); ++k)
    score += gamma[static_cast<Index>(k)] * scores[k];
  return -std::sqrt(1.0 - abar) * score;
}

Vec GmmPrior::denoiser_jacobian_vec(const Vec& x_t, double abar, const Vec& v) const {
  check_point(x_t, abar);
  require(v.size() == dim(), "jacobian_vec: vector length mismatch");
  // With s_k the component scores, P_k the marginal precisions, and gamma the
  // responsibilities, the Hessian of log p_t is
  //   H = -sum_k gamma_k P_k + sum_k gamma_k s_k s_k^T - s_bar s_bar^T
  // and J = (I + (1-abar) H) / sqrt(abar), symmetric.
  Vec gamma;
  std::vector<Vec> scores;
  responsibilities(x_t, abar, gamma, scores);
  Vec sbar = Vec::Zero(dim());
  for (std::size_t k = 0; k < comps_.size(); ++k)
    sbar += gamma[static_cast<Index>(k)] * scores[k];
  Vec hv = Vec::Zero(dim());
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    const double g = gamma[static_cast<Index>(k)];
    hv -= g * comps_[k].cov.solve_marginal(abar, v);
    hv += g * scores[k] * scores[k].dot(v);
  }
  hv -= sbar * sbar.dot(v);
  return (v + (1.0 - abar) * hv) / std::sqrt(abar);
}

double GmmPrior::log_density(const Vec& x_t, double abar) const {
  check_point(x_t, abar);
  Vec logw(static_cast<Index>(comps_.size()));
  for (std::size_t k = 0; k < comps_.size(); ++k) {
    const Vec centered = x_t - std::sqrt(abar) * comps_[k].mean;
    const double quad = centered.dot(comps_[k].cov.solve_marginal(abar, centered));
    logw[static_cast<Index>(k)] =
        std::log(comps_[k].weight) -
        0.5 * (quad + comps_[k].cov.logdet_marginal(abar) + dim() * kLog2Pi);
  }
  const double m = logw.maxCoeff();
  return m + std::log((logw.array() - m).exp().sum());
}

Vec GmmPrior::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (const auto& c : comps_) {
    acc += c.weight;
    if (u <= acc) return c.mean + c.cov.sqrt_apply(rng.normal_vec(dim()));
  }
  const auto& last = comps_.back();
  return last.mean + last.cov.sqrt_apply(rng.normal_vec(dim()));
}

// ---------------------------------------------------------------------------
// Schedule-indexed wrappers and guidance

Vec predict_epsilon(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s) {
  return p.epsilon(x_t, s.alpha_bar(t));
}

Vec denoise(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s) {
  return p.denoise(x_t, s.alpha_bar(t));
}

Vec guidance_gradient(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s,
                      const Vec& y, const LinearOperator& A) {
  const double abar = s.alpha_bar(t);
  require(x_t.size() == p.dim(), "guidance_gradient: state length mismatch");
  require(x_t.size() == A.input_size(), "guidance_gradient: operator input mismatch");
  require(y.size() == A.output_size(), "guidance_gradient: measurement length mismatch");

  const Vec x0_hat = p.denoise(x_t, abar);
  const Vec rvec = A.apply(x0_hat) - y;
  const double r = rvec.norm();
  if (r < kResidualGuard) return Vec::Zero(x_t.size());

  if (p.capabilities().exact_denoiser_jacobian)
    return p.denoiser_jacobian_vec(x_t, abar, A.apply_transpose(rvec)) / r;

  // Central differences on the scalar r; slow, for priors without an exact
  // Jacobian only.
  const double h = 1e-5 * std::max(1.0, x_t.cwiseAbs().maxCoeff());
  Vec g(x_t.size());
  Vec xp = x_t;
  for (Index i = 0; i < x_t.size(); ++i) {
    const double xi = x_t[i];
    xp[i] = xi + h;
    const double rp = (A.apply(p.denoise(xp, abar)) - y).norm();
    xp[i] = xi - h;
    const double rm = (A.apply(p.denoise(xp, abar)) - y).norm();
    xp[i] = xi;
    g[i] = (rp - rm) / (2.0 * h);
  }
  return g;
}

}  // namespace dpps
