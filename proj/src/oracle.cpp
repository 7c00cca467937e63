#include "dpps/oracle.hpp"

#include <cmath>
#include <limits>

namespace dpps {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct ComponentPosterior {
  Vec mean;
  Mat cov;
  double log_evidence;
};

// Conjugate update for one Gaussian component against the dense measurement
// system. S = A Sigma A^T + sigma_y^2 I is factored once; a solve-residual
// check rejects singular noiseless systems instead of returning garbage.
ComponentPosterior conjugate_update(const Vec& mu, const Mat& sigma, const Mat& Ad,
                                    const Vec& y, double sigma_y) {
  const Index m = Ad.rows();
  const Mat SigAt = sigma * Ad.transpose();
  Mat S = Ad * SigAt;
  S.diagonal().array() += sigma_y * sigma_y;

  Eigen::LDLT<Mat> ldlt(S);
  require(ldlt.info() == Eigen::Success, "oracle: factorization of the measurement system failed");

  const Vec innov = y - Ad * mu;
  const Vec w = ldlt.solve(innov);
  const double rel = (S * w - innov).norm() / std::max(innov.norm(), 1e-300);
  require(rel <= 1e-8 || innov.norm() == 0.0,
          "oracle: singular measurement system (sigma_y = 0 with rank-deficient A on the prior support)");

  ComponentPosterior out;
  out.mean = mu + SigAt * w;
  const Mat K = ldlt.solve(SigAt.transpose());
  out.cov = sigma - SigAt * K;

  double logdet = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double d = ldlt.vectorD()[i];
    require(d > 0.0, "oracle: measurement covariance not positive-definite");
    logdet += std::log(d);
  }
  out.log_evidence = -0.5 * (innov.dot(w) + logdet + m * kLog2Pi);
  return out;
}
}  // namespace

OracleSolution gaussian_restoration_oracle(const GaussianPrior& p, const LinearOperator& A,
                                           const Vec& y, double sigma_y) {
  require(sigma_y >= 0.0, "oracle: sigma_y must be non-negative");
  require(y.size() == A.output_size(), "oracle: measurement length mismatch");
  require(p.dim() == A.input_size(), "oracle: prior dim does not match operator input");
  const Mat Ad = dense_matrix(A);
  ComponentPosterior cp = conjugate_update(p.mean(), p.covariance().dense(), Ad, y, sigma_y);
  return {std::move(cp.mean), std::move(cp.cov)};
}

OracleSolution restoration_oracle(const PriorModel& p, const LinearOperator& A, const Vec& y,
                                  double sigma_y) {
  if (const auto* g = dynamic_cast<const GaussianPrior*>(&p))
    return gaussian_restoration_oracle(*g, A, y, sigma_y);
  const auto* gmm = dynamic_cast<const GmmPrior*>(&p);
  require(gmm != nullptr, "oracle: closed form available for Gaussian and GMM priors only");
  require(sigma_y >= 0.0, "oracle: sigma_y must be non-negative");
  require(y.size() == A.output_size(), "oracle: measurement length mismatch");
  require(p.dim() == A.input_size(), "oracle: prior dim does not match operator input");

  const Mat Ad = dense_matrix(A);
  const auto& comps = gmm->components();
  std::vector<ComponentPosterior> post;
  post.reserve(comps.size());
  Vec logw(static_cast<Index>(comps.size()));
  for (std::size_t k = 0; k < comps.size(); ++k) {
    post.push_back(conjugate_update(comps[k].mean, comps[k].cov.dense(), Ad, y, sigma_y));
    logw[static_cast<Index>(k)] = std::log(comps[k].weight) + post[k].log_evidence;
  }
  const double mx = logw.maxCoeff();
  Vec w = (logw.array() - mx).exp();
  w /= w.sum();

  const Index d = p.dim();
  Vec mean = Vec::Zero(d);
  for (std::size_t k = 0; k < comps.size(); ++k) mean += w[static_cast<Index>(k)] * post[k].mean;
  Mat cov = Mat::Zero(d, d);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const Vec dm = post[k].mean - mean;
    cov += w[static_cast<Index>(k)] * (post[k].cov + dm * dm.transpose());
  }
  return {std::move(mean), std::move(cov)};
}

double mse(const Vec& a, const Vec& b) {
  require(a.size() == b.size() && a.size() > 0, "mse: size mismatch");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double psnr(const Vec& a, const Vec& b, double peak) {
  require(peak > 0.0, "psnr: peak must be positive");
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

}  // namespace dpps
