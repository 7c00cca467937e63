#include "dpps/schedule.hpp"

#include <cmath>

namespace dpps {

NoiseSchedule::NoiseSchedule(Vec betas, VarianceKind vk)
    : betas_(std::move(betas)), vk_(vk) {
  const int T = static_cast<int>(betas_.size());
  require(T >= 1, "schedule: T must be >= 1");
  for (int i = 0; i < T; ++i)
    require(betas_[i] > 0.0 && betas_[i] < 1.0,
            "schedule: beta_" + std::to_string(i + 1) + " outside (0,1)");

  alphas_ = Vec::Ones(T) - betas_;
  alpha_bars_.resize(T + 1);
  alpha_bars_[0] = 1.0;
  for (int t = 1; t <= T; ++t) alpha_bars_[t] = alpha_bars_[t - 1] * alphas_[t - 1];

  sigmas_.resize(T);
  snrs_.resize(T);
  for (int t = 1; t <= T; ++t) {
    const double var = vk_ == VarianceKind::Beta
                           ? betas_[t - 1]
                           : (1.0 - alpha_bars_[t - 1]) / (1.0 - alpha_bars_[t]) * betas_[t - 1];
    sigmas_[t - 1] = std::sqrt(var);
    snrs_[t - 1] = alpha_bars_[t] / (1.0 - alpha_bars_[t]);
  }
}

NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end,
                                   VarianceKind vk) {
  require(T >= 1, "make_linear_schedule: T must be >= 1");
  require(beta_start > 0.0 && beta_start < 1.0, "make_linear_schedule: beta_start outside (0,1)");
  require(beta_end > 0.0 && beta_end < 1.0, "make_linear_schedule: beta_end outside (0,1)");
  require(beta_start <= beta_end, "make_linear_schedule: beta_start > beta_end");
  Vec betas = T == 1 ? Vec(Vec::Constant(1, beta_start))
                     : Vec(Vec::LinSpaced(T, beta_start, beta_end));
  return NoiseSchedule(std::move(betas), vk);
}

DdimCoeffs ddim_coefficients(double ab_prev, double ab_t) {
  require(ab_t > 0.0 && ab_t <= 1.0, "ddim_coefficients: alpha_bar_t outside (0,1]");
  require(ab_prev >= ab_t && ab_prev <= 1.0, "ddim_coefficients: alpha_bar_{t-1} < alpha_bar_t");
  if (ab_t == 1.0) return {1.0, 0.0};  // degenerate, no noise to strip
  const double c1 = std::sqrt(1.0 - ab_prev) / std::sqrt(1.0 - ab_t);
  const double c2 = std::sqrt(ab_prev) - std::sqrt(ab_t) * c1;
  return {c1, c2};
}

DdimCoeffs ddim_coefficients(const NoiseSchedule& s, int t) {
  return ddim_coefficients(s.alpha_bar(t - 1), s.alpha_bar(t));
}

Vec forward_sample(const Vec& x0, int t, const NoiseSchedule& s, Rng& rng) {
  const double ab = s.alpha_bar(t);
  return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * rng.normal_vec(x0.size());
}

Vec ddim_target(const Vec& x_t, const Vec& x0, int t, const NoiseSchedule& s) {
  require(x_t.size() == x0.size(), "ddim_target: size mismatch");
  const DdimCoeffs c = ddim_coefficients(s, t);
  return c.c1 * x_t + c.c2 * x0;
}

int adaptive_candidate_count(const NoiseSchedule& s, int t, int n_max) {
  require(n_max >= 2, "adaptive_candidate_count: n_max must be >= 2");
  const double frac = 1.0 - std::exp(-s.snr(t));
  const int n = static_cast<int>(std::floor(static_cast<double>(n_max) * frac));
  return n < 2 ? 2 : n;
}

}  // namespace dpps
