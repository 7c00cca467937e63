#pragma once

#include "dpps/rng.hpp"
#include "dpps/types.hpp"

namespace dpps {

// Discrete diffusion bookkeeping. Conventions used throughout:
//   alpha_t = 1 - beta_t,  abar_t = prod_{i<=t} alpha_i,  abar_0 = 1
//   forward marginal  q(x_t | x_0) = N(sqrt(abar_t) x_0, (1 - abar_t) I)
//   snr_t = abar_t / (1 - abar_t)
// Timestep arguments are 1-based (t in [1,T]); alpha_bar(0) is defined.
// All arrays are computed and stored in 64-bit reals.

// Reverse-step noise scale sigma_t^2:
//   PosteriorBeta: (1 - abar_{t-1}) / (1 - abar_t) * beta_t  (zero at t = 1)
//   Beta:          beta_t
enum class VarianceKind { PosteriorBeta, Beta };

class NoiseSchedule {
 public:
  NoiseSchedule(Vec betas, VarianceKind vk);

  int T() const { return static_cast<int>(betas_.size()); }
  VarianceKind variance_kind() const { return vk_; }

  double beta(int t) const { return betas_[check_t(t) - 1]; }
  double alpha(int t) const { return alphas_[check_t(t) - 1]; }
  double sigma(int t) const { return sigmas_[check_t(t) - 1]; }
  double snr(int t) const { return snrs_[check_t(t) - 1]; }
  double alpha_bar(int t) const {
    require(t >= 0 && t <= T(), "alpha_bar: t out of range [0,T]: " + std::to_string(t));
    return alpha_bars_[t];
  }

  const Vec& betas() const { return betas_; }
  const Vec& alphas() const { return alphas_; }
  const Vec& alpha_bars() const { return alpha_bars_; }  // length T+1, index t
  const Vec& sigmas() const { return sigmas_; }
  const Vec& snrs() const { return snrs_; }

 private:
  int check_t(int t) const {
    require(t >= 1 && t <= T(), "schedule: t out of range [1,T]: " + std::to_string(t));
    return t;
  }
  Vec betas_, alphas_, alpha_bars_, sigmas_, snrs_;
  VarianceKind vk_;
};

NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end,
                                   VarianceKind vk = VarianceKind::PosteriorBeta);

inline NoiseSchedule standard_schedule(VarianceKind vk = VarianceKind::PosteriorBeta) {
  return make_linear_schedule(1000, 1e-4, 0.02, vk);
}

// Coefficients of the deterministic reverse target
//   x*_{t-1} = c1 * x_t + c2 * x_0
// obtained by zeroing the stochastic term of the non-Markovian reverse step.
// Satisfies c1 * sqrt(abar_t) + c2 = sqrt(abar_{t-1}) so that forward samples
// map to forward samples.
struct DdimCoeffs {
  double c1;
  double c2;
};

DdimCoeffs ddim_coefficients(double alpha_bar_prev, double alpha_bar_t);
DdimCoeffs ddim_coefficients(const NoiseSchedule& s, int t);

Vec forward_sample(const Vec& x0, int t, const NoiseSchedule& s, Rng& rng);
Vec ddim_target(const Vec& x_t, const Vec& x0, int t, const NoiseSchedule& s);

// Candidate budget max(floor(n_max * (1 - exp(-snr_t))), 2); non-increasing
// in t since snr_t is strictly decreasing. Requires n_max >= 2.
int adaptive_candidate_count(const NoiseSchedule& s, int t, int n_max);

}  // namespace dpps
