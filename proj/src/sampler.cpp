#include "dpps/sampler.hpp"

#include <cmath>

namespace dpps {

namespace {
constexpr double kResidualGuard = 1e-12;

struct StepCore {
  Vec x0_hat;
  double residual = 0.0;  // squared norm
  Vec mu;
};

// Shared by guided_mean and dpps_step so the two entry points are identical
// by construction.
StepCore compute_core(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s,
                      const Vec& y, const LinearOperator& A, const SamplerConfig& cfg) {
  require(x_t.size() == p.dim(), "sampler: state length does not match prior shape");
  require(x_t.size() == A.input_size(), "sampler: state length does not match operator input");
  require(y.size() == A.output_size(), "sampler: measurement length does not match operator output");

  const double abar = s.alpha_bar(t);
  const Vec eps = p.epsilon(x_t, abar);

  StepCore core;
  core.x0_hat = (x_t - std::sqrt(1.0 - abar) * eps) / std::sqrt(abar);
  const Vec rvec = A.apply(core.x0_hat) - y;
  core.residual = rvec.squaredNorm();

  core.mu = (x_t - s.beta(t) / std::sqrt(1.0 - abar) * eps) / std::sqrt(s.alpha(t));

  const double r = std::sqrt(core.residual);
  if (r >= kResidualGuard && cfg.step_scale != 0.0) {
    Vec grad_r;  // gradient of the unsquared residual norm
    if (p.capabilities().exact_denoiser_jacobian)
      grad_r = p.denoiser_jacobian_vec(x_t, abar, A.apply_transpose(rvec)) / r;
    else
      grad_r = guidance_gradient(p, x_t, t, s, y, A);

    double coef = 0.0;
    if (cfg.step_mode == StepMode::Normalized) {
      coef = 2.0 * cfg.step_scale;  // step_scale * grad(r^2)/r == 2 step_scale grad(r)
    } else {
      coef = cfg.guidance_norm == GuidanceNorm::Squared ? 2.0 * r * cfg.step_scale
                                                        : cfg.step_scale;
    }
    core.mu -= coef * grad_r;
  }
  return core;
}
}  // namespace

void SamplerConfig::validate() const {
  require(std::isfinite(step_scale) && step_scale >= 0.0,
          "sampler config: step_scale must be finite and non-negative");
  require(n_candidates >= 1, "sampler config: n_candidates must be >= 1");
  if (variant == Variant::DppsAdaptive)
    require(n_max >= 2, "sampler config: n_max must be >= 2");
  require(sigma_y_assumed >= 0.0, "sampler config: sigma_y_assumed must be non-negative");
}

Vec aligned_init(const LinearOperator& A, const Vec& y, const NoiseSchedule& s, const Vec& eps) {
  require(y.size() == A.output_size(), "aligned_init: measurement length mismatch");
  require(eps.size() == A.input_size(), "aligned_init: noise length mismatch");
  const double abT = s.alpha_bar(s.T());
  return std::sqrt(abT) * A.apply_transpose(y) + std::sqrt(1.0 - abT) * eps;
}

Vec aligned_init(const LinearOperator& A, const Vec& y, const NoiseSchedule& s, Rng& rng) {
  return aligned_init(A, y, s, rng.normal_vec(A.input_size()));
}

Vec guided_mean(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s,
                const Vec& y, const LinearOperator& A, const SamplerConfig& cfg) {
  return compute_core(p, x_t, t, s, y, A, cfg).mu;
}

double candidate_distance(const Vec& mu, const Vec& z, double sigma_t, const Vec& x_t,
                          const Vec& y, const LinearOperator& A, double c1, double c2) {
  require(mu.size() == z.size() && mu.size() == x_t.size(), "candidate_distance: size mismatch");
  const Vec inner = mu + sigma_t * z - c1 * x_t;
  return (A.apply(inner) - c2 * y).squaredNorm();
}

StepResult dpps_step(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s,
                     const Vec& y, const LinearOperator& A, const SamplerConfig& cfg,
                     const Vec* x0_ref) {
  cfg.validate();
  StepCore core = compute_core(p, x_t, t, s, y, A, cfg);

  StepResult res;
  res.x0_hat = std::move(core.x0_hat);
  res.mu = std::move(core.mu);

  StepRecord& rec = res.record;
  rec.t = t;
  rec.residual = core.residual;
  if (x0_ref) {
    require(x0_ref->size() == x_t.size(), "dpps_step: reference length mismatch");
    rec.mu_error_ref = (std::sqrt(s.alpha_bar(t - 1)) * (*x0_ref) - res.mu).norm();
  }

  const DdimCoeffs c = ddim_coefficients(s, t);
  const double sigma = s.sigma(t);

  int n = 0;
  switch (cfg.variant) {
    case Variant::DpsDdim: n = 0; break;
    case Variant::DpsRandom: n = 1; break;
    case Variant::DppsFixedN:
    case Variant::McAverage: n = cfg.n_candidates; break;
    case Variant::DppsAdaptive: n = adaptive_candidate_count(s, t, cfg.n_max); break;
  }
  rec.n_candidates = n;

  if (cfg.variant == Variant::DpsDdim || sigma == 0.0) {
    // No stochastic term (or a degenerate one): the distance does not depend
    // on z, every candidate ties, and no draws are consumed.
    rec.candidate_distances = {candidate_distance(res.mu, Vec::Zero(x_t.size()), 0.0, x_t, y, A,
                                                  c.c1, c.c2)};
    rec.selected_index = 0;
    res.next = res.mu;
  } else {
    Rng rng = substream(cfg.seed, Stream::Candidates, static_cast<std::uint64_t>(t));
    std::vector<Vec> zs;
    zs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) zs.push_back(rng.normal_vec(x_t.size()));

    rec.candidate_distances.resize(static_cast<std::size_t>(n));
    int sel = 0;
    for (int i = 0; i < n; ++i) {
      rec.candidate_distances[static_cast<std::size_t>(i)] =
          candidate_distance(res.mu, zs[static_cast<std::size_t>(i)], sigma, x_t, y, A, c.c1,
                             c.c2);
      if (rec.candidate_distances[static_cast<std::size_t>(i)] <
          rec.candidate_distances[static_cast<std::size_t>(sel)])
        sel = i;
    }
    rec.selected_index = sel;

    if (cfg.variant == Variant::McAverage) {
      Vec zbar = Vec::Zero(x_t.size());
      for (const Vec& z : zs) zbar += z;
      zbar /= static_cast<double>(n);
      res.next = res.mu + sigma * zbar;
    } else {
      res.next = res.mu + sigma * zs[static_cast<std::size_t>(sel)];
    }
  }

  double dmin = rec.candidate_distances[0], dsum = 0.0;
  for (double d : rec.candidate_distances) {
    dmin = std::min(dmin, d);
    dsum += d;
  }
  rec.min_distance = dmin;
  rec.mean_distance = dsum / static_cast<double>(rec.candidate_distances.size());
  return res;
}

RunTrace run(const PriorModel& p, const LinearOperator& A, const Vec& y,
             const NoiseSchedule& s, const SamplerConfig& cfg, const Vec* x0_ref,
             const StepObserver& observer) {
  cfg.validate();
  Rng init_rng = substream(cfg.seed, Stream::Init);
  Vec x = cfg.aligned_init ? aligned_init(A, y, s, init_rng)
                           : init_rng.normal_vec(A.input_size());

  RunTrace trace;
  trace.shape = p.shape();
  trace.has_mu_error = x0_ref != nullptr;
  trace.steps.reserve(static_cast<std::size_t>(s.T()));

  for (int t = s.T(); t >= 1; --t) {
    StepResult res = dpps_step(p, x, t, s, y, A, cfg, x0_ref);
    if (observer) observer(t, x, res.x0_hat, res.mu);
    x = std::move(res.next);
    if (!x.allFinite())
      throw NanAbort(t, "sampling aborted: non-finite state after step t=" + std::to_string(t));
    trace.steps.push_back(std::move(res.record));
  }

  trace.final_estimate = std::move(x);
  return trace;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::DpsRandom: return "dps_random";
    case Variant::DpsDdim: return "dps_ddim";
    case Variant::DppsFixedN: return "dpps_fixed_n";
    case Variant::DppsAdaptive: return "dpps_adaptive";
    case Variant::McAverage: return "mc_average";
  }
  return "unknown";
}

}  // namespace dpps
