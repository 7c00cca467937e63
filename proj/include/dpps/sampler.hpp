#pragma once

#include "dpps/operators.hpp"
#include "dpps/prior.hpp"
#include "dpps/schedule.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace dpps {

// Reverse-process variants. DPS draws one noise vector at random; DPPS draws
// n candidates and keeps the one whose next state lands closest, in
// measurement space, to the deterministic reverse target c1 x_t + c2 x0.
enum class Variant { DpsRandom, DpsDdim, DppsFixedN, DppsAdaptive, McAverage };

// How step_scale turns the guidance gradient into an update:
//   Constant:    step_scale * grad ||r||
//   Normalized:  step_scale * grad ||r||^2 / ||r||  (= 2 step_scale grad ||r||)
enum class StepMode { Constant, Normalized };

// Objective whose gradient is used. In Normalized mode the choice cancels
// algebraically; it only matters under Constant.
enum class GuidanceNorm { NonSquared, Squared };

struct SamplerConfig {
  Variant variant = Variant::DppsAdaptive;
  double step_scale = 1.0;
  StepMode step_mode = StepMode::Normalized;
  GuidanceNorm guidance_norm = GuidanceNorm::NonSquared;
  int n_candidates = 20;  // DppsFixedN and McAverage
  int n_max = 50;         // DppsAdaptive
  bool aligned_init = true;
  double sigma_y_assumed = 0.01;  // documented operating assumption; not used in updates
  std::uint64_t seed = 0;

  // Engine-level validation. n_candidates = 1 is allowed so the documented
  // collapse DPPS(n=1) == DPS_RANDOM is realizable; the config-file layer is
  // stricter (see RunConfig::validate).
  void validate() const;
};

struct StepRecord {
  int t = 0;
  double residual = 0.0;  // ||y - A x0_hat||^2 at step entry
  int n_candidates = 0;   // resolved budget (0 for DpsDdim)
  int selected_index = 0;
  // One entry per evaluated candidate. Collapses to a single z-free entry
  // when sigma_t = 0 or no stochastic candidate is drawn.
  std::vector<double> candidate_distances;
  double min_distance = 0.0;
  double mean_distance = 0.0;
  // ||sqrt(abar_{t-1}) x0 - mu||_2 against a supplied reference; NaN if none.
  double mu_error_ref = std::numeric_limits<double>::quiet_NaN();
};

struct RunTrace {
  std::vector<StepRecord> steps;  // in iteration order t = T .. 1
  Vec final_estimate;             // x0_hat after the last step
  Shape shape;
  bool has_mu_error = false;
};

// x_T = sqrt(abar_T) A^T y + sqrt(1 - abar_T) eps
Vec aligned_init(const LinearOperator& A, const Vec& y, const NoiseSchedule& s, const Vec& eps);
Vec aligned_init(const LinearOperator& A, const Vec& y, const NoiseSchedule& s, Rng& rng);

// Measurement-guided reverse mean: the ancestral mean minus the scaled
// guidance gradient (see StepMode above).
Vec guided_mean(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s,
                const Vec& y, const LinearOperator& A, const SamplerConfig& cfg);

// Selection objective || A(mu + sigma_t z - c1 x_t) - c2 y ||^2.
double candidate_distance(const Vec& mu, const Vec& z, double sigma_t, const Vec& x_t,
                          const Vec& y, const LinearOperator& A, double c1, double c2);

struct StepResult {
  Vec next;
  Vec x0_hat;
  Vec mu;
  StepRecord record;
};

// One reverse step. Candidates come from a substream keyed by (cfg.seed, t),
// materialized in index order before evaluation, so the draw at one timestep
// is independent of the budget used at any other.
StepResult dpps_step(const PriorModel& p, const Vec& x_t, int t, const NoiseSchedule& s,
                     const Vec& y, const LinearOperator& A, const SamplerConfig& cfg,
                     const Vec* x0_ref = nullptr);

using StepObserver = std::function<void(int t, const Vec& x_t, const Vec& x0_hat, const Vec& mu)>;

// Full reverse trajectory from t = T to 1. Aborts with NanAbort if any state
// entry turns non-finite. x0_ref only adds the mu_error_ref diagnostic.
RunTrace run(const PriorModel& p, const LinearOperator& A, const Vec& y,
             const NoiseSchedule& s, const SamplerConfig& cfg, const Vec* x0_ref = nullptr,
             const StepObserver& observer = {});

const char* variant_name(Variant v);

}  // namespace dpps
