#pragma once

// Reproducible problem instances and the experiment drivers built on them.
//
// A Problem bundles everything one restoration run needs: the prior, the
// forward operator, the schedule, a measurement, and (when the ground truth
// is synthesized here) the exact posterior solution for scoring.  Experiment
// drivers take fully-resolved RunConfigs, fan out over seeds and variants,
// and return plain structs plus a JSON report; they write files only when
// given a non-empty output directory and never print.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpps/config.hpp"
#include "dpps/operators.hpp"
#include "dpps/oracle.hpp"
#include "dpps/prior.hpp"
#include "dpps/sampler.hpp"
#include "dpps/schedule.hpp"
#include "dpps/types.hpp"

namespace dpps {

// One fully-instantiated restoration task.  All randomness used to build it
// (ground truth, mask, measurement noise) comes from purpose-tagged
// substreams of `seed`, so the same (config, seed) pair always yields the
// same problem regardless of what else has been sampled.
struct Problem {
  std::shared_ptr<const PriorModel> prior;
  std::shared_ptr<const LinearOperator> op;
  NoiseSchedule schedule;
  SamplerConfig sampler;

  Vec y;                 // measurement, length op->output_size()
  double sigma_y = 0.0;  // measurement noise level used to produce y

  Vec x0;                        // ground truth when synthesized, else empty
  bool has_ground_truth = false; // true iff x0 holds the generating signal

  std::optional<OracleSolution> oracle;  // exact posterior, when computable

  std::string label;  // preset name, or "explicit" for inline configs

  const Shape& shape() const { return prior->shape(); }
};

// Names of the built-in problem presets, in presentation order.
std::vector<std::string> preset_names();

// Expands a preset name into explicit prior + operator + noise settings.
// The returned config carries no experiment section; callers layer their
// own sampler/seed settings on top.  Throws ConfigError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

// Builds the prior / operator described by a config (preset already
// expanded).  Operator randomness (random masks) is drawn from the
// mask substream of `seed`.
std::shared_ptr<PriorModel> build_prior(const PriorSpec& spec);
std::shared_ptr<LinearOperator> build_operator(const OperatorSpec& spec,
                                               const Shape& signal_shape,
                                               std::uint64_t seed);

// Instantiates the full problem for one seed.  When the config names a
// measurement file the measurement is loaded from disk and no ground truth
// is available (unless reference_path is also set); otherwise the ground
// truth is sampled from the prior and measured under sigma_y.  The exact
// posterior is attached whenever the prior family supports it and the
// operator is small enough to densify.
Problem make_problem(const RunConfig& cfg, std::uint64_t seed);

// Frozen diffusion state used by the variance experiment: a single x_t
// obtained by forward-noising the problem's ground truth to level t.
struct VarianceFixture {
  Vec x_t;
  int t = 0;
};

VarianceFixture make_variance_fixture(const Problem& pb, int t,
                                      std::uint64_t seed);

// Spread of the selected update direction under three candidate rules,
// estimated from `n_trials` independent batches of `n_samples` candidates
// drawn at the fixture state.  "single" uses the first candidate, "mean"
// averages the batch, "min" picks the batch's best-aligned candidate.
struct VarianceReport {
  int n_samples = 0;
  int n_trials = 0;
  int fixture_t = 0;
  double var_single = 0.0;
  double var_mean = 0.0;
  double var_min = 0.0;
  double ratio_mean_single = 0.0;  // var_mean / var_single
  bool ordering_strict = false;    // var_single > var_mean > var_min

  Json to_json() const;
};

VarianceReport variance_experiment(const Problem& pb,
                                   const VarianceFixture& fixture,
                                   int n_samples, int n_trials,
                                   std::uint64_t master_seed);

// Per-variant reconstruction trajectories averaged over seeds.  Curves are
// indexed step-first: entry 0 corresponds to t = T, the last to t = 1.
struct VariantCurves {
  std::string variant;
  std::vector<double> residual;    // mean measurement residual at entry to t
  std::vector<double> oracle_mse;  // mean MSE of x0_hat vs exact posterior
  std::vector<double> final_residual_per_seed;
  std::vector<double> final_oracle_mse_per_seed;
};

struct ConvergenceReport {
  std::vector<int> ts;  // T .. 1
  std::vector<VariantCurves> variants;
  bool has_oracle = false;
  Json report;
};

// Runs each named variant across all seeds with otherwise-identical
// settings and records residual / oracle-error curves.  When out_dir is
// non-empty, writes one CSV per variant plus convergence.json.
ConvergenceReport convergence_experiment(
    const RunConfig& base, const std::vector<std::string>& variant_names,
    const std::vector<std::uint64_t>& seeds, const std::string& out_dir);

// Final reconstruction quality as a function of the guidance step scale.
// spread[v] = max - min of the mean final oracle MSE over the scale grid;
// a flatter row means less tuning sensitivity.
struct LambdaSweepReport {
  std::vector<std::string> variants;
  std::vector<double> scales;
  std::vector<std::vector<double>> mean_mse;  // [variant][scale]
  std::vector<double> spread;                 // [variant]
  Json report;
};

LambdaSweepReport lambda_sweep(const RunConfig& base,
                               const std::vector<double>& scales,
                               const std::vector<std::string>& variant_names,
                               const std::vector<std::uint64_t>& seeds,
                               const std::string& out_dir);

// Distance between the realized update mean and the exact reverse-path
// mean anchored at the ground truth, tracked across the full trajectory
// and averaged over seeds.  Requires synthesized ground truth.
struct ErrorAccumReport {
  std::vector<int> ts;
  std::vector<std::string> variants;
  std::vector<std::vector<double>> mu_error;  // [variant][step]
  Json report;
};

ErrorAccumReport error_accumulation(const RunConfig& base,
                                    const std::vector<std::string>& variant_names,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::string& out_dir);

// Final oracle MSE as a function of the candidate count, one full run per
// (n, seed) pair.  n = 1 reduces to single-candidate guidance exactly.
struct CandidateBenefitReport {
  std::vector<int> n_values;
  std::vector<std::vector<double>> mse_per_seed;  // [n][seed]
  std::vector<double> mean_mse;                   // [n]
  Json report;
};

CandidateBenefitReport candidate_benefit(const RunConfig& base,
                                         const std::vector<int>& n_values,
                                         const std::vector<std::uint64_t>& seeds);

// Writes `j` to `path` as pretty-printed JSON with a trailing newline.
// Serialization is deterministic (sorted keys, fixed float formatting), so
// identical reports produce byte-identical files.
void write_json_file(const std::string& path, const Json& j);

}  // namespace dpps
