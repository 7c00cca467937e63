#pragma once

#include "dpps/sampler.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace dpps {

using Json = nlohmann::json;

// Run configuration: a single strict JSON document. Unknown keys anywhere are
// errors, every error names the offending dotted key path, and
// parse -> serialize -> parse is the identity on the resulting structure.

struct ScheduleSpec {
  int T = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  VarianceKind variance = VarianceKind::PosteriorBeta;
};

struct MeanSpec {
  // Exactly one representation is active: constant fill or explicit values.
  bool is_constant = true;
  double constant = 0.0;
  Vec values;
};

struct CovarianceSpec {
  enum class Type { Scalar, Diagonal, Full, Rbf };
  Type type = Type::Scalar;
  double variance = 1.0;       // Scalar, Rbf
  Vec variances;               // Diagonal
  Mat matrix;                  // Full
  double length_scale = 2.0;   // Rbf: exp(-dist^2 / (2 l^2)) over the grid
  double jitter = 1e-6;        // Rbf: added to the diagonal
};

struct GmmComponentSpec {
  double weight = 1.0;
  MeanSpec mean;
  CovarianceSpec covariance;
};

struct PriorSpec {
  enum class Type { Gaussian, Gmm };
  Type type = Type::Gaussian;
  Shape shape;
  MeanSpec mean;               // Gaussian
  CovarianceSpec covariance;   // Gaussian
  std::vector<GmmComponentSpec> components;  // Gmm
};

struct OperatorSpec {
  enum class Type { Identity, Mask, RandomMask, Blur, Downsample, Composed };
  Type type = Type::Identity;
  std::vector<std::uint8_t> pixel_mask;  // Mask (inline)
  std::string mask_path;                 // Mask (from PGM); empty if inline
  double keep_probability = 0.2;         // RandomMask (drawn per run seed)
  std::string kernel = "gaussian";       // Blur: gaussian | box | motion
  int size = 5;                          // Blur: gaussian/box side
  double sigma = 1.0;                    // Blur: gaussian width
  int length = 5;                        // Blur: motion length
  Boundary boundary = Boundary::Reflect; // Blur
  int factor = 4;                        // Downsample
  std::vector<OperatorSpec> children;    // Composed: [inner, outer]
};

struct ProblemSpec {
  std::string preset;            // empty = explicit prior/operator sections
  double sigma_y = 0.01;
  std::string measurement_path;  // empty = synthesize from a prior draw
  std::string reference_path;    // empty = use the synthesized ground truth
};

struct ExperimentSpec {
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int n_samples = 10;    // variance: z draws per trial
  int n_trials = 1000;   // variance: trials
  int fixture_t = 800;   // variance: fixture timestep
  std::vector<double> step_scales = {0.5, 1.0, 2.0};
  std::vector<std::string> variants = {"dpps_fixed_n", "dps_random"};
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  ScheduleSpec schedule;
  SamplerConfig sampler;  // seed field mirrors the top-level seed after parse
  ProblemSpec problem;
  std::optional<PriorSpec> prior;
  std::optional<OperatorSpec> op;
  ExperimentSpec experiment;
};

RunConfig parse_config(const Json& j);
RunConfig load_config_file(const std::string& path);
Json serialize_config(const RunConfig& cfg);

// Cross-field rules the schema cannot express (preset vs explicit sections,
// candidate budgets for DPPS variants, ...). Throws ConfigError naming keys.
void validate_config(const RunConfig& cfg);

Variant variant_from_name(const std::string& name);

NoiseSchedule make_schedule(const ScheduleSpec& spec);

}  // namespace dpps
