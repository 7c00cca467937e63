#include "dpps/experiments.hpp"

#include "dpps/image_io.hpp"
#include "dpps/rng.hpp"
#include "dpps/trace_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace dpps {
namespace {

// Grid coordinates for covariance construction: element index -> spatial
// position. Supported layouts are [d] (line) and [H,W] (plane).
std::vector<std::array<double, 2>> grid_coords(const Shape& shape) {
  std::vector<std::array<double, 2>> pts;
  if (shape.size() == 1) {
    pts.reserve(static_cast<std::size_t>(shape[0]));
    for (Index i = 0; i < shape[0]; ++i)
      pts.push_back({static_cast<double>(i), 0.0});
  } else if (shape.size() == 2) {
    pts.reserve(static_cast<std::size_t>(shape[0] * shape[1]));
    for (Index r = 0; r < shape[0]; ++r)
      for (Index c = 0; c < shape[1]; ++c)
        pts.push_back({static_cast<double>(r), static_cast<double>(c)});
  } else {
    throw ConfigError("smooth covariance needs a [d] or [H,W] shape, got " +
                      shape_str(shape));
  }
  return pts;
}

Mat rbf_matrix(const Shape& shape, double variance, double length_scale,
               double jitter) {
  require_config(variance > 0.0 && length_scale > 0.0 && jitter >= 0.0,
          "smooth covariance needs variance > 0, length_scale > 0, jitter >= 0");
  const auto pts = grid_coords(shape);
  const Index n = static_cast<Index>(pts.size());
  Mat k(n, n);
  const double inv = 1.0 / (2.0 * length_scale * length_scale);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double dr = pts[i][0] - pts[j][0];
      const double dc = pts[i][1] - pts[j][1];
      const double v = variance * std::exp(-(dr * dr + dc * dc) * inv);
      k(i, j) = v;
      k(j, i) = v;
    }
    k(i, i) += jitter;
  }
  return k;
}

Vec resolve_mean(const MeanSpec& spec, Index n, const char* where) {
  if (spec.is_constant) return Vec::Constant(n, spec.constant);
  require_config(spec.values.size() == n,
          std::string(where) + ": mean has " + std::to_string(spec.values.size()) +
              " values, shape needs " + std::to_string(n));
  return spec.values;
}

Covariance resolve_covariance(const CovarianceSpec& spec, const Shape& shape,
                              const char* where) {
  const Index n = shape_size(shape);
  switch (spec.type) {
    case CovarianceSpec::Type::Scalar:
      require_config(spec.variance > 0.0, std::string(where) + ": variance must be > 0");
      return Covariance::isotropic(spec.variance, n);
    case CovarianceSpec::Type::Diagonal:
      require_config(spec.variances.size() == n,
              std::string(where) + ": diagonal has " +
                  std::to_string(spec.variances.size()) + " entries, shape needs " +
                  std::to_string(n));
      return Covariance::diagonal(spec.variances);
    case CovarianceSpec::Type::Full:
      require_config(spec.matrix.rows() == n && spec.matrix.cols() == n,
              std::string(where) + ": matrix is " + std::to_string(spec.matrix.rows()) +
                  "x" + std::to_string(spec.matrix.cols()) + ", shape needs " +
                  std::to_string(n) + "x" + std::to_string(n));
      return Covariance::full(spec.matrix);
    case CovarianceSpec::Type::Rbf:
      return Covariance::full(
          rbf_matrix(shape, spec.variance, spec.length_scale, spec.jitter));
  }
  throw ConfigError("unreachable covariance type");
}

// Smooth 2D mean fields used by the image presets.
Vec ramp_mean_16() {
  Vec m(256);
  for (Index r = 0; r < 16; ++r)
    for (Index c = 0; c < 16; ++c)
      m[r * 16 + c] = 0.25 + 0.5 * static_cast<double>(c) / 15.0;
  return m;
}

Vec bump_mean_16(double base, double height, double width) {
  Vec m(256);
  for (Index r = 0; r < 16; ++r)
    for (Index c = 0; c < 16; ++c) {
      const double dr = static_cast<double>(r) - 7.5;
      const double dc = static_cast<double>(c) - 7.5;
      m[r * 16 + c] = base + height * std::exp(-(dr * dr + dc * dc) /
                                               (2.0 * width * width));
    }
  return m;
}

Vec diagonal_wave_mean_16() {
  Vec m(256);
  const double two_pi = 2.0 * EIGEN_PI;
  for (Index r = 0; r < 16; ++r)
    for (Index c = 0; c < 16; ++c)
      m[r * 16 + c] = 0.5 + 0.25 * std::sin(two_pi * static_cast<double>(r + c) / 16.0);
  return m;
}

MeanSpec values_mean(Vec v) {
  MeanSpec m;
  m.is_constant = false;
  m.values = std::move(v);
  return m;
}

CovarianceSpec rbf_cov(double variance, double length_scale) {
  CovarianceSpec c;
  c.type = CovarianceSpec::Type::Rbf;
  c.variance = variance;
  c.length_scale = length_scale;
  c.jitter = 1e-6;
  return c;
}

PriorSpec smooth_bump_prior_16() {
  PriorSpec p;
  p.type = PriorSpec::Type::Gaussian;
  p.shape = {16, 16};
  p.mean = values_mean(bump_mean_16(0.25, 0.45, 4.0));
  p.covariance = rbf_cov(0.04, 2.0);
  return p;
}

// Operators described by specs are built with `build_operator`; random masks
// take their pattern from the mask substream of the run seed, with one
// sub-index per RandomMask in traversal order so composed chains stay
// independent.
std::shared_ptr<LinearOperator> build_operator_impl(const OperatorSpec& spec,
                                                    const Shape& signal_shape,
                                                    std::uint64_t seed,
                                                    std::uint64_t& mask_index) {
  switch (spec.type) {
    case OperatorSpec::Type::Identity:
      return std::make_shared<IdentityOperator>(signal_shape);
    case OperatorSpec::Type::Mask: {
      if (!spec.mask_path.empty()) {
        Shape mask_shape;
        auto flags = read_mask_pgm(spec.mask_path, mask_shape);
        return std::make_shared<MaskOperator>(signal_shape, std::move(flags));
      }
      return std::make_shared<MaskOperator>(signal_shape, spec.pixel_mask);
    }
    case OperatorSpec::Type::RandomMask: {
      const std::uint64_t s =
          substream_seed(seed, Stream::Mask, mask_index++);
      return std::make_shared<MaskOperator>(
          MaskOperator::random(signal_shape, spec.keep_probability, s));
    }
    case OperatorSpec::Type::Blur: {
      Mat kernel;
      if (spec.kernel == "gaussian") {
        kernel = gaussian_kernel(spec.size, spec.sigma);
      } else if (spec.kernel == "box") {
        kernel = box_kernel(spec.size);
      } else if (spec.kernel == "motion") {
        kernel = motion_kernel(spec.length);
      } else {
        throw ConfigError("operator.kernel: unknown kernel '" + spec.kernel + "'");
      }
      return std::make_shared<ConvolutionOperator>(signal_shape, kernel,
                                                   spec.boundary);
    }
    case OperatorSpec::Type::Downsample:
      return std::make_shared<DownsampleOperator>(signal_shape, spec.factor);
    case OperatorSpec::Type::Composed: {
      require_config(spec.children.size() == 2,
              "operator.children: composed operator needs exactly [inner, outer]");
      auto inner =
          build_operator_impl(spec.children[0], signal_shape, seed, mask_index);
      auto outer = build_operator_impl(spec.children[1], inner->output_shape(),
                                       seed, mask_index);
      return std::make_shared<ComposedOperator>(std::move(outer),
                                                std::move(inner));
    }
  }
  throw ConfigError("unreachable operator type");
}

Vec load_vector_file(const std::string& path, const char* what) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".csv") return read_signal_csv(path);
  if (ext == ".pgm" || ext == ".ppm") return read_image(path).data;
  throw ConfigError(std::string(what) + ": unsupported file type '" + ext +
                    "' (expected .csv, .pgm, or .ppm)");
}

double sample_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return acc / (n - 1.0);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

SamplerConfig variant_config(const SamplerConfig& base, const std::string& name) {
  SamplerConfig c = base;
  c.variant = variant_from_name(name);
  return c;
}

Json seeds_json(const std::vector<std::uint64_t>& seeds) {
  Json j = Json::array();
  for (auto s : seeds) j.push_back(s);
  return j;
}

double final_residual_sq(const Problem& pb, const Vec& estimate) {
  return (pb.y - pb.op->apply(estimate)).squaredNorm();
}

void write_curve_csv(const std::string& path, const std::vector<int>& ts,
                     const std::vector<std::vector<double>>& cols,
                     const std::vector<std::string>& names) {
  std::ofstream out(path);
  require_io(out.good(), "cannot open " + path + " for writing");
  out << "t";
  for (const auto& n : names) out << "," << n;
  out << "\n";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out << ts[i];
    for (const auto& col : cols) out << "," << format_double(col[i]);
    out << "\n";
  }
  require_io(out.good(), "failed writing " + path);
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"gauss1d-mask", "gmm-inpaint-16", "gauss-blur-16", "gauss-sr-16"};
}

void apply_preset(RunConfig& cfg, const std::string& name) {
  PriorSpec prior;
  OperatorSpec op;
  if (name == "gauss1d-mask") {
    prior.type = PriorSpec::Type::Gaussian;
    prior.shape = {8};
    Vec m(8);
    for (Index i = 0; i < 8; ++i)
      m[i] = 0.5 + 0.3 * std::sin(2.0 * EIGEN_PI * static_cast<double>(i) / 8.0);
    prior.mean = values_mean(std::move(m));
    prior.covariance = rbf_cov(0.0625, 2.0);
    op.type = OperatorSpec::Type::RandomMask;
    op.keep_probability = 0.5;
  } else if (name == "gmm-inpaint-16") {
    prior.type = PriorSpec::Type::Gmm;
    prior.shape = {16, 16};
    // Three overlapping modes: variations around a shared ramp field, with
    // correlated covariances so masked pixels are informed by their measured
    // neighbours.  Widely separated isotropic modes would make reconstruction
    // error hinge on mode identification alone, which masks every other
    // property of the sampler under an 80% mask.
    const Vec base_field = ramp_mean_16();
    auto blend = [&base_field](const Vec& v) -> Vec {
      return base_field + 0.3 * (v - base_field);
    };
    GmmComponentSpec ramp;
    ramp.weight = 0.5;
    ramp.mean = values_mean(base_field);
    ramp.covariance = rbf_cov(0.0225, 2.0);
    GmmComponentSpec bump;
    bump.weight = 0.3;
    bump.mean = values_mean(blend(bump_mean_16(0.3, 0.5, 3.2)));
    bump.covariance = rbf_cov(0.0225, 2.0);
    GmmComponentSpec wave;
    wave.weight = 0.2;
    wave.mean = values_mean(blend(diagonal_wave_mean_16()));
    wave.covariance = rbf_cov(0.0225, 2.0);
    prior.components = {std::move(ramp), std::move(bump), std::move(wave)};
    op.type = OperatorSpec::Type::RandomMask;
    op.keep_probability = 0.2;
  } else if (name == "gauss-blur-16") {
    prior = smooth_bump_prior_16();
    op.type = OperatorSpec::Type::Blur;
    op.kernel = "gaussian";
    op.size = 5;
    op.sigma = 1.0;
    op.boundary = Boundary::Reflect;
  } else if (name == "gauss-sr-16") {
    prior = smooth_bump_prior_16();
    op.type = OperatorSpec::Type::Downsample;
    op.factor = 4;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("problem.preset: unknown preset '" + name +
                      "' (known: " + known + ")");
  }
  cfg.prior = std::move(prior);
  cfg.op = std::move(op);
  cfg.problem.preset.clear();
}

std::shared_ptr<PriorModel> build_prior(const PriorSpec& spec) {
  const Index n = shape_size(spec.shape);
  if (spec.type == PriorSpec::Type::Gaussian) {
    return std::make_shared<GaussianPrior>(
        spec.shape, resolve_mean(spec.mean, n, "prior.mean"),
        resolve_covariance(spec.covariance, spec.shape, "prior.covariance"));
  }
  require_config(!spec.components.empty(), "prior.components: at least one component");
  std::vector<GmmComponent> comps;
  comps.reserve(spec.components.size());
  for (std::size_t k = 0; k < spec.components.size(); ++k) {
    const auto& c = spec.components[k];
    const std::string where = "prior.components[" + std::to_string(k) + "]";
    comps.push_back({c.weight, resolve_mean(c.mean, n, where.c_str()),
                     resolve_covariance(c.covariance, spec.shape, where.c_str())});
  }
  return std::make_shared<GmmPrior>(spec.shape, std::move(comps));
}

std::shared_ptr<LinearOperator> build_operator(const OperatorSpec& spec,
                                               const Shape& signal_shape,
                                               std::uint64_t seed) {
  std::uint64_t mask_index = 0;
  return build_operator_impl(spec, signal_shape, seed, mask_index);
}

Problem make_problem(const RunConfig& cfg, std::uint64_t seed) {
  RunConfig eff = cfg;
  const std::string label =
      eff.problem.preset.empty() ? "explicit" : eff.problem.preset;
  if (!eff.problem.preset.empty()) apply_preset(eff, eff.problem.preset);
  require_config(eff.prior.has_value() && eff.op.has_value(),
          "problem: either a preset or explicit prior and operator sections");

  auto prior = build_prior(*eff.prior);
  auto op = build_operator(*eff.op, prior->shape(), seed);
  require_config(op->input_shape() == prior->shape(),
          "operator input shape " + shape_str(op->input_shape()) +
              " does not match prior shape " + shape_str(prior->shape()));

  Problem pb{prior,
             op,
             make_schedule(eff.schedule),
             eff.sampler,
             Vec(),
             eff.problem.sigma_y,
             Vec(),
             false,
             std::nullopt,
             label};
  pb.sampler.seed = seed;
  pb.sampler.validate();
  require_config(pb.sigma_y >= 0.0, "problem.sigma_y must be >= 0");

  if (eff.problem.measurement_path.empty()) {
    Rng gt_rng = substream(seed, Stream::GroundTruth);
    pb.x0 = prior->sample(gt_rng);
    Rng noise_rng = substream(seed, Stream::Measurement);
    pb.y = measure(*op, pb.x0, pb.sigma_y, noise_rng);
    pb.has_ground_truth = true;
  } else {
    pb.y = load_vector_file(eff.problem.measurement_path, "problem.measurement_path");
    require_config(pb.y.size() == op->output_size(),
            "problem.measurement_path: measurement has " +
                std::to_string(pb.y.size()) + " values, operator produces " +
                std::to_string(op->output_size()));
    if (!eff.problem.reference_path.empty()) {
      pb.x0 = load_vector_file(eff.problem.reference_path, "problem.reference_path");
      require_config(pb.x0.size() == op->input_size(),
              "problem.reference_path: reference has " +
                  std::to_string(pb.x0.size()) + " values, signal needs " +
                  std::to_string(op->input_size()));
      pb.has_ground_truth = true;
    }
  }

  try {
    pb.oracle = restoration_oracle(*prior, *op, pb.y, pb.sigma_y);
  } catch (const Error&) {
    pb.oracle.reset();  // prior family or system does not admit an exact answer
  }
  return pb;
}

VarianceFixture make_variance_fixture(const Problem& pb, int t,
                                      std::uint64_t seed) {
  require_config(pb.has_ground_truth,
          "variance fixture needs a problem with a known generating signal");
  Rng rng = substream(seed, Stream::Fixture);
  VarianceFixture fx;
  fx.t = t;
  fx.x_t = forward_sample(pb.x0, t, pb.schedule, rng);
  return fx;
}

Json VarianceReport::to_json() const {
  return Json{{"n_samples", n_samples},
              {"n_trials", n_trials},
              {"fixture_t", fixture_t},
              {"var_single", var_single},
              {"var_mean", var_mean},
              {"var_min", var_min},
              {"ratio_mean_single", ratio_mean_single},
              {"ordering_strict", ordering_strict}};
}

VarianceReport variance_experiment(const Problem& pb,
                                   const VarianceFixture& fixture,
                                   int n_samples, int n_trials,
                                   std::uint64_t master_seed) {
  require_config(n_samples >= 1, "variance experiment needs n_samples >= 1");
  require_config(n_trials >= 2, "variance experiment needs n_trials >= 2");
  const int t = fixture.t;
  const NoiseSchedule& s = pb.schedule;
  const double sigma = s.sigma(t);
  const auto c = ddim_coefficients(s, t);
  const Vec mu =
      guided_mean(*pb.prior, fixture.x_t, t, s, pb.y, *pb.op, pb.sampler);
  const Index d = mu.size();

  std::vector<double> first(n_trials), mean(n_trials), best(n_trials);
  for (int m = 0; m < n_trials; ++m) {
    Rng rng = substream(master_seed, Stream::Trial,
                        static_cast<std::uint64_t>(m));
    double acc = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_samples; ++i) {
      const Vec z = rng.normal_vec(d);
      const double f =
          candidate_distance(mu, z, sigma, fixture.x_t, pb.y, *pb.op, c.c1, c.c2);
      if (i == 0) first[m] = f;
      acc += f;
      lo = std::min(lo, f);
    }
    mean[m] = acc / n_samples;
    best[m] = lo;
  }

  VarianceReport rep;
  rep.n_samples = n_samples;
  rep.n_trials = n_trials;
  rep.fixture_t = t;
  rep.var_single = sample_variance(first);
  rep.var_mean = sample_variance(mean);
  rep.var_min = sample_variance(best);
  rep.ratio_mean_single =
      rep.var_single > 0.0 ? rep.var_mean / rep.var_single : 0.0;
  rep.ordering_strict =
      rep.var_single > rep.var_mean && rep.var_mean > rep.var_min;
  return rep;
}

ConvergenceReport convergence_experiment(
    const RunConfig& base, const std::vector<std::string>& variant_names,
    const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
  require_config(!seeds.empty(), "convergence experiment needs at least one seed");
  require_config(!variant_names.empty(), "convergence experiment needs variants");
  const int T = base.schedule.T;
  const std::size_t n_var = variant_names.size();

  ConvergenceReport rep;
  rep.ts.resize(T);
  for (int i = 0; i < T; ++i) rep.ts[i] = T - i;
  rep.variants.resize(n_var);
  rep.has_oracle = true;
  for (std::size_t v = 0; v < n_var; ++v) {
    rep.variants[v].variant = variant_names[v];
    rep.variants[v].residual.assign(T, 0.0);
    rep.variants[v].oracle_mse.assign(T, 0.0);
  }

  for (const std::uint64_t seed : seeds) {
    const Problem pb = make_problem(base, seed);
    if (!pb.oracle) rep.has_oracle = false;
    for (std::size_t v = 0; v < n_var; ++v) {
      auto& cur = rep.variants[v];
      const SamplerConfig cfg = variant_config(pb.sampler, variant_names[v]);
      StepObserver observer;
      if (pb.oracle) {
        observer = [&](int t, const Vec&, const Vec& x0_hat, const Vec&) {
          cur.oracle_mse[static_cast<std::size_t>(T - t)] +=
              mse(x0_hat, pb.oracle->posterior_mean);
        };
      }
      const RunTrace trace =
          run(*pb.prior, *pb.op, pb.y, pb.schedule, cfg,
              pb.has_ground_truth ? &pb.x0 : nullptr, observer);
      for (int i = 0; i < T; ++i)
        cur.residual[static_cast<std::size_t>(i)] +=
            trace.steps[static_cast<std::size_t>(i)].residual;
      cur.final_residual_per_seed.push_back(
          final_residual_sq(pb, trace.final_estimate));
      if (pb.oracle)
        cur.final_oracle_mse_per_seed.push_back(
            mse(trace.final_estimate, pb.oracle->posterior_mean));
    }
  }

  const double inv = 1.0 / static_cast<double>(seeds.size());
  for (auto& cur : rep.variants) {
    for (auto& r : cur.residual) r *= inv;
    if (rep.has_oracle) {
      for (auto& m : cur.oracle_mse) m *= inv;
    } else {
      cur.oracle_mse.assign(static_cast<std::size_t>(T),
                            std::numeric_limits<double>::quiet_NaN());
      cur.final_oracle_mse_per_seed.clear();
    }
  }

  Json variants_json = Json::object();
  for (const auto& cur : rep.variants) {
    Json v{{"mean_final_residual", mean_of(cur.final_residual_per_seed)},
           {"final_residual_per_seed", cur.final_residual_per_seed}};
    if (rep.has_oracle) {
      v["mean_final_oracle_mse"] = mean_of(cur.final_oracle_mse_per_seed);
      v["final_oracle_mse_per_seed"] = cur.final_oracle_mse_per_seed;
    }
    variants_json[cur.variant] = std::move(v);
  }
  rep.report = Json{{"experiment", "convergence"},
                    {"seeds", seeds_json(seeds)},
                    {"has_oracle", rep.has_oracle},
                    {"variants", variants_json},
                    {"config", serialize_config(base)}};

  if (!out_dir.empty()) {
    Json files = Json::object();
    for (const auto& cur : rep.variants) {
      const std::string file = "convergence_" + cur.variant + ".csv";
      write_curve_csv(out_dir + "/" + file, rep.ts, {cur.residual, cur.oracle_mse},
                      {"residual", "oracle_mse"});
      files[cur.variant] = file;
    }
    rep.report["curve_files"] = files;
    write_json_file(out_dir + "/convergence.json", rep.report);
  }
  return rep;
}

LambdaSweepReport lambda_sweep(const RunConfig& base,
                               const std::vector<double>& scales,
                               const std::vector<std::string>& variant_names,
                               const std::vector<std::uint64_t>& seeds,
                               const std::string& out_dir) {
  require_config(!scales.empty(), "step-scale sweep needs scales");
  require_config(!variant_names.empty(), "step-scale sweep needs variants");
  require_config(!seeds.empty(), "step-scale sweep needs seeds");

  std::vector<Problem> problems;
  problems.reserve(seeds.size());
  for (const std::uint64_t seed : seeds) {
    problems.push_back(make_problem(base, seed));
    if (!problems.back().oracle)
      throw ConfigError(
          "step-scale sweep needs a problem with an exact posterior for scoring");
  }

  LambdaSweepReport rep;
  rep.variants = variant_names;
  rep.scales = scales;
  rep.mean_mse.assign(variant_names.size(),
                      std::vector<double>(scales.size(), 0.0));
  rep.spread.assign(variant_names.size(), 0.0);

  for (std::size_t v = 0; v < variant_names.size(); ++v) {
    for (std::size_t si = 0; si < scales.size(); ++si) {
      double acc = 0.0;
      for (const Problem& pb : problems) {
        SamplerConfig cfg = variant_config(pb.sampler, variant_names[v]);
        cfg.step_scale = scales[si];
        const RunTrace trace = run(*pb.prior, *pb.op, pb.y, pb.schedule, cfg);
        acc += mse(trace.final_estimate, pb.oracle->posterior_mean);
      }
      rep.mean_mse[v][si] = acc / static_cast<double>(problems.size());
    }
    const auto [lo, hi] =
        std::minmax_element(rep.mean_mse[v].begin(), rep.mean_mse[v].end());
    rep.spread[v] = *hi - *lo;
  }

  Json variants_json = Json::object();
  for (std::size_t v = 0; v < variant_names.size(); ++v) {
    variants_json[variant_names[v]] =
        Json{{"mean_mse", rep.mean_mse[v]}, {"spread", rep.spread[v]}};
  }
  rep.report = Json{{"experiment", "lambda_sweep"},
                    {"scales", scales},
                    {"seeds", seeds_json(seeds)},
                    {"variants", variants_json},
                    {"config", serialize_config(base)}};

  if (!out_dir.empty()) {
    std::ofstream out(out_dir + "/lambda_sweep.csv");
    require_io(out.good(), "cannot open " + out_dir + "/lambda_sweep.csv");
    out << "variant,step_scale,mean_final_oracle_mse\n";
    for (std::size_t v = 0; v < variant_names.size(); ++v)
      for (std::size_t si = 0; si < scales.size(); ++si)
        out << variant_names[v] << "," << format_double(scales[si]) << ","
            << format_double(rep.mean_mse[v][si]) << "\n";
    require_io(out.good(), "failed writing lambda_sweep.csv");
    write_json_file(out_dir + "/lambda_sweep.json", rep.report);
  }
  return rep;
}

ErrorAccumReport error_accumulation(const RunConfig& base,
                                    const std::vector<std::string>& variant_names,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::string& out_dir) {
  require_config(!variant_names.empty(), "error accumulation needs variants");
  require_config(!seeds.empty(), "error accumulation needs seeds");
  const int T = base.schedule.T;

  ErrorAccumReport rep;
  rep.ts.resize(T);
  for (int i = 0; i < T; ++i) rep.ts[i] = T - i;
  rep.variants = variant_names;
  rep.mu_error.assign(variant_names.size(), std::vector<double>(T, 0.0));

  for (const std::uint64_t seed : seeds) {
    const Problem pb = make_problem(base, seed);
    if (!pb.has_ground_truth)
      throw ConfigError(
          "error accumulation needs a synthesized (or referenced) ground truth");
    for (std::size_t v = 0; v < variant_names.size(); ++v) {
      const SamplerConfig cfg = variant_config(pb.sampler, variant_names[v]);
      const RunTrace trace =
          run(*pb.prior, *pb.op, pb.y, pb.schedule, cfg, &pb.x0);
      for (int i = 0; i < T; ++i)
        rep.mu_error[v][static_cast<std::size_t>(i)] +=
            trace.steps[static_cast<std::size_t>(i)].mu_error_ref;
    }
  }
  const double inv = 1.0 / static_cast<double>(seeds.size());
  for (auto& row : rep.mu_error)
    for (auto& e : row) e *= inv;

  Json variants_json = Json::object();
  for (std::size_t v = 0; v < variant_names.size(); ++v) {
    variants_json[variant_names[v]] =
        Json{{"final_mu_error", rep.mu_error[v].back()},
             {"max_mu_error", *std::max_element(rep.mu_error[v].begin(),
                                                rep.mu_error[v].end())}};
  }
  rep.report = Json{{"experiment", "error_accumulation"},
                    {"seeds", seeds_json(seeds)},
                    {"variants", variants_json},
                    {"config", serialize_config(base)}};

  if (!out_dir.empty()) {
    write_curve_csv(out_dir + "/error_accum.csv", rep.ts, rep.mu_error,
                    rep.variants);
    write_json_file(out_dir + "/error_accum.json", rep.report);
  }
  return rep;
}

CandidateBenefitReport candidate_benefit(const RunConfig& base,
                                         const std::vector<int>& n_values,
                                         const std::vector<std::uint64_t>& seeds) {
  require_config(!n_values.empty(), "candidate benefit needs candidate counts");
  require_config(!seeds.empty(), "candidate benefit needs seeds");

  std::vector<Problem> problems;
  problems.reserve(seeds.size());
  for (const std::uint64_t seed : seeds) {
    problems.push_back(make_problem(base, seed));
    if (!problems.back().oracle)
      throw ConfigError(
          "candidate benefit needs a problem with an exact posterior for scoring");
  }

  CandidateBenefitReport rep;
  rep.n_values = n_values;
  rep.mse_per_seed.assign(n_values.size(), {});
  rep.mean_mse.assign(n_values.size(), 0.0);

  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    require_config(n_values[ni] >= 1, "candidate counts must be >= 1");
    for (const Problem& pb : problems) {
      SamplerConfig cfg = pb.sampler;
      cfg.variant = Variant::DppsFixedN;
      cfg.n_candidates = n_values[ni];
      const RunTrace trace = run(*pb.prior, *pb.op, pb.y, pb.schedule, cfg);
      rep.mse_per_seed[ni].push_back(
          mse(trace.final_estimate, pb.oracle->posterior_mean));
    }
    rep.mean_mse[ni] = mean_of(rep.mse_per_seed[ni]);
  }

  rep.report = Json{{"experiment", "candidate_benefit"},
                    {"n_values", n_values},
                    {"seeds", seeds_json(seeds)},
                    {"mean_mse", rep.mean_mse},
                    {"mse_per_seed", rep.mse_per_seed},
                    {"config", serialize_config(base)}};
  return rep;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  require_io(out.good(), "cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  require_io(out.good(), "failed writing " + path);
}

}  // namespace dpps
