#include "dpps/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dpps {

namespace {

// Strict object reader: every key must be consumed, every access is
// type-checked, and errors carry the dotted path of the offending key.
class ObjReader {
 public:
  ObjReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string key_path(const std::string& key) const { return path_ + "." + key; }

  double number(const std::string& key, double def) {
    return has(key) ? number_req(key) : def;
  }
  double number_req(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
    return v.get<double>();
  }
  int integer(const std::string& key, int def) {
    return has(key) ? integer_req(key) : def;
  }
  int integer_req(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key) + ": expected an integer");
    return v.get<int>();
  }
  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const Json& v = at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
      throw ConfigError(key_path(key) + ": expected a non-negative integer");
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
      throw ConfigError(key_path(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const Json& v = at(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key) + ": expected a boolean");
    return v.get<bool>();
  }
  std::string str(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    return str_req(key);
  }
  std::string str_req(const std::string& key) {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
    return v.get<std::string>();
  }

  void done() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key()))
        throw ConfigError(path_ + "." + item.key() + ": unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Vec parse_vec(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + ": expected a non-empty array of numbers");
  Vec out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a number");
    out[static_cast<Index>(i)] = v[i].get<double>();
  }
  return out;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <typename EnumT>
EnumT parse_enum(const std::string& value, const std::string& path,
                 const std::vector<std::pair<std::string, EnumT>>& table) {
  std::string allowed;
  for (const auto& [name, e] : table) {
    if (value == name) return e;
    allowed += allowed.empty() ? name : (" | " + name);
  }
  throw ConfigError(path + ": '" + value + "' is not one of " + allowed);
}

const std::vector<std::pair<std::string, Variant>> kVariants = {
    {"dps_random", Variant::DpsRandom},     {"dps_ddim", Variant::DpsDdim},
    {"dpps_fixed_n", Variant::DppsFixedN},  {"dpps_adaptive", Variant::DppsAdaptive},
    {"mc_average", Variant::McAverage},
};
const std::vector<std::pair<std::string, VarianceKind>> kVarianceKinds = {
    {"posterior_beta", VarianceKind::PosteriorBeta},
    {"beta", VarianceKind::Beta},
};
const std::vector<std::pair<std::string, StepMode>> kStepModes = {
    {"normalized", StepMode::Normalized},
    {"constant", StepMode::Constant},
};
const std::vector<std::pair<std::string, GuidanceNorm>> kGuidanceNorms = {
    {"non_squared", GuidanceNorm::NonSquared},
    {"squared", GuidanceNorm::Squared},
};
const std::vector<std::pair<std::string, Boundary>> kBoundaries = {
    {"reflect", Boundary::Reflect},
    {"zero", Boundary::Zero},
};
const std::vector<std::pair<std::string, CovarianceSpec::Type>> kCovTypes = {
    {"scalar", CovarianceSpec::Type::Scalar},
    {"diagonal", CovarianceSpec::Type::Diagonal},
    {"full", CovarianceSpec::Type::Full},
    {"rbf", CovarianceSpec::Type::Rbf},
};
const std::vector<std::pair<std::string, PriorSpec::Type>> kPriorTypes = {
    {"gaussian", PriorSpec::Type::Gaussian},
    {"gmm", PriorSpec::Type::Gmm},
};
const std::vector<std::pair<std::string, OperatorSpec::Type>> kOpTypes = {
    {"identity", OperatorSpec::Type::Identity},
    {"mask", OperatorSpec::Type::Mask},
    {"random_mask", OperatorSpec::Type::RandomMask},
    {"blur", OperatorSpec::Type::Blur},
    {"downsample", OperatorSpec::Type::Downsample},
    {"composed", OperatorSpec::Type::Composed},
};

template <typename EnumT>
std::string enum_name(EnumT e, const std::vector<std::pair<std::string, EnumT>>& table) {
  for (const auto& [name, v] : table)
    if (v == e) return name;
  throw Error("enum_name: unmapped value");
}

MeanSpec parse_mean(const Json& j, const std::string& path) {
  ObjReader r(j, path);
  MeanSpec m;
  const bool has_const = r.has("constant"), has_vals = r.has("values");
  if (has_const == has_vals)
    throw ConfigError(path + ": exactly one of 'constant' or 'values' is required");
  if (has_const) {
    m.is_constant = true;
    m.constant = r.number_req("constant");
  } else {
    m.is_constant = false;
    m.values = parse_vec(r.at("values"), r.key_path("values"));
  }
  r.done();
  return m;
}

Json mean_json(const MeanSpec& m) {
  Json j = Json::object();
  if (m.is_constant)
    j["constant"] = m.constant;
  else
    j["values"] = vec_json(m.values);
  return j;
}

CovarianceSpec parse_covariance(const Json& j, const std::string& path) {
  ObjReader r(j, path);
  CovarianceSpec c;
  c.type = parse_enum(r.str_req("type"), r.key_path("type"), kCovTypes);
  switch (c.type) {
    case CovarianceSpec::Type::Scalar:
      c.variance = r.number_req("variance");
      break;
    case CovarianceSpec::Type::Diagonal:
      c.variances = parse_vec(r.at("variances"), r.key_path("variances"));
      break;
    case CovarianceSpec::Type::Full: {
      const Json& m = r.at("matrix");
      if (!m.is_array() || m.empty()) throw ConfigError(r.key_path("matrix") + ": expected an array of rows");
      const std::size_t n = m.size();
      c.matrix.resize(static_cast<Index>(n), static_cast<Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const Vec row = parse_vec(m[i], r.key_path("matrix") + "[" + std::to_string(i) + "]");
        if (row.size() != static_cast<Index>(n))
          throw ConfigError(r.key_path("matrix") + ": rows must all have length " + std::to_string(n));
        c.matrix.row(static_cast<Index>(i)) = row;
      }
      break;
    }
    case CovarianceSpec::Type::Rbf:
      c.variance = r.number_req("variance");
      c.length_scale = r.number_req("length_scale");
      c.jitter = r.number("jitter", 1e-6);
      break;
  }
  r.done();
  return c;
}

Json covariance_json(const CovarianceSpec& c) {
  Json j = Json::object();
  j["type"] = enum_name(c.type, kCovTypes);
  switch (c.type) {
    case CovarianceSpec::Type::Scalar:
      j["variance"] = c.variance;
      break;
    case CovarianceSpec::Type::Diagonal:
      j["variances"] = vec_json(c.variances);
      break;
    case CovarianceSpec::Type::Full: {
      Json rows = Json::array();
      for (Index i = 0; i < c.matrix.rows(); ++i) rows.push_back(vec_json(c.matrix.row(i)));
      j["matrix"] = rows;
      break;
    }
    case CovarianceSpec::Type::Rbf:
      j["variance"] = c.variance;
      j["length_scale"] = c.length_scale;
      j["jitter"] = c.jitter;
      break;
  }
  return j;
}

Shape parse_shape(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty() || v.size() > 3)
    throw ConfigError(path + ": expected an array of 1 to 3 extents");
  Shape s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer() || v[i].get<std::int64_t>() < 1)
      throw ConfigError(path + "[" + std::to_string(i) + "]: expected a positive integer");
    s.push_back(v[i].get<Index>());
  }
  return s;
}

PriorSpec parse_prior(const Json& j, const std::string& path) {
  ObjReader r(j, path);
  PriorSpec p;
  p.type = parse_enum(r.str_req("type"), r.key_path("type"), kPriorTypes);
  p.shape = parse_shape(r.at("shape"), r.key_path("shape"));
  if (p.type == PriorSpec::Type::Gaussian) {
    p.mean = parse_mean(r.at("mean"), r.key_path("mean"));
    p.covariance = parse_covariance(r.at("covariance"), r.key_path("covariance"));
  } else {
    const Json& comps = r.at("components");
    if (!comps.is_array() || comps.empty())
      throw ConfigError(r.key_path("components") + ": expected a non-empty array");
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const std::string cpath = r.key_path("components") + "[" + std::to_string(k) + "]";
      ObjReader cr(comps[k], cpath);
      GmmComponentSpec c;
      c.weight = cr.number_req("weight");
      c.mean = parse_mean(cr.at("mean"), cpath + ".mean");
      c.covariance = parse_covariance(cr.at("covariance"), cpath + ".covariance");
      cr.done();
      p.components.push_back(std::move(c));
    }
  }
  r.done();
  return p;
}

Json prior_json(const PriorSpec& p) {
  Json j = Json::object();
  j["type"] = enum_name(p.type, kPriorTypes);
  Json shape = Json::array();
  for (Index e : p.shape) shape.push_back(e);
  j["shape"] = shape;
  if (p.type == PriorSpec::Type::Gaussian) {
    j["mean"] = mean_json(p.mean);
    j["covariance"] = covariance_json(p.covariance);
  } else {
    Json comps = Json::array();
    for (const auto& c : p.components) {
      Json cj = Json::object();
      cj["weight"] = c.weight;
      cj["mean"] = mean_json(c.mean);
      cj["covariance"] = covariance_json(c.covariance);
      comps.push_back(std::move(cj));
    }
    j["components"] = comps;
  }
  return j;
}

OperatorSpec parse_operator(const Json& j, const std::string& path) {
  ObjReader r(j, path);
  OperatorSpec o;
  o.type = parse_enum(r.str_req("type"), r.key_path("type"), kOpTypes);
  switch (o.type) {
    case OperatorSpec::Type::Identity:
      break;
    case OperatorSpec::Type::Mask: {
      const bool inline_mask = r.has("pixel_mask"), from_file = r.has("mask_path");
      if (inline_mask == from_file)
        throw ConfigError(path + ": exactly one of 'pixel_mask' or 'mask_path' is required");
      if (inline_mask) {
        const Json& m = r.at("pixel_mask");
        if (!m.is_array() || m.empty())
          throw ConfigError(r.key_path("pixel_mask") + ": expected a non-empty array of 0/1");
        for (std::size_t i = 0; i < m.size(); ++i) {
          if (!m[i].is_number_integer() ||
              (m[i].get<int>() != 0 && m[i].get<int>() != 1))
            throw ConfigError(r.key_path("pixel_mask") + "[" + std::to_string(i) +
                              "]: expected 0 or 1");
          o.pixel_mask.push_back(static_cast<std::uint8_t>(m[i].get<int>()));
        }
      } else {
        o.mask_path = r.str_req("mask_path");
      }
      break;
    }
    case OperatorSpec::Type::RandomMask:
      o.keep_probability = r.number_req("keep_probability");
      break;
    case OperatorSpec::Type::Blur:
      o.kernel = r.str("kernel", "gaussian");
      if (o.kernel == "gaussian") {
        o.size = r.integer("size", 5);
        o.sigma = r.number("sigma", 1.0);
      } else if (o.kernel == "box") {
        o.size = r.integer("size", 5);
      } else if (o.kernel == "motion") {
        o.length = r.integer("length", 5);
      } else {
        throw ConfigError(r.key_path("kernel") + ": '" + o.kernel +
                          "' is not one of gaussian | box | motion");
      }
      o.boundary = parse_enum(r.str("boundary", "reflect"), r.key_path("boundary"), kBoundaries);
      break;
    case OperatorSpec::Type::Downsample:
      o.factor = r.integer_req("factor");
      break;
    case OperatorSpec::Type::Composed: {
      o.children.push_back(parse_operator(r.at("inner"), r.key_path("inner")));
      o.children.push_back(parse_operator(r.at("outer"), r.key_path("outer")));
      break;
    }
  }
  r.done();
  return o;
}

Json operator_json(const OperatorSpec& o) {
  Json j = Json::object();
  j["type"] = enum_name(o.type, kOpTypes);
  switch (o.type) {
    case OperatorSpec::Type::Identity:
      break;
    case OperatorSpec::Type::Mask:
      if (!o.mask_path.empty()) {
        j["mask_path"] = o.mask_path;
      } else {
        Json m = Json::array();
        for (std::uint8_t b : o.pixel_mask) m.push_back(static_cast<int>(b));
        j["pixel_mask"] = m;
      }
      break;
    case OperatorSpec::Type::RandomMask:
      j["keep_probability"] = o.keep_probability;
      break;
    case OperatorSpec::Type::Blur:
      j["kernel"] = o.kernel;
      if (o.kernel == "gaussian") {
        j["size"] = o.size;
        j["sigma"] = o.sigma;
      } else if (o.kernel == "box") {
        j["size"] = o.size;
      } else {
        j["length"] = o.length;
      }
      j["boundary"] = enum_name(o.boundary, kBoundaries);
      break;
    case OperatorSpec::Type::Downsample:
      j["factor"] = o.factor;
      break;
    case OperatorSpec::Type::Composed:
      j["inner"] = operator_json(o.children.at(0));
      j["outer"] = operator_json(o.children.at(1));
      break;
  }
  return j;
}

}  // namespace

Variant variant_from_name(const std::string& name) {
  return parse_enum(name, "variant", kVariants);
}

RunConfig parse_config(const Json& j) {
  ObjReader r(j, "config");
  RunConfig cfg;
  cfg.seed = r.u64("seed", 1);
  cfg.output_dir = r.str("output_dir", "out");

  if (r.has("schedule")) {
    ObjReader s(r.at("schedule"), "config.schedule");
    cfg.schedule.T = s.integer("T", 1000);
    cfg.schedule.beta_start = s.number("beta_start", 1e-4);
    cfg.schedule.beta_end = s.number("beta_end", 0.02);
    cfg.schedule.variance =
        parse_enum(s.str("variance", "posterior_beta"), s.key_path("variance"), kVarianceKinds);
    s.done();
  }

  if (r.has("sampler")) {
    ObjReader s(r.at("sampler"), "config.sampler");
    cfg.sampler.variant =
        parse_enum(s.str("variant", "dpps_adaptive"), s.key_path("variant"), kVariants);
    cfg.sampler.step_scale = s.number("step_scale", 1.0);
    cfg.sampler.step_mode =
        parse_enum(s.str("step_mode", "normalized"), s.key_path("step_mode"), kStepModes);
    cfg.sampler.guidance_norm = parse_enum(s.str("guidance_norm", "non_squared"),
                                           s.key_path("guidance_norm"), kGuidanceNorms);
    cfg.sampler.n_candidates = s.integer("n_candidates", 20);
    cfg.sampler.n_max = s.integer("n_max", 50);
    cfg.sampler.aligned_init = s.boolean("aligned_init", true);
    cfg.sampler.sigma_y_assumed = s.number("sigma_y_assumed", 0.01);
    s.done();
  }
  cfg.sampler.seed = cfg.seed;

  if (r.has("problem")) {
    ObjReader p(r.at("problem"), "config.problem");
    cfg.problem.preset = p.str("preset", "");
    cfg.problem.sigma_y = p.number("sigma_y", 0.01);
    cfg.problem.measurement_path = p.str("measurement_path", "");
    cfg.problem.reference_path = p.str("reference_path", "");
    p.done();
  }

  if (r.has("prior")) cfg.prior = parse_prior(r.at("prior"), "config.prior");
  if (r.has("operator")) cfg.op = parse_operator(r.at("operator"), "config.operator");

  if (r.has("experiment")) {
    ObjReader e(r.at("experiment"), "config.experiment");
    if (e.has("seeds")) {
      const Json& seeds = e.at("seeds");
      if (!seeds.is_array() || seeds.empty())
        throw ConfigError("config.experiment.seeds: expected a non-empty array");
      cfg.experiment.seeds.clear();
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!seeds[i].is_number_integer() || seeds[i].get<std::int64_t>() < 0)
          throw ConfigError("config.experiment.seeds[" + std::to_string(i) +
                            "]: expected a non-negative integer");
        cfg.experiment.seeds.push_back(seeds[i].get<std::uint64_t>());
      }
    }
    cfg.experiment.n_samples = e.integer("n_samples", 10);
    cfg.experiment.n_trials = e.integer("n_trials", 1000);
    cfg.experiment.fixture_t = e.integer("fixture_t", 800);
    if (e.has("step_scales")) {
      const Vec v = parse_vec(e.at("step_scales"), "config.experiment.step_scales");
      cfg.experiment.step_scales.assign(v.data(), v.data() + v.size());
    }
    if (e.has("variants")) {
      const Json& vars = e.at("variants");
      if (!vars.is_array() || vars.empty())
        throw ConfigError("config.experiment.variants: expected a non-empty array");
      cfg.experiment.variants.clear();
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (!vars[i].is_string())
          throw ConfigError("config.experiment.variants[" + std::to_string(i) +
                            "]: expected a string");
        const std::string name = vars[i].get<std::string>();
        parse_enum(name, "config.experiment.variants[" + std::to_string(i) + "]", kVariants);
        cfg.experiment.variants.push_back(name);
      }
    }
    e.done();
  }

  r.done();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": JSON parse error: " + e.what());
  }
  return parse_config(j);
}

Json serialize_config(const RunConfig& cfg) {
  Json j = Json::object();
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;

  Json s = Json::object();
  s["T"] = cfg.schedule.T;
  s["beta_start"] = cfg.schedule.beta_start;
  s["beta_end"] = cfg.schedule.beta_end;
  s["variance"] = enum_name(cfg.schedule.variance, kVarianceKinds);
  j["schedule"] = s;

  Json sm = Json::object();
  sm["variant"] = enum_name(cfg.sampler.variant, kVariants);
  sm["step_scale"] = cfg.sampler.step_scale;
  sm["step_mode"] = enum_name(cfg.sampler.step_mode, kStepModes);
  sm["guidance_norm"] = enum_name(cfg.sampler.guidance_norm, kGuidanceNorms);
  sm["n_candidates"] = cfg.sampler.n_candidates;
  sm["n_max"] = cfg.sampler.n_max;
  sm["aligned_init"] = cfg.sampler.aligned_init;
  sm["sigma_y_assumed"] = cfg.sampler.sigma_y_assumed;
  j["sampler"] = sm;

  Json p = Json::object();
  if (!cfg.problem.preset.empty()) p["preset"] = cfg.problem.preset;
  p["sigma_y"] = cfg.problem.sigma_y;
  if (!cfg.problem.measurement_path.empty()) p["measurement_path"] = cfg.problem.measurement_path;
  if (!cfg.problem.reference_path.empty()) p["reference_path"] = cfg.problem.reference_path;
  j["problem"] = p;

  if (cfg.prior) j["prior"] = prior_json(*cfg.prior);
  if (cfg.op) j["operator"] = operator_json(*cfg.op);

  Json e = Json::object();
  Json seeds = Json::array();
  for (std::uint64_t sd : cfg.experiment.seeds) seeds.push_back(sd);
  e["seeds"] = seeds;
  e["n_samples"] = cfg.experiment.n_samples;
  e["n_trials"] = cfg.experiment.n_trials;
  e["fixture_t"] = cfg.experiment.fixture_t;
  Json scales = Json::array();
  for (double v : cfg.experiment.step_scales) scales.push_back(v);
  e["step_scales"] = scales;
  Json vars = Json::array();
  for (const std::string& v : cfg.experiment.variants) vars.push_back(v);
  e["variants"] = vars;
  j["experiment"] = e;

  return j;
}

void validate_config(const RunConfig& cfg) {
  const auto bad = [](const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why);
  };

  if (cfg.schedule.T < 1) bad("config.schedule.T", "must be >= 1");
  if (!(cfg.schedule.beta_start > 0.0 && cfg.schedule.beta_start < 1.0))
    bad("config.schedule.beta_start", "must lie in (0,1)");
  if (!(cfg.schedule.beta_end > 0.0 && cfg.schedule.beta_end < 1.0))
    bad("config.schedule.beta_end", "must lie in (0,1)");
  if (cfg.schedule.beta_start > cfg.schedule.beta_end)
    bad("config.schedule.beta_start", "must not exceed beta_end");

  const bool has_preset = !cfg.problem.preset.empty();
  const bool has_explicit = cfg.prior.has_value() || cfg.op.has_value();
  if (has_preset && has_explicit)
    bad("config.problem.preset", "cannot be combined with explicit prior/operator sections");
  if (!has_preset && !(cfg.prior.has_value() && cfg.op.has_value()))
    bad("config.problem.preset",
        "either a preset or both config.prior and config.operator are required");

  if (cfg.problem.sigma_y < 0.0) bad("config.problem.sigma_y", "must be non-negative");

  if (!(std::isfinite(cfg.sampler.step_scale) && cfg.sampler.step_scale >= 0.0))
    bad("config.sampler.step_scale", "must be finite and non-negative");
  if (cfg.sampler.sigma_y_assumed < 0.0) bad("config.sampler.sigma_y_assumed", "must be non-negative");
  if (cfg.sampler.n_candidates < 1) bad("config.sampler.n_candidates", "must be >= 1");
  // Stricter than the engine: through config files, proximal selection with a
  // single candidate is a misconfiguration (it is exactly DPS).
  if (cfg.sampler.variant == Variant::DppsFixedN && cfg.sampler.n_candidates < 2)
    bad("config.sampler.n_candidates", "must be >= 2 for variant dpps_fixed_n");
  if (cfg.sampler.variant == Variant::DppsAdaptive && cfg.sampler.n_max < 2)
    bad("config.sampler.n_max", "must be >= 2 for variant dpps_adaptive");

  if (cfg.experiment.seeds.empty()) bad("config.experiment.seeds", "must be non-empty");
  if (cfg.experiment.n_samples < 1) bad("config.experiment.n_samples", "must be >= 1");
  if (cfg.experiment.n_trials < 2) bad("config.experiment.n_trials", "must be >= 2");
  if (cfg.experiment.fixture_t < 1 || cfg.experiment.fixture_t > cfg.schedule.T)
    bad("config.experiment.fixture_t", "must lie in [1, schedule.T]");
  if (cfg.experiment.step_scales.empty()) bad("config.experiment.step_scales", "must be non-empty");
  for (double v : cfg.experiment.step_scales)
    if (!(std::isfinite(v) && v >= 0.0))
      bad("config.experiment.step_scales", "entries must be finite and non-negative");
  if (cfg.output_dir.empty()) bad("config.output_dir", "must be non-empty");
}

NoiseSchedule make_schedule(const ScheduleSpec& spec) {
  return make_linear_schedule(spec.T, spec.beta_start, spec.beta_end, spec.variance);
}

}  // namespace dpps
