#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dpps/experiments.hpp"
#include "dpps/image_io.hpp"
#include "dpps/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dpps;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Rank-deficient toy operator: both measurement rows read the same entry.
class DuplicateRow final : public LinearOperator {
 public:
  DuplicateRow() : LinearOperator({2}, {2}) {}

 private:
  void do_apply(const Vec& x, Vec& out) const override {
    out[0] = x[0];
    out[1] = x[0];
  }
  void do_apply_transpose(const Vec& u, Vec& out) const override {
    out[0] = u[0] + u[1];
    out[1] = 0.0;
  }
};

RunConfig tiny_config() {
  RunConfig cfg;
  cfg.schedule.T = 30;
  cfg.sampler.n_candidates = 4;
  PriorSpec prior;
  prior.type = PriorSpec::Type::Gaussian;
  prior.shape = {4};
  prior.mean.is_constant = true;
  prior.mean.constant = 0.2;
  prior.covariance.type = CovarianceSpec::Type::Scalar;
  prior.covariance.variance = 0.5;
  cfg.prior = prior;
  OperatorSpec op;
  op.type = OperatorSpec::Type::Identity;
  cfg.op = op;
  cfg.problem.sigma_y = 0.05;
  cfg.experiment.seeds = {1, 2};
  return cfg;
}

}  // namespace

TEST_CASE("restoration oracle: hand-evaluated scalar case") {
  const GaussianPrior p({1}, Vec::Constant(1, 1.0), Covariance::isotropic(4.0, 1));
  const IdentityOperator a({1});
  const OracleSolution sol =
      gaussian_restoration_oracle(p, a, Vec::Constant(1, 3.0), 1.0);
  CHECK(sol.posterior_mean[0] == doctest::Approx(2.6).epsilon(1e-13));
  CHECK(sol.posterior_covariance(0, 0) == doctest::Approx(0.8).epsilon(1e-13));
}

TEST_CASE("restoration oracle: isotropic identity case halves everything") {
  const Index d = 3;
  const GaussianPrior p({d}, Vec::Zero(d), Covariance::isotropic(1.0, d));
  const IdentityOperator a({d});
  Vec y(d);
  y << 0.4, -1.0, 2.2;
  const OracleSolution sol = gaussian_restoration_oracle(p, a, y, 1.0);
  CHECK((sol.posterior_mean - 0.5 * y).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((sol.posterior_covariance - 0.5 * Mat::Identity(d, d)).norm() < 1e-12);
}

TEST_CASE("restoration oracle satisfies the normal equations") {
  Rng rng(200);
  const Index d = 6;
  Mat root(d, d);
  for (Index i = 0; i < d; ++i) root.col(i) = rng.normal_vec(d);
  const Mat sigma0 = root * root.transpose() + 0.4 * Mat::Identity(d, d);
  const Vec mu0 = rng.normal_vec(d);
  const GaussianPrior p({d}, mu0, Covariance::full(sigma0));
  const MaskOperator a = MaskOperator::random({6}, 0.6, 4);
  const Vec y = rng.normal_vec(a.output_size());
  const double sy = 0.1;
  const OracleSolution sol = gaussian_restoration_oracle(p, a, y, sy);

  const Mat ad = dense_matrix(a);
  const Mat info = sigma0.inverse() + ad.transpose() * ad / (sy * sy);
  const Vec rhs = sigma0.inverse() * mu0 + ad.transpose() * y / (sy * sy);
  const Vec lhs = info * sol.posterior_mean;
  CHECK((lhs - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
  CHECK((info * sol.posterior_covariance - Mat::Identity(d, d)).norm() < 1e-8);
}

TEST_CASE("noiseless identity measurements pin the posterior to y") {
  const Index d = 4;
  const GaussianPrior p({d}, Vec::Zero(d), Covariance::isotropic(2.0, d));
  const IdentityOperator a({d});
  Rng rng(201);
  const Vec y = rng.normal_vec(d);
  const OracleSolution sol = gaussian_restoration_oracle(p, a, y, 0.0);
  CHECK((sol.posterior_mean - y).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(sol.posterior_covariance.norm() < 1e-10);
}

TEST_CASE("inconsistent singular noiseless systems are rejected") {
  const GaussianPrior p({2}, Vec::Zero(2), Covariance::isotropic(1.0, 2));
  const DuplicateRow a;
  Vec y(2);
  y << 0.0, 1.0;  // no x can satisfy both rows exactly
  CHECK_THROWS_AS(gaussian_restoration_oracle(p, a, y, 0.0), Error);
}

TEST_CASE("mixture oracle agrees with dense quadrature in 1D") {
  const GmmPrior p({1}, {{0.6, Vec::Constant(1, -1.0), Covariance::isotropic(0.5, 1)},
                         {0.4, Vec::Constant(1, 1.5), Covariance::isotropic(1.2, 1)}});
  const IdentityOperator a({1});
  const double sy = 0.5;
  const Vec y = Vec::Constant(1, 0.3);
  const OracleSolution sol = restoration_oracle(p, a, y, sy);

  // Trapezoid integration of the unnormalized posterior over a wide grid.
  const int n = 40001;
  const double lo = -12.0, hi = 12.0, h = (hi - lo) / (n - 1);
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  auto gauss = [](double x, double mu, double var) {
    return std::exp(-(x - mu) * (x - mu) / (2.0 * var)) / std::sqrt(2.0 * EIGEN_PI * var);
  };
  for (int i = 0; i < n; ++i) {
    const double x = lo + h * i;
    const double prior = 0.6 * gauss(x, -1.0, 0.5) + 0.4 * gauss(x, 1.5, 1.2);
    const double like = gauss(y[0], x, sy * sy);
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    z += w * prior * like;
    m1 += w * x * prior * like;
    m2 += w * x * x * prior * like;
  }
  const double mean = m1 / z;
  const double var = m2 / z - mean * mean;
  CHECK(sol.posterior_mean[0] == doctest::Approx(mean).epsilon(1e-4));
  CHECK(sol.posterior_covariance(0, 0) == doctest::Approx(var).epsilon(1e-4));
}

TEST_CASE("one-component mixture oracle equals the Gaussian oracle") {
  Rng rng(202);
  const Index d = 5;
  const Vec mu0 = rng.normal_vec(d);
  const GaussianPrior g({d}, mu0, Covariance::isotropic(0.7, d));
  const GmmPrior m({d}, {{1.0, mu0, Covariance::isotropic(0.7, d)}});
  const MaskOperator a = MaskOperator::random({5}, 0.7, 9);
  const Vec y = rng.normal_vec(a.output_size());
  const OracleSolution sg = restoration_oracle(g, a, y, 0.2);
  const OracleSolution sm = restoration_oracle(m, a, y, 0.2);
  CHECK((sg.posterior_mean - sm.posterior_mean).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((sg.posterior_covariance - sm.posterior_covariance).norm() < 1e-10);
}

TEST_CASE("error metrics") {
  Vec a(2), b(2);
  a << 1.0, 2.0;
  b << 1.0, 2.0;
  CHECK(mse(a, b) == 0.0);
  CHECK(std::isinf(psnr(a, b)));
  b << 1.1, 2.1;
  CHECK(mse(a, b) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(psnr(a, b, 1.0) == doctest::Approx(20.0).epsilon(1e-10));
}

TEST_CASE("preset catalogue") {
  CHECK(preset_names() == std::vector<std::string>{"gauss1d-mask", "gmm-inpaint-16",
                                                   "gauss-blur-16", "gauss-sr-16"});
  RunConfig cfg;
  cfg.problem.preset = "gauss1d-mask";
  apply_preset(cfg, "gauss1d-mask");
  CHECK(cfg.problem.preset.empty());
  REQUIRE(cfg.prior.has_value());
  REQUIRE(cfg.op.has_value());
  CHECK(cfg.prior->shape == Shape{8});
  RunConfig bad;
  CHECK_THROWS_AS(apply_preset(bad, "no-such-preset"), ConfigError);
}

TEST_CASE("every preset instantiates with a usable exact posterior") {
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    RunConfig cfg;
    cfg.problem.preset = name;
    const Problem pb = make_problem(cfg, 1);
    CHECK(pb.label == name);
    CHECK(pb.has_ground_truth);
    CHECK(pb.x0.size() == shape_size(pb.prior->shape()));
    CHECK(pb.y.size() == pb.op->output_size());
    REQUIRE(pb.oracle.has_value());
    CHECK(pb.oracle->posterior_mean.size() == pb.op->input_size());
    CHECK(pb.oracle->posterior_mean.allFinite());
    CHECK(pb.sampler.seed == 1);
  }
}

TEST_CASE("preset geometry details") {
  RunConfig cfg;
  cfg.problem.preset = "gmm-inpaint-16";
  const Problem pb = make_problem(cfg, 3);
  CHECK(pb.shape() == Shape{16, 16});
  const double keep = static_cast<double>(pb.op->output_size()) / 256.0;
  CHECK(keep > 0.10);
  CHECK(keep < 0.35);

  RunConfig sr;
  sr.problem.preset = "gauss-sr-16";
  const Problem pbs = make_problem(sr, 1);
  CHECK(pbs.op->output_size() == 16);

  RunConfig bl;
  bl.problem.preset = "gauss-blur-16";
  const Problem pbb = make_problem(bl, 1);
  CHECK(pbb.op->output_size() == 256);
}

TEST_CASE("problem synthesis is deterministic per seed") {
  RunConfig cfg;
  cfg.problem.preset = "gauss1d-mask";
  const Problem a = make_problem(cfg, 7);
  const Problem b = make_problem(cfg, 7);
  CHECK((a.x0 - b.x0).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a.y - b.y).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(a.op->output_size() == b.op->output_size());
  const Problem c = make_problem(cfg, 8);
  CHECK(((a.x0 - c.x0).lpNorm<Eigen::Infinity>() > 0.0 ||
         a.op->output_size() != c.op->output_size()));
}

TEST_CASE("measurements can round-trip through a file") {
  fs::create_directories("tmp_harness");
  RunConfig cfg = tiny_config();
  const Problem synth = make_problem(cfg, 5);
  write_signal_csv("tmp_harness/y.csv", synth.y);

  RunConfig loaded_cfg = tiny_config();
  loaded_cfg.problem.measurement_path = "tmp_harness/y.csv";
  const Problem loaded = make_problem(loaded_cfg, 5);
  CHECK((loaded.y - synth.y).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK(!loaded.has_ground_truth);
  CHECK(loaded.oracle.has_value());
  CHECK_THROWS_AS(make_variance_fixture(loaded, 10, 1), ConfigError);

  RunConfig wrong = tiny_config();
  wrong.problem.measurement_path = "tmp_harness/y.csv";
  wrong.prior->shape = {8};  // measurement length no longer matches
  CHECK_THROWS_AS(make_problem(wrong, 5), ConfigError);
}

TEST_CASE("reference files restore ground-truth scoring") {
  RunConfig cfg = tiny_config();
  const Problem synth = make_problem(cfg, 6);
  write_signal_csv("tmp_harness/y6.csv", synth.y);
  write_signal_csv("tmp_harness/x6.csv", synth.x0);
  RunConfig loaded_cfg = tiny_config();
  loaded_cfg.problem.measurement_path = "tmp_harness/y6.csv";
  loaded_cfg.problem.reference_path = "tmp_harness/x6.csv";
  const Problem loaded = make_problem(loaded_cfg, 6);
  CHECK(loaded.has_ground_truth);
  CHECK((loaded.x0 - synth.x0).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("spread experiment: single-candidate batches degenerate") {
  RunConfig cfg;
  cfg.problem.preset = "gauss1d-mask";
  const Problem pb = make_problem(cfg, 1);
  const VarianceFixture fx = make_variance_fixture(pb, 800, 1);
  const VarianceReport rep = variance_experiment(pb, fx, 1, 200, 50);
  CHECK(rep.var_single == rep.var_mean);
  CHECK(rep.var_mean == rep.var_min);
  CHECK(rep.ratio_mean_single == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!rep.ordering_strict);
}

TEST_CASE("spread experiment: zero step noise collapses all spreads") {
  RunConfig cfg;
  cfg.problem.preset = "gauss1d-mask";
  const Problem pb = make_problem(cfg, 1);
  const VarianceFixture fx = make_variance_fixture(pb, 1, 1);  // sigma_1 = 0
  const VarianceReport rep = variance_experiment(pb, fx, 5, 100, 51);
  // The update direction is deterministic, so the spreads collapse to
  // floating-point dust; assert the scale rather than exact zeros, since the
  // three estimators accumulate in different orders.
  CHECK(rep.var_single <= 1e-20);
  CHECK(rep.var_mean <= 1e-20);
  CHECK(rep.var_min <= 1e-20);
  CHECK(!rep.ordering_strict);
}

TEST_CASE("spread experiment: deterministic and strictly ordered on the shipped setup") {
  RunConfig cfg;
  cfg.problem.preset = "gauss1d-mask";
  const Problem pb = make_problem(cfg, 1);
  const VarianceFixture fx = make_variance_fixture(pb, 800, 1);
  const VarianceReport a = variance_experiment(pb, fx, 10, 400, 52);
  const VarianceReport b = variance_experiment(pb, fx, 10, 400, 52);
  CHECK(a.var_single == b.var_single);
  CHECK(a.var_mean == b.var_mean);
  CHECK(a.var_min == b.var_min);
  CHECK(a.ordering_strict);
  CHECK(a.var_single > a.var_mean);
  CHECK(a.var_mean > a.var_min);
  const Json j = a.to_json();
  CHECK(j["n_samples"] == 10);
  CHECK(j["ordering_strict"] == true);
}

TEST_CASE("convergence driver: curves, files, and reproducibility") {
  RunConfig cfg = tiny_config();
  const std::vector<std::string> variants = {"dpps_fixed_n", "dps_random"};
  fs::create_directories("tmp_harness/conv_a");
  fs::create_directories("tmp_harness/conv_b");
  const ConvergenceReport a =
      convergence_experiment(cfg, variants, cfg.experiment.seeds, "tmp_harness/conv_a");
  const ConvergenceReport b =
      convergence_experiment(cfg, variants, cfg.experiment.seeds, "tmp_harness/conv_b");

  CHECK(a.ts.size() == 30);
  CHECK(a.ts.front() == 30);
  CHECK(a.ts.back() == 1);
  CHECK(a.has_oracle);
  REQUIRE(a.variants.size() == 2);
  for (const VariantCurves& v : a.variants) {
    CHECK(v.residual.size() == 30);
    CHECK(v.oracle_mse.size() == 30);
    CHECK(v.final_oracle_mse_per_seed.size() == 2);
    for (double r : v.residual) CHECK(std::isfinite(r));
    for (double m : v.oracle_mse) CHECK(std::isfinite(m));
  }
  CHECK(slurp("tmp_harness/conv_a/convergence.json") ==
        slurp("tmp_harness/conv_b/convergence.json"));
  CHECK(slurp("tmp_harness/conv_a/convergence_dpps_fixed_n.csv") ==
        slurp("tmp_harness/conv_b/convergence_dpps_fixed_n.csv"));
  CHECK(fs::exists("tmp_harness/conv_a/convergence_dps_random.csv"));

  // Aggregates in the report recompute from the stored per-seed values.
  for (const VariantCurves& v : a.variants) {
    const Json& node = a.report["variants"][v.variant];
    double acc = 0.0;
    for (double m : v.final_oracle_mse_per_seed) acc += m;
    CHECK(node["mean_final_oracle_mse"].get<double>() ==
          doctest::Approx(acc / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("convergence driver rejects unknown variants") {
  RunConfig cfg = tiny_config();
  CHECK_THROWS_AS(convergence_experiment(cfg, {"warp_drive"}, {1}, ""), ConfigError);
}

TEST_CASE("step-scale sweep driver") {
  RunConfig cfg = tiny_config();
  const LambdaSweepReport rep = lambda_sweep(cfg, {0.5, 1.0}, {"dpps_fixed_n", "dps_random"},
                                             {1, 2}, "");
  REQUIRE(rep.mean_mse.size() == 2);
  REQUIRE(rep.mean_mse[0].size() == 2);
  for (const auto& row : rep.mean_mse)
    for (double m : row) {
      CHECK(std::isfinite(m));
      CHECK(m >= 0.0);
    }
  CHECK(rep.spread[0] >= 0.0);
  CHECK(rep.report["experiment"] == "lambda_sweep");
}

TEST_CASE("update-mean error driver") {
  RunConfig cfg = tiny_config();
  fs::create_directories("tmp_harness/accum");
  const ErrorAccumReport rep = error_accumulation(cfg, {"dpps_fixed_n", "dps_random"},
                                                  {1, 2}, "tmp_harness/accum");
  REQUIRE(rep.mu_error.size() == 2);
  CHECK(rep.mu_error[0].size() == 30);
  for (const auto& row : rep.mu_error)
    for (double e : row) {
      CHECK(std::isfinite(e));
      CHECK(e >= 0.0);
    }
  CHECK(fs::exists("tmp_harness/accum/error_accum.csv"));
  CHECK(fs::exists("tmp_harness/accum/error_accum.json"));

  RunConfig no_truth = tiny_config();
  const Problem synth = make_problem(no_truth, 1);
  write_signal_csv("tmp_harness/na.csv", synth.y);
  no_truth.problem.measurement_path = "tmp_harness/na.csv";
  CHECK_THROWS_AS(error_accumulation(no_truth, {"dps_random"}, {1}, ""), ConfigError);
}

TEST_CASE("candidate-count driver") {
  RunConfig cfg = tiny_config();
  const CandidateBenefitReport rep = candidate_benefit(cfg, {1, 3}, {1, 2});
  REQUIRE(rep.n_values == std::vector<int>{1, 3});
  REQUIRE(rep.mse_per_seed.size() == 2);
  CHECK(rep.mse_per_seed[0].size() == 2);
  CHECK(rep.mean_mse[0] ==
        doctest::Approx((rep.mse_per_seed[0][0] + rep.mse_per_seed[0][1]) / 2.0)
            .epsilon(1e-12));
  CHECK(rep.report["experiment"] == "candidate_benefit");
}

TEST_CASE("full restoration on the line preset tracks the exact posterior") {
  RunConfig cfg;
  cfg.problem.preset = "gauss1d-mask";
  // Operating point where the guidance step stays below the residual floor,
  // so the trajectory converges instead of orbiting the measurement set.
  cfg.problem.sigma_y = 0.05;
  cfg.sampler.step_scale = 0.05;
  const Problem pb = make_problem(cfg, 1);
  const RunTrace trace = run(*pb.prior, *pb.op, pb.y, pb.schedule, pb.sampler, &pb.x0);
  REQUIRE(pb.oracle.has_value());
  const double err = mse(trace.final_estimate, pb.oracle->posterior_mean);
  CHECK(err < 0.05);
  const double res = (pb.y - pb.op->apply(trace.final_estimate)).squaredNorm();
  CHECK(res < 0.02);
}

TEST_CASE("json reports write deterministically and re-parse") {
  fs::create_directories("tmp_harness");
  const Json j{{"b", 2}, {"a", Json::array({1.5, 2.5})}};
  write_json_file("tmp_harness/r1.json", j);
  write_json_file("tmp_harness/r2.json", j);
  CHECK(slurp("tmp_harness/r1.json") == slurp("tmp_harness/r2.json"));
  const Json back = Json::parse(slurp("tmp_harness/r1.json"));
  CHECK(back == j);
}

TEST_CASE("builder validation errors carry config context") {
  PriorSpec p;
  p.type = PriorSpec::Type::Gaussian;
  p.shape = {4};
  p.mean.is_constant = false;
  p.mean.values = Vec::Zero(3);
  CHECK_THROWS_AS(build_prior(p), ConfigError);

  PriorSpec rgb;
  rgb.type = PriorSpec::Type::Gaussian;
  rgb.shape = {2, 2, 3};
  rgb.covariance.type = CovarianceSpec::Type::Rbf;
  CHECK_THROWS_AS(build_prior(rgb), ConfigError);

  OperatorSpec comp;
  comp.type = OperatorSpec::Type::Composed;
  comp.children.resize(1);
  CHECK_THROWS_AS(build_operator(comp, {4}, 1), ConfigError);
}
