// Command-line front end.
//
//   dpps restore         --config cfg.json [--seed N] [--out DIR]
//   dpps experiment NAME --config cfg.json [--seed N] [--out DIR]
//   dpps validate-config --config cfg.json
//
// Exit codes: 0 success, 1 config or input-file problems (including CLI
// misuse), 2 runtime failures (non-finite states, write errors, bugs).

#include "dpps/experiments.hpp"
#include "dpps/image_io.hpp"
#include "dpps/trace_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace dpps;

namespace {

Json shape_json(const Shape& s) {
  Json j = Json::array();
  for (Index e : s) j.push_back(static_cast<std::int64_t>(e));
  return j;
}

void apply_overrides(RunConfig& cfg, bool seed_given, std::uint64_t seed,
                     bool out_given, const std::string& out) {
  if (seed_given) {
    cfg.seed = seed;
    cfg.sampler.seed = seed;
  }
  if (out_given) cfg.output_dir = out;
}

int cmd_restore(const RunConfig& cfg) {
  const std::string out = cfg.output_dir;
  fs::create_directories(out);
  const Problem pb = make_problem(cfg, cfg.seed);
  const int T = cfg.schedule.T;

  const StepObserver progress = [&](int t, const Vec&, const Vec&, const Vec&) {
    std::fprintf(stderr, "\r[%s] t = %4d / %d", pb.label.c_str(), t, T);
    std::fflush(stderr);
  };
  const RunTrace trace =
      run(*pb.prior, *pb.op, pb.y, pb.schedule, pb.sampler,
          pb.has_ground_truth ? &pb.x0 : nullptr, progress);
  std::fputc('\n', stderr);

  const Shape& shape = pb.shape();
  std::string est_file;
  if (shape.size() == 1) {
    est_file = "estimate.csv";
    write_signal_csv(out + "/" + est_file, trace.final_estimate);
  } else {
    est_file = shape.size() == 3 ? "estimate.ppm" : "estimate.pgm";
    write_image(out + "/" + est_file, SignalField(shape, trace.final_estimate));
  }
  write_trace_csv(out + "/trace.csv", trace);

  const double final_res = (pb.y - pb.op->apply(trace.final_estimate)).squaredNorm();
  Json units{{"final_residual", "squared L2 distance between y and A x_hat"},
             {"oracle_mse", "mean squared error against the exact posterior mean"},
             {"reference_mse", "mean squared error against the generating signal"},
             {"reference_psnr", "dB at peak 1.0 against the generating signal"}};
  Json summary{{"command", "restore"},
               {"label", pb.label},
               {"seed", cfg.seed},
               {"variant", variant_name(pb.sampler.variant)},
               {"n_steps", T},
               {"shape", shape_json(shape)},
               {"final_residual", final_res},
               {"outputs", Json{{"estimate", est_file}, {"trace", "trace.csv"}}},
               {"units", units}};
  if (pb.oracle)
    summary["oracle_mse"] = mse(trace.final_estimate, pb.oracle->posterior_mean);
  if (pb.has_ground_truth) {
    summary["reference_mse"] = mse(trace.final_estimate, pb.x0);
    summary["reference_psnr"] = psnr(trace.final_estimate, pb.x0, 1.0);
  }
  write_json_file(out + "/summary.json", summary);

  std::cout << "restored " << pb.label << " (seed " << cfg.seed << ", "
            << variant_name(pb.sampler.variant) << "): final_residual = "
            << final_res;
  if (pb.oracle) std::cout << ", oracle_mse = " << summary["oracle_mse"].get<double>();
  std::cout << "\nwrote " << out << "/{" << est_file << ", trace.csv, summary.json}\n";
  return 0;
}

int cmd_experiment(const std::string& name, const RunConfig& cfg) {
  const ExperimentSpec& ex = cfg.experiment;
  const std::string out = cfg.output_dir;

  if (name == "variance") {
    fs::create_directories(out);
    const Problem pb = make_problem(cfg, cfg.seed);
    const VarianceFixture fx = make_variance_fixture(pb, ex.fixture_t, cfg.seed);
    const VarianceReport rep =
        variance_experiment(pb, fx, ex.n_samples, ex.n_trials, cfg.seed);
    Json j = rep.to_json();
    j["label"] = pb.label;
    j["seed"] = cfg.seed;
    j["config"] = serialize_config(cfg);
    write_json_file(out + "/variance.json", j);
    std::cout << "variance at t = " << rep.fixture_t << " (" << rep.n_trials
              << " trials x " << rep.n_samples << " candidates):\n"
              << "  var_single = " << rep.var_single << "\n"
              << "  var_mean   = " << rep.var_mean << "\n"
              << "  var_min    = " << rep.var_min << "\n"
              << "  ratio mean/single = " << rep.ratio_mean_single
              << ", strict ordering = " << (rep.ordering_strict ? "yes" : "no")
              << "\nwrote " << out << "/variance.json\n";
    return 0;
  }
  if (name == "convergence") {
    fs::create_directories(out);
    const ConvergenceReport rep =
        convergence_experiment(cfg, ex.variants, ex.seeds, out);
    std::cout << "convergence over " << ex.seeds.size() << " seeds:\n";
    for (const auto& cur : rep.variants) {
      std::cout << "  " << cur.variant << ": mean final residual = "
                << rep.report["variants"][cur.variant]["mean_final_residual"]
                       .get<double>();
      if (rep.has_oracle)
        std::cout << ", mean final oracle mse = "
                  << rep.report["variants"][cur.variant]["mean_final_oracle_mse"]
                         .get<double>();
      std::cout << "\n";
    }
    std::cout << "wrote " << out << "/convergence.json and per-variant CSVs\n";
    return 0;
  }
  if (name == "lambda-sweep") {
    fs::create_directories(out);
    const LambdaSweepReport rep =
        lambda_sweep(cfg, ex.step_scales, ex.variants, ex.seeds, out);
    std::cout << "step-scale sweep over " << ex.seeds.size() << " seeds:\n";
    for (std::size_t v = 0; v < rep.variants.size(); ++v) {
      std::cout << "  " << rep.variants[v] << ": mean mse by scale =";
      for (double m : rep.mean_mse[v]) std::cout << " " << m;
      std::cout << " (spread " << rep.spread[v] << ")\n";
    }
    std::cout << "wrote " << out << "/lambda_sweep.{json,csv}\n";
    return 0;
  }
  if (name == "error-accum") {
    fs::create_directories(out);
    const ErrorAccumReport rep =
        error_accumulation(cfg, ex.variants, ex.seeds, out);
    std::cout << "update-mean error over " << ex.seeds.size() << " seeds:\n";
    for (std::size_t v = 0; v < rep.variants.size(); ++v)
      std::cout << "  " << rep.variants[v]
                << ": final = " << rep.mu_error[v].back() << ", max = "
                << *std::max_element(rep.mu_error[v].begin(), rep.mu_error[v].end())
                << "\n";
    std::cout << "wrote " << out << "/error_accum.{json,csv}\n";
    return 0;
  }

  std::cerr << "unknown experiment '" << name
            << "' (known: variance, convergence, lambda-sweep, error-accum)\n";
  return 1;
}

int cmd_validate(const RunConfig& cfg) {
  const Json j = serialize_config(cfg);
  std::cout << "config ok\n"
            << "  seed     = " << cfg.seed << "\n"
            << "  schedule = T=" << cfg.schedule.T << ", beta=["
            << cfg.schedule.beta_start << ", " << cfg.schedule.beta_end
            << "], variance=" << j["schedule"]["variance"].get<std::string>()
            << "\n"
            << "  sampler  = " << j["sampler"]["variant"].get<std::string>()
            << ", step_scale=" << cfg.sampler.step_scale << ", mode="
            << j["sampler"]["step_mode"].get<std::string>() << "\n";
  if (!cfg.problem.preset.empty())
    std::cout << "  problem  = preset '" << cfg.problem.preset << "'";
  else
    std::cout << "  problem  = explicit prior + operator";
  std::cout << ", sigma_y=" << cfg.problem.sigma_y << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior-guided diffusion restoration for linear inverse problems"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  std::string out_override;

  CLI::App* restore = app.add_subcommand(
      "restore", "Run one restoration; write estimate, trace, and summary");
  CLI::App* experiment =
      app.add_subcommand("experiment", "Run a named experiment suite");
  CLI::App* validate =
      app.add_subcommand("validate-config", "Parse and validate a config file");

  std::string exp_name;
  experiment
      ->add_option("name", exp_name,
                   "variance | convergence | lambda-sweep | error-accum")
      ->required();

  for (CLI::App* sub : {restore, experiment, validate}) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")
        ->required();
    if (sub != validate) {
      sub->add_option("--seed", seed_override, "Override the config's seed");
      sub->add_option("--out", out_override,
                      "Override the config's output directory");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // normalize CLI misuse onto the config exit code
  }

  try {
    RunConfig cfg = load_config_file(config_path);
    validate_config(cfg);
    CLI::App* sub = app.get_subcommands().front();
    if (sub != validate)
      apply_overrides(cfg, sub->count("--seed") > 0, seed_override,
                      sub->count("--out") > 0, out_override);
    if (sub == restore) return cmd_restore(cfg);
    if (sub == experiment) return cmd_experiment(exp_name, cfg);
    return cmd_validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const NanAbort& e) {
    std::cerr << "aborted: non-finite state at t = " << e.t << " (" << e.what()
              << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
