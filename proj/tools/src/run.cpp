#include <functional>
#include <iostream>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dbf/cli/commands.hpp"
#include "dbf/cli/io.hpp"

namespace dbf::cli {

namespace {

// Flags are parsed into a scratch RunConfig; after the config file is merged
// into the defaults, only the flags that were actually given are copied over.
class Binder {
 public:
  explicit Binder(RunConfig& scratch) : scratch_(scratch) {}

  template <typename Access>
  CLI::Option* option(CLI::App* app, const std::string& name, Access access, const std::string& help) {
    CLI::Option* opt = app->add_option(name, access(scratch_), help);
    overlays_.emplace_back(opt, [access](RunConfig& dst, RunConfig& src) { access(dst) = access(src); });
    return opt;
  }

  void custom(CLI::Option* opt, std::function<void(RunConfig&)> apply) {
    overlays_.emplace_back(opt, [apply = std::move(apply)](RunConfig& dst, RunConfig&) { apply(dst); });
  }

  void apply(RunConfig& dst) {
    for (auto& [opt, fn] : overlays_) {
      if (opt->count() > 0) fn(dst, scratch_);
    }
  }

 private:
  RunConfig& scratch_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, RunConfig&)>>> overlays_;
};

void add_model_options(CLI::App* app, Binder& b, double& radius, bool with_lambdas) {
  b.option(app, "--lag", [](RunConfig& c) -> auto& { return c.model.lag; }, "number of lags (default 3)");
  b.option(app, "--kernel", [](RunConfig& c) -> auto& { return c.model.kernel; },
           "linear | poly:<degree>:<offset> | rbf:<gamma>");
  CLI::Option* r = app->add_option("--radius", radius, "hypothesis-ball radius (default: 2x uniform ridge norm)");
  b.custom(r, [&radius](RunConfig& c) { c.model.radius = radius; });
  b.option(app, "--s", [](RunConfig& c) -> auto& { return c.model.s; }, "target proxy length (default 20)");
  b.option(app, "--window", [](RunConfig& c) -> auto& { return c.model.window; }, "discrepancy window l (default 0)");
  if (!with_lambdas) return;
  b.option(app, "--max-iters", [](RunConfig& c) -> auto& { return c.model.max_iters; }, "solver iteration cap");
  b.option(app, "--tol", [](RunConfig& c) -> auto& { return c.model.tol; }, "solver tolerance");
  b.option(app, "--lambda1", [](RunConfig& c) -> auto& { return c.model.lambda1; }, "||w||^2 weight");
  b.option(app, "--lambda2", [](RunConfig& c) -> auto& { return c.model.lambda2; },
           "||q - v|| weight (ridge parameter for two-stage)");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Discrepancy-based forecasting toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  RunConfig scratch;
  Binder binder(scratch);
  std::string config_path;
  double radius = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration (flags override it)");
    binder.option(sub, "--out", [](RunConfig& c) -> auto& { return c.output; }, "output file");
    binder.option(sub, "--seed", [](RunConfig& c) -> auto& { return c.seed; }, "generator seed");
  };

  CLI::App* gen = app.add_subcommand("generate", "write a synthetic series as index,value CSV");
  add_common(gen);
  binder.option(gen, "--dataset", [](RunConfig& c) -> auto& { return c.generator.dataset; },
                "ads1 | ads2 | ads3 | ads4");
  binder.option(gen, "--length", [](RunConfig& c) -> auto& { return c.generator.length; }, "series length");
  binder.option(gen, "--sigma", [](RunConfig& c) -> auto& { return c.generator.sigma; }, "noise standard deviation");

  CLI::App* disc = app.add_subcommand("discrepancy", "instantaneous discrepancies of a series");
  add_common(disc);
  binder.option(disc, "--in", [](RunConfig& c) -> auto& { return c.input; }, "input CSV");
  add_model_options(disc, binder, radius, false);

  std::vector<CLI::App*> fitters;
  for (const char* name : {"fit", "forecast"}) {
    CLI::App* sub = app.add_subcommand(name, "fit one model and forecast from the end of the series");
    add_common(sub);
    binder.option(sub, "--in", [](RunConfig& c) -> auto& { return c.input; }, "input CSV");
    binder.option(sub, "--algorithm", [](RunConfig& c) -> auto& { return c.algorithm; },
                  "dbf-alt | dbf-convex | dbf-dual | two-stage | ridge | arima");
    binder.option(sub, "--horizon", [](RunConfig& c) -> auto& { return c.horizon; }, "forecast steps");
    binder.option(sub, "--order", [](RunConfig& c) -> auto& { return c.model.order; }, "ARIMA p,d,q")
        ->delimiter(',')
        ->expected(3);
    add_model_options(sub, binder, radius, true);
    fitters.push_back(sub);
  }

  CLI::App* eval = app.add_subcommand("evaluate", "rolling-origin evaluation with grid search");
  add_common(eval);
  binder.option(eval, "--in", [](RunConfig& c) -> auto& { return c.input; }, "input CSV");
  binder.option(eval, "--dataset", [](RunConfig& c) -> auto& { return c.generator.dataset; },
                "generate this dataset instead of reading --in");
  binder.option(eval, "--length", [](RunConfig& c) -> auto& { return c.generator.length; }, "generated length");
  binder.option(eval, "--algorithms", [](RunConfig& c) -> auto& { return c.protocol.algorithms; },
                "comma-separated: tdbf, edbf, dbf-alt, dbf-convex, dbf-dual, two-stage, ridge, arima, zero")
      ->delimiter(',');
  binder.option(eval, "--first", [](RunConfig& c) -> auto& { return c.protocol.first; }, "first cut (default 750)");
  binder.option(eval, "--step", [](RunConfig& c) -> auto& { return c.protocol.step; }, "cut spacing (default 25)");
  binder.option(eval, "--holdout", [](RunConfig& c) -> auto& { return c.protocol.holdout; }, "selection holdout");
  binder.option(eval, "--horizon", [](RunConfig& c) -> auto& { return c.protocol.horizon; }, "test horizon");
  bool one_step = false;
  CLI::Option* one = eval->add_flag("--one-step", one_step, "score test windows one step ahead with true history");
  binder.custom(one, [](RunConfig& c) { c.protocol.recursive = false; });
  binder.option(eval, "--threads", [](RunConfig& c) -> auto& { return c.threads; },
                "worker threads (default: THREADS or hardware)");
  binder.option(eval, "--emit-plots", [](RunConfig& c) -> auto& { return c.plots_dir; },
                "directory for plot-data CSVs");
  add_model_options(eval, binder, radius, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) merge_json(config, read_json_file(config_path));
    binder.apply(config);
    if (eval->parsed() && eval->get_option("--in")->count() > 0 && eval->get_option("--dataset")->count() > 0) {
      throw UsageError("--in and --dataset are mutually exclusive");
    }
    if (gen->parsed()) cmd_generate(config);
    if (disc->parsed()) cmd_discrepancy(config);
    for (CLI::App* sub : fitters) {
      if (sub->parsed()) cmd_fit(config);
    }
    if (eval->parsed()) cmd_evaluate(config);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace dbf::cli
