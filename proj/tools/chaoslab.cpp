// chaoslab run <config> | plot <artifact-dir> [--kind=...] | validate <config>
//
// Exit codes: 0 success, 2 config or input error, 3 numeric failure, 1 other.

#include <CLI11.hpp>

#include <iostream>

#include "chaoslab/config.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/harness.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/plot.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

int cmd_run(const std::string& path, const std::string& output_dir) {
  auto config = chaoslab::ExperimentConfig::from_file(path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  const auto art = chaoslab::run(config);
  std::cout << "wrote " << art.data_files.size() << " data file(s), " << art.plots.size() << " plot(s) to "
            << art.dir.string() << " in " << art.wall_seconds << " s on " << chaoslab::worker_count()
            << " thread(s)\n";
  for (const auto& f : art.data_files) std::cout << "  " << f.filename().string() << '\n';
  return 0;
}

int cmd_validate(const std::string& path) {
  const auto config = chaoslab::ExperimentConfig::from_file(path);
  config.validate();
  std::cout << "ok: " << config.experiment_id << " (" << chaoslab::to_string(config.kind) << ")\n" << config.echo();
  return 0;
}

int cmd_plot(const std::string& dir, const std::string& kind) {
  const auto out = chaoslab::plot(dir, kind);
  if (out.empty()) std::cout << "nothing to plot in " << dir << '\n';
  for (const auto& p : out) std::cout << p.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: imaginary multiplicative chaos laboratory"};
  app.require_subcommand(1);

  std::string run_config, run_output;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", run_config, "key = value config file")->required();
  run->add_option("--output-dir", run_output, "override output-dir from the config");

  std::string validate_config;
  auto* validate = app.add_subcommand("validate", "check a config file without running it");
  validate->add_option("config", validate_config, "key = value config file")->required();

  std::string plot_dir, plot_kind = "all";
  auto* plot = app.add_subcommand("plot", "render SVG plots from an artifact directory");
  plot->add_option("artifact-dir", plot_dir, "directory written by 'run'")->required();
  plot->add_option("--kind", plot_kind, "all, smallball, density, moments or scan");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(run_config, run_output);
    if (*validate) return cmd_validate(validate_config);
    if (*plot) return cmd_plot(plot_dir, plot_kind);
  } catch (const chaoslab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const chaoslab::DataError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const chaoslab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
