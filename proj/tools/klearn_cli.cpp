// Experiment runner: `klearn run --config cfg.json` then `klearn report --in out`.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "klearn/harness.hpp"

namespace fs = std::filesystem;
using namespace klearn;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            const std::optional<std::uint64_t>& seed, const std::optional<std::size_t>& runs,
            const std::optional<std::size_t>& parallel) {
  ExperimentConfig cfg;
  try {
    Json doc = read_json_file(config_path);
    if (seed) doc["seed"] = *seed;
    if (runs) doc["runs"] = *runs;
    if (parallel) doc["parallel"] = *parallel;
    if (out_dir) doc["output"] = *out_dir;
    cfg = config_from_json(doc);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<RunRecord> records;
  try {
    records = run_experiment(cfg);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const fs::path out(cfg.output);
  fs::create_directories(out);
  emit_csv(records, out / "runs.csv");
  write_json_file(out / "config.json", config_to_json(cfg));
  std::cerr << "wrote " << (out / "runs.csv").string() << " (" << records.size()
            << " runs)\n";
  return 0;
}

int cmd_report(const std::string& in_dir) {
  const fs::path in(in_dir);
  const Summary summary = aggregate(read_runs_csv(in / "runs.csv"));
  emit_summary_csv(summary, in / "summary.csv");
  std::cout << format_summary_table(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"K-learning experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs, parallel;
  auto* run = app.add_subcommand("run", "run an experiment and write runs.csv");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--runs", runs, "number of runs");
  run->add_option("--parallel", parallel, "worker threads");

  std::string in_dir;
  auto* report = app.add_subcommand("report", "summarize runs.csv into summary.csv");
  report->add_option("--in", in_dir, "directory written by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, seed, runs, parallel);
    return cmd_report(in_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
