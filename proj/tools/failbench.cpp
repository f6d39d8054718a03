#include "failbench/config.hpp"
#include "failbench/error.hpp"
#include "failbench/evaluate.hpp"
#include "failbench/failure.hpp"
#include "failbench/harness.hpp"
#include "failbench/mission.hpp"
#include "failbench/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace failbench;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

std::optional<std::size_t> band_option(long band) {
  if (band < 0) return std::nullopt;
  return static_cast<std::size_t>(band);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"failbench: fixed-wing failure-injection test bench"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t trials = 8;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "Run the clean/adverse ensemble and write a run directory");
  run->add_option("--config", config_path, "YAML experiment config (built-in defaults if omitted)")
      ->check(CLI::ExistingFile);
  run->add_option("--trials", trials, "Trials per config and regime")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed of trial 0; trial i uses seed + i");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  std::vector<int> orders{1, 2, 3, 4};
  double size = 400.0, altitude = 100.0;
  std::string plan_out;
  auto* plan = app.add_subcommand("plan", "Write the Hilbert mission waypoints as CSV");
  plan->add_option("--orders", orders, "Curve order per quadrant (SW, SE, NE, NW)")
      ->delimiter(',');
  plan->add_option("--size", size, "Quadrant side length [m]");
  plan->add_option("--altitude", altitude, "Mission altitude [m]");
  plan->add_option("--out", plan_out, "Output file (stdout if omitted)");

  std::string dtw_a, dtw_b;
  long band = -1;
  auto* dtw_cmd = app.add_subcommand("dtw", "DTW distance between two t,north,east,alt CSV files");
  dtw_cmd->add_option("a", dtw_a)->required()->check(CLI::ExistingFile);
  dtw_cmd->add_option("b", dtw_b)->required()->check(CLI::ExistingFile);
  dtw_cmd->add_option("--band", band, "Sakoe-Chiba band width in samples");

  auto* states = app.add_subcommand("states", "Print the failure state table as CSV");

  std::string in_dir;
  auto* report = app.add_subcommand("report", "Summarize an existing run directory");
  report->add_option("--in", in_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--band", band, "Sakoe-Chiba band for self-similarity");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentConfig exp =
          config_path.empty() ? default_experiment_config() : load_experiment_config(config_path);
      const EnsembleResult result = run_ensemble(exp, trials, seed, threads);
      write_run_directory(out_dir, result, exp.config_hash);
      print_tables(std::cout, result.summaries);
    } else if (*plan) {
      PlanParams params;
      params.orders = orders;
      params.quadrant_size = size;
      params.altitude = altitude;
      const FlightPlan fp = build_flight_plan(params);
      if (plan_out.empty()) {
        write_plan_csv(std::cout, fp);
      } else {
        auto out = open_output(plan_out);
        write_plan_csv(out, fp);
      }
    } else if (*dtw_cmd) {
      auto in_a = open_input(dtw_a);
      auto in_b = open_input(dtw_b);
      const auto a = read_points_csv(in_a, TrajectorySource::Flown).points();
      const auto b = read_points_csv(in_b, TrajectorySource::Flown).points();
      const DtwResult r = dtw(a, b, band_option(band));
      std::printf("dtw_m=%.6f normalized_m=%.6f path_length=%zu\n", r.distance, r.normalized,
                  r.path_length);
    } else if (*states) {
      write_state_table_csv(std::cout, enumerate_states());
    } else if (*report) {
      const fs::path dir(in_dir);
      const auto summaries = summarize(read_records_dir(dir), band_option(band));
      auto summary = open_output(dir / "summary.csv");
      write_summary_csv(summary, summaries);
      auto boxplot = open_output(dir / "boxplot.csv");
      write_boxplot_csv(boxplot, summaries);
      print_tables(std::cout, summaries);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "failbench: %s\n", e.what());
    return 2;
  }
  return 0;
}
