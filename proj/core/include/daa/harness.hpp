#pragma once

// Experiment orchestration for the prompt-bias toy study: single runs,
// learning-rate search, objective x hidden-size x bias sweeps, CSV output.
//
// Every run seed is a pure function of (master seed, objective, h, bias
// index, seed index), so results do not depend on scheduling or --jobs.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "daa/bias_lab.hpp"
#include "daa/metrics.hpp"
#include "daa/objectives.hpp"

namespace daa {

struct SweepConfig {
  std::vector<ObjectiveSpec> objectives = default_objectives();
  std::vector<std::size_t> hidden_sizes{1, 2, 3, 4, 5, 6, 8};
  std::vector<double> bias_strengths{0.0, 0.9};
  std::vector<double> lr_grid{0.3, 0.1, 0.05, 0.03, 0.01, 0.005, 0.003};
  std::size_t n_seeds = 1000;
  std::size_t n_pilot_seeds = 30;
  int epochs = 100;
  // data.seed is the master seed; data.bias_strength is ignored in favour
  // of bias_strengths.
  BiasConfig data;
  std::string out_dir = "daa_out";

  // DPO, IPO (pairwise) and ASFT-align, NCA, CalDPO, APOZero (pointwise), beta = 1.
  static std::vector<ObjectiveSpec> default_objectives();

  void validate() const;

  // Structured key/value document (JSON). Keys mirror the fields above;
  // "data" holds n_samples, bias_threshold, bt_temperature, split_fraction
  // and seed. Unknown keys throw ConfigError.
  static SweepConfig from_json(const std::string& text);
  static SweepConfig load(const std::string& path);
  std::string to_json() const;
};

struct RunSpec {
  ObjectiveSpec objective;
  std::size_t hidden = 8;
  double bias_strength = 0.0;
  double lr = 0.1;
  std::uint64_t seed = 0;
  BiasConfig data;  // bias_strength and seed are overridden per run
  int epochs = 100;
};

enum class RunStatus { Ok, Diverged };

std::string_view to_string(RunStatus status) noexcept;

struct RunResult {
  std::string objective;
  std::size_t hidden = 0;
  double bias_strength = 0.0;
  double lr = 0.0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Ok;
  std::optional<double> test_accuracy;
  // Missing when diverged or when every test score is identical.
  std::optional<double> test_icc1;
  std::optional<double> train_loss_final;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

// Seed for seed_index of cell (objective, hidden, bias_index).
std::uint64_t run_seed(std::uint64_t master_seed, ObjectiveKind objective, std::size_t hidden,
                       std::size_t bias_index, std::size_t seed_index);
// Pilot seeds for learning-rate search live in a separate domain.
std::uint64_t pilot_seed(std::uint64_t master_seed, ObjectiveKind objective, std::size_t hidden,
                         std::size_t bias_index, std::size_t pilot_index);

// Generate data, initialize, train and evaluate on the test split.
// Both the data and the initialization derive from spec.seed.
RunResult run_single(const RunSpec& spec);

struct LrCandidate {
  double lr = 0.0;
  double mean_accuracy = 0.0;  // over non-diverged pilots
  std::size_t n_ok = 0;
  std::size_t n_diverged = 0;
};

struct LrSearchResult {
  double best_lr = 0.0;
  std::vector<LrCandidate> candidates;  // grid order
};

struct LrSearchSpec {
  ObjectiveSpec objective;
  std::size_t hidden = 8;
  double bias_strength = 0.0;
  std::size_t bias_index = 0;
  std::vector<double> lr_grid;
  std::size_t n_pilot_seeds = 30;
  std::uint64_t master_seed = 0;
  BiasConfig data;
  int epochs = 100;
};

// Highest mean pilot test accuracy wins; exact ties go to the smaller lr.
// Throws ConfigError for an empty grid or when every pilot diverged.
LrSearchResult lr_search(const LrSearchSpec& spec, unsigned jobs = 1);

struct CellAggregate {
  std::string objective;
  std::size_t hidden = 0;
  double bias_strength = 0.0;
  double lr = 0.0;
  std::size_t n_ok = 0;
  std::size_t n_diverged = 0;
  std::optional<AggregateStat> accuracy;  // needs >= 2 ok runs
  std::optional<AggregateStat> icc1;      // needs >= 2 runs with a defined ICC
};

struct SweepSummary {
  std::vector<CellAggregate> cells;
  std::vector<RunResult> runs;
};

// Per-cell aggregates of run rows, excluding diverged runs. Rows are grouped
// by (objective, h, bias_strength, lr); output is sorted by that key.
std::vector<CellAggregate> summarize(const std::vector<RunResult>& runs);

// Full sweep into config.out_dir:
//   runs.csv, lr_search.csv, aggregates.csv, plot_<metric>_bias<b>.csv,
//   metadata.json
// Existing rows in runs.csv / lr_search.csv are reused, so an interrupted
// sweep resumes where it stopped. Throws IoError if out_dir is not writable
// before any computation starts.
using ProgressFn = std::function<void(const std::string&)>;
SweepSummary sweep(const SweepConfig& config, unsigned jobs = 1, const ProgressFn& progress = {});

// Regenerate aggregates.csv and the plot-data files from out_dir/runs.csv.
std::vector<CellAggregate> report(const std::string& out_dir);

// CSV surfaces.
inline constexpr const char* kRunsHeader =
    "objective,h,bias_strength,lr,seed,status,test_accuracy,test_icc1,train_loss_final";
inline constexpr const char* kAggregateHeader =
    "objective,h,bias_strength,lr,n_ok,n_diverged,acc_mean,acc_ci_low,acc_ci_high,icc1_mean,"
    "icc1_ci_low,icc1_ci_high";

std::string format_run_row(const RunResult& run);
void write_runs_csv(const std::string& path, std::vector<RunResult> runs);
std::vector<RunResult> read_runs_csv(const std::string& path);
void write_aggregates_csv(const std::string& path, const std::vector<CellAggregate>& cells);
// One file per (metric, bias_strength): series,ranking_class,h,mean,ci_low,ci_high.
void write_plot_files(const std::string& out_dir, const std::vector<CellAggregate>& cells);

// Total order used for every CSV: objective, h, bias_strength, lr, seed.
bool run_key_less(const RunResult& a, const RunResult& b);

// DAA_JOBS if set and positive, else std::thread::hardware_concurrency().
unsigned default_jobs();

// Calls fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace daa
