#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "daa/bias_lab.hpp"
#include "daa/csv.hpp"
#include "daa/errors.hpp"
#include "daa/harness.hpp"
#include "daa/verify.hpp"

namespace daa::cli {

namespace {

struct Options {
  std::string config_path;
  std::optional<std::size_t> seeds;
  std::optional<std::size_t> pilot_seeds;
  std::optional<int> epochs;
  std::string out;
  std::vector<std::string> objectives;
  std::vector<std::size_t> hidden;
  std::vector<double> bias;
  std::optional<unsigned> jobs;
  std::optional<double> lr;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n_samples;
};

SweepConfig base_config(const Options& o) {
  SweepConfig cfg = o.config_path.empty() ? SweepConfig{} : SweepConfig::load(o.config_path);
  if (!o.objectives.empty()) {
    cfg.objectives.clear();
    for (const auto& name : o.objectives) cfg.objectives.push_back({parse_objective_kind(name)});
  }
  if (!o.hidden.empty()) cfg.hidden_sizes = o.hidden;
  if (!o.bias.empty()) cfg.bias_strengths = o.bias;
  if (o.seeds) cfg.n_seeds = *o.seeds;
  if (o.pilot_seeds) cfg.n_pilot_seeds = *o.pilot_seeds;
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.n_samples) cfg.data.n_samples = *o.n_samples;
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

int do_generate(const Options& o, std::ostream& out) {
  BiasConfig data = o.config_path.empty() ? BiasConfig{} : SweepConfig::load(o.config_path).data;
  data.seed = o.seed;
  data.bias_strength = o.bias.empty() ? 0.0 : o.bias.front();
  if (o.n_samples) data.n_samples = *o.n_samples;
  const ToyDataset ds = generate(data);
  if (o.out.empty()) {
    write_dataset_csv(out, ds);
  } else {
    std::ofstream f(o.out);
    if (!f) throw IoError("cannot write " + o.out);
    write_dataset_csv(f, ds);
  }
  return 0;
}

int do_run(const Options& o, std::ostream& out, std::ostream& err) {
  const SweepConfig cfg = base_config(o);
  const unsigned jobs = o.jobs.value_or(default_jobs());
  RunSpec rs;
  rs.objective = cfg.objectives.front();
  rs.hidden = cfg.hidden_sizes.front();
  rs.bias_strength = cfg.bias_strengths.front();
  rs.seed = o.seed;
  rs.data = cfg.data;
  rs.epochs = cfg.epochs;
  if (o.lr) {
    rs.lr = *o.lr;
  } else {
    LrSearchSpec ls;
    ls.objective = rs.objective;
    ls.hidden = rs.hidden;
    ls.bias_strength = rs.bias_strength;
    ls.lr_grid = cfg.lr_grid;
    ls.n_pilot_seeds = cfg.n_pilot_seeds;
    ls.master_seed = cfg.data.seed;
    ls.data = cfg.data;
    ls.epochs = cfg.epochs;
    rs.lr = lr_search(ls, jobs).best_lr;
    err << "selected lr " << format_double(rs.lr) << '\n';
  }
  const RunResult r = run_single(rs);
  const std::string text = std::string(kRunsHeader) + '\n' + format_run_row(r) + '\n';
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream f(o.out);
    if (!f) throw IoError("cannot write " + o.out);
    f << text;
  }
  return 0;
}

int do_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const SweepConfig cfg = base_config(o);
  const unsigned jobs = o.jobs.value_or(default_jobs());
  const SweepSummary summary =
      sweep(cfg, jobs, [&err](const std::string& line) { err << "[sweep] " << line << '\n'; });
  out << "wrote " << summary.runs.size() << " runs and " << summary.cells.size()
      << " aggregate rows to " << cfg.out_dir << '\n';
  return 0;
}

int do_verify(const Options& o, std::ostream& out) {
  const auto results = run_verification(o.seed ? o.seed : 20240601);
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  (" << r.detail << ")\n";
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all ? 0 : 1;
}

int do_report(const Options& o, std::ostream& out) {
  const std::string dir = o.out.empty() ? SweepConfig{}.out_dir : o.out;
  const auto cells = report(dir);
  out << "wrote aggregates.csv and plot files for " << cells.size() << " cells in " << dir << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Direct alignment objectives and the prompt-bias toy experiment", "daa"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON sweep configuration file")->check(CLI::ExistingFile);
    sub->add_option("--jobs", o.jobs, "worker threads (default: DAA_JOBS or hardware threads)")
        ->check(CLI::PositiveNumber);
  };

  auto* gen = app.add_subcommand("generate", "emit a toy preference dataset as CSV");
  gen->add_option("--config", o.config_path, "JSON sweep configuration (data section)")
      ->check(CLI::ExistingFile);
  gen->add_option("--seed", o.seed, "dataset seed");
  gen->add_option("--bias", o.bias, "bias strength")->expected(1);
  gen->add_option("--samples", o.n_samples, "number of pairs");
  gen->add_option("--out", o.out, "output CSV (default: stdout)");

  auto* run_cmd = app.add_subcommand("run", "train and evaluate one configuration");
  add_common(run_cmd);
  run_cmd->add_option("--objective", o.objectives, "objective name")->expected(1);
  run_cmd->add_option("--hidden", o.hidden, "hidden layer size")->expected(1);
  run_cmd->add_option("--bias", o.bias, "bias strength")->expected(1);
  run_cmd->add_option("--lr", o.lr, "learning rate (default: pilot search over the grid)");
  run_cmd->add_option("--seed", o.seed, "run seed");
  run_cmd->add_option("--epochs", o.epochs, "training epochs");
  run_cmd->add_option("--seeds", o.pilot_seeds, "pilot seeds for the learning-rate search");
  run_cmd->add_option("--out", o.out, "output CSV (default: stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "lr search + multi-seed runs over the grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--seeds", o.seeds, "runs per cell");
  sweep_cmd->add_option("--pilot-seeds", o.pilot_seeds, "pilot runs per lr during search");
  sweep_cmd->add_option("--epochs", o.epochs, "training epochs");
  sweep_cmd->add_option("--objective", o.objectives, "objectives (comma separated)")
      ->delimiter(',');
  sweep_cmd->add_option("--hidden", o.hidden, "hidden sizes (comma separated)")->delimiter(',');
  sweep_cmd->add_option("--bias", o.bias, "bias strengths (comma separated)")->delimiter(',');
  sweep_cmd->add_option("--out", o.out, "output directory");

  auto* verify_cmd = app.add_subcommand("verify", "run identity and gradient self-checks");
  verify_cmd->add_option("--seed", o.seed, "fuzzing seed");

  auto* report_cmd = app.add_subcommand("report", "rebuild aggregates and plot data from runs.csv");
  report_cmd->add_option("--out", o.out, "sweep output directory");

  std::vector<std::string> storage = args;
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (e.get_exit_code() != 0) err << app.help();
    return code;
  }

  try {
    if (*gen) return do_generate(o, out);
    if (*run_cmd) return do_run(o, out, err);
    if (*sweep_cmd) return do_sweep(o, out, err);
    if (*verify_cmd) return do_verify(o, out);
    if (*report_cmd) return do_report(o, out);
  } catch (const std::exception& e) {
    err << "daa: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace daa::cli
