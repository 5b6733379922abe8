#include "daa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "daa/csv.hpp"
#include "daa/errors.hpp"
#include "daa/mlp.hpp"
#include "daa/rng.hpp"

namespace fs = std::filesystem;

namespace daa {

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kPilotDomain = 0x70696C6F74ULL;  // "pilot"

using CellKey = std::tuple<std::string, std::size_t, double, double>;

CellKey cell_key(const RunResult& r) { return {r.objective, r.hidden, r.bias_strength, r.lr}; }

void ensure_writable_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir);
  }
  const fs::path probe = fs::path(dir) / ".daa_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("output directory " + dir + " is not writable");
  }
  fs::remove(probe, ec);
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::string bias_tag(double bias) { return format_double(bias); }

struct LrRow {
  std::string objective;
  std::size_t hidden;
  double bias_strength;
  LrCandidate candidate;
  bool selected;
};

void write_lr_csv(const std::string& path, std::vector<LrRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const LrRow& a, const LrRow& b) {
    return std::tie(a.objective, a.hidden, a.bias_strength, a.candidate.lr) <
           std::tie(b.objective, b.hidden, b.bias_strength, b.candidate.lr);
  });
  auto out = open_for_write(path);
  out << "objective,h,bias_strength,lr,pilot_mean_accuracy,n_ok,n_diverged,selected\n";
  for (const auto& r : rows) {
    out << r.objective << ',' << r.hidden << ',' << format_double(r.bias_strength) << ','
        << format_double(r.candidate.lr) << ','
        << (r.candidate.n_ok ? format_double(r.candidate.mean_accuracy) : std::string("NA"))
        << ',' << r.candidate.n_ok << ',' << r.candidate.n_diverged << ','
        << (r.selected ? 1 : 0) << '\n';
  }
}

std::vector<LrRow> read_lr_csv(const std::string& path) {
  std::vector<LrRow> rows;
  if (!fs::exists(path)) return rows;
  const CsvTable t = read_csv_file(path);
  const auto c_obj = t.column("objective"), c_h = t.column("h"), c_b = t.column("bias_strength"),
             c_lr = t.column("lr"), c_acc = t.column("pilot_mean_accuracy"),
             c_ok = t.column("n_ok"), c_div = t.column("n_diverged"),
             c_sel = t.column("selected");
  for (const auto& row : t.rows) {
    LrRow r;
    r.objective = row[c_obj];
    r.hidden = static_cast<std::size_t>(std::stoull(row[c_h]));
    r.bias_strength = parse_double(row[c_b]);
    r.candidate.lr = parse_double(row[c_lr]);
    r.candidate.mean_accuracy = parse_optional(row[c_acc]).value_or(0.0);
    r.candidate.n_ok = static_cast<std::size_t>(std::stoull(row[c_ok]));
    r.candidate.n_diverged = static_cast<std::size_t>(std::stoull(row[c_div]));
    r.selected = row[c_sel] == "1";
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

std::string_view to_string(RunStatus status) noexcept {
  return status == RunStatus::Ok ? "ok" : "diverged";
}

std::vector<ObjectiveSpec> SweepConfig::default_objectives() {
  return {{ObjectiveKind::DPO},     {ObjectiveKind::IPO},    {ObjectiveKind::ASFTAlign},
          {ObjectiveKind::NCA},     {ObjectiveKind::CalDPO}, {ObjectiveKind::APOZero}};
}

void SweepConfig::validate() const {
  if (objectives.empty()) throw ConfigError("sweep: no objectives");
  std::set<ObjectiveKind> seen;
  for (const auto& o : objectives) {
    o.validate();
    if (!supports_scalar_binding(o.kind)) {
      throw ConfigError(std::string(to_string(o.kind)) + " cannot train the toy scorer");
    }
    if (!seen.insert(o.kind).second) {
      throw ConfigError("sweep: objective " + std::string(to_string(o.kind)) + " listed twice");
    }
  }
  if (hidden_sizes.empty()) throw ConfigError("sweep: no hidden sizes");
  for (auto h : hidden_sizes) {
    if (h == 0 || h > kMaxHidden) throw ConfigError("sweep: hidden size out of range");
  }
  if (bias_strengths.empty()) throw ConfigError("sweep: no bias strengths");
  for (double b : bias_strengths) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("sweep: bias strengths must be >= 0");
  }
  if (lr_grid.empty()) throw ConfigError("sweep: empty lr grid");
  for (double lr : lr_grid) {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("sweep: learning rates must be > 0");
  }
  if (n_seeds < 1) throw ConfigError("sweep: n_seeds must be >= 1");
  if (n_pilot_seeds < 1) throw ConfigError("sweep: n_pilot_seeds must be >= 1");
  if (epochs < 1) throw ConfigError("sweep: epochs must be >= 1");
  data.validate();
  if (out_dir.empty()) throw ConfigError("sweep: out_dir must be set");
}

std::uint64_t run_seed(std::uint64_t master_seed, ObjectiveKind objective, std::size_t hidden,
                       std::size_t bias_index, std::size_t seed_index) {
  return hash_combine({master_seed, static_cast<std::uint64_t>(objective), hidden, bias_index,
                       seed_index});
}

std::uint64_t pilot_seed(std::uint64_t master_seed, ObjectiveKind objective, std::size_t hidden,
                         std::size_t bias_index, std::size_t pilot_index) {
  return hash_combine({master_seed, static_cast<std::uint64_t>(objective), hidden, bias_index,
                       kPilotDomain, pilot_index});
}

RunResult run_single(const RunSpec& spec) {
  BiasConfig data = spec.data;
  data.bias_strength = spec.bias_strength;
  data.seed = hash_combine({spec.seed, kDataStream});
  const ToyDataset dataset = generate(data);

  TrainConfig tc;
  tc.objective = spec.objective;
  tc.lr = spec.lr;
  tc.epochs = spec.epochs;
  tc.seed = spec.seed;
  const TrainResult trained =
      train(init_scorer(spec.hidden, hash_combine({spec.seed, kInitStream})), dataset, tc);

  RunResult r;
  r.objective = std::string(to_string(spec.objective.kind));
  r.hidden = spec.hidden;
  r.bias_strength = spec.bias_strength;
  r.lr = spec.lr;
  r.seed = spec.seed;
  if (trained.diverged) {
    r.status = RunStatus::Diverged;
    return r;
  }
  const auto scored = score_pairs(trained.params, dataset.test);
  r.status = RunStatus::Ok;
  r.test_accuracy = accuracy(scored);
  try {
    r.test_icc1 = icc1(scored);
  } catch (const UndefinedStatistic&) {
    r.test_icc1.reset();
  }
  r.train_loss_final = trained.final_train_loss;
  return r;
}

LrSearchResult lr_search(const LrSearchSpec& spec, unsigned jobs) {
  if (spec.lr_grid.empty()) throw ConfigError("lr_search: empty grid");
  if (spec.n_pilot_seeds < 1) throw ConfigError("lr_search: need at least one pilot seed");
  const std::size_t n_lr = spec.lr_grid.size();
  const std::size_t n_pilot = spec.n_pilot_seeds;
  std::vector<RunResult> results(n_lr * n_pilot);
  parallel_for(results.size(), jobs, [&](std::size_t i) {
    const std::size_t li = i / n_pilot;
    const std::size_t pi = i % n_pilot;
    RunSpec rs;
    rs.objective = spec.objective;
    rs.hidden = spec.hidden;
    rs.bias_strength = spec.bias_strength;
    rs.lr = spec.lr_grid[li];
    rs.seed = pilot_seed(spec.master_seed, spec.objective.kind, spec.hidden, spec.bias_index, pi);
    rs.data = spec.data;
    rs.epochs = spec.epochs;
    results[i] = run_single(rs);
  });

  LrSearchResult out;
  std::optional<std::size_t> best;
  for (std::size_t li = 0; li < n_lr; ++li) {
    LrCandidate c;
    c.lr = spec.lr_grid[li];
    double sum = 0.0;
    for (std::size_t pi = 0; pi < n_pilot; ++pi) {
      const auto& r = results[li * n_pilot + pi];
      if (r.status == RunStatus::Ok) {
        sum += *r.test_accuracy;
        ++c.n_ok;
      } else {
        ++c.n_diverged;
      }
    }
    c.mean_accuracy = c.n_ok ? sum / static_cast<double>(c.n_ok) : 0.0;
    out.candidates.push_back(c);
    if (c.n_ok == 0) continue;
    if (!best) {
      best = li;
      continue;
    }
    const auto& b = out.candidates[*best];
    if (c.mean_accuracy > b.mean_accuracy ||
        (c.mean_accuracy == b.mean_accuracy && c.lr < b.lr)) {
      best = li;
    }
  }
  if (!best) throw ConfigError("lr_search: every pilot run diverged");
  out.best_lr = out.candidates[*best].lr;
  return out;
}

bool run_key_less(const RunResult& a, const RunResult& b) {
  return std::tie(a.objective, a.hidden, a.bias_strength, a.lr, a.seed) <
         std::tie(b.objective, b.hidden, b.bias_strength, b.lr, b.seed);
}

std::string format_run_row(const RunResult& r) {
  std::ostringstream os;
  os << r.objective << ',' << r.hidden << ',' << format_double(r.bias_strength) << ','
     << format_double(r.lr) << ',' << r.seed << ',' << to_string(r.status) << ','
     << format_optional(r.test_accuracy) << ',' << format_optional(r.test_icc1) << ','
     << format_optional(r.train_loss_final);
  return os.str();
}

void write_runs_csv(const std::string& path, std::vector<RunResult> runs) {
  std::sort(runs.begin(), runs.end(), run_key_less);
  const std::string tmp = path + ".tmp";
  {
    auto out = open_for_write(tmp);
    out << kRunsHeader << '\n';
    for (const auto& r : runs) out << format_run_row(r) << '\n';
    if (!out) throw IoError("failed writing " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path);
}

std::vector<RunResult> read_runs_csv(const std::string& path) {
  const CsvTable t = read_csv_file(path);
  std::string joined;
  for (std::size_t i = 0; i < t.header.size(); ++i) joined += (i ? "," : "") + t.header[i];
  if (joined != kRunsHeader) throw IoError(path + ": unexpected header");
  std::vector<RunResult> runs;
  runs.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    RunResult r;
    r.objective = row[0];
    r.hidden = static_cast<std::size_t>(std::stoull(row[1]));
    r.bias_strength = parse_double(row[2]);
    r.lr = parse_double(row[3]);
    r.seed = std::stoull(row[4]);
    if (row[5] == "ok") {
      r.status = RunStatus::Ok;
    } else if (row[5] == "diverged") {
      r.status = RunStatus::Diverged;
    } else {
      throw IoError(path + ": unknown status '" + row[5] + "'");
    }
    r.test_accuracy = parse_optional(row[6]);
    r.test_icc1 = parse_optional(row[7]);
    r.train_loss_final = parse_optional(row[8]);
    runs.push_back(r);
  }
  return runs;
}

std::vector<CellAggregate> summarize(const std::vector<RunResult>& runs) {
  std::map<CellKey, std::pair<std::vector<double>, std::vector<double>>> metrics;
  std::map<CellKey, CellAggregate> cells;
  for (const auto& r : runs) {
    const CellKey key = cell_key(r);
    auto [it, inserted] = cells.try_emplace(key);
    CellAggregate& c = it->second;
    if (inserted) {
      c.objective = r.objective;
      c.hidden = r.hidden;
      c.bias_strength = r.bias_strength;
      c.lr = r.lr;
    }
    if (r.status == RunStatus::Diverged) {
      ++c.n_diverged;
      continue;
    }
    ++c.n_ok;
    auto& [acc, icc] = metrics[key];
    if (r.test_accuracy) acc.push_back(*r.test_accuracy);
    if (r.test_icc1) icc.push_back(*r.test_icc1);
  }
  std::vector<CellAggregate> out;
  out.reserve(cells.size());
  for (auto& [key, c] : cells) {
    const auto& [acc, icc] = metrics[key];
    if (acc.size() >= 2) c.accuracy = aggregate(acc);
    if (icc.size() >= 2) c.icc1 = aggregate(icc);
    out.push_back(c);
  }
  return out;
}

void write_aggregates_csv(const std::string& path, const std::vector<CellAggregate>& cells) {
  auto out = open_for_write(path);
  out << kAggregateHeader << '\n';
  auto stat = [](const std::optional<AggregateStat>& s) {
    if (!s) return std::string("NA,NA,NA");
    return format_double(s->mean) + ',' + format_double(s->ci_low) + ',' +
           format_double(s->ci_high);
  };
  for (const auto& c : cells) {
    out << c.objective << ',' << c.hidden << ',' << format_double(c.bias_strength) << ','
        << format_double(c.lr) << ',' << c.n_ok << ',' << c.n_diverged << ',' << stat(c.accuracy)
        << ',' << stat(c.icc1) << '\n';
  }
}

void write_plot_files(const std::string& out_dir, const std::vector<CellAggregate>& cells) {
  std::set<double> biases;
  for (const auto& c : cells) biases.insert(c.bias_strength);
  for (const char* metric : {"accuracy", "icc1"}) {
    for (double b : biases) {
      const std::string path =
          (fs::path(out_dir) / ("plot_" + std::string(metric) + "_bias" + bias_tag(b) + ".csv"))
              .string();
      auto out = open_for_write(path);
      out << "series,ranking_class,h,mean,ci_low,ci_high\n";
      for (const auto& c : cells) {
        if (c.bias_strength != b) continue;
        const auto& s = std::string(metric) == "accuracy" ? c.accuracy : c.icc1;
        std::string_view rc = "n/a";
        try {
          rc = to_string(ranking_class(parse_objective_kind(c.objective)));
        } catch (const ConfigError&) {
        }
        out << c.objective << ',' << rc << ',' << c.hidden << ',';
        if (s) {
          out << format_double(s->mean) << ',' << format_double(s->ci_low) << ','
              << format_double(s->ci_high) << '\n';
        } else {
          out << "NA,NA,NA\n";
        }
      }
    }
  }
}

std::vector<CellAggregate> report(const std::string& out_dir) {
  const std::string runs_path = (fs::path(out_dir) / "runs.csv").string();
  if (!fs::exists(runs_path)) throw IoError("no runs.csv in " + out_dir);
  auto cells = summarize(read_runs_csv(runs_path));
  write_aggregates_csv((fs::path(out_dir) / "aggregates.csv").string(), cells);
  write_plot_files(out_dir, cells);
  return cells;
}

SweepSummary sweep(const SweepConfig& config, unsigned jobs, const ProgressFn& progress) {
  config.validate();
  ensure_writable_dir(config.out_dir);
  const std::string runs_path = (fs::path(config.out_dir) / "runs.csv").string();
  const std::string lr_path = (fs::path(config.out_dir) / "lr_search.csv").string();
  const std::uint64_t master = config.data.seed;

  {
    auto meta = open_for_write((fs::path(config.out_dir) / "metadata.json").string());
    meta << config.to_json() << '\n';
  }

  // Previously completed work, keyed by the full run key.
  std::map<std::tuple<std::string, std::size_t, double, double, std::uint64_t>, RunResult> done;
  if (fs::exists(runs_path)) {
    for (auto& r : read_runs_csv(runs_path)) {
      done.emplace(std::make_tuple(r.objective, r.hidden, r.bias_strength, r.lr, r.seed), r);
    }
  }
  std::vector<LrRow> lr_rows = read_lr_csv(lr_path);

  std::vector<RunResult> all_runs;
  for (const auto& objective : config.objectives) {
    const std::string name(to_string(objective.kind));
    for (std::size_t h : config.hidden_sizes) {
      for (std::size_t bi = 0; bi < config.bias_strengths.size(); ++bi) {
        const double bias = config.bias_strengths[bi];

        std::optional<double> chosen;
        for (const auto& row : lr_rows) {
          if (row.selected && row.objective == name && row.hidden == h &&
              row.bias_strength == bias) {
            chosen = row.candidate.lr;
          }
        }
        if (!chosen) {
          LrSearchSpec ls;
          ls.objective = objective;
          ls.hidden = h;
          ls.bias_strength = bias;
          ls.bias_index = bi;
          ls.lr_grid = config.lr_grid;
          ls.n_pilot_seeds = config.n_pilot_seeds;
          ls.master_seed = master;
          ls.data = config.data;
          ls.epochs = config.epochs;
          const LrSearchResult found = lr_search(ls, jobs);
          for (const auto& c : found.candidates) {
            lr_rows.push_back({name, h, bias, c, c.lr == found.best_lr});
          }
          write_lr_csv(lr_path, lr_rows);
          chosen = found.best_lr;
        }

        std::vector<RunResult> cell(config.n_seeds);
        std::vector<std::size_t> todo;
        for (std::size_t s = 0; s < config.n_seeds; ++s) {
          const std::uint64_t seed = run_seed(master, objective.kind, h, bi, s);
          auto it = done.find(std::make_tuple(name, h, bias, *chosen, seed));
          if (it != done.end()) {
            cell[s] = it->second;
          } else {
            todo.push_back(s);
          }
        }
        parallel_for(todo.size(), jobs, [&](std::size_t k) {
          const std::size_t s = todo[k];
          RunSpec rs;
          rs.objective = objective;
          rs.hidden = h;
          rs.bias_strength = bias;
          rs.lr = *chosen;
          rs.seed = run_seed(master, objective.kind, h, bi, s);
          rs.data = config.data;
          rs.epochs = config.epochs;
          cell[s] = run_single(rs);
        });
        for (const auto& r : cell) {
          done.emplace(std::make_tuple(r.objective, r.hidden, r.bias_strength, r.lr, r.seed), r);
          all_runs.push_back(r);
        }
        if (!todo.empty()) {
          std::vector<RunResult> snapshot;
          snapshot.reserve(done.size());
          for (const auto& [k, r] : done) snapshot.push_back(r);
          write_runs_csv(runs_path, std::move(snapshot));
        }
        if (progress) {
          progress(name + " h=" + std::to_string(h) + " bias=" + format_double(bias) +
                   " lr=" + format_double(*chosen) + " (" + std::to_string(todo.size()) +
                   " new runs)");
        }
      }
    }
  }

  std::sort(all_runs.begin(), all_runs.end(), run_key_less);
  // Rewrite with exactly this sweep's rows, then derive everything else from disk.
  write_runs_csv(runs_path, all_runs);
  SweepSummary summary;
  summary.cells = report(config.out_dir);
  summary.runs = std::move(all_runs);
  return summary;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("DAA_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) break;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace daa
