#include "daa/bias_lab.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include "daa/csv.hpp"
#include "daa/errors.hpp"
#include "daa/objectives.hpp"

namespace daa {

namespace {
// Stream index reserved for the train/test shuffle; never used by a pair.
constexpr std::uint64_t kSplitStream = ~std::uint64_t{0};
}  // namespace

void BiasConfig::validate() const {
  if (n_samples < 2) throw ConfigError("n_samples must be >= 2");
  if (!(bias_strength >= 0.0) || !std::isfinite(bias_strength)) {
    throw ConfigError("bias_strength must be a finite value >= 0");
  }
  if (!(bias_threshold >= 0.0 && bias_threshold <= 1.0)) {
    throw ConfigError("bias_threshold must lie in [0, 1]");
  }
  if (!(bt_temperature > 0.0) || !std::isfinite(bt_temperature)) {
    throw ConfigError("bt_temperature must be > 0");
  }
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw ConfigError("split_fraction must lie in (0, 1)");
  }
}

BtLabel bt_label(double y1, double y2, double temperature, CounterRng& rng) {
  if (!(temperature > 0.0)) throw ConfigError("bt_label: temperature must be > 0");
  const double p_first = sigmoid((y1 - y2) / temperature);
  if (rng.uniform() < p_first) return {1, 2};
  return {2, 1};
}

std::pair<std::vector<PreferencePair>, std::vector<PreferencePair>> split(
    std::vector<PreferencePair> pairs, double fraction, CounterRng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split: fraction must lie in (0, 1)");
  }
  const std::size_t n = pairs.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw ConfigError("split: fraction " + format_double(fraction) + " of " + std::to_string(n) +
                      " pairs leaves an empty side");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }
  std::vector<PreferencePair> train;
  std::vector<PreferencePair> test;
  train.reserve(n_train);
  test.reserve(n - n_train);
  for (std::size_t k = 0; k < n; ++k) {
    (k < n_train ? train : test).push_back(pairs[order[k]]);
  }
  return {std::move(train), std::move(test)};
}

std::vector<PreferencePair> generate_pairs(const BiasConfig& config) {
  config.validate();
  std::vector<PreferencePair> pairs;
  pairs.reserve(config.n_samples);
  for (std::size_t i = 0; i < config.n_samples; ++i) {
    CounterRng rng = CounterRng::substream(config.seed, i);
    const double x = rng.uniform();
    const double s1 = rng.uniform();
    const double s2 = rng.uniform();
    // s1 - (s1 + s2)/2 and s2 - (s1 + s2)/2, written so the two are exact negatives.
    const double centered = 0.5 * (s1 - s2);
    const double b = x < config.bias_threshold ? config.bias_strength : 0.0;
    const double y1 = centered + b;
    const double y2 = -centered + b;
    const BtLabel label = bt_label(y1, y2, config.bt_temperature, rng);
    pairs.push_back(label.winner == 1 ? PreferencePair{x, y1, y2, b}
                                      : PreferencePair{x, y2, y1, b});
  }
  return pairs;
}

ToyDataset generate(const BiasConfig& config) {
  auto pairs = generate_pairs(config);
  CounterRng split_rng = CounterRng::substream(config.seed, kSplitStream);
  auto [train, test] = split(std::move(pairs), config.split_fraction, split_rng);
  return {std::move(train), std::move(test), config};
}

void write_dataset_csv(std::ostream& os, const ToyDataset& dataset) {
  os << "# x: scalar prompt in [0,1)\n"
     << "# y_w: observed score of the preferred candidate (centered base + b_x)\n"
     << "# y_l: observed score of the dispreferred candidate (centered base + b_x)\n"
     << "# b_x: injected prompt offset bias_strength*1[x<bias_threshold]\n"
     << "# split: train or test\n";
  os << "x,y_w,y_l,b_x,split\n";
  auto emit = [&os](const std::vector<PreferencePair>& part, const char* tag) {
    for (const auto& p : part) {
      os << format_double(p.x) << ',' << format_double(p.y_w) << ',' << format_double(p.y_l)
         << ',' << format_double(p.b_x) << ',' << tag << '\n';
    }
  };
  emit(dataset.train, "train");
  emit(dataset.test, "test");
}

}  // namespace daa
