#pragma once

// Synthetic preference data with an optional prompt-specific bias.
//
// Each sample draws a scalar prompt x ~ U(0,1) and two base qualities
// s1, s2 ~ U(0,1). The base scores are centered per prompt, a shared offset
// b_x = bias_strength * 1[x < bias_threshold] is added to both, and a
// low-temperature Bradley-Terry draw decides which one is preferred.

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "daa/rng.hpp"

namespace daa {

struct BiasConfig {
  std::size_t n_samples = 2000;
  double bias_strength = 0.0;
  double bias_threshold = 0.5;
  double bt_temperature = 1e-6;
  double split_fraction = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PreferencePair {
  double x = 0.0;    // prompt in [0, 1)
  double y_w = 0.0;  // observed score of the preferred candidate
  double y_l = 0.0;  // observed score of the dispreferred candidate
  double b_x = 0.0;  // injected prompt offset, kept for diagnostics
};

struct ToyDataset {
  std::vector<PreferencePair> train;
  std::vector<PreferencePair> test;
  BiasConfig config;
};

struct BtLabel {
  int winner = 1;  // 1 or 2
  int loser = 2;
};

// Candidate 1 wins with probability sigma((y1 - y2) / temperature). One
// uniform draw from `rng`; exact ties therefore resolve by a fair coin.
BtLabel bt_label(double y1, double y2, double temperature, CounterRng& rng);

// Uniformly random partition into round(fraction * n) training and the rest
// test pairs. Throws ConfigError if either side would be empty.
std::pair<std::vector<PreferencePair>, std::vector<PreferencePair>> split(
    std::vector<PreferencePair> pairs, double fraction, CounterRng& rng);

// All n_samples pairs in generation order, before splitting. Pair i uses
// substream CounterRng::substream(seed, i) for (x, s1, s2, BT draw).
std::vector<PreferencePair> generate_pairs(const BiasConfig& config);

// generate_pairs followed by split with the stream reserved for splitting.
ToyDataset generate(const BiasConfig& config);

// Columns: x,y_w,y_l,b_x,split (split is "train" or "test"), preceded by
// '#' comment lines describing them.
void write_dataset_csv(std::ostream& os, const ToyDataset& dataset);

}  // namespace daa
