#pragma once

// 2 -> h -> 1 ReLU scorer r(x, y) = w2 . relu(W1 [x, y] + b1) + b2 with
// hand-written backpropagation and a full-batch gradient-descent trainer.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "daa/bias_lab.hpp"
#include "daa/metrics.hpp"
#include "daa/objectives.hpp"

namespace daa {

inline constexpr std::size_t kMaxHidden = 64;

struct ScorerParams {
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x 2, row-major: w1[2j] weighs x, w1[2j+1] weighs y
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // 1 x hidden
  double b2 = 0.0;

  static ScorerParams zeros(std::size_t hidden);

  std::size_t num_parameters() const noexcept { return 4 * hidden + 1; }
  // Flat view order: w1, b1, w2, b2.
  double& at(std::size_t i);
  double at(std::size_t i) const;

  bool all_finite() const noexcept;
  // Throws ConfigError on inconsistent shapes, DomainError on non-finite entries.
  void validate() const;

  // params += scale * other
  void add_scaled(const ScorerParams& other, double scale);

  // Versioned plain-text dump ("daa-scorer v1"), shortest round-trip numbers.
  void write(std::ostream& os) const;
  static ScorerParams read(std::istream& is);

  friend bool operator==(const ScorerParams&, const ScorerParams&) = default;
};

// Gradients share the parameter layout.
using ScorerGrad = ScorerParams;

// Glorot-uniform weights, a = sqrt(6 / (fan_in + fan_out)); zero biases.
// hidden must lie in [1, kMaxHidden].
ScorerParams init_scorer(std::size_t hidden, std::uint64_t seed);

double forward(const ScorerParams& params, double x, double y);

// Gradient of d_r * r(x, y) with respect to every parameter.
ScorerGrad chain_branch(const ScorerParams& params, double x, double y, double d_r);

struct PairGradient {
  double loss = 0.0;
  ScorerGrad grad;
};

// Loss of one preference pair under the scalar binding of `objective`, with
// the exact gradient: dL/dr_w chained through the y_w branch plus dL/dr_l
// chained through the y_l branch.
PairGradient backward(const ScorerParams& params, const PreferencePair& pair,
                      const ObjectiveSpec& objective);

struct TrainConfig {
  ObjectiveSpec objective;
  double lr = 0.01;
  int epochs = 100;
  // Recorded for provenance; full-batch descent itself draws no randomness.
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;     // mean loss at the parameters the step started from
  double test_accuracy = 0.0;  // after the step; NaN once diverged
};

struct TrainResult {
  ScorerParams params;
  std::vector<EpochRecord> history;
  bool diverged = false;
  double final_train_loss = 0.0;  // mean loss at the returned parameters
};

// Mean per-pair loss and its gradient over `pairs`.
PairGradient batch_gradient(const ScorerParams& params, const std::vector<PreferencePair>& pairs,
                            const ObjectiveSpec& objective);

// Full-batch gradient descent on the mean training loss for config.epochs
// steps. A non-finite loss or parameter stops training and marks the result
// diverged instead of throwing.
TrainResult train(ScorerParams params, const ToyDataset& dataset, const TrainConfig& config);

std::vector<ScoredPair> score_pairs(const ScorerParams& params,
                                    const std::vector<PreferencePair>& pairs);

}  // namespace daa
