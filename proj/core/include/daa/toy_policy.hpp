#pragma once

// Tabular categorical policy over a small fixed response set.
//
// pi(y | x) = softmax(logits[x])[y]. With length normalization the
// log-probability is divided by the declared token length |y|, i.e. the
// policy scores p(y)^(1/|y|).

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "daa/objectives.hpp"

namespace daa {

class TabularPolicy {
 public:
  // Zero logits (uniform rows). Every length must be >= 1.
  TabularPolicy(std::size_t num_prompts, std::vector<int> response_lengths);
  // logits is row-major, num_prompts x response_lengths.size().
  TabularPolicy(std::size_t num_prompts, std::vector<int> response_lengths,
                std::vector<double> logits);

  std::size_t num_prompts() const noexcept { return num_prompts_; }
  std::size_t num_responses() const noexcept { return lengths_.size(); }

  double logit(std::size_t x, std::size_t y) const;
  void set_logit(std::size_t x, std::size_t y, double value);
  std::span<const double> row(std::size_t x) const;
  std::span<double> mutable_row(std::size_t x);

  int response_length(std::size_t y) const;
  std::span<const int> response_lengths() const noexcept { return lengths_; }

  // softmax of row x.
  std::vector<double> probabilities(std::size_t x) const;
  // log-softmax of row x.
  std::vector<double> log_probabilities(std::size_t x) const;

  // Versioned plain-text table:
  //   daa-tabular-policy v1
  //   prompts <P> responses <R>
  //   <prompt id> <response id> <logit> <length>     (P*R rows)
  // Logits are written in shortest round-trip form.
  void write(std::ostream& os) const;
  static TabularPolicy read(std::istream& is);

  friend bool operator==(const TabularPolicy&, const TabularPolicy&) = default;

 private:
  void check_ids(std::size_t x, std::size_t y) const;

  std::size_t num_prompts_;
  std::vector<int> lengths_;
  std::vector<double> logits_;
};

// A trainable policy plus a deep frozen copy taken at construction, the
// reference used by the ratio scores.
class PolicyWithReference {
 public:
  explicit PolicyWithReference(TabularPolicy initial)
      : policy_(initial), reference_(std::move(initial)) {}

  TabularPolicy& policy() noexcept { return policy_; }
  const TabularPolicy& policy() const noexcept { return policy_; }
  const TabularPolicy& reference() const noexcept { return reference_; }

 private:
  TabularPolicy policy_;
  const TabularPolicy reference_;
};

double log_prob(const TabularPolicy& policy, std::size_t x, std::size_t y, bool normalize);

// log pi(y|x) - log pi_ref(y|x), both under the same normalization.
double ref_ratio_score(const TabularPolicy& policy, const TabularPolicy& reference,
                       std::size_t x, std::size_t y, bool normalize);

// log(q / (1 - q)) with q the (possibly length-normalized) probability.
// Throws DomainError when q is not strictly inside (0, 1).
double odds_ratio_score(const TabularPolicy& policy, std::size_t x, std::size_t y,
                        bool normalize);

struct LogitGrad {
  double value = 0.0;
  // Partial derivatives with respect to every logit of prompt row x.
  std::vector<double> d_logits;
};

// Loss of one preference (x, y_w, y_l) under `objective`, with its exact
// gradient over the logits of row x. Scores are formed according to the
// objective's score class and normalization; the scalar partials from the
// objectives module are chained through the score map and the softmax.
// The reference is ignored by kinds that do not use one.
LogitGrad pair_loss(const ObjectiveSpec& objective, const TabularPolicy& policy,
                    const TabularPolicy& reference, std::size_t x, std::size_t y_w,
                    std::size_t y_l);

// logits[x] -= lr * grad.d_logits
void apply_gradient(TabularPolicy& policy, std::size_t x, const LogitGrad& grad, double lr);

}  // namespace daa
