#include "daa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "daa/errors.hpp"

namespace daa {

double accuracy(std::span<const ScoredPair> pairs) {
  if (pairs.empty()) throw DomainError("accuracy: empty list");
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    if (p.r_w > p.r_l) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

double icc1(std::span<const ScoredPair> pairs) {
  if (pairs.size() < 2) throw DomainError("icc1: need at least two prompts");
  const auto n = static_cast<double>(pairs.size());

  // The grand mean of all 2n scores equals the mean of the per-prompt baselines.
  double mean = 0.0;
  for (const auto& p : pairs) {
    if (!std::isfinite(p.r_w) || !std::isfinite(p.r_l)) {
      throw DomainError("icc1: scores must be finite");
    }
    mean += 0.5 * (p.r_w + p.r_l);
  }
  mean /= n;

  double between = 0.0;
  double total = 0.0;
  for (const auto& p : pairs) {
    const double b = 0.5 * (p.r_w + p.r_l) - mean;
    const double dw = p.r_w - mean;
    const double dl = p.r_l - mean;
    between += b * b;
    total += dw * dw + dl * dl;
  }
  const double var_between = between / n;
  const double var_total = total / (2.0 * n);
  if (!(var_total > 0.0)) throw UndefinedStatistic("icc1: total score variance is zero");
  return std::clamp(2.0 * var_between / var_total - 1.0, -1.0, 1.0);
}

AggregateStat aggregate(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("aggregate: need at least two values");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean, se, mean - kCiZ * se, mean + kCiZ * se, values.size()};
}

}  // namespace daa
