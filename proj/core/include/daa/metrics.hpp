#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace daa {

struct ScoredPair {
  double x = 0.0;  // prompt key
  double r_w = 0.0;
  double r_l = 0.0;
};

// Fraction of pairs with r_w > r_l. Ties count as failures.
// Throws DomainError on an empty list.
double accuracy(std::span<const ScoredPair> pairs);

// One-way random-effects ICC for k = 2 candidates per prompt:
//
//   ICC1 = 2 * Var_x[b(x)] / Var_{x,y}[r] - 1,   b(x) = (r_w + r_l) / 2
//
// Both variances are population (divide-by-N) variances. Only under that
// shared convention does Var_total = Var_x[b] + E_x[within] hold, which is
// what bounds the result to [-1, 1].
//
// Throws DomainError for fewer than two prompts and UndefinedStatistic when
// the total variance is zero.
double icc1(std::span<const ScoredPair> pairs);

struct AggregateStat {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(n)
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_runs = 0;
};

inline constexpr double kCiZ = 1.96;

// Mean with a +-1.96 SE interval. Needs at least two values.
AggregateStat aggregate(std::span<const double> values);

}  // namespace daa
