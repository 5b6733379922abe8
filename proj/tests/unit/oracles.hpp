#pragma once

// Reference implementations used only by tests. Everything here is written
// directly from the loss definitions in long double, without sharing code
// with the library.

#include <cmath>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using ld = long double;

inline ld log_sigmoid(ld z) { return -std::log1p(std::exp(-z)); }
inline ld sigmoid(ld z) { return 1.0L / (1.0L + std::exp(-z)); }

inline ld dpo(ld rw, ld rl, ld beta) { return -log_sigmoid(beta * (rw - rl)); }
inline ld ipo(ld rw, ld rl, ld beta) {
  const ld d = rw - rl - 1.0L / (2.0L * beta);
  return d * d;
}
inline ld simpo(ld lw, ld ll, ld beta, ld gamma) { return -log_sigmoid(beta * lw - beta * ll - gamma); }
inline ld asft_align(ld rw, ld rl, ld beta) {
  return -log_sigmoid(beta * rw) - log_sigmoid(-beta * rl);
}
inline ld orpo_align(ld rw, ld rl, ld beta) { return -log_sigmoid(beta * (rw - rl)); }
inline ld nca(ld rw, ld rl, ld beta) {
  return -log_sigmoid(beta * rw) - 0.5L * log_sigmoid(-beta * rw) - 0.5L * log_sigmoid(-beta * rl);
}
inline ld cal_dpo(ld rw, ld rl, ld beta) {
  const ld a = rw - 1.0L / (2.0L * beta);
  const ld b = rl + 1.0L / (2.0L * beta);
  return -log_sigmoid(rw - rl) + a * a + b * b;
}
inline ld apo_zero(ld rw, ld rl, ld beta) { return -sigmoid(beta * rw) + sigmoid(beta * rl); }

inline ld odds(ld pi) { return std::log(pi) - std::log1p(-pi); }

inline ld asft_single(ld pw, ld pl, ld lambda) {
  return -std::log(pw) + lambda * asft_align(odds(pw), odds(pl), 1.0L);
}
inline ld orpo_single(ld pw, ld pl, ld lambda) {
  return -std::log(pw) + lambda * orpo_align(odds(pw), odds(pl), 1.0L);
}

inline std::vector<ld> log_softmax(const std::vector<double>& logits) {
  ld m = logits.front();
  for (double v : logits) m = std::max<ld>(m, v);
  ld s = 0.0L;
  for (double v : logits) s += std::exp(static_cast<ld>(v) - m);
  std::vector<ld> out;
  for (double v : logits) out.push_back(static_cast<ld>(v) - m - std::log(s));
  return out;
}

// Central difference with the step used throughout the acceptance suite.
inline double central_difference(const std::function<double(double)>& f, double at,
                                 double step = 1e-6) {
  return (f(at + step) - f(at - step)) / (2.0 * step);
}

inline double rel_err(double a, double b, double floor = 1e-3) {
  return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), floor});
}

// Variance components for two scores per prompt: total variance about the
// grand mean = E_x[within-prompt variance] + Var_x[prompt mean], then
// ICC1 = 2 * between / total - 1.
struct Group {
  double a, b;
};
inline ld icc1_components(const std::vector<Group>& groups) {
  const ld n = static_cast<ld>(groups.size());
  ld grand = 0.0L;
  for (const auto& g : groups) grand += (static_cast<ld>(g.a) + g.b) / 2.0L;
  grand /= n;
  ld within = 0.0L, between = 0.0L;
  for (const auto& g : groups) {
    const ld m = (static_cast<ld>(g.a) + g.b) / 2.0L;
    within += ((g.a - m) * (g.a - m) + (g.b - m) * (g.b - m)) / 2.0L;
    between += (m - grand) * (m - grand);
  }
  within /= n;
  between /= n;
  return 2.0L * between / (within + between) - 1.0L;
}

}  // namespace oracle
