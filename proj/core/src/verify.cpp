#include "daa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "daa/bias_lab.hpp"
#include "daa/metrics.hpp"
#include "daa/mlp.hpp"
#include "daa/objectives.hpp"
#include "daa/rng.hpp"
#include "daa/toy_policy.hpp"

namespace daa {

namespace {

constexpr double kFdStep = 1e-6;
constexpr double kFdTol = 1e-4;
constexpr double kIdentityTol = 1e-9;

double central_difference(const std::function<double(double)>& f, double at) {
  return (f(at + kFdStep) - f(at - kFdStep)) / (2.0 * kFdStep);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult odds_identities() {
  double worst = 0.0;
  constexpr int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double pi = 1e-6 + (1.0 - 2e-6) * i / (n - 1);
    const double r = odds_from_probability(pi);
    worst = std::max(worst, std::abs(log_sigmoid(r) - std::log(pi)));
    worst = std::max(worst, std::abs(log_sigmoid(-r) - std::log1p(-pi)));
  }
  return {"odds-score identities log sigma(+-r_odds)", worst <= kIdentityTol,
          "max abs err " + fmt(worst)};
}

CheckResult asft_decomposition(CounterRng& rng) {
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double pw = rng.uniform(1e-6, 1.0 - 1e-6);
    const double pl = rng.uniform(1e-6, 1.0 - 1e-6);
    const double v = asft_align_loss({odds_from_probability(pw), odds_from_probability(pl)}, 1.0).value;
    worst = std::max(worst, std::abs(v - (-std::log(pw) - std::log1p(-pl))));
  }
  return {"ASFT alignment = BCE(y_w) + BCE(y_l)", worst <= kIdentityTol,
          "max abs err " + fmt(worst)};
}

CheckResult orpo_asft_relation(CounterRng& rng) {
  double worst = 0.0;
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const double pw = rng.uniform(1e-6, 1.0 - 1e-6);
    const double pl = rng.uniform(1e-6, 1.0 - pw);
    const double lambda = rng.uniform(0.0, 2.0);
    const double orpo = single_stage_loss(ObjectiveKind::ORPOSingle, pw, pl, lambda).value;
    const double asft = single_stage_loss(ObjectiveKind::ASFTSingle, pw, pl, lambda).value;
    worst = std::max(worst, std::abs(orpo - (asft + lambda * orpo_asft_gap(pw, pl))));
    const ScorePair odds{odds_from_probability(pw), odds_from_probability(pl)};
    if (orpo > asft || vanilla_orpo_align_loss(odds).value > vanilla_asft_align_loss(odds).value) {
      ++violations;
    }
  }
  return {"ORPO = ASFT + lambda*gap, ORPO <= ASFT", worst <= kIdentityTol && violations == 0,
          "max abs err " + fmt(worst) + ", violations " + std::to_string(violations)};
}

CheckResult beta_one_recovery(CounterRng& rng) {
  int mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const ScorePair s{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
    const double asft = -log_sigmoid(s.r_w) - log_sigmoid(-s.r_l);
    const double orpo = -log_sigmoid(s.r_w - s.r_l);
    if (asft_align_loss(s, 1.0).value != asft) ++mismatches;
    if (orpo_align_loss(s, 1.0).value != orpo) ++mismatches;
  }
  return {"beta = 1 recovers vanilla ORPO/ASFT terms exactly", mismatches == 0,
          "mismatches " + std::to_string(mismatches)};
}

CheckResult scalar_gradients(CounterRng& rng) {
  double worst = 0.0;
  const ObjectiveKind kinds[] = {ObjectiveKind::DPO,       ObjectiveKind::IPO,
                                 ObjectiveKind::SimPO,     ObjectiveKind::ORPOAlign,
                                 ObjectiveKind::ASFTAlign, ObjectiveKind::NCA,
                                 ObjectiveKind::CalDPO,    ObjectiveKind::APOZero};
  for (ObjectiveKind k : kinds) {
    for (int i = 0; i < 100; ++i) {
      ObjectiveSpec spec{k, rng.uniform(0.2, 3.0), rng.uniform(0.0, 1.0)};
      const ScorePair s{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
      const LossGrad lg = scalar_loss(spec, s);
      const double fw = central_difference(
          [&](double v) { return scalar_loss(spec, {v, s.r_l}).value; }, s.r_w);
      const double fl = central_difference(
          [&](double v) { return scalar_loss(spec, {s.r_w, v}).value; }, s.r_l);
      worst = std::max({worst, relative_error(lg.d_r_w, fw), relative_error(lg.d_r_l, fl)});
    }
  }
  for (ObjectiveKind k : {ObjectiveKind::ORPOSingle, ObjectiveKind::ASFTSingle}) {
    for (int i = 0; i < 100; ++i) {
      const double pw = rng.uniform(0.05, 0.6);
      const double pl = rng.uniform(0.05, 0.35);
      const double lambda = rng.uniform(0.0, 2.0);
      const LossGrad lg = single_stage_loss(k, pw, pl, lambda);
      const double fw = central_difference(
          [&](double v) { return single_stage_loss(k, v, pl, lambda).value; }, pw);
      const double fl = central_difference(
          [&](double v) { return single_stage_loss(k, pw, v, lambda).value; }, pl);
      worst = std::max({worst, relative_error(lg.d_r_w, fw), relative_error(lg.d_r_l, fl)});
    }
  }
  return {"scalar loss partials vs central differences", worst <= kFdTol,
          "max rel err " + fmt(worst)};
}

CheckResult tabular_gradients(CounterRng& rng) {
  double worst = 0.0;
  for (ObjectiveKind k : all_objective_kinds()) {
    for (int i = 0; i < 100; ++i) {
      std::vector<double> logits(2 * 4);
      for (double& v : logits) v = rng.uniform(-1.5, 1.5);
      TabularPolicy ref(2, {1, 2, 3, 4}, logits);
      for (double& v : logits) v += rng.uniform(-0.5, 0.5);
      TabularPolicy pol(2, {1, 2, 3, 4}, logits);
      ObjectiveSpec spec{k, rng.uniform(0.2, 2.0), rng.uniform(0.0, 0.5), rng.uniform(0.0, 1.5)};
      const std::size_t x = rng.below(2);
      const std::size_t yw = rng.below(4);
      const std::size_t yl = (yw + 1 + rng.below(3)) % 4;
      const LogitGrad g = pair_loss(spec, pol, ref, x, yw, yl);
      for (std::size_t j = 0; j < 4; ++j) {
        const double base = pol.logit(x, j);
        const double fd = central_difference(
            [&](double v) {
              TabularPolicy p = pol;
              p.set_logit(x, j, v);
              return pair_loss(spec, p, ref, x, yw, yl).value;
            },
            base);
        worst = std::max(worst, relative_error(g.d_logits[j], fd));
      }
    }
  }
  return {"tabular pair_loss logit gradients vs central differences", worst <= kFdTol,
          "max rel err " + fmt(worst)};
}

CheckResult scorer_gradients(CounterRng& rng) {
  double worst = 0.0;
  const ObjectiveKind kinds[] = {ObjectiveKind::DPO,    ObjectiveKind::IPO,
                                 ObjectiveKind::ASFTAlign, ObjectiveKind::NCA,
                                 ObjectiveKind::CalDPO, ObjectiveKind::APOZero};
  for (ObjectiveKind k : kinds) {
    for (std::size_t h : {1u, 3u, 8u}) {
      for (int i = 0; i < 100; ++i) {
        ScorerParams p = init_scorer(h, rng.next_u64());
        for (double& b : p.b1) b = rng.uniform(-0.3, 0.3);
        p.b2 = rng.uniform(-0.3, 0.3);
        const PreferencePair pair{rng.uniform(), rng.uniform(-0.5, 1.4), rng.uniform(-0.5, 1.4), 0.0};
        const ObjectiveSpec spec{k};
        const PairGradient g = backward(p, pair, spec);
        for (std::size_t j = 0; j < p.num_parameters(); ++j) {
          const double fd = central_difference(
              [&](double v) {
                ScorerParams q = p;
                q.at(j) = v;
                return backward(q, pair, spec).loss;
              },
              p.at(j));
          worst = std::max(worst, relative_error(g.grad.at(j), fd));
        }
      }
    }
  }
  return {"scorer backprop vs central differences", worst <= kFdTol, "max rel err " + fmt(worst)};
}

CheckResult icc_boundaries() {
  std::vector<ScoredPair> between, within;
  for (int i = 0; i < 50; ++i) {
    const double b = 0.1 * i - 2.0;
    between.push_back({static_cast<double>(i), b, b});
    const double c = 0.05 * (i + 1);
    within.push_back({static_cast<double>(i), c, -c});
  }
  const double hi = icc1(between);
  const double lo = icc1(within);
  return {"ICC1 boundary cases +1 / -1", hi == 1.0 && lo == -1.0,
          "between-only " + fmt(hi) + ", within-only " + fmt(lo)};
}

}  // namespace

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<CheckResult> out;
  out.push_back(odds_identities());
  out.push_back(asft_decomposition(rng));
  out.push_back(orpo_asft_relation(rng));
  out.push_back(beta_one_recovery(rng));
  out.push_back(scalar_gradients(rng));
  out.push_back(tabular_gradients(rng));
  out.push_back(scorer_gradients(rng));
  out.push_back(icc_boundaries());
  return out;
}

}  // namespace daa
