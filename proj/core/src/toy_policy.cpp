#include "daa/toy_policy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "daa/csv.hpp"
#include "daa/errors.hpp"

namespace daa {

namespace {

constexpr const char* kPolicyMagic = "daa-tabular-policy";
constexpr int kPolicyVersion = 1;

void check_lengths(const std::vector<int>& lengths) {
  if (lengths.empty()) throw ConfigError("TabularPolicy: response set must be non-empty");
  for (int len : lengths) {
    if (len < 1) throw ConfigError("TabularPolicy: every response length must be >= 1");
  }
}

double log_sum_exp(std::span<const double> row) {
  const double m = *std::max_element(row.begin(), row.end());
  double acc = 0.0;
  for (double v : row) acc += std::exp(v - m);
  return m + std::log(acc);
}

}  // namespace

TabularPolicy::TabularPolicy(std::size_t num_prompts, std::vector<int> response_lengths)
    : num_prompts_(num_prompts), lengths_(std::move(response_lengths)) {
  check_lengths(lengths_);
  if (num_prompts_ == 0) throw ConfigError("TabularPolicy: need at least one prompt");
  logits_.assign(num_prompts_ * lengths_.size(), 0.0);
}

TabularPolicy::TabularPolicy(std::size_t num_prompts, std::vector<int> response_lengths,
                             std::vector<double> logits)
    : num_prompts_(num_prompts), lengths_(std::move(response_lengths)), logits_(std::move(logits)) {
  check_lengths(lengths_);
  if (num_prompts_ == 0) throw ConfigError("TabularPolicy: need at least one prompt");
  if (logits_.size() != num_prompts_ * lengths_.size()) {
    throw ConfigError("TabularPolicy: logit table has the wrong size");
  }
  for (double v : logits_) {
    if (!std::isfinite(v)) throw DomainError("TabularPolicy: logits must be finite");
  }
}

void TabularPolicy::check_ids(std::size_t x, std::size_t y) const {
  if (x >= num_prompts_) throw LookupError("unknown prompt id " + std::to_string(x));
  if (y >= lengths_.size()) throw LookupError("unknown response id " + std::to_string(y));
}

double TabularPolicy::logit(std::size_t x, std::size_t y) const {
  check_ids(x, y);
  return logits_[x * lengths_.size() + y];
}

void TabularPolicy::set_logit(std::size_t x, std::size_t y, double value) {
  check_ids(x, y);
  if (!std::isfinite(value)) throw DomainError("TabularPolicy: logits must be finite");
  logits_[x * lengths_.size() + y] = value;
}

std::span<const double> TabularPolicy::row(std::size_t x) const {
  check_ids(x, 0);
  return {logits_.data() + x * lengths_.size(), lengths_.size()};
}

std::span<double> TabularPolicy::mutable_row(std::size_t x) {
  check_ids(x, 0);
  return {logits_.data() + x * lengths_.size(), lengths_.size()};
}

int TabularPolicy::response_length(std::size_t y) const {
  check_ids(0, y);
  return lengths_[y];
}

std::vector<double> TabularPolicy::log_probabilities(std::size_t x) const {
  const auto r = row(x);
  const double lse = log_sum_exp(r);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] - lse;
  return out;
}

std::vector<double> TabularPolicy::probabilities(std::size_t x) const {
  auto out = log_probabilities(x);
  for (double& v : out) v = std::exp(v);
  return out;
}

void TabularPolicy::write(std::ostream& os) const {
  os << kPolicyMagic << " v" << kPolicyVersion << '\n';
  os << "prompts " << num_prompts_ << " responses " << lengths_.size() << '\n';
  for (std::size_t x = 0; x < num_prompts_; ++x) {
    for (std::size_t y = 0; y < lengths_.size(); ++y) {
      os << x << ' ' << y << ' ' << format_double(logits_[x * lengths_.size() + y]) << ' '
         << lengths_[y] << '\n';
    }
  }
}

TabularPolicy TabularPolicy::read(std::istream& is) {
  std::string magic, version;
  if (!(is >> magic >> version) || magic != kPolicyMagic) {
    throw IoError("not a tabular policy file");
  }
  if (version != "v" + std::to_string(kPolicyVersion)) {
    throw IoError("unsupported tabular policy version " + version);
  }
  std::string kw1, kw2;
  std::size_t prompts = 0, responses = 0;
  if (!(is >> kw1 >> prompts >> kw2 >> responses) || kw1 != "prompts" || kw2 != "responses") {
    throw IoError("malformed tabular policy header");
  }
  std::vector<int> lengths(responses, 0);
  std::vector<double> logits(prompts * responses, 0.0);
  for (std::size_t i = 0; i < prompts * responses; ++i) {
    std::size_t x = 0, y = 0;
    std::string logit_text;
    int len = 0;
    if (!(is >> x >> y >> logit_text >> len) || x >= prompts || y >= responses) {
      throw IoError("malformed tabular policy row " + std::to_string(i));
    }
    logits[x * responses + y] = parse_double(logit_text);
    if (x == 0) {
      lengths[y] = len;
    } else if (lengths[y] != len) {
      throw IoError("inconsistent length for response " + std::to_string(y));
    }
  }
  return TabularPolicy(prompts, std::move(lengths), std::move(logits));
}

double log_prob(const TabularPolicy& policy, std::size_t x, std::size_t y, bool normalize) {
  const double lp = policy.logit(x, y) - log_sum_exp(policy.row(x));
  return normalize ? lp / policy.response_length(y) : lp;
}

double ref_ratio_score(const TabularPolicy& policy, const TabularPolicy& reference,
                       std::size_t x, std::size_t y, bool normalize) {
  return log_prob(policy, x, y, normalize) - log_prob(reference, x, y, normalize);
}

double odds_ratio_score(const TabularPolicy& policy, std::size_t x, std::size_t y,
                        bool normalize) {
  return odds_from_log_probability(log_prob(policy, x, y, normalize));
}

LogitGrad pair_loss(const ObjectiveSpec& objective, const TabularPolicy& policy,
                    const TabularPolicy& reference, std::size_t x, std::size_t y_w,
                    std::size_t y_l) {
  objective.validate();
  const bool normalize = objective.normalized();
  if (y_w == y_l) throw ConfigError("pair_loss: y_w and y_l must differ");

  const std::size_t n = policy.num_responses();
  const auto logp = policy.log_probabilities(x);
  policy.logit(x, y_w);  // id checks
  policy.logit(x, y_l);

  const double len_w = normalize ? policy.response_length(y_w) : 1.0;
  const double len_l = normalize ? policy.response_length(y_l) : 1.0;
  const double ell_w = logp[y_w] / len_w;
  const double ell_l = logp[y_l] / len_l;

  // dL/d ell_w and dL/d ell_l, then d ell_y / d z_j = (1[j == y] - p_j) / len_y.
  double value = 0.0;
  double g_w = 0.0;
  double g_l = 0.0;

  switch (objective.score()) {
    case ScoreClass::RefRatio: {
      if (reference.num_prompts() != policy.num_prompts() ||
          reference.num_responses() != n) {
        throw ConfigError("pair_loss: reference policy has a different shape");
      }
      const ScorePair s{ell_w - log_prob(reference, x, y_w, normalize),
                        ell_l - log_prob(reference, x, y_l, normalize)};
      const LossGrad lg = scalar_loss(objective, s);
      value = lg.value;
      g_w = lg.d_r_w;
      g_l = lg.d_r_l;
      break;
    }
    case ScoreClass::RawLogProb: {
      if (objective.kind == ObjectiveKind::SFT) {
        const LossGrad lg = sft_loss(ell_w);
        value = lg.value;
        g_w = lg.d_r_w;
      } else {
        const LossGrad lg = simpo_loss(ell_w, ell_l, objective.beta, objective.gamma);
        value = lg.value;
        g_w = lg.d_r_w;
        g_l = lg.d_r_l;
      }
      break;
    }
    case ScoreClass::OddsRatio: {
      if (is_single_stage(objective.kind)) {
        const double pi_w = std::exp(ell_w);
        const double pi_l = std::exp(ell_l);
        const LossGrad lg = single_stage_loss(objective.kind, pi_w, pi_l, objective.lambda);
        value = lg.value;
        g_w = lg.d_r_w * pi_w;
        g_l = lg.d_r_l * pi_l;
      } else {
        const ScorePair s{odds_from_log_probability(ell_w), odds_from_log_probability(ell_l)};
        const LossGrad lg = tempered_align_grad(objective.kind, s, objective.beta);
        value = lg.value;
        // d r_odds / d ell = 1 / (1 - q)
        g_w = lg.d_r_w / -std::expm1(ell_w);
        g_l = lg.d_r_l / -std::expm1(ell_l);
      }
      break;
    }
  }

  LogitGrad out{value, std::vector<double>(n, 0.0)};
  const double cw = g_w / len_w;
  const double cl = g_l / len_l;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = std::exp(logp[j]);
    out.d_logits[j] = -(cw + cl) * p;
  }
  out.d_logits[y_w] += cw;
  out.d_logits[y_l] += cl;
  return out;
}

void apply_gradient(TabularPolicy& policy, std::size_t x, const LogitGrad& grad, double lr) {
  auto r = policy.mutable_row(x);
  if (grad.d_logits.size() != r.size()) throw ConfigError("apply_gradient: size mismatch");
  for (std::size_t j = 0; j < r.size(); ++j) r[j] -= lr * grad.d_logits[j];
}

}  // namespace daa
