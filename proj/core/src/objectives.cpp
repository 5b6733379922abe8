#include "daa/objectives.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

#include "daa/errors.hpp"

namespace daa {

namespace {

constexpr std::array kAllKinds = {
    ObjectiveKind::DPO,     ObjectiveKind::IPO,       ObjectiveKind::SimPO,
    ObjectiveKind::ORPOAlign, ObjectiveKind::ASFTAlign, ObjectiveKind::NCA,
    ObjectiveKind::CalDPO,  ObjectiveKind::APOZero,   ObjectiveKind::SFT,
    ObjectiveKind::ORPOSingle, ObjectiveKind::ASFTSingle,
};

void require_finite(ScorePair s, const char* what) {
  if (!std::isfinite(s.r_w) || !std::isfinite(s.r_l)) {
    throw DomainError(std::string(what) + ": scores must be finite");
  }
}

void require_beta(double beta, const char* what) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError(std::string(what) + ": beta must be a positive finite number");
  }
}

void require_probability(double pi, const char* what) {
  if (!(pi > kProbabilityFloor && pi < 1.0 - kProbabilityFloor)) {
    throw DomainError(std::string(what) + ": probability must lie strictly inside (0, 1)");
  }
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::DPO: return "DPO";
    case ObjectiveKind::IPO: return "IPO";
    case ObjectiveKind::SimPO: return "SimPO";
    case ObjectiveKind::ORPOAlign: return "ORPO-align";
    case ObjectiveKind::ASFTAlign: return "ASFT-align";
    case ObjectiveKind::NCA: return "NCA";
    case ObjectiveKind::CalDPO: return "CalDPO";
    case ObjectiveKind::APOZero: return "APOZero";
    case ObjectiveKind::SFT: return "SFT";
    case ObjectiveKind::ORPOSingle: return "ORPO-single";
    case ObjectiveKind::ASFTSingle: return "ASFT-single";
  }
  return "?";
}

std::string_view to_string(RankingClass rc) noexcept {
  switch (rc) {
    case RankingClass::Pairwise: return "pairwise";
    case RankingClass::Pointwise: return "pointwise";
    case RankingClass::NotApplicable: return "n/a";
  }
  return "?";
}

std::string_view to_string(ScoreClass sc) noexcept {
  switch (sc) {
    case ScoreClass::RefRatio: return "ref_ratio";
    case ScoreClass::OddsRatio: return "odds_ratio";
    case ScoreClass::RawLogProb: return "raw_logprob";
  }
  return "?";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  const std::string key = lowercase(name);
  for (ObjectiveKind k : kAllKinds) {
    if (lowercase(to_string(k)) == key) return k;
  }
  if (key == "orpo" || key == "orpo_align") return ObjectiveKind::ORPOAlign;
  if (key == "asft" || key == "asft_align") return ObjectiveKind::ASFTAlign;
  if (key == "cal-dpo" || key == "cal_dpo") return ObjectiveKind::CalDPO;
  if (key == "apo-zero" || key == "apo_zero" || key == "apo") return ObjectiveKind::APOZero;
  if (key == "orpo_single") return ObjectiveKind::ORPOSingle;
  if (key == "asft_single") return ObjectiveKind::ASFTSingle;
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

std::span<const ObjectiveKind> all_objective_kinds() noexcept { return kAllKinds; }

RankingClass ranking_class(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::DPO:
    case ObjectiveKind::IPO:
    case ObjectiveKind::SimPO:
    case ObjectiveKind::ORPOAlign:
      return RankingClass::Pairwise;
    case ObjectiveKind::ASFTAlign:
    case ObjectiveKind::NCA:
    case ObjectiveKind::CalDPO:
    case ObjectiveKind::APOZero:
      return RankingClass::Pointwise;
    case ObjectiveKind::SFT:
    case ObjectiveKind::ORPOSingle:
    case ObjectiveKind::ASFTSingle:
      return RankingClass::NotApplicable;
  }
  return RankingClass::NotApplicable;
}

ScoreClass score_class(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::DPO:
    case ObjectiveKind::IPO:
    case ObjectiveKind::NCA:
    case ObjectiveKind::CalDPO:
    case ObjectiveKind::APOZero:
      return ScoreClass::RefRatio;
    case ObjectiveKind::ORPOAlign:
    case ObjectiveKind::ASFTAlign:
    case ObjectiveKind::ORPOSingle:
    case ObjectiveKind::ASFTSingle:
      return ScoreClass::OddsRatio;
    case ObjectiveKind::SimPO:
    case ObjectiveKind::SFT:
      return ScoreClass::RawLogProb;
  }
  return ScoreClass::RawLogProb;
}

bool uses_length_normalization(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::SimPO:
    case ObjectiveKind::ORPOAlign:
    case ObjectiveKind::ASFTAlign:
    case ObjectiveKind::ORPOSingle:
    case ObjectiveKind::ASFTSingle:
      return true;
    default:
      return false;
  }
}

bool is_single_stage(ObjectiveKind kind) noexcept {
  return kind == ObjectiveKind::ORPOSingle || kind == ObjectiveKind::ASFTSingle;
}

bool ObjectiveSpec::normalized() const {
  validate();
  return normalize.value_or(uses_length_normalization(kind));
}

void ObjectiveSpec::validate() const {
  if (kind != ObjectiveKind::SFT && (!(beta > 0.0) || !std::isfinite(beta))) {
    throw ConfigError(std::string(to_string(kind)) + ": beta must be > 0");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be a finite value >= 0");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("lambda must be a finite value >= 0");
  }
  if (normalize && kind != ObjectiveKind::SFT && *normalize != uses_length_normalization(kind)) {
    throw ConfigError(std::string(to_string(kind)) +
                      (uses_length_normalization(kind)
                           ? " requires length-normalized log-probabilities"
                           : " uses unnormalized log-probabilities"));
  }
}

std::string ObjectiveSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind) << "(beta=" << beta;
  if (kind == ObjectiveKind::SimPO) os << ", gamma=" << gamma;
  if (is_single_stage(kind)) os << ", lambda=" << lambda;
  os << ")";
  return os.str();
}

double log_sigmoid(double z) noexcept {
  // log sigma(z) = -log1p(exp(-z)) for z >= 0, z - log1p(exp(z)) otherwise.
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double odds_from_probability(double pi) {
  require_probability(pi, "odds_from_probability");
  return std::log(pi) - std::log1p(-pi);
}

double odds_from_log_probability(double log_pi) {
  if (!std::isfinite(log_pi)) throw DomainError("odds_from_log_probability: non-finite input");
  const double pi = std::exp(log_pi);
  require_probability(pi, "odds_from_log_probability");
  // 1 - pi = -expm1(log_pi), accurate for pi near 1.
  return log_pi - std::log(-std::expm1(log_pi));
}

LossGrad dpo_loss(ScorePair s, double beta) {
  require_finite(s, "dpo_loss");
  require_beta(beta, "dpo_loss");
  const double z = beta * (s.r_w - s.r_l);
  const double coeff = beta * sigmoid(-z);
  return {-log_sigmoid(z), -coeff, coeff};
}

LossGrad ipo_loss(ScorePair s, double beta) {
  require_finite(s, "ipo_loss");
  require_beta(beta, "ipo_loss");
  const double d = s.r_w - s.r_l - 1.0 / (2.0 * beta);
  return {d * d, 2.0 * d, -2.0 * d};
}

LossGrad simpo_loss(double logp_w, double logp_l, double beta, double gamma) {
  require_finite({logp_w, logp_l}, "simpo_loss");
  require_beta(beta, "simpo_loss");
  if (logp_w > 0.0 || logp_l > 0.0) {
    throw DomainError("simpo_loss: log-probabilities must be <= 0");
  }
  if (!std::isfinite(gamma)) throw DomainError("simpo_loss: gamma must be finite");
  const double z = beta * logp_w - beta * logp_l - gamma;
  const double coeff = beta * sigmoid(-z);
  return {-log_sigmoid(z), -coeff, coeff};
}

LossGrad asft_align_loss(ScorePair s, double beta) {
  return tempered_align_grad(ObjectiveKind::ASFTAlign, s, beta);
}

LossGrad orpo_align_loss(ScorePair s, double beta) {
  return tempered_align_grad(ObjectiveKind::ORPOAlign, s, beta);
}

LossGrad vanilla_asft_align_loss(ScorePair s) { return asft_align_loss(s, 1.0); }

LossGrad vanilla_orpo_align_loss(ScorePair s) { return orpo_align_loss(s, 1.0); }

LossGrad tempered_align_grad(ObjectiveKind kind, ScorePair s, double beta) {
  require_finite(s, "tempered_align_grad");
  require_beta(beta, "tempered_align_grad");
  if (kind == ObjectiveKind::ASFTAlign) {
    const double zw = beta * s.r_w;
    const double zl = beta * s.r_l;
    return {-log_sigmoid(zw) - log_sigmoid(-zl), -beta * sigmoid(-zw), beta * sigmoid(zl)};
  }
  if (kind == ObjectiveKind::ORPOAlign) {
    const double z = beta * s.r_w - beta * s.r_l;
    const double coeff = beta * sigmoid(-z);
    return {-log_sigmoid(z), -coeff, coeff};
  }
  throw ConfigError("tempered_align_grad: kind must be ORPO-align or ASFT-align");
}

LossGrad nca_loss(ScorePair s, double beta) {
  require_finite(s, "nca_loss");
  require_beta(beta, "nca_loss");
  const double zw = beta * s.r_w;
  const double zl = beta * s.r_l;
  const double value = -log_sigmoid(zw) - 0.5 * log_sigmoid(-zw) - 0.5 * log_sigmoid(-zl);
  const double d_w = -beta * sigmoid(-zw) + 0.5 * beta * sigmoid(zw);
  const double d_l = 0.5 * beta * sigmoid(zl);
  return {value, d_w, d_l};
}

LossGrad cal_dpo_loss(ScorePair s, double beta) {
  require_finite(s, "cal_dpo_loss");
  require_beta(beta, "cal_dpo_loss");
  const double anchor = 1.0 / (2.0 * beta);
  const double delta = s.r_w - s.r_l;
  const double ew = s.r_w - anchor;
  const double el = s.r_l + anchor;
  const double pull = sigmoid(-delta);
  return {-log_sigmoid(delta) + ew * ew + el * el, -pull + 2.0 * ew, pull + 2.0 * el};
}

LossGrad apo_zero_loss(ScorePair s, double beta) {
  require_finite(s, "apo_zero_loss");
  require_beta(beta, "apo_zero_loss");
  const double sw = sigmoid(beta * s.r_w);
  const double sl = sigmoid(beta * s.r_l);
  // sigma' = sigma(z) sigma(-z); written this way to stay accurate in both tails.
  const double dw = sw * sigmoid(-beta * s.r_w);
  const double dl = sl * sigmoid(-beta * s.r_l);
  return {-sw + sl, -beta * dw, beta * dl};
}

LossGrad sft_loss(double logp_w) {
  if (!std::isfinite(logp_w)) throw DomainError("sft_loss: log-probability must be finite");
  if (logp_w > 0.0) throw DomainError("sft_loss: log-probability must be <= 0");
  return {-logp_w, -1.0, 0.0};
}

double orpo_asft_gap(double pi_w, double pi_l) {
  require_probability(pi_w, "orpo_asft_gap");
  require_probability(pi_l, "orpo_asft_gap");
  return std::log(pi_w * (1.0 - pi_l) + pi_l * (1.0 - pi_w));
}

LossGrad single_stage_loss(ObjectiveKind kind, double pi_w, double pi_l, double lambda) {
  require_probability(pi_w, "single_stage_loss");
  require_probability(pi_l, "single_stage_loss");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError("single_stage_loss: lambda must be a finite value >= 0");
  }
  if (!is_single_stage(kind)) {
    throw ConfigError("single_stage_loss: kind must be ORPO-single or ASFT-single");
  }
  const ScorePair odds{odds_from_probability(pi_w), odds_from_probability(pi_l)};
  const LossGrad align = kind == ObjectiveKind::ASFTSingle ? vanilla_asft_align_loss(odds)
                                                           : vanilla_orpo_align_loss(odds);
  // d r_odds / d pi = 1 / (pi (1 - pi))
  const double dodds_w = 1.0 / (pi_w * (1.0 - pi_w));
  const double dodds_l = 1.0 / (pi_l * (1.0 - pi_l));
  return {-std::log(pi_w) + lambda * align.value,
          -1.0 / pi_w + lambda * align.d_r_w * dodds_w,
          lambda * align.d_r_l * dodds_l};
}

bool supports_scalar_binding(ObjectiveKind kind) noexcept {
  return kind != ObjectiveKind::SFT && !is_single_stage(kind);
}

LossGrad scalar_loss(const ObjectiveSpec& spec, ScorePair s) {
  switch (spec.kind) {
    case ObjectiveKind::DPO: return dpo_loss(s, spec.beta);
    case ObjectiveKind::IPO: return ipo_loss(s, spec.beta);
    case ObjectiveKind::SimPO: {
      require_finite(s, "simpo scalar loss");
      require_beta(spec.beta, "simpo scalar loss");
      const double z = spec.beta * s.r_w - spec.beta * s.r_l - spec.gamma;
      const double coeff = spec.beta * sigmoid(-z);
      return {-log_sigmoid(z), -coeff, coeff};
    }
    case ObjectiveKind::ORPOAlign: return orpo_align_loss(s, spec.beta);
    case ObjectiveKind::ASFTAlign: return asft_align_loss(s, spec.beta);
    case ObjectiveKind::NCA: return nca_loss(s, spec.beta);
    case ObjectiveKind::CalDPO: return cal_dpo_loss(s, spec.beta);
    case ObjectiveKind::APOZero: return apo_zero_loss(s, spec.beta);
    case ObjectiveKind::SFT:
    case ObjectiveKind::ORPOSingle:
    case ObjectiveKind::ASFTSingle:
      break;
  }
  throw ConfigError(std::string(to_string(spec.kind)) + " has no scalar-score binding");
}

}  // namespace daa
