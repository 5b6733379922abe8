#pragma once

// Direct alignment objectives over scalar scores.
//
// Every loss returns a LossGrad: the value together with the exact partial
// derivatives with respect to the two scores it consumes. Pairwise losses
// depend on the scores only through r_w - r_l; pointwise losses anchor each
// score on its own.

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace daa {

enum class ObjectiveKind {
  DPO,
  IPO,
  SimPO,
  ORPOAlign,
  ASFTAlign,
  NCA,
  CalDPO,
  APOZero,
  SFT,
  ORPOSingle,
  ASFTSingle,
};

enum class RankingClass { Pairwise, Pointwise, NotApplicable };
enum class ScoreClass { RefRatio, OddsRatio, RawLogProb };

std::string_view to_string(ObjectiveKind kind) noexcept;
std::string_view to_string(RankingClass rc) noexcept;
std::string_view to_string(ScoreClass sc) noexcept;

// Accepts the canonical names returned by to_string plus a few aliases
// ("orpo", "asft", "cal-dpo", "apo-zero", ...). Case-insensitive.
ObjectiveKind parse_objective_kind(std::string_view name);

std::span<const ObjectiveKind> all_objective_kinds() noexcept;

RankingClass ranking_class(ObjectiveKind kind) noexcept;
ScoreClass score_class(ObjectiveKind kind) noexcept;

// Whether the method divides log-probabilities by response length:
// SimPO, ORPO and ASFT do; DPO, IPO, NCA, Cal-DPO and APO-Zero do not.
// Plain SFT is unnormalized.
bool uses_length_normalization(ObjectiveKind kind) noexcept;

bool is_single_stage(ObjectiveKind kind) noexcept;

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::DPO;
  double beta = 1.0;
  // SimPO target margin. Defaults to 0; set explicitly when needed.
  double gamma = 0.0;
  // SFT/alignment mixing weight for the single-stage kinds.
  double lambda = 0.0;
  // Length-normalization override. When set it must agree with
  // uses_length_normalization(kind); SFT accepts either value.
  std::optional<bool> normalize;

  RankingClass ranking() const noexcept { return ranking_class(kind); }
  ScoreClass score() const noexcept { return score_class(kind); }
  bool normalized() const;

  // Throws ConfigError on beta <= 0 (except SFT), negative gamma/lambda, or
  // a normalization flag that contradicts the method table.
  void validate() const;

  std::string describe() const;
};

struct ScorePair {
  double r_w = 0.0;
  double r_l = 0.0;
};

struct LossGrad {
  double value = 0.0;
  double d_r_w = 0.0;
  double d_r_l = 0.0;
};

// Numerically stable log(sigmoid(z)) and sigmoid(z) for any finite z.
double log_sigmoid(double z) noexcept;
double sigmoid(double z) noexcept;

// log(pi / (1 - pi)). Throws DomainError unless 1e-12 < pi < 1 - 1e-12.
double odds_from_probability(double pi);
// Same map from a log-probability; avoids forming pi when it is tiny.
double odds_from_log_probability(double log_pi);

inline constexpr double kProbabilityFloor = 1e-12;

// -log sigma(beta (r_w - r_l))
LossGrad dpo_loss(ScorePair s, double beta);
// (r_w - r_l - 1/(2 beta))^2
LossGrad ipo_loss(ScorePair s, double beta);
// -log sigma(beta logp_w - beta logp_l - gamma); inputs are length-normalized
// log-probabilities and must be <= 0.
LossGrad simpo_loss(double logp_w, double logp_l, double beta, double gamma);
// -log sigma(beta r_w) - log sigma(-beta r_l) over odds scores.
LossGrad asft_align_loss(ScorePair s, double beta);
// -log sigma(beta r_w - beta r_l) over odds scores.
LossGrad orpo_align_loss(ScorePair s, double beta);
// -log sigma(beta r_w) - 0.5 log sigma(-beta r_w) - 0.5 log sigma(-beta r_l)
LossGrad nca_loss(ScorePair s, double beta);
// -log sigma(r_w - r_l) + (r_w - 1/(2 beta))^2 + (r_l + 1/(2 beta))^2
LossGrad cal_dpo_loss(ScorePair s, double beta);
// -sigma(beta r_w) + sigma(beta r_l), in [-1, 1]
LossGrad apo_zero_loss(ScorePair s, double beta);
// -logp_w; d_r_w is the partial with respect to logp_w, d_r_l is 0.
LossGrad sft_loss(double logp_w);

// The untempered odds-ratio alignment terms used inside the single-stage
// losses. Identical code path to the tempered forms at beta = 1.
LossGrad vanilla_asft_align_loss(ScorePair s);
LossGrad vanilla_orpo_align_loss(ScorePair s);

// log(pi_w (1 - pi_l) + pi_l (1 - pi_w)); non-positive when pi_w + pi_l <= 1.
double orpo_asft_gap(double pi_w, double pi_l);

// SFT(-log pi_w) + lambda * vanilla alignment term, for kind ORPOSingle or
// ASFTSingle. The partials are with respect to pi_w and pi_l.
// pi_w, pi_l must lie in (1e-12, 1 - 1e-12).
LossGrad single_stage_loss(ObjectiveKind kind, double pi_w, double pi_l, double lambda);

// Gradient coefficients of the tempered odds-ratio alignment losses with
// respect to r_odds(y_w) and r_odds(y_l):
//   ASFTAlign: -beta (1 - sigma(beta r_w))       and  +beta sigma(beta r_l)
//   ORPOAlign: -beta (1 - sigma(beta (r_w - r_l))) and the negation
// `value` carries the loss itself.
LossGrad tempered_align_grad(ObjectiveKind kind, ScorePair s, double beta);

// Scalar-score binding used by the toy scorer: every scored objective is
// evaluated directly on raw model outputs r(x, y). SimPO skips its log-prob
// sign precondition here; SFT and the single-stage kinds are rejected.
LossGrad scalar_loss(const ObjectiveSpec& spec, ScorePair s);

bool supports_scalar_binding(ObjectiveKind kind) noexcept;

}  // namespace daa
