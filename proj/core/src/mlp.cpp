#include "daa/mlp.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "daa/csv.hpp"
#include "daa/errors.hpp"

namespace daa {

namespace {

constexpr const char* kScorerMagic = "daa-scorer";
constexpr int kScorerVersion = 1;

using Scratch = std::array<double, kMaxHidden>;

void require_finite_input(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("scorer input must be finite");
}

// Forward pass keeping pre-activations in `z`.
double forward_into(const ScorerParams& p, double x, double y, Scratch& z) {
  double r = p.b2;
  for (std::size_t j = 0; j < p.hidden; ++j) {
    z[j] = p.w1[2 * j] * x + p.w1[2 * j + 1] * y + p.b1[j];
    if (z[j] > 0.0) r += p.w2[j] * z[j];
  }
  return r;
}

// grad += d_r * d r(x, y) / d params, given the pre-activations from forward_into.
void backprop_into(const ScorerParams& p, double x, double y, const Scratch& z, double d_r,
                   ScorerGrad& grad) {
  grad.b2 += d_r;
  for (std::size_t j = 0; j < p.hidden; ++j) {
    if (z[j] > 0.0) {
      grad.w2[j] += d_r * z[j];
      const double dz = d_r * p.w2[j];
      grad.w1[2 * j] += dz * x;
      grad.w1[2 * j + 1] += dz * y;
      grad.b1[j] += dz;
    }
  }
}

double accumulate_pair(const ScorerParams& p, const PreferencePair& pair,
                       const ObjectiveSpec& objective, ScorerGrad& grad, Scratch& zw,
                       Scratch& zl) {
  const double r_w = forward_into(p, pair.x, pair.y_w, zw);
  const double r_l = forward_into(p, pair.x, pair.y_l, zl);
  const LossGrad lg = scalar_loss(objective, {r_w, r_l});
  backprop_into(p, pair.x, pair.y_w, zw, lg.d_r_w, grad);
  backprop_into(p, pair.x, pair.y_l, zl, lg.d_r_l, grad);
  return lg.value;
}

bool pair_finite(const PreferencePair& p) {
  return std::isfinite(p.x) && std::isfinite(p.y_w) && std::isfinite(p.y_l);
}

std::vector<double> read_row(std::istream& is, const char* label, std::size_t n) {
  std::string tag;
  if (!(is >> tag) || tag != label) throw IoError(std::string("scorer dump: expected ") + label);
  std::vector<double> out(n);
  for (auto& v : out) {
    std::string text;
    if (!(is >> text)) throw IoError(std::string("scorer dump: short row ") + label);
    v = parse_double(text);
  }
  return out;
}

}  // namespace

ScorerParams ScorerParams::zeros(std::size_t hidden) {
  ScorerParams p;
  p.hidden = hidden;
  p.w1.assign(2 * hidden, 0.0);
  p.b1.assign(hidden, 0.0);
  p.w2.assign(hidden, 0.0);
  p.b2 = 0.0;
  return p;
}

double& ScorerParams::at(std::size_t i) {
  if (i < 2 * hidden) return w1[i];
  i -= 2 * hidden;
  if (i < hidden) return b1[i];
  i -= hidden;
  if (i < hidden) return w2[i];
  if (i == hidden) return b2;
  throw LookupError("ScorerParams::at: index out of range");
}

double ScorerParams::at(std::size_t i) const { return const_cast<ScorerParams&>(*this).at(i); }

bool ScorerParams::all_finite() const noexcept {
  auto ok = [](const std::vector<double>& v) {
    for (double d : v) {
      if (!std::isfinite(d)) return false;
    }
    return true;
  };
  return ok(w1) && ok(b1) && ok(w2) && std::isfinite(b2);
}

void ScorerParams::validate() const {
  if (hidden == 0 || hidden > kMaxHidden) {
    throw ConfigError("scorer hidden size must lie in [1, " + std::to_string(kMaxHidden) + "]");
  }
  if (w1.size() != 2 * hidden || b1.size() != hidden || w2.size() != hidden) {
    throw ConfigError("scorer parameter shapes do not match hidden size");
  }
  if (!all_finite()) throw DomainError("scorer parameters must be finite");
}

void ScorerParams::add_scaled(const ScorerParams& other, double scale) {
  for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += scale * other.w1[i];
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += scale * other.b1[i];
  for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += scale * other.w2[i];
  b2 += scale * other.b2;
}

void ScorerParams::write(std::ostream& os) const {
  os << kScorerMagic << " v" << kScorerVersion << '\n';
  os << "hidden " << hidden << '\n';
  auto row = [&os](const char* label, const std::vector<double>& v) {
    os << label;
    for (double d : v) os << ' ' << format_double(d);
    os << '\n';
  };
  row("w1", w1);
  row("b1", b1);
  row("w2", w2);
  os << "b2 " << format_double(b2) << '\n';
}

ScorerParams ScorerParams::read(std::istream& is) {
  std::string magic, version, tag;
  if (!(is >> magic >> version) || magic != kScorerMagic) throw IoError("not a scorer dump");
  if (version != "v" + std::to_string(kScorerVersion)) {
    throw IoError("unsupported scorer dump version " + version);
  }
  std::size_t hidden = 0;
  if (!(is >> tag >> hidden) || tag != "hidden") throw IoError("scorer dump: missing hidden");
  ScorerParams p;
  p.hidden = hidden;
  p.w1 = read_row(is, "w1", 2 * hidden);
  p.b1 = read_row(is, "b1", hidden);
  p.w2 = read_row(is, "w2", hidden);
  p.b2 = read_row(is, "b2", 1).front();
  p.validate();
  return p;
}

ScorerParams init_scorer(std::size_t hidden, std::uint64_t seed) {
  if (hidden == 0 || hidden > kMaxHidden) {
    throw ConfigError("init_scorer: hidden must lie in [1, " + std::to_string(kMaxHidden) + "]");
  }
  ScorerParams p = ScorerParams::zeros(hidden);
  CounterRng rng(seed);
  const double a1 = std::sqrt(6.0 / (2.0 + static_cast<double>(hidden)));
  const double a2 = std::sqrt(6.0 / (static_cast<double>(hidden) + 1.0));
  for (double& w : p.w1) w = rng.uniform(-a1, a1);
  for (double& w : p.w2) w = rng.uniform(-a2, a2);
  return p;
}

double forward(const ScorerParams& params, double x, double y) {
  params.validate();
  require_finite_input(x, y);
  Scratch z{};
  return forward_into(params, x, y, z);
}

ScorerGrad chain_branch(const ScorerParams& params, double x, double y, double d_r) {
  params.validate();
  require_finite_input(x, y);
  Scratch z{};
  forward_into(params, x, y, z);
  ScorerGrad g = ScorerParams::zeros(params.hidden);
  backprop_into(params, x, y, z, d_r, g);
  return g;
}

PairGradient backward(const ScorerParams& params, const PreferencePair& pair,
                      const ObjectiveSpec& objective) {
  params.validate();
  objective.validate();
  if (!pair_finite(pair)) throw DomainError("backward: pair must be finite");
  PairGradient out{0.0, ScorerParams::zeros(params.hidden)};
  Scratch zw{}, zl{};
  out.loss = accumulate_pair(params, pair, objective, out.grad, zw, zl);
  return out;
}

void TrainConfig::validate() const {
  objective.validate();
  if (!supports_scalar_binding(objective.kind)) {
    throw ConfigError(std::string(to_string(objective.kind)) + " cannot train a scalar scorer");
  }
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be a finite value >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
}

PairGradient batch_gradient(const ScorerParams& params, const std::vector<PreferencePair>& pairs,
                            const ObjectiveSpec& objective) {
  params.validate();
  if (pairs.empty()) throw ConfigError("batch_gradient: no pairs");
  PairGradient out{0.0, ScorerParams::zeros(params.hidden)};
  Scratch zw{}, zl{};
  for (const auto& pair : pairs) {
    out.loss += accumulate_pair(params, pair, objective, out.grad, zw, zl);
  }
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  out.loss *= inv_n;
  for (double& g : out.grad.w1) g *= inv_n;
  for (double& g : out.grad.b1) g *= inv_n;
  for (double& g : out.grad.w2) g *= inv_n;
  out.grad.b2 *= inv_n;
  return out;
}

std::vector<ScoredPair> score_pairs(const ScorerParams& params,
                                    const std::vector<PreferencePair>& pairs) {
  params.validate();
  std::vector<ScoredPair> out;
  out.reserve(pairs.size());
  Scratch z{};
  for (const auto& p : pairs) {
    out.push_back({p.x, forward_into(params, p.x, p.y_w, z), forward_into(params, p.x, p.y_l, z)});
  }
  return out;
}

TrainResult train(ScorerParams params, const ToyDataset& dataset, const TrainConfig& config) {
  config.validate();
  params.validate();
  if (dataset.train.empty()) throw ConfigError("train: dataset has no training pairs");
  for (const auto& p : dataset.train) {
    if (!pair_finite(p)) throw DomainError("train: non-finite training pair");
  }

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(config.epochs));
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    PairGradient step{0.0, ScorerParams::zeros(params.hidden)};
    try {
      step = batch_gradient(params, dataset.train, config.objective);
    } catch (const DomainError&) {
      step.loss = kNaN;  // non-finite scores reached the loss
    }
    if (!std::isfinite(step.loss) || !step.grad.all_finite()) {
      result.history.push_back({epoch, step.loss, kNaN});
      result.diverged = true;
      break;
    }
    params.add_scaled(step.grad, -config.lr);
    if (!params.all_finite()) {
      result.history.push_back({epoch, step.loss, kNaN});
      result.diverged = true;
      break;
    }
    const double acc =
        dataset.test.empty() ? kNaN : accuracy(score_pairs(params, dataset.test));
    result.history.push_back({epoch, step.loss, acc});
  }

  if (!result.diverged) {
    try {
      result.final_train_loss = batch_gradient(params, dataset.train, config.objective).loss;
    } catch (const DomainError&) {
      result.final_train_loss = kNaN;
    }
    if (!std::isfinite(result.final_train_loss)) result.diverged = true;
  } else {
    result.final_train_loss = kNaN;
  }
  result.params = std::move(params);
  return result;
}

}  // namespace daa
