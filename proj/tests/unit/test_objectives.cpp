#include <doctest.h>

#include <cmath>
#include <limits>

#include "daa/errors.hpp"
#include "daa/objectives.hpp"
#include "daa/rng.hpp"
#include "oracles.hpp"

using namespace daa;

namespace {

const double kLn2 = std::log(2.0);

double fd_w(const ObjectiveSpec& spec, ScorePair s) {
  return oracle::central_difference([&](double v) { return scalar_loss(spec, {v, s.r_l}).value; },
                                    s.r_w);
}
double fd_l(const ObjectiveSpec& spec, ScorePair s) {
  return oracle::central_difference([&](double v) { return scalar_loss(spec, {s.r_w, v}).value; },
                                    s.r_l);
}

const ObjectiveKind kScalarKinds[] = {ObjectiveKind::DPO,       ObjectiveKind::IPO,
                                      ObjectiveKind::ORPOAlign, ObjectiveKind::ASFTAlign,
                                      ObjectiveKind::NCA,       ObjectiveKind::CalDPO,
                                      ObjectiveKind::APOZero};

}  // namespace

TEST_CASE("log_sigmoid is stable at extreme arguments") {
  CHECK(log_sigmoid(0.0) == doctest::Approx(-kLn2).epsilon(1e-15));
  CHECK(log_sigmoid(-1000.0) == doctest::Approx(-1000.0));
  CHECK(log_sigmoid(1000.0) == 0.0);
  CHECK(std::isfinite(log_sigmoid(-1e300)));
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("DPO values") {
  CHECK(dpo_loss({0.4, 0.4}, 1.0).value == doctest::Approx(kLn2));
  CHECK(dpo_loss({5.0, -5.0}, 100.0).value < 1e-300);
  const double expected = static_cast<double>(oracle::dpo(0.7L, 0.2L, 2.0L));
  CHECK(std::fabs(dpo_loss({0.7, 0.2}, 2.0).value - expected) <= 1e-15);
}

TEST_CASE("IPO values") {
  CHECK(ipo_loss({1.0, 0.0}, 0.5).value == 0.0);
  CHECK(ipo_loss({0.0, 0.0}, 0.5).value == doctest::Approx(1.0));
  CHECK(ipo_loss({0.3, 0.0}, 1.0).value ==
        doctest::Approx(static_cast<double>(oracle::ipo(0.3L, 0.0L, 1.0L))).epsilon(1e-14));
}

TEST_CASE("SimPO values and domain") {
  CHECK(simpo_loss(-0.3, -0.3, 1.0, 0.0).value == doctest::Approx(kLn2));
  CHECK(simpo_loss(-0.5, -1.0, 2.0, 1.0).value == doctest::Approx(kLn2));
  CHECK(simpo_loss(-0.5, -1.0, 2.0, 0.5).value ==
        doctest::Approx(static_cast<double>(-oracle::log_sigmoid(0.5L))).epsilon(1e-14));
  CHECK_THROWS_AS(simpo_loss(0.1, -1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("ASFT-align values") {
  CHECK(asft_align_loss({0.0, 0.0}, 1.0).value == doctest::Approx(2 * kLn2));
  const double rw = odds_from_probability(0.5), rl = odds_from_probability(0.5);
  CHECK(asft_align_loss({rw, rl}, 1.0).value == doctest::Approx(-std::log(0.5) - std::log(0.5)));
  CHECK(asft_align_loss({1.2, -0.4}, 0.5).value ==
        doctest::Approx(static_cast<double>(oracle::asft_align(1.2L, -0.4L, 0.5L))).epsilon(1e-14));
}

TEST_CASE("ORPO-align values") {
  CHECK(orpo_align_loss({0.3, 0.3}, 1.0).value == doctest::Approx(kLn2));
  CHECK(orpo_align_loss({2.0, 1.0}, 1.0).value ==
        doctest::Approx(static_cast<double>(-oracle::log_sigmoid(1.0L))).epsilon(1e-14));
}

TEST_CASE("NCA values") {
  CHECK(nca_loss({0.0, 0.0}, 1.0).value == doctest::Approx(2 * kLn2));
  CHECK(nca_loss({0.8, -0.3}, 1.0).value ==
        doctest::Approx(static_cast<double>(oracle::nca(0.8L, -0.3L, 1.0L))).epsilon(1e-14));
  // Large r_w: first term vanishes, the anchoring term grows like 0.5 * r_w.
  CHECK(nca_loss({40.0, 0.0}, 1.0).value == doctest::Approx(20.0 + 0.5 * kLn2).epsilon(1e-9));
}

TEST_CASE("Cal-DPO values") {
  CHECK(cal_dpo_loss({1.0, -1.0}, 0.5).value ==
        doctest::Approx(static_cast<double>(-oracle::log_sigmoid(2.0L))).epsilon(1e-14));
  CHECK(cal_dpo_loss({0.0, 0.0}, 0.5).value == doctest::Approx(kLn2 + 2.0));
  CHECK(cal_dpo_loss({0.2, 0.1}, 1.0).value ==
        doctest::Approx(static_cast<double>(oracle::cal_dpo(0.2L, 0.1L, 1.0L))).epsilon(1e-14));
}

TEST_CASE("APO-Zero values") {
  CHECK(apo_zero_loss({0.5, 0.5}, 3.0).value == 0.0);
  CHECK(apo_zero_loss({1e3, -1e3}, 1.0).value == doctest::Approx(-1.0));
}

TEST_CASE("SFT values") {
  CHECK(sft_loss(0.0).value == 0.0);
  CHECK(sft_loss(-kLn2).value == doctest::Approx(kLn2));
  CHECK(sft_loss(-1.5).value == 1.5);
  CHECK(sft_loss(-1.5).d_r_w == -1.0);
  CHECK_THROWS_AS(sft_loss(0.5), DomainError);
}

TEST_CASE("single-stage ORPO/ASFT closed forms") {
  const LossGrad asft = single_stage_loss(ObjectiveKind::ASFTSingle, 0.5, 0.5, 1.0);
  const LossGrad orpo = single_stage_loss(ObjectiveKind::ORPOSingle, 0.5, 0.5, 1.0);
  CHECK(asft.value == doctest::Approx(3 * kLn2));
  CHECK(orpo.value == doctest::Approx(2 * kLn2));
  CHECK(orpo_asft_gap(0.5, 0.5) == doctest::Approx(std::log(0.5)));
  for (auto k : {ObjectiveKind::ASFTSingle, ObjectiveKind::ORPOSingle}) {
    CHECK(single_stage_loss(k, 0.3, 0.6, 0.0).value == doctest::Approx(-std::log(0.3)));
  }
  CHECK_THROWS_AS(single_stage_loss(ObjectiveKind::DPO, 0.3, 0.3, 1.0), ConfigError);
  CHECK_THROWS_AS(single_stage_loss(ObjectiveKind::ASFTSingle, 0.0, 0.3, 1.0), DomainError);
  CHECK_THROWS_AS(single_stage_loss(ObjectiveKind::ASFTSingle, 0.3, 0.3, -1.0), DomainError);
}

TEST_CASE("single-stage values match the long-double oracle") {
  CounterRng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double pw = rng.uniform(1e-4, 1 - 1e-4), pl = rng.uniform(1e-4, 1 - 1e-4);
    const double lambda = rng.uniform(0.0, 3.0);
    CHECK(single_stage_loss(ObjectiveKind::ASFTSingle, pw, pl, lambda).value ==
          doctest::Approx(static_cast<double>(oracle::asft_single(pw, pl, lambda))).epsilon(1e-12));
    CHECK(single_stage_loss(ObjectiveKind::ORPOSingle, pw, pl, lambda).value ==
          doctest::Approx(static_cast<double>(oracle::orpo_single(pw, pl, lambda))).epsilon(1e-12));
  }
}

TEST_CASE("odds score") {
  CHECK(odds_from_probability(0.5) == 0.0);
  CHECK(odds_from_probability(0.9) == doctest::Approx(std::log(9.0)));
  CHECK(odds_from_log_probability(std::log(0.9)) == doctest::Approx(std::log(9.0)));
  CHECK_THROWS_AS(odds_from_probability(0.0), DomainError);
  CHECK_THROWS_AS(odds_from_probability(1.0), DomainError);
  CHECK_THROWS_AS(odds_from_probability(1e-13), DomainError);
  CHECK_THROWS_AS(odds_from_probability(std::nan("")), DomainError);
}

TEST_CASE("tempered coefficients") {
  const double b = 1e-8;
  const LossGrad a = tempered_align_grad(ObjectiveKind::ASFTAlign, {0.7, -0.3}, b);
  CHECK(a.d_r_w / b == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(a.d_r_l / b == doctest::Approx(0.5).epsilon(1e-6));
  const LossGrad sat = tempered_align_grad(ObjectiveKind::ORPOAlign, {60.0, -60.0}, 1.0);
  CHECK(std::fabs(sat.d_r_w) < 1e-40);
  CHECK(sat.d_r_l == -sat.d_r_w);
  // y_l coefficient of ASFT is +beta * sigma(beta r_l).
  const LossGrad g = tempered_align_grad(ObjectiveKind::ASFTAlign, {0.3, -0.2}, 2.0);
  CHECK(g.d_r_l == doctest::Approx(2.0 * sigmoid(-0.4)).epsilon(1e-14));
  CHECK(g.d_r_w == doctest::Approx(-2.0 * (1.0 - sigmoid(0.6))).epsilon(1e-14));
  const ObjectiveSpec spec{ObjectiveKind::ASFTAlign, 2.0};
  CHECK(oracle::rel_err(g.d_r_w, fd_w(spec, {0.3, -0.2}), 1e-12) <= 1e-6);
  CHECK(oracle::rel_err(g.d_r_l, fd_l(spec, {0.3, -0.2}), 1e-12) <= 1e-6);
  CHECK_THROWS_AS(tempered_align_grad(ObjectiveKind::DPO, {0.0, 0.0}, 1.0), ConfigError);
}

TEST_CASE("beta = 1 reproduces the vanilla terms exactly") {
  CounterRng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const ScorePair s{rng.uniform(-8, 8), rng.uniform(-8, 8)};
    const LossGrad a = asft_align_loss(s, 1.0), va = vanilla_asft_align_loss(s);
    const LossGrad o = orpo_align_loss(s, 1.0), vo = vanilla_orpo_align_loss(s);
    REQUIRE(a.value == va.value);
    REQUIRE(a.d_r_w == va.d_r_w);
    REQUIRE(o.value == vo.value);
    REQUIRE(o.d_r_l == vo.d_r_l);
  }
}

TEST_CASE("scalar partials match central differences") {
  CounterRng rng(5);
  for (ObjectiveKind k : kScalarKinds) {
    CAPTURE(to_string(k));
    for (int i = 0; i < 200; ++i) {
      const ObjectiveSpec spec{k, rng.uniform(0.2, 3.0)};
      const ScorePair s{rng.uniform(-3, 3), rng.uniform(-3, 3)};
      const LossGrad g = scalar_loss(spec, s);
      CHECK(oracle::rel_err(g.d_r_w, fd_w(spec, s)) <= 1e-4);
      CHECK(oracle::rel_err(g.d_r_l, fd_l(spec, s)) <= 1e-4);
    }
  }
}

TEST_CASE("values match the long-double oracle across a fuzzed grid") {
  CounterRng rng(8);
  for (int i = 0; i < 2000; ++i) {
    const double rw = rng.uniform(-6, 6), rl = rng.uniform(-6, 6), b = rng.uniform(0.1, 4);
    CHECK(dpo_loss({rw, rl}, b).value ==
          doctest::Approx(static_cast<double>(oracle::dpo(rw, rl, b))).epsilon(1e-12));
    CHECK(ipo_loss({rw, rl}, b).value ==
          doctest::Approx(static_cast<double>(oracle::ipo(rw, rl, b))).epsilon(1e-12));
    CHECK(nca_loss({rw, rl}, b).value ==
          doctest::Approx(static_cast<double>(oracle::nca(rw, rl, b))).epsilon(1e-12));
    CHECK(cal_dpo_loss({rw, rl}, b).value ==
          doctest::Approx(static_cast<double>(oracle::cal_dpo(rw, rl, b))).epsilon(1e-12));
    CHECK(apo_zero_loss({rw, rl}, b).value ==
          doctest::Approx(static_cast<double>(oracle::apo_zero(rw, rl, b))).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("shift invariance separates pairwise from pointwise losses") {
  const ScorePair s{0.37, -0.21};
  const ScorePair t{s.r_w + 1.0, s.r_l + 1.0};
  for (ObjectiveKind k : kScalarKinds) {
    CAPTURE(to_string(k));
    const ObjectiveSpec spec{k, 1.3};
    const double before = scalar_loss(spec, s).value;
    const double after = scalar_loss(spec, t).value;
    if (ranking_class(k) == RankingClass::Pairwise) {
      CHECK(after == doctest::Approx(before).epsilon(1e-14));
    } else {
      CHECK(std::fabs(after - before) > 1e-3);
    }
  }
  // SimPO on shifted log-probabilities.
  CHECK(simpo_loss(-1.5, -2.5, 1.0, 0.2).value ==
        doctest::Approx(simpo_loss(-0.5, -1.5, 1.0, 0.2).value).epsilon(1e-14));
}

TEST_CASE("monotonicity sign checks") {
  CounterRng rng(21);
  for (ObjectiveKind k : {ObjectiveKind::DPO, ObjectiveKind::ORPOAlign, ObjectiveKind::ASFTAlign,
                          ObjectiveKind::APOZero}) {
    for (int i = 0; i < 1000; ++i) {
      const LossGrad g = scalar_loss({k, rng.uniform(0.1, 3)}, {rng.uniform(-5, 5), rng.uniform(-5, 5)});
      CHECK(g.d_r_w <= 0.0);
      CHECK(g.d_r_l >= 0.0);
    }
  }
}

TEST_CASE("classification tables") {
  CHECK(ranking_class(ObjectiveKind::DPO) == RankingClass::Pairwise);
  CHECK(ranking_class(ObjectiveKind::IPO) == RankingClass::Pairwise);
  CHECK(ranking_class(ObjectiveKind::SimPO) == RankingClass::Pairwise);
  CHECK(ranking_class(ObjectiveKind::ORPOAlign) == RankingClass::Pairwise);
  CHECK(ranking_class(ObjectiveKind::ASFTAlign) == RankingClass::Pointwise);
  CHECK(ranking_class(ObjectiveKind::NCA) == RankingClass::Pointwise);
  CHECK(ranking_class(ObjectiveKind::CalDPO) == RankingClass::Pointwise);
  CHECK(ranking_class(ObjectiveKind::APOZero) == RankingClass::Pointwise);
  for (auto k : {ObjectiveKind::SimPO, ObjectiveKind::ORPOAlign, ObjectiveKind::ASFTAlign,
                 ObjectiveKind::ORPOSingle, ObjectiveKind::ASFTSingle}) {
    CHECK(uses_length_normalization(k));
  }
  for (auto k : {ObjectiveKind::DPO, ObjectiveKind::IPO, ObjectiveKind::NCA, ObjectiveKind::CalDPO,
                 ObjectiveKind::APOZero}) {
    CHECK_FALSE(uses_length_normalization(k));
  }
  CHECK(score_class(ObjectiveKind::DPO) == ScoreClass::RefRatio);
  CHECK(score_class(ObjectiveKind::ASFTAlign) == ScoreClass::OddsRatio);
  CHECK(score_class(ObjectiveKind::SimPO) == ScoreClass::RawLogProb);
}

TEST_CASE("names round-trip and reject unknowns") {
  for (ObjectiveKind k : all_objective_kinds()) {
    CHECK(parse_objective_kind(to_string(k)) == k);
  }
  CHECK(parse_objective_kind("asft") == ObjectiveKind::ASFTAlign);
  CHECK(parse_objective_kind("cal_dpo") == ObjectiveKind::CalDPO);
  CHECK(parse_objective_kind("dpo") == ObjectiveKind::DPO);
  CHECK_THROWS_AS(parse_objective_kind("kto"), ConfigError);
}

TEST_CASE("spec validation and errors") {
  CHECK_THROWS_AS(dpo_loss({0.0, 0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(dpo_loss({0.0, 0.0}, -1.0), DomainError);
  CHECK_THROWS_AS(dpo_loss({std::numeric_limits<double>::infinity(), 0.0}, 1.0), DomainError);
  CHECK_THROWS_AS(nca_loss({std::nan(""), 0.0}, 1.0), DomainError);
  ObjectiveSpec bad{ObjectiveKind::DPO, 1.0};
  bad.normalize = true;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(scalar_loss({ObjectiveKind::SFT}, {0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(scalar_loss({ObjectiveKind::ASFTSingle}, {0.0, 0.0}), ConfigError);
  CHECK_FALSE(supports_scalar_binding(ObjectiveKind::ORPOSingle));
  CHECK(supports_scalar_binding(ObjectiveKind::NCA));
}
