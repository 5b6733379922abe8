#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "daa/bias_lab.hpp"
#include "daa/csv.hpp"
#include "daa/errors.hpp"
#include "daa/objectives.hpp"

using namespace daa;

TEST_CASE("unbiased data is centered") {
  BiasConfig c;
  c.seed = 17;
  const auto pairs = generate_pairs(c);
  REQUIRE(pairs.size() == 2000);
  double sum = 0.0, sq = 0.0;
  for (const auto& p : pairs) {
    CHECK(p.b_x == 0.0);
    const double m = 0.5 * (p.y_w + p.y_l);
    sum += m;
    sq += m * m;
  }
  const double mean = sum / 2000.0;
  const double sd = std::sqrt(std::max(sq / 2000.0 - mean * mean, 0.0));
  CHECK(std::fabs(mean) <= 3.0 * sd / std::sqrt(2000.0) + 1e-15);
}

TEST_CASE("biased prompts carry the offset on both candidates") {
  BiasConfig c;
  c.bias_strength = 0.9;
  c.seed = 4;
  for (const auto& p : generate_pairs(c)) {
    const double m = 0.5 * (p.y_w + p.y_l);
    if (p.x < 0.5) {
      CHECK(p.b_x == 0.9);
      // b + c and b - c are each rounded once, so their mean can sit one ulp off 0.9.
      CHECK(std::fabs(m - 0.9) <= 2.3e-16);
    } else {
      CHECK(p.b_x == 0.0);
      CHECK(m == 0.0);
    }
    CHECK(p.x >= 0.0);
    CHECK(p.x < 1.0);
    CHECK(std::fabs(p.y_w - p.b_x) <= 0.5);
  }
}

TEST_CASE("near-zero temperature labels the larger score as winner") {
  BiasConfig c;
  c.n_samples = 20000;
  c.seed = 99;
  for (const auto& p : generate_pairs(c)) {
    if (std::fabs(p.y_w - p.y_l) > 1e-4) CHECK(p.y_w > p.y_l);
  }
  CounterRng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(bt_label(0.3, 0.1, 1e-6, rng).winner == 1);
}

TEST_CASE("Bradley-Terry frequencies follow the sigmoid") {
  CounterRng rng(5);
  int first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) first += bt_label(1.0, 0.0, 1.0, rng).winner == 1;
  CHECK(static_cast<double>(first) / n == doctest::Approx(sigmoid(1.0)).epsilon(0.005 / 0.731));
  int ties = 0;
  for (int i = 0; i < n; ++i) ties += bt_label(0.2, 0.2, 1e-6, rng).winner == 1;
  CHECK(std::fabs(static_cast<double>(ties) / n - 0.5) <= 0.005);
}

TEST_CASE("split sizes") {
  BiasConfig c;
  const ToyDataset d = generate(c);
  CHECK(d.train.size() == 1600);
  CHECK(d.test.size() == 400);
  c.n_samples = 10;
  const ToyDataset s = generate(c);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
}

TEST_CASE("split is a permutation of the input") {
  BiasConfig c;
  c.n_samples = 300;
  const auto pairs = generate_pairs(c);
  const ToyDataset d = generate(c);
  std::multiset<double> in, out;
  for (const auto& p : pairs) in.insert(p.x);
  for (const auto& p : d.train) out.insert(p.x);
  for (const auto& p : d.test) out.insert(p.x);
  CHECK(in == out);
}

TEST_CASE("generation is deterministic and seed sensitive") {
  BiasConfig c;
  c.seed = 123;
  c.bias_strength = 0.9;
  std::ostringstream a, b, other;
  write_dataset_csv(a, generate(c));
  write_dataset_csv(b, generate(c));
  CHECK(a.str() == b.str());
  c.seed = 124;
  write_dataset_csv(other, generate(c));
  CHECK(a.str() != other.str());
}

TEST_CASE("pair i does not depend on n_samples") {
  BiasConfig small, big;
  small.n_samples = 50;
  big.n_samples = 500;
  const auto a = generate_pairs(small), b = generate_pairs(big);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y_w == b[i].y_w);
  }
}

TEST_CASE("dataset csv round-trips through the reader") {
  BiasConfig c;
  c.n_samples = 40;
  c.bias_strength = 0.9;
  const ToyDataset d = generate(c);
  std::stringstream ss;
  write_dataset_csv(ss, d);
  const CsvTable t = read_csv(ss);
  REQUIRE(t.rows.size() == 40);
  CHECK(parse_double(t.rows[0][t.column("y_w")]) == d.train[0].y_w);
  CHECK(t.rows.back()[t.column("split")] == "test");
}

TEST_CASE("config validation") {
  BiasConfig c;
  c.n_samples = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.bt_temperature = 0.0;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = {};
  c.split_fraction = 1.0;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = {};
  c.bias_strength = -0.1;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c = {};
  c.n_samples = 2;
  c.split_fraction = 0.9;
  CHECK_THROWS_AS(generate(c), ConfigError);  // empty test side
  CounterRng rng(0);
  CHECK_THROWS_AS(bt_label(0, 1, -1.0, rng), ConfigError);
}
