#include <cmath>
#include <sstream>

#include "ams/common.h"
#include "ams/xcs.h"
#include "doctest.h"

using namespace ams;

namespace {

const std::string kInput = "001100010010000101";

Classifier make(const char* cond, int action, double p, double f) {
  Classifier cl;
  cl.condition = Condition(cond);
  cl.action = action;
  cl.prediction = p;
  cl.fitness = f;
  return cl;
}

std::string random_input(Rng& rng) {
  std::string s(kConditionLength, '0');
  for (char& c : s) c = rng.bernoulli(0.5) ? '1' : '0';
  return s;
}

}  // namespace

TEST_SUITE("xcs") {

TEST_CASE("conditions validate and match with wildcards") {
  CHECK_THROWS_AS(Condition("01"), Error);
  CHECK_THROWS_AS(Condition("00110001001000010x"), Error);
  const Condition all;
  CHECK(all.wildcards() == 18);
  CHECK(all.matches(kInput));
  const Condition c("0011000100100001#1");
  CHECK(c.matches(kInput));
  CHECK(c.matches("001100010010000111"));
  CHECK_FALSE(c.matches("101100010010000101"));
  CHECK(all.is_more_general(c));
  CHECK_FALSE(c.is_more_general(all));
  CHECK_FALSE(c.is_more_general(c));
  CHECK_THROWS_AS(check_input("0011"), Error);
  CHECK_THROWS_AS(check_input("00110001001000010#"), Error);
}

TEST_CASE("covering fills an empty population with one classifier per action") {
  Xcs x;
  const auto match = x.match_set(kInput);
  CHECK(match.size() == 8);
  CHECK(x.population().size() == 8);
  for (int a = 0; a < kActionCount; ++a) {
    CHECK(x.population()[static_cast<std::size_t>(a)].action == a);
    CHECK(x.population()[static_cast<std::size_t>(a)].condition.matches(kInput));
  }
  // a second lookup with the same input needs no new classifiers
  CHECK(x.match_set(kInput).size() == 8);
  CHECK(x.population().size() == 8);
}

TEST_CASE("system prediction is fitness weighted") {
  Xcs x;
  x.set_population({make("##################", 3, 0.4, 0.5), make("0011##############", 3, 0.8, 0.5),
                    make("##################", 5, 0.2, 1.0)});
  const auto pa = x.prediction_array({0, 1, 2});
  CHECK(*pa[3] == doctest::Approx(0.6));
  CHECK(*pa[5] == doctest::Approx(0.2));
  CHECK_FALSE(pa[0]);

  Xcs y;
  y.set_population({make("##################", 3, 0.4, 0.2), make("##################", 3, 0.8, 0.6)});
  CHECK(*y.prediction_array({0, 1})[3] == doctest::Approx((0.4 * 0.2 + 0.8 * 0.6) / 0.8));
}

TEST_CASE("exploit picks the best action with lowest-id ties") {
  Xcs x;
  std::vector<Classifier> pop;
  for (int a = 0; a < kActionCount; ++a) pop.push_back(make("##################", a, a == 2 || a == 6 ? 0.9 : 0.1, 0.5));
  x.set_population(pop);
  const auto d = x.decide(kInput, XcsMode::Exploit);
  CHECK(d.action == 2);
  CHECK(d.prediction == doctest::Approx(0.9));
  CHECK(d.action_set.size() == 1);
}

TEST_CASE("repeated reward drives the prediction to the target") {
  XcsParams p;
  p.theta_ga = 1e9;  // keep the population fixed
  Xcs x(p, 3);
  x.set_population({make("##################", 4, 0.0, 0.5), make("##################", 0, 0.0, 0.5),
                    make("##################", 1, 0.0, 0.5), make("##################", 2, 0.0, 0.5),
                    make("##################", 3, 0.0, 0.5), make("##################", 5, 0.0, 0.5),
                    make("##################", 6, 0.0, 0.5), make("##################", 7, 0.0, 0.5)});
  for (int i = 0; i < 200; ++i) {
    XcsDecision d = x.decide(kInput, XcsMode::Exploit);
    d.action = 4;
    d.action_set = {0};
    x.update(d, 0.8, kInput);
  }
  CHECK(std::abs(x.population()[0].prediction - 0.8) < 1e-6);
  CHECK(x.population()[0].error < p.epsilon0);
  CHECK(x.population()[0].experience == 200);
  CHECK(x.time() == 200);
}

TEST_CASE("the first update averages exactly") {
  Xcs x;
  x.set_population({make("##################", 0, 0.5, 0.5)});
  XcsDecision d = x.decide(kInput, XcsMode::Exploit);
  d.action = 0;
  d.action_set = {0};
  x.update(d, 0.1, kInput);
  const Classifier& cl = x.population()[0];
  CHECK(cl.prediction == doctest::Approx(0.1));
  CHECK(cl.error == doctest::Approx(0.4));
}

TEST_CASE("stale decisions are refused") {
  Xcs x;
  const auto d = x.decide(kInput, XcsMode::Explore);
  x.update(d, 0.5, kInput);
  CHECK_THROWS_AS(x.update(d, 0.5, kInput), Error);
  XcsDecision empty = x.decide(kInput, XcsMode::Explore);
  empty.action_set.clear();
  CHECK_THROWS_AS(x.update(empty, 0.5, kInput), Error);
}

TEST_CASE("property: population bound, valid classifiers and action coverage") {
  XcsParams p;
  p.population_size = 60;
  Xcs x(p, 17);
  Rng rng(4);
  for (int t = 0; t < 3000; ++t) {
    const std::string in = random_input(rng);
    const auto d = x.decide(in, XcsMode::Explore);
    CHECK(d.action >= 0);
    CHECK(d.action < kActionCount);
    for (const auto& pr : d.predictions) CHECK(pr.has_value());
    x.update(d, d.action == (in[0] == '1' ? 5 : 2) ? 1.0 : 0.0, in);
    CHECK(x.total_numerosity() <= p.population_size);
  }
  for (const Classifier& cl : x.population()) {
    CHECK(cl.numerosity >= 1);
    CHECK(cl.fitness >= 0.0);
    CHECK(cl.error >= 0.0);
  }
}

TEST_CASE("learning a two-way split over recurring contexts") {
  // Game contexts recur; uniformly random 18-bit inputs would keep covering.
  Rng rng(12);
  std::vector<std::string> contexts;
  for (int i = 0; i < 16; ++i) contexts.push_back(random_input(rng));
  for (int i = 0; i < 8; ++i) contexts[static_cast<std::size_t>(i)][0] = '1';
  for (int i = 8; i < 16; ++i) contexts[static_cast<std::size_t>(i)][0] = '0';
  const auto pick = [&] { return contexts[static_cast<std::size_t>(rng.uniform_int(0, 15))]; };
  const auto target = [](const std::string& in) { return in[0] == '1' ? 5 : 2; };
  Xcs x({}, 8);
  for (int t = 0; t < 6000; ++t) {
    const std::string in = pick();
    const auto d = x.decide(in, XcsMode::Explore);
    x.update(d, d.action == target(in) ? 1.0 : 0.0, in);
  }
  int correct = 0;
  for (int t = 0; t < 200; ++t) {
    const std::string in = pick();
    const auto d = x.decide(in, XcsMode::Exploit);
    if (d.action == target(in)) ++correct;
    x.update(d, d.action == target(in) ? 1.0 : 0.0, in);
  }
  CHECK(correct >= 180);
  CHECK(x.total_numerosity() <= XcsParams{}.population_size);
}

TEST_CASE("population files round trip and reject corruption") {
  Xcs x({}, 5);
  Rng rng(1);
  for (int t = 0; t < 300; ++t) {
    const std::string in = random_input(rng);
    const auto d = x.decide(in, XcsMode::Explore);
    x.update(d, 0.1 * d.action, in);
  }
  std::stringstream buf;
  x.save(buf);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "AMSX");
  Xcs y;
  std::stringstream in(bytes);
  y.load(in);
  CHECK(y.population() == x.population());
  CHECK(y.time() == x.time());
  CHECK(y.dump() == x.dump());

  Xcs z;
  std::stringstream cut(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(z.load(cut), DecodeError);
  std::string bad = bytes;
  bad[0] = 'Q';
  std::stringstream magic(bad);
  CHECK_THROWS_AS(z.load(magic), DecodeError);
  CHECK(z.population().empty());
}

TEST_CASE("parameter validation") {
  XcsParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.population_size = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.explore_prob = 1.5;
  CHECK_THROWS_AS(Xcs{p}, ConfigError);
  p = {};
  p.init_fitness = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(xcs_mode_name(XcsMode::Exploit) == "exploit");
}

}  // TEST_SUITE
