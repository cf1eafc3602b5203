#include <cmath>

#include "doctest.h"
#include "qot/experiments.hpp"

using namespace qot;

namespace {

// Binomial tail by direct enumeration of outcome strings, for small n.
double brute_tail(std::size_t n, double p, double tau) {
  double total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    if (k / double(n) <= tau) continue;
    total += std::pow(p, k) * std::pow(1 - p, double(n) - k);
  }
  return total;
}

ExperimentSpec spec_for(AttackScenario sc, std::size_t N, std::size_t M, std::size_t K, double tau,
                        std::size_t trials, std::uint64_t seed = 1) {
  ExperimentSpec s;
  s.scenario = std::move(sc);
  s.config.N = N;
  s.config.M = M;
  s.config.K = K;
  s.config.tau = tau;
  s.config.seed = seed;
  s.trials = trials;
  return s;
}

}  // namespace

TEST_CASE("abort probability agrees with enumeration") {
  for (std::size_t n : {1u, 3u, 6u, 10u}) {
    for (double p : {0.0, 0.1, 0.25, 0.5, 0.9}) {
      for (double tau : {0.0, 0.1, 0.3, 0.5}) {
        CHECK(abort_probability(n, p, tau) == doctest::Approx(brute_tail(n, p, tau)).epsilon(1e-12));
      }
    }
  }
  CHECK(abort_probability(0, 0.5, 0.0) == 0.0);
  CHECK(abort_probability(50, 0.25, 0.0) >= 0.999999);
}

TEST_CASE("closed forms per scenario") {
  ProtocolConfig cfg;
  cfg.M = 5;
  cfg.K = 4;
  CHECK(closed_form_detection(InterceptResend{}, cfg) == doctest::Approx(1 - std::pow(0.75, 5)));
  CHECK(closed_form_detection(BobBellCheat{}, cfg) == doctest::Approx(1 - std::pow(0.5, 4)));
  CHECK(closed_form_detection(Entangling{UeParams::undetectable()}, cfg) == 0.0);
  CHECK(closed_form_detection(NoAttack{}, cfg) == 0.0);
  CHECK_THROWS_AS(closed_form_detection(AliceMeasureResend{}, cfg), std::invalid_argument);
}

TEST_CASE("Monte Carlo detection rates track the closed forms") {
  UeParams flip;
  flip.a = 0;
  flip.b = 1;
  flip.c = 1;
  flip.d = 0;
  const AttackScenario scenarios[] = {InterceptResend{}, BobBellCheat{}, Entangling{flip}};
  for (const auto& sc : scenarios) {
    for (double tau : {0.0, 0.2}) {
      const auto row = estimate_detection_rate(spec_for(sc, 2, 6, 4, tau, 20000));
      INFO(scenario_name(sc), " tau=", tau, " empirical=", row.empirical, " closed=", row.closed_form);
      CHECK(row.within(4.0));
    }
  }
  const auto honest = estimate_detection_rate(spec_for(NoAttack{}, 3, 4, 2, 0.0, 2000));
  CHECK(honest.empirical == 0.0);
  CHECK(honest.parameter == 3.0);
}

TEST_CASE("results do not depend on the number of workers") {
  const auto spec = spec_for(InterceptResend{}, 2, 3, 1, 0.0, 3000, 77);
  auto multi = spec;
  multi.workers = 3;
  CHECK(to_csv(estimate_detection_rate(spec)) == to_csv(estimate_detection_rate(multi)));
  CHECK(alice_attack_report(500, AliceVariant::Plain, {}, ResendPolicy::GuessChoice, 1).bit_error.rate ==
        alice_attack_report(500, AliceVariant::Plain, {}, ResendPolicy::GuessChoice, 4).bit_error.rate);
}

TEST_CASE("sweeps override one parameter") {
  auto spec = spec_for(BobBellCheat{}, 1, 0, 0, 0.0, 500);
  spec.sweep = Sweep{SweepParam::K, {1, 2, 3}};
  const auto rows = sweep_curve(spec);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].parameter == double(i + 1));
    CHECK(rows[i].closed_form == doctest::Approx(1 - std::pow(0.5, double(i + 1))));
  }
  CHECK(parse_sweep_param(to_string(SweepParam::M)) == SweepParam::M);
  CHECK_FALSE(parse_sweep_param("Q").has_value());
}

TEST_CASE("unchosen bit is invisible") {
  for (Choice c : {Choice::Z, Choice::X}) {
    for (int b : {0, 1}) CHECK(obliviousness_report(c, b) < 1e-12);
  }
  CHECK_THROWS_AS(obliviousness_report(Choice::Z, 2), std::invalid_argument);
}

TEST_CASE("dishonest Alice rates per policy") {
  for (auto policy : {ResendPolicy::GuessChoice, ResendPolicy::Collapsed, ResendPolicy::UniformFour}) {
    ProtocolConfig cfg;
    cfg.N = 4;
    const auto plain = alice_attack_report(5000, AliceVariant::Plain, cfg, policy);
    const auto dummy = alice_attack_report(5000, AliceVariant::Dummy, cfg, policy);
    INFO(to_string(policy));
    CHECK(plain.false_conclusive == 0);
    CHECK(std::abs(plain.conclusive.rate - kAliceConclusiveRate) < 4 * plain.conclusive.std_error);
    const double e = expected_alice_bit_error(policy);
    CHECK(std::abs(plain.bit_error.rate - e) < 4 * std::sqrt(e * (1 - e) / plain.bit_error.samples));
    CHECK(std::abs(dummy.downstream().rate - e / 2) < 4 * std::sqrt(e / 2 * (1 - e / 2) / dummy.dummy_error.samples));
  }
  CHECK_THROWS(alice_attack_report(0, AliceVariant::Plain));
}

TEST_CASE("honest batch never errs") {
  const auto r = honest_batch(500, 9);
  CHECK(r.runs == 500);
  CHECK(r.decode_errors == 0);
  CHECK(r.aborts == 0);
  CHECK(r.slots >= 500);
}

TEST_CASE("row formatting") {
  EstimateRow row{5, 0.75, 0.7626953125, 0.01, 100};
  CHECK(estimate_csv_header() == "parameter,empirical,closed_form,stderr,trials");
  CHECK(to_csv(row) == "5,0.75,0.7626953125,0.01,100");
  CHECK(to_json_line(row) ==
        "{\"parameter\":5,\"empirical\":0.75,\"closed_form\":0.7626953125,\"stderr\":0.01,\"trials\":100}");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  // At an empirical rate of 1 the band falls back to the closed-form error.
  EstimateRow saturated{50, 1.0, 0.9999994, 0.0, 100000};
  CHECK(saturated.within(4.0));
}
