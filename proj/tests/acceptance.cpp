// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qot/adversary.hpp"
#include "qot/costmodel.hpp"
#include "qot/experiments.hpp"
#include "qot/protocol.hpp"
#include "qot/transcript.hpp"

using namespace qot;

namespace {

// Pinned tolerances.
constexpr double kSigmas = 4.0;
constexpr double kAliceBand = 0.01;
constexpr double kObliviousBound = 1e-12;
constexpr double kUndetectedBound = 1e-9;
constexpr double kLeakBound = 1e-6;
constexpr double kHonestSeconds = 10.0;
constexpr double kBellSeconds = 60.0;
constexpr std::size_t kTrials = 100000;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome honest_correctness() {
  const auto t0 = Clock::now();
  const auto r = honest_batch(10000, 20240601, 16);
  const double secs = seconds_since(t0);
  const bool ok = r.runs == 10000 && r.decode_errors == 0 && r.aborts == 0 && secs < kHonestSeconds;
  return {ok, std::to_string(r.slots) + " slots, " + std::to_string(r.decode_errors) + " errors, " +
                  std::to_string(r.aborts) + " aborts, " + fmt("%.2f s", secs)};
}

Outcome four_qubit_example() {
  Rng rng(0);
  std::vector<Choice> prepared{Choice::Z, Choice::X, Choice::Z, Choice::X};
  auto prep = bob_prepare_sequence(prepared, 2, 0, rng);
  // Alice tests the fourth qubit.
  bool ok = honest_basis_oracle(prep.record)(3) == Basis::X && measure(prep.slots[3].state, Basis::X, 0, rng).bit == 0;
  Sequence remaining(prep.slots.begin(), prep.slots.begin() + 3);
  const std::vector<Choice> intended{Choice::X, Choice::Z};
  const auto perm = bob_plan_reorder(remaining, prep.record, intended);
  ok = ok && perm == std::vector<std::size_t>{1, 0, 2};
  const auto ordered = bob_reorder(remaining, perm, 2);
  ok = ok && equal_up_to_global_phase(ordered[0].state, prepare(PrepState::Plus)) &&
       equal_up_to_global_phase(ordered[1].state, prepare(PrepState::Zero));
  const std::vector<MessagePair> pairs{{0, 1}, {1, 0}};
  const auto encoded = alice_encode(ordered, pairs);
  ok = ok && equal_up_to_global_phase(encoded[0].state, prepare(PrepState::Minus)) &&
       equal_up_to_global_phase(encoded[1].state, prepare(PrepState::One));

  // Decoding is deterministic: repeat under many streams.
  std::size_t wrong = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng r(s);
    if (bob_check_and_decode(encoded, {}, intended, 0.0, r).bits != std::vector<std::uint8_t>{1, 1}) ++wrong;
    ProtocolConfig cfg;
    cfg.N = 2;
    cfg.K = 1;
    cfg.seed = s;
    const auto t = run_honest(cfg, intended, pairs);
    if (t.verdict != Verdict::Success || t.decoded != std::vector<std::uint8_t>{1, 1}) ++wrong;
  }
  ok = ok && wrong == 0;
  return {ok, "reorder (1,0) keeps |+0>, decoded 11 in " + std::to_string(2000 - wrong) + "/2000 runs"};
}

Outcome sweep_check(AttackScenario scenario, SweepParam param, std::vector<std::size_t> values, double time_limit,
                    std::uint64_t seed) {
  ExperimentSpec spec;
  spec.scenario = std::move(scenario);
  spec.config.N = 1;
  spec.config.seed = seed;
  spec.trials = kTrials;
  spec.sweep = Sweep{param, std::move(values)};
  const auto t0 = Clock::now();
  const auto rows = sweep_curve(spec);
  const double secs = seconds_since(t0);
  bool ok = secs < time_limit;
  std::string detail;
  for (const auto& r : rows) {
    ok = ok && r.within(kSigmas);
    detail += fmt("%g:%.6f/%.6f ", r.parameter, r.empirical, r.closed_form);
  }
  return {ok, detail + fmt("(%.1f s)", secs)};
}

Outcome bell_cheat() {
  return sweep_check(BobBellCheat{}, SweepParam::K, {1, 5, 10, 20}, kBellSeconds, 401);
}

Outcome intercept() {
  auto out = sweep_check(InterceptResend{}, SweepParam::M, {1, 5, 10, 20, 50}, 1e300, 501);
  ProtocolConfig cfg;
  cfg.M = 50;
  const double at50 = closed_form_detection(InterceptResend{}, cfg);
  out.pass = out.pass && at50 >= 0.999999;
  out.detail += fmt(" closed form at 50 = %.10f", at50);
  return out;
}

Outcome alice_rates() {
  const auto plain = alice_attack_report(kTrials, AliceVariant::Plain);
  const auto dummy = alice_attack_report(kTrials, AliceVariant::Dummy);
  const bool ok = std::abs(plain.conclusive.rate - 0.25) <= kAliceBand &&
                  std::abs(plain.bit_error.rate - 0.1875) <= kAliceBand &&
                  std::abs(dummy.dummy_error.rate - 0.09375) <= kAliceBand && plain.false_conclusive == 0;
  return {ok, fmt("conclusive %.5f, bit error %.5f, dummy error %.5f", plain.conclusive.rate, plain.bit_error.rate,
                  dummy.dummy_error.rate)};
}

Outcome obliviousness() {
  double worst = 0;
  for (Choice c : {Choice::Z, Choice::X}) {
    for (int b : {0, 1}) worst = std::max(worst, obliviousness_report(c, b));
  }
  return {worst < kObliviousBound, fmt("max trace distance %.3g", worst)};
}

Outcome entangling_constraint() {
  Rng rng(707);
  std::size_t undetected = 0, violations = 0;
  const UeSampleKind kinds[] = {UeSampleKind::Haar, UeSampleKind::Undetectable, UeSampleKind::NearUndetectable};
  for (int i = 0; i < 1000; ++i) {
    const auto p = sample_ue_params(rng, kinds[i % 3]);
    if (ue_detection_probability(p) < kUndetectedBound) {
      ++undetected;
      if (ue_leakage(p) >= kLeakBound) ++violations;
    }
  }
  const auto point = UeParams::undetectable();
  const double d = ue_detection_probability(point);
  const double l = ue_leakage(point);
  const bool ok = violations == 0 && undetected > 0 && d == 0.0 && l == 0.0;
  return {ok, std::to_string(undetected) + " undetectable samples, " + std::to_string(violations) +
                  " leaking; constrained point " + fmt("(%g, %g)", d, l)};
}

Outcome dense_coding() {
  std::size_t errors = 0, total = 0;
  for (Gate g : kPauliGates) {
    const MessagePair pair = pauli_decode(g);
    for (int i = 0; i < 1000; ++i) {
      const Slot slot{static_cast<std::uint32_t>(i), apply_gate(make_bell(BellKind::PhiPlus), g, 0)};
      errors += !(bob_bell_cheat_readout(slot) == pair);
      ++total;
    }
  }
  return {errors == 0, std::to_string(errors) + " errors in " + std::to_string(total)};
}

Outcome cost_model() {
  bool ok = true;
  for (std::int64_t R : {0, 29, 30, 31, 100}) {
    ok = ok && total_cost(CostedProtocol::Yang2013, R) == 4 * R + 50 &&
         total_cost(CostedProtocol::YSW2015, R) == 4 * R + 50 &&
         total_cost(CostedProtocol::YYLSZ2015, R) == 4 * R + 100 && total_cost(CostedProtocol::Proposed, R) == R + 140;
  }
  ok = ok && crossover() == 30;
  std::string measured;
  for (std::int64_t R : {1, 29, 30, 31, 100}) {
    const auto q = measured_qubit_consumption(R, 50, 50, 20, static_cast<std::uint64_t>(R));
    ok = ok && q == R + 140;
    measured += std::to_string(q) + " ";
  }
  return {ok, "crossover " + std::to_string(crossover()) + ", measured " + measured};
}

Outcome determinism() {
  ExperimentSpec spec;
  spec.scenario = InterceptResend{};
  spec.config.N = 2;
  spec.config.M = 5;
  spec.config.K = 2;
  spec.config.seed = 99;
  spec.trials = 20000;
  const std::string a = to_csv(estimate_detection_rate(spec));
  spec.workers = 3;
  const std::string b = to_csv(estimate_detection_rate(spec));
  bool ok = a == b;

  std::string log_a, log_b;
  Rng inputs(5);
  for (int i = 0; i < 200; ++i) {
    ProtocolConfig cfg;
    cfg.N = 1 + uniform_index(inputs, 8);
    cfg.M = uniform_index(inputs, 5);
    cfg.K = uniform_index(inputs, 4);
    cfg.M2 = uniform_index(inputs, 5);
    cfg.seed = inputs();
    std::vector<Choice> c;
    std::vector<MessagePair> p;
    draw_inputs(cfg.N, inputs, c, p);
    log_a += to_jsonl(run_protocol(cfg, c, p)) + "\n";
    log_b += to_jsonl(run_protocol(cfg, c, p)) + "\n";
  }
  ok = ok && log_a == log_b;
  std::istringstream in(log_a);
  const auto report = replay(in);
  ok = ok && report.verified() && report.records == 200;
  return {ok, std::string(a == b ? "estimates identical" : "estimates differ") + ", " + std::to_string(report.records) +
                  " transcripts replayed" + (report.verified() ? "" : ", divergence")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"honest-correctness", honest_correctness},
      {"four-qubit-example", four_qubit_example},
      {"bell-cheat-detection", bell_cheat},
      {"intercept-resend-detection", intercept},
      {"dishonest-alice-rates", alice_rates},
      {"obliviousness", obliviousness},
      {"entangling-constraint", entangling_constraint},
      {"dense-coding", dense_coding},
      {"cost-model", cost_model},
      {"determinism-and-replay", determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed ? 1 : 0;
}
