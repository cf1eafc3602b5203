#pragma once

// Monte Carlo estimates of detection and error rates, each next to the
// closed form it should converge to.
//
// Trial i of an experiment with seed s runs on its own stream seeded with
// derive_seed(s, i), so results do not depend on how trials are split
// across workers.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qot/adversary.hpp"
#include "qot/protocol.hpp"

namespace qot {

inline constexpr std::size_t kDefaultTrials = 100000;

enum class SweepParam : std::uint8_t { N, M, K };

std::string_view to_string(SweepParam p) noexcept;
std::optional<SweepParam> parse_sweep_param(std::string_view s) noexcept;

struct Sweep {
  SweepParam param = SweepParam::K;
  std::vector<std::size_t> values;
};

struct ExperimentSpec {
  AttackScenario scenario = NoAttack{};
  ProtocolConfig config;
  std::size_t trials = kDefaultTrials;
  std::optional<Sweep> sweep;
  unsigned workers = 1;
};

struct EstimateRow {
  double parameter = 0.0;
  double empirical = 0.0;
  double closed_form = 0.0;
  double std_error = 0.0;  ///< sqrt(p (1 - p) / trials) at the empirical p
  std::size_t trials = 0;

  /// |empirical - closed_form| <= sigmas * max(std_error, se0), where se0
  /// is the standard error at the closed-form rate. The second term keeps
  /// the band meaningful when every trial came out the same way.
  bool within(double sigmas) const noexcept;
};

/// Probability that more than a fraction `tau` of `n` independent checks
/// fail when each fails with probability `p`. 1 - (1 - p)^n at tau = 0.
double abort_probability(std::size_t n, double p, double tau);

/// Closed-form detection probability of a scenario under `config`:
/// intercept 1 - (3/4)^M, entangling 1 - (1 - p_ue)^M, Bell cheat
/// 1 - (1/2)^K (all at tau = 0), honest 0. Throws for the Alice scenarios.
double closed_form_detection(const AttackScenario& scenario, const ProtocolConfig& config);

/// Runs spec.trials protocol runs and counts detections: a Step-2 channel
/// abort for Eve's attacks, a failed loyalty test for the Bell cheat, any
/// abort for the honest run. The parameter column is M for Eve, K for the
/// Bell cheat and N for the honest run. Throws std::invalid_argument for the
/// Alice scenarios or zero trials.
EstimateRow estimate_detection_rate(const ExperimentSpec& spec);

/// One estimate per sweep value, in order. Throws std::invalid_argument if
/// the spec has no sweep or the sweep is empty.
std::vector<EstimateRow> sweep_curve(const ExperimentSpec& spec);

/// Trace distance between the encoded payload states that differ only in
/// the bit Bob did not choose.
double obliviousness_report(Choice choice, int chosen_bit);

enum class AliceVariant : std::uint8_t { Plain, Dummy };

struct RateEstimate {
  double rate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

struct AliceAttackReport {
  std::size_t trials = 0;
  RateEstimate conclusive;  ///< over slots Alice measured
  RateEstimate bit_error;   ///< over bits Bob decoded
  RateEstimate dummy_error;
  std::size_t false_conclusive = 0;
  AliceVariant variant = AliceVariant::Plain;

  /// Headline rate for the variant: bit_error for Plain, dummy_error for Dummy.
  const RateEstimate& downstream() const noexcept {
    return variant == AliceVariant::Plain ? bit_error : dummy_error;
  }
};

/// Expected per-bit error Bob sees under each resend policy
/// (GuessChoice 3/16, Collapsed 1/4, UniformFour 3/8).
double expected_alice_bit_error(ResendPolicy policy) noexcept;
inline constexpr double kAliceConclusiveRate = 0.25;

/// Dishonest-Alice runs with uniformly random choices and pairs. Throws
/// std::invalid_argument when trials == 0.
AliceAttackReport alice_attack_report(std::size_t trials, AliceVariant variant, const ProtocolConfig& config = {},
                                      ResendPolicy policy = ResendPolicy::GuessChoice, unsigned workers = 1);

struct HonestBatchReport {
  std::size_t runs = 0;
  std::size_t slots = 0;
  std::size_t decode_errors = 0;
  std::size_t aborts = 0;
};

/// Honest runs with N uniform in [1, max_n], K in [0, 3], M and M2 in
/// [0, 8], and uniform choices and pairs.
HonestBatchReport honest_batch(std::size_t runs, std::uint64_t seed, std::size_t max_n = 16, unsigned workers = 1);

std::string estimate_csv_header();
std::string to_csv(const EstimateRow& row);
std::string to_json_line(const EstimateRow& row);
/// %.12g, the format used in every emitted number.
std::string format_number(double x);

}  // namespace qot
