#include "qot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace qot {

namespace {

template <typename Partial, typename TrialFn>
Partial run_trials(std::size_t trials, unsigned workers, TrialFn trial) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  std::vector<Partial> partial(workers);
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < trials; i += workers) trial(i, partial[w]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  Partial total{};
  for (const auto& p : partial) total += p;
  return total;
}

struct Count {
  std::size_t hits = 0;
  Count& operator+=(const Count& o) {
    hits += o.hits;
    return *this;
  }
};

RateEstimate rate(std::size_t hits, std::size_t n) {
  RateEstimate r;
  r.samples = n;
  if (n == 0) return r;
  r.rate = static_cast<double>(hits) / static_cast<double>(n);
  r.std_error = std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(n));
  return r;
}

ProtocolConfig with_param(ProtocolConfig c, SweepParam p, std::size_t v) {
  switch (p) {
    case SweepParam::N: c.N = v; break;
    case SweepParam::M: c.M = v; break;
    case SweepParam::K: c.K = v; break;
  }
  return c;
}

}  // namespace

std::string_view to_string(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::N: return "N";
    case SweepParam::M: return "M";
    case SweepParam::K: return "K";
  }
  return "?";
}

std::optional<SweepParam> parse_sweep_param(std::string_view s) noexcept {
  for (auto p : {SweepParam::N, SweepParam::M, SweepParam::K}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

bool EstimateRow::within(double sigmas) const noexcept {
  const double p0 = std::clamp(closed_form, 0.0, 1.0);
  const double se0 = trials ? std::sqrt(p0 * (1.0 - p0) / static_cast<double>(trials)) : 0.0;
  return std::abs(empirical - closed_form) <= sigmas * std::max(std_error, se0);
}

double abort_probability(std::size_t n, double p, double tau) {
  if (n == 0) return 0.0;
  if (tau <= 0.0) return 1.0 - std::pow(1.0 - p, static_cast<double>(n));
  // P(failures > tau * n), summed in log space.
  double total = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (static_cast<double>(k) / static_cast<double>(n) <= tau) continue;
    if (p <= 0.0) break;
    if (p >= 1.0) return 1.0;
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                            k * std::log(p) + (n - k) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return std::clamp(total, 0.0, 1.0);
}

double closed_form_detection(const AttackScenario& scenario, const ProtocolConfig& config) {
  if (std::holds_alternative<NoAttack>(scenario)) return 0.0;
  if (std::holds_alternative<InterceptResend>(scenario)) return abort_probability(config.M, 0.25, config.tau);
  if (const auto* e = std::get_if<Entangling>(&scenario)) {
    return abort_probability(config.M, ue_detection_probability(e->params), config.tau);
  }
  if (std::holds_alternative<BobBellCheat>(scenario)) return abort_probability(config.K, 0.5, config.tau);
  throw std::invalid_argument("no detection rate for scenario '" + std::string(scenario_name(scenario)) +
                              "'; use alice_attack_report");
}

EstimateRow estimate_detection_rate(const ExperimentSpec& spec) {
  if (spec.trials == 0) throw std::invalid_argument("estimate_detection_rate: trials must be at least 1");
  spec.config.validate();
  const auto& sc = spec.scenario;
  EstimateRow row;
  row.closed_form = closed_form_detection(sc, spec.config);
  row.trials = spec.trials;
  row.parameter = static_cast<double>(std::holds_alternative<BobBellCheat>(sc)  ? spec.config.K
                                      : std::holds_alternative<NoAttack>(sc)    ? spec.config.N
                                                                                : spec.config.M);

  const auto count = run_trials<Count>(spec.trials, spec.workers, [&](std::size_t i, Count& c) {
    const std::uint64_t trial_seed = derive_seed(spec.config.seed, i);
    Rng rng(trial_seed);
    std::vector<Choice> choices;
    std::vector<MessagePair> pairs;
    draw_inputs(spec.config.N, rng, choices, pairs);
    ProtocolConfig cfg = spec.config;
    cfg.seed = derive_seed(trial_seed, 1);

    bool detected = false;
    if (std::holds_alternative<BobBellCheat>(sc)) {
      detected = run_bell_cheat(cfg, pairs, rng).detected;
    } else {
      ChannelHooks hooks;
      if (std::holds_alternative<InterceptResend>(sc)) {
        hooks.to_alice = [](Sequence& s, Rng& r) { s = eve_intercept_resend(std::move(s), r); };
      } else if (const auto* e = std::get_if<Entangling>(&sc)) {
        hooks.to_alice = [p = e->params](Sequence& s, Rng&) { s = eve_entangling_attack(std::move(s), p).slots; };
      }
      const auto t = run_protocol(cfg, choices, pairs, hooks);
      detected = std::holds_alternative<NoAttack>(sc) ? t.verdict != Verdict::Success
                                                       : t.verdict == Verdict::AbortChannelToAlice;
    }
    if (detected) ++c.hits;
  });

  const auto r = rate(count.hits, spec.trials);
  row.empirical = r.rate;
  row.std_error = r.std_error;
  return row;
}

std::vector<EstimateRow> sweep_curve(const ExperimentSpec& spec) {
  if (!spec.sweep || spec.sweep->values.empty()) throw std::invalid_argument("sweep_curve: empty parameter range");
  std::vector<EstimateRow> rows;
  rows.reserve(spec.sweep->values.size());
  for (std::size_t v : spec.sweep->values) {
    ExperimentSpec point = spec;
    point.sweep.reset();
    point.config = with_param(spec.config, spec.sweep->param, v);
    rows.push_back(estimate_detection_rate(point));
  }
  return rows;
}

double obliviousness_report(Choice choice, int chosen_bit) {
  if (chosen_bit != 0 && chosen_bit != 1) throw std::invalid_argument("obliviousness_report: bit must be 0 or 1");
  const PureState carrier = prepare(prep_state(choice));
  auto encoded = [&](int unchosen) {
    const auto b = static_cast<std::uint8_t>(chosen_bit);
    const auto u = static_cast<std::uint8_t>(unchosen);
    const MessagePair pair = choice == Choice::Z ? MessagePair{b, u} : MessagePair{u, b};
    return DensityMatrix::pure(apply_gate(carrier, pauli_code(pair), 0));
  };
  return trace_distance(encoded(0), encoded(1));
}

double expected_alice_bit_error(ResendPolicy policy) noexcept {
  switch (policy) {
    case ResendPolicy::GuessChoice: return 0.75 * 0.5 * 0.5;
    case ResendPolicy::Collapsed: return 0.5 * 0.5;
    case ResendPolicy::UniformFour: return 0.75 * 0.5;
  }
  return 0.0;
}

namespace {

struct AliceTotals {
  std::size_t attacked = 0, conclusive = 0, false_conclusive = 0, payload = 0, bit_errors = 0, dummy_errors = 0;
  AliceTotals& operator+=(const AliceTotals& o) {
    attacked += o.attacked;
    conclusive += o.conclusive;
    false_conclusive += o.false_conclusive;
    payload += o.payload;
    bit_errors += o.bit_errors;
    dummy_errors += o.dummy_errors;
    return *this;
  }
};

}  // namespace

AliceAttackReport alice_attack_report(std::size_t trials, AliceVariant variant, const ProtocolConfig& config,
                                      ResendPolicy policy, unsigned workers) {
  if (trials == 0) throw std::invalid_argument("alice_attack_report: trials must be at least 1");
  config.validate();
  const auto totals = run_trials<AliceTotals>(trials, workers, [&](std::size_t i, AliceTotals& acc) {
    Rng rng(derive_seed(config.seed, i));
    std::vector<Choice> choices;
    std::vector<MessagePair> pairs;
    draw_inputs(config.N, rng, choices, pairs);
    const auto run = run_alice_attack(config, choices, pairs, policy, rng);
    acc += AliceTotals{run.attacked, run.conclusive, run.false_conclusive,
                       run.payload,  run.bit_errors, run.dummy_errors};
  });
  AliceAttackReport report;
  report.trials = trials;
  report.variant = variant;
  report.conclusive = rate(totals.conclusive, totals.attacked);
  report.bit_error = rate(totals.bit_errors, totals.payload);
  report.dummy_error = rate(totals.dummy_errors, totals.payload);
  report.false_conclusive = totals.false_conclusive;
  return report;
}

namespace {

struct HonestTotals {
  std::size_t runs = 0, slots = 0, decode_errors = 0, aborts = 0;
  HonestTotals& operator+=(const HonestTotals& o) {
    runs += o.runs;
    slots += o.slots;
    decode_errors += o.decode_errors;
    aborts += o.aborts;
    return *this;
  }
};

}  // namespace

HonestBatchReport honest_batch(std::size_t runs, std::uint64_t seed, std::size_t max_n, unsigned workers) {
  if (max_n == 0) throw std::invalid_argument("honest_batch: max_n must be at least 1");
  const auto totals = run_trials<HonestTotals>(runs, workers, [&](std::size_t i, HonestTotals& acc) {
    const std::uint64_t trial_seed = derive_seed(seed, i);
    Rng rng(trial_seed);
    ProtocolConfig cfg;
    cfg.N = 1 + uniform_index(rng, max_n);
    cfg.K = uniform_index(rng, 4);
    cfg.M = uniform_index(rng, 9);
    cfg.M2 = uniform_index(rng, 9);
    cfg.seed = derive_seed(trial_seed, 1);
    std::vector<Choice> choices;
    std::vector<MessagePair> pairs;
    draw_inputs(cfg.N, rng, choices, pairs);

    const auto t = run_protocol(cfg, choices, pairs);
    ++acc.runs;
    if (t.verdict != Verdict::Success) {
      ++acc.aborts;
      return;
    }
    acc.slots += t.decoded.size();
    for (std::size_t k = 0; k < t.decoded.size(); ++k) {
      if (t.decoded[k] != pairs[k].chosen(choices[k])) ++acc.decode_errors;
    }
  });
  return {totals.runs, totals.slots, totals.decode_errors, totals.aborts};
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string estimate_csv_header() { return "parameter,empirical,closed_form,stderr,trials"; }

std::string to_csv(const EstimateRow& row) {
  return format_number(row.parameter) + ',' + format_number(row.empirical) + ',' + format_number(row.closed_form) +
         ',' + format_number(row.std_error) + ',' + std::to_string(row.trials);
}

std::string to_json_line(const EstimateRow& row) {
  return "{\"parameter\":" + format_number(row.parameter) + ",\"empirical\":" + format_number(row.empirical) +
         ",\"closed_form\":" + format_number(row.closed_form) + ",\"stderr\":" + format_number(row.std_error) +
         ",\"trials\":" + std::to_string(row.trials) + "}";
}

}  // namespace qot
