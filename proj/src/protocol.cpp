#include "qot/protocol.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "sampling.hpp"

namespace qot {

std::string_view to_string(PrepState s) noexcept {
  switch (s) {
    case PrepState::Zero: return "0";
    case PrepState::One: return "1";
    case PrepState::Plus: return "+";
    case PrepState::Minus: return "-";
  }
  return "?";
}

std::optional<PrepState> parse_prep_state(std::string_view s) noexcept {
  for (PrepState p : kPrepStates) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

PureState prepare(PrepState s) { return eigenstate(basis_of(s), bit_of(s)); }

Gate pauli_code(MessagePair pair) noexcept {
  switch ((pair.m0 & 1) << 1 | (pair.m1 & 1)) {
    case 0b00: return Gate::I;
    case 0b01: return Gate::Z;
    case 0b10: return Gate::X;
    default: return Gate::Y;
  }
}

MessagePair pauli_decode(Gate gate) {
  switch (gate) {
    case Gate::I: return {0, 0};
    case Gate::Z: return {0, 1};
    case Gate::X: return {1, 0};
    case Gate::Y: return {1, 1};
    case Gate::H: break;
  }
  throw std::invalid_argument("pauli_decode: H does not encode a message pair");
}

void ProtocolConfig::validate() const {
  if (N == 0) throw std::invalid_argument("ProtocolConfig: N must be at least 1");
  if (!(tau >= 0.0 && tau < 1.0)) throw std::invalid_argument("ProtocolConfig: tau must lie in [0, 1)");
}

std::size_t BobRecord::count(Role role) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(), [role](const BobSlotRecord& r) { return r.role == role; }));
}

namespace {

PrepState random_decoy_state(Rng& rng) { return kPrepStates[uniform_index(rng, kPrepStates.size())]; }

// Marks `count` random positions among `total` as decoys.
std::vector<bool> decoy_mask(std::size_t total, std::size_t count, Rng& rng) {
  std::vector<bool> mask(total, false);
  for (std::size_t p : detail::sample_without_replacement(total, count, rng)) mask[p] = true;
  return mask;
}

}  // namespace

PreparedSequence bob_prepare_sequence(std::span<const Choice> choices, std::size_t n_payload,
                                      std::size_t decoys, Rng& rng) {
  if (n_payload > choices.size() || (choices.size() - n_payload) % 2 != 0) {
    throw std::invalid_argument("bob_prepare_sequence: expected N + 2K choices, got " +
                                std::to_string(choices.size()) + " for N = " + std::to_string(n_payload));
  }
  const std::size_t total = choices.size() + decoys;
  const auto mask = decoy_mask(total, decoys, rng);

  PreparedSequence out;
  out.slots.reserve(total);
  out.record.slots.reserve(total);
  std::size_t next_choice = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    BobSlotRecord rec;
    if (mask[pos]) {
      rec = {Role::Decoy, random_decoy_state(rng)};
    } else {
      const Role role = next_choice < n_payload ? Role::Payload : Role::Loyalty;
      rec = {role, prep_state(choices[next_choice++])};
    }
    out.record.slots.push_back(rec);
    out.slots.push_back({static_cast<std::uint32_t>(pos), prepare(rec.prepared)});
  }
  return out;
}

std::vector<Choice> loyalty_choices(std::size_t K) {
  std::vector<Choice> out(2 * K);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = choice_from_bit(static_cast<int>(i % 2));
  return out;
}

std::vector<DecoyAnnouncement> publish_decoys(const BobRecord& record) {
  std::vector<DecoyAnnouncement> out;
  for (std::size_t pos = 0; pos < record.slots.size(); ++pos) {
    if (record.slots[pos].role == Role::Decoy) out.push_back({pos, record.slots[pos].prepared});
  }
  return out;
}

ChannelCheckResult check_decoys(Sequence slots, std::span<const DecoyAnnouncement> published, double tau,
                                Rng& rng) {
  std::vector<bool> is_decoy(slots.size(), false);
  for (const auto& d : published) {
    if (d.position >= slots.size()) {
      throw std::out_of_range("decoy position " + std::to_string(d.position) + " past end of a " +
                              std::to_string(slots.size()) + "-slot sequence");
    }
    if (is_decoy[d.position]) {
      throw std::invalid_argument("decoy position " + std::to_string(d.position) + " published twice");
    }
    is_decoy[d.position] = true;
  }

  ChannelCheckResult result;
  result.check.published.assign(published.begin(), published.end());
  result.check.outcomes.reserve(published.size());
  for (const auto& d : published) {
    const auto m = measure(slots[d.position].state, basis_of(d.state), 0, rng);
    result.check.outcomes.push_back(m.bit);
    if (m.bit != bit_of(d.state)) ++result.check.errors;
  }
  if (!published.empty()) {
    result.check.error_rate = static_cast<double>(result.check.errors) / static_cast<double>(published.size());
  }
  result.check.abort = result.check.error_rate > tau;

  result.remaining.reserve(slots.size() - published.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!is_decoy[i]) result.remaining.push_back(std::move(slots[i]));
  }
  return result;
}

BasisOracle honest_basis_oracle(const BobRecord& record) {
  return [slots = record.slots](std::uint32_t label) {
    if (label >= slots.size()) throw std::out_of_range("basis request for unknown slot");
    return basis_of(slots[label].prepared);
  };
}

LoyaltyTestResult alice_test_loyalty(Sequence slots, std::size_t K, double tau, Rng& rng,
                                     const BasisOracle& bob) {
  if (K > slots.size()) {
    throw std::invalid_argument("alice_test_loyalty: K = " + std::to_string(K) + " exceeds the " +
                                std::to_string(slots.size()) + " remaining slots");
  }
  LoyaltyTestResult result;
  auto& test = result.test;
  test.positions = detail::sample_without_replacement(slots.size(), K, rng);

  std::vector<bool> consumed(slots.size(), false);
  for (std::size_t pos : test.positions) {
    consumed[pos] = true;
    const Basis basis = bob(slots[pos].label);
    const auto m = measure(slots[pos].state, basis, 0, rng);
    test.published.push_back(basis);
    test.outcomes.push_back(m.bit);
    if (m.bit != 0) ++test.failures;
  }
  if (K > 0) test.error_rate = static_cast<double>(test.failures) / static_cast<double>(K);
  test.dishonest = test.error_rate > tau;

  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!consumed[i]) result.remaining.push_back(std::move(slots[i]));
  }
  return result;
}

std::vector<std::size_t> bob_plan_reorder(const Sequence& remaining, const BobRecord& record,
                                          std::span<const Choice> intended) {
  const std::size_t n = intended.size();
  if (n > remaining.size()) throw std::runtime_error("bob_plan_reorder: fewer slots left than intended choices");

  // Intent index of each payload label: payload slots in label order.
  std::vector<std::size_t> intent(record.slots.size(), SIZE_MAX);
  for (std::size_t label = 0, k = 0; label < record.slots.size(); ++label) {
    if (record.slots[label].role == Role::Payload) intent[label] = k++;
  }
  auto rec = [&](std::size_t pos) -> const BobSlotRecord& {
    const auto label = remaining[pos].label;
    if (label >= record.slots.size()) throw std::runtime_error("bob_plan_reorder: slot is not Bob's");
    return record.slots[label];
  };

  std::vector<std::size_t> target(n, SIZE_MAX);
  std::vector<bool> used(remaining.size(), false);
  for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
    const auto& r = rec(pos);
    if (r.role != Role::Payload) continue;
    const std::size_t i = intent[remaining[pos].label];
    if (i < n && target[i] == SIZE_MAX && r.prepared == prep_state(intended[i])) {
      target[i] = pos;
      used[pos] = true;
    }
  }
  for (const Role preferred : {Role::Payload, Role::Loyalty}) {
    for (std::size_t i = 0; i < n; ++i) {
      if (target[i] != SIZE_MAX) continue;
      for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
        const auto& r = rec(pos);
        if (!used[pos] && r.role == preferred && r.prepared == prep_state(intended[i])) {
          target[i] = pos;
          used[pos] = true;
          break;
        }
      }
    }
  }
  if (std::find(target.begin(), target.end(), SIZE_MAX) != target.end()) {
    throw std::runtime_error("bob_plan_reorder: not enough surviving slots to realize the intended choices");
  }

  std::vector<std::size_t> perm = std::move(target);
  for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
    if (!used[pos]) perm.push_back(pos);
  }
  return perm;
}

Sequence bob_reorder(Sequence slots, std::span<const std::size_t> permutation, std::size_t keep) {
  if (permutation.size() != slots.size()) throw std::invalid_argument("bob_reorder: permutation size mismatch");
  std::vector<bool> seen(slots.size(), false);
  for (std::size_t p : permutation) {
    if (p >= slots.size() || seen[p]) throw std::invalid_argument("bob_reorder: not a permutation");
    seen[p] = true;
  }
  if (keep > slots.size()) throw std::invalid_argument("bob_reorder: keep exceeds sequence length");

  Sequence out;
  out.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) out.push_back(std::move(slots[permutation[k]]));
  return out;
}

Sequence alice_encode(Sequence slots, std::span<const MessagePair> pairs) {
  if (pairs.size() != slots.size()) {
    throw std::invalid_argument("alice_encode: " + std::to_string(pairs.size()) + " pairs for " +
                                std::to_string(slots.size()) + " slots");
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    slots[i].state = apply_gate(slots[i].state, pauli_code(pairs[i]), 0);
  }
  return slots;
}

DecoyInsertion alice_insert_decoys(Sequence slots, std::size_t count, Rng& rng) {
  const std::size_t total = slots.size() + count;
  const auto mask = decoy_mask(total, count, rng);

  DecoyInsertion out;
  out.slots.reserve(total);
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < total; ++pos) {
    if (mask[pos]) {
      const PrepState s = random_decoy_state(rng);
      const auto label = kAliceDecoyLabelBase + static_cast<std::uint32_t>(out.decoys.size());
      out.decoys.push_back({pos, s});
      out.slots.push_back({label, prepare(s)});
    } else {
      out.slots.push_back(std::move(slots[next++]));
    }
  }
  return out;
}

DecodeResult bob_check_and_decode(Sequence slots, std::span<const DecoyAnnouncement> publication,
                                  std::span<const Choice> bases, double tau, Rng& rng) {
  auto checked = check_decoys(std::move(slots), publication, tau, rng);
  DecodeResult out;
  out.check = std::move(checked.check);
  if (out.check.abort) return out;
  if (checked.remaining.size() != bases.size()) {
    throw std::invalid_argument("bob_check_and_decode: " + std::to_string(checked.remaining.size()) +
                                " payload slots for " + std::to_string(bases.size()) + " bases");
  }
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const auto m = measure(checked.remaining[i].state, basis_of(bases[i]), 0, rng);
    out.outcomes.push_back(m.bit);
    out.bits.push_back(static_cast<std::uint8_t>(m.bit));
  }
  return out;
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Success: return "success";
    case Verdict::AbortChannelToAlice: return "abort-channel-to-alice";
    case Verdict::AbortDishonestBob: return "abort-dishonest-bob";
    case Verdict::AbortChannelToBob: return "abort-channel-to-bob";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) noexcept {
  for (Verdict v : {Verdict::Success, Verdict::AbortChannelToAlice, Verdict::AbortDishonestBob,
                    Verdict::AbortChannelToBob}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

Transcript run_protocol(const ProtocolConfig& config, std::span<const Choice> choices,
                        std::span<const MessagePair> pairs, const ChannelHooks& hooks) {
  config.validate();
  if (choices.size() != config.N || pairs.size() != config.N) {
    throw std::invalid_argument("run_protocol: choices and pairs must both have length N");
  }
  Rng rng(config.seed);

  Transcript t;
  t.config = config;
  t.choices.assign(choices.begin(), choices.end());
  t.pairs.assign(pairs.begin(), pairs.end());
  t.prepared = t.choices;
  const auto loyalty = loyalty_choices(config.K);
  t.prepared.insert(t.prepared.end(), loyalty.begin(), loyalty.end());

  // Step 1
  auto bob = bob_prepare_sequence(t.prepared, config.N, config.M, rng);
  t.qubits_prepared = bob.slots.size();
  Sequence wire = std::move(bob.slots);
  if (hooks.to_alice) hooks.to_alice(wire, rng);

  // Step 2
  const auto published = publish_decoys(bob.record);
  auto channel = alice_check_channel(std::move(wire), published, config.tau, rng);
  t.to_alice = std::move(channel.check);
  if (t.to_alice.abort) {
    t.verdict = Verdict::AbortChannelToAlice;
    return t;
  }
  auto tested = alice_test_loyalty(std::move(channel.remaining), config.K, config.tau, rng,
                                   honest_basis_oracle(bob.record));
  t.loyalty = std::move(tested.test);
  if (t.loyalty.dishonest) {
    t.verdict = Verdict::AbortDishonestBob;
    return t;
  }

  // Step 3
  t.permutation = bob_plan_reorder(tested.remaining, bob.record, choices);
  std::vector<Choice> bases;
  bases.reserve(config.N);
  for (std::size_t k = 0; k < config.N; ++k) {
    const auto label = tested.remaining[t.permutation[k]].label;
    bases.push_back(basis_of(bob.record.slots[label].prepared) == Basis::Z ? Choice::Z : Choice::X);
  }
  Sequence ordered = bob_reorder(std::move(tested.remaining), t.permutation, config.N);

  // Steps 4-5
  Sequence encoded = alice_encode(std::move(ordered), pairs);
  auto inserted = alice_insert_decoys(std::move(encoded), config.M2, rng);
  t.qubits_prepared += inserted.decoys.size();
  wire = std::move(inserted.slots);
  if (hooks.to_bob) hooks.to_bob(wire, rng);

  // Step 6
  auto decoded = bob_check_and_decode(std::move(wire), inserted.decoys, bases, config.tau, rng);
  t.to_bob = std::move(decoded.check);
  if (t.to_bob.abort) {
    t.verdict = Verdict::AbortChannelToBob;
    return t;
  }
  t.decode_outcomes = std::move(decoded.outcomes);
  t.decoded = std::move(decoded.bits);
  t.verdict = Verdict::Success;
  return t;
}

void draw_inputs(std::size_t N, Rng& rng, std::vector<Choice>& choices, std::vector<MessagePair>& pairs) {
  choices.resize(N);
  pairs.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    choices[i] = choice_from_bit(random_bit(rng));
    pairs[i].m0 = static_cast<std::uint8_t>(random_bit(rng));
    pairs[i].m1 = static_cast<std::uint8_t>(random_bit(rng));
  }
}

}  // namespace qot
