#pragma once

// Honest Alice and honest Bob for the single-qubit one-out-of-two oblivious
// transfer: Bob encodes each choice in the basis of a nonorthogonal state
// (|0> or |+>), Alice writes her two bits with a Pauli gate, and Bob reads
// back only the bit that lives in his basis; the other bit is a global phase.
//
// Each phase is a free function over a `Sequence` so adversaries can be
// spliced in between phases (see adversary.hpp). `run_protocol` composes the
// phases in order and records everything in a `Transcript`.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qot/qsim.hpp"
#include "qot/random.hpp"

namespace qot {

/// Bob's choice bit j. Choice::Z (j = 0) prepares |0> and receives m0;
/// Choice::X (j = 1) prepares |+> and receives m1.
enum class Choice : std::uint8_t { Z = 0, X = 1 };

constexpr int bit_of(Choice c) noexcept { return static_cast<int>(c); }
constexpr Choice choice_from_bit(int bit) noexcept { return bit ? Choice::X : Choice::Z; }
constexpr Basis basis_of(Choice c) noexcept { return c == Choice::Z ? Basis::Z : Basis::X; }

/// The four single-qubit states that appear on the wire.
enum class PrepState : std::uint8_t { Zero, One, Plus, Minus };

inline constexpr std::array<PrepState, 4> kPrepStates{PrepState::Zero, PrepState::One, PrepState::Plus,
                                                      PrepState::Minus};

constexpr Basis basis_of(PrepState s) noexcept {
  return (s == PrepState::Zero || s == PrepState::One) ? Basis::Z : Basis::X;
}
constexpr int bit_of(PrepState s) noexcept { return (s == PrepState::One || s == PrepState::Minus) ? 1 : 0; }
constexpr PrepState prep_state(Basis b, int bit) noexcept {
  if (b == Basis::Z) return bit ? PrepState::One : PrepState::Zero;
  return bit ? PrepState::Minus : PrepState::Plus;
}
constexpr PrepState prep_state(Choice c) noexcept { return c == Choice::Z ? PrepState::Zero : PrepState::Plus; }

/// "0", "1", "+", "-".
std::string_view to_string(PrepState s) noexcept;
std::optional<PrepState> parse_prep_state(std::string_view s) noexcept;
PureState prepare(PrepState s);

struct MessagePair {
  std::uint8_t m0 = 0;
  std::uint8_t m1 = 0;

  std::uint8_t chosen(Choice c) const noexcept { return c == Choice::Z ? m0 : m1; }
  friend bool operator==(const MessagePair&, const MessagePair&) = default;
};

/// 00 -> I, 01 -> Z, 10 -> X, 11 -> Y (read as m0 m1).
Gate pauli_code(MessagePair pair) noexcept;
/// Inverse of pauli_code; throws std::invalid_argument for Gate::H.
MessagePair pauli_decode(Gate gate);

enum class Role : std::uint8_t { Payload, Loyalty, Decoy };

/// One qubit in transit. Qubit 0 of `state` is the carried qubit; any other
/// qubits belong to whoever holds them off the wire (a dishonest Bob's Bell
/// partner, Eve's ancilla) and the honest parties never act on them.
/// `label` is the slot's position in the sequence its creator sent.
struct Slot {
  std::uint32_t label = 0;
  PureState state = prepare(PrepState::Zero);
};

using Sequence = std::vector<Slot>;

struct ProtocolConfig {
  std::size_t N = 1;   ///< payload slots (bits received)
  std::size_t M = 0;   ///< Bob's decoys
  std::size_t K = 0;   ///< loyalty tests; Bob prepares 2K loyalty slots
  std::size_t M2 = 0;  ///< Alice's decoys
  double tau = 0.0;    ///< abort when an observed error rate exceeds tau
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument if N == 0 or tau is outside [0, 1).
  void validate() const;
  std::size_t step1_length() const noexcept { return N + M + 2 * K; }
  friend bool operator==(const ProtocolConfig&, const ProtocolConfig&) = default;
};

/// Bob's private bookkeeping, indexed by slot label.
struct BobSlotRecord {
  Role role = Role::Payload;
  PrepState prepared = PrepState::Zero;
};

struct BobRecord {
  std::vector<BobSlotRecord> slots;

  std::size_t count(Role role) const noexcept;
};

struct DecoyAnnouncement {
  std::size_t position = 0;
  PrepState state = PrepState::Zero;
  friend bool operator==(const DecoyAnnouncement&, const DecoyAnnouncement&) = default;
};

struct PreparedSequence {
  Sequence slots;
  BobRecord record;
};

/// Step 1. The first N entries of `choices` are payload intentions, the
/// remaining 2K are loyalty slots. M decoys drawn uniformly from the four
/// states are placed at a uniformly random subset of positions; the other
/// slots keep the order of `choices`. Labels equal as-sent positions.
PreparedSequence bob_prepare_sequence(std::span<const Choice> choices, std::size_t n_payload,
                                      std::size_t decoys, Rng& rng);

/// Loyalty preparations: K copies of each choice, alternating Z, X, Z, X...
/// Any K tests then leave enough of both choices to backfill the payload.
std::vector<Choice> loyalty_choices(std::size_t K);

/// What Bob publishes in Step 2: his decoys' positions and states.
std::vector<DecoyAnnouncement> publish_decoys(const BobRecord& record);

struct ChannelCheck {
  std::vector<DecoyAnnouncement> published;
  std::vector<int> outcomes;
  std::size_t errors = 0;
  double error_rate = 0.0;
  bool abort = false;
};

struct ChannelCheckResult {
  ChannelCheck check;
  Sequence remaining;
};

/// Measures each announced decoy in its announced basis, counts mismatches,
/// aborts iff errors / decoys > tau, and removes the decoys. Used by Alice in
/// Step 2 and by Bob in Step 6. Throws std::out_of_range for a position past
/// the end and std::invalid_argument for a repeated position.
ChannelCheckResult check_decoys(Sequence slots, std::span<const DecoyAnnouncement> published, double tau,
                                Rng& rng);

inline ChannelCheckResult alice_check_channel(Sequence slots, std::span<const DecoyAnnouncement> published,
                                              double tau, Rng& rng) {
  return check_decoys(std::move(slots), published, tau, rng);
}

/// Bob's answer to "which basis did you prepare slot `label` in?".
using BasisOracle = std::function<Basis(std::uint32_t label)>;

/// Honest Bob answers with the basis he prepared.
BasisOracle honest_basis_oracle(const BobRecord& record);

struct LoyaltyTest {
  std::vector<std::size_t> positions;  ///< indices into the post-decoy sequence, in draw order
  std::vector<Basis> published;
  std::vector<int> outcomes;
  std::size_t failures = 0;
  double error_rate = 0.0;
  bool dishonest = false;
};

struct LoyaltyTestResult {
  LoyaltyTest test;
  Sequence remaining;
};

/// Step 2, second half. Alice draws K positions without replacement, Bob
/// publishes each basis, Alice measures there. Outcome 1 (|1> or |->) is a
/// failure; Bob is dishonest iff failures / K > tau. Tested slots are
/// consumed. Throws std::invalid_argument if K exceeds the sequence length.
LoyaltyTestResult alice_test_loyalty(Sequence slots, std::size_t K, double tau, Rng& rng,
                                     const BasisOracle& bob);

/// Bob's Step-3 request: a permutation of the remaining slots whose first
/// `intended.size()` entries carry his intended choices. A payload slot that
/// already matches its intent stays in place; other intents are filled from
/// the remaining payload slots first, then loyalty slots, of the same
/// preparation. Throws std::runtime_error if that is impossible.
std::vector<std::size_t> bob_plan_reorder(const Sequence& remaining, const BobRecord& record,
                                          std::span<const Choice> intended);

/// Step 3. new[k] = old[permutation[k]]; everything past `keep` is discarded.
/// Throws std::invalid_argument if `permutation` is not a bijection.
Sequence bob_reorder(Sequence slots, std::span<const std::size_t> permutation, std::size_t keep);

/// Step 4. Applies pauli_code(pairs[i]) to the carried qubit of slot i.
Sequence alice_encode(Sequence slots, std::span<const MessagePair> pairs);

struct DecoyInsertion {
  Sequence slots;
  std::vector<DecoyAnnouncement> decoys;
};

/// Label given to Alice's k-th Step-5 decoy.
inline constexpr std::uint32_t kAliceDecoyLabelBase = 0x80000000u;

/// Step 5. Inserts `count` uniformly drawn decoys at a uniformly random
/// subset of positions of the resulting sequence.
DecoyInsertion alice_insert_decoys(Sequence slots, std::size_t count, Rng& rng);

struct DecodeResult {
  ChannelCheck check;
  std::vector<int> outcomes;
  std::vector<std::uint8_t> bits;  ///< empty when the decoy check aborts
};

/// Step 6. Checks Alice's decoys, then measures payload slot i in
/// basis_of(bases[i]). Throws std::invalid_argument if the payload count
/// left after decoy removal differs from bases.size().
DecodeResult bob_check_and_decode(Sequence slots, std::span<const DecoyAnnouncement> publication,
                                  std::span<const Choice> bases, double tau, Rng& rng);

enum class Verdict : std::uint8_t { Success, AbortChannelToAlice, AbortDishonestBob, AbortChannelToBob };

std::string_view to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view s) noexcept;

/// Replayable record of one run. Inputs (config, choices, pairs) are enough
/// to regenerate every other field.
struct Transcript {
  ProtocolConfig config;
  std::vector<Choice> choices;
  std::vector<MessagePair> pairs;

  std::vector<Choice> prepared;  ///< Bob's non-decoy preparations, payload then loyalty
  ChannelCheck to_alice;         ///< Step 2 decoy check
  LoyaltyTest loyalty;
  std::vector<std::size_t> permutation;
  ChannelCheck to_bob;  ///< Step 6 decoy check
  std::vector<int> decode_outcomes;
  std::vector<std::uint8_t> decoded;
  Verdict verdict = Verdict::Success;
  std::size_t qubits_prepared = 0;  ///< Bob's Step-1 qubits plus Alice's Step-5 decoys
};

/// Attack points on the quantum channel. Both default to a clean channel.
struct ChannelHooks {
  std::function<void(Sequence&, Rng&)> to_alice;  ///< Step 1 transmission
  std::function<void(Sequence&, Rng&)> to_bob;    ///< Step 5 transmission
};

/// Steps 1-6 with honest parties. `choices` and `pairs` both have length
/// config.N. The random stream is seeded from config.seed.
Transcript run_protocol(const ProtocolConfig& config, std::span<const Choice> choices,
                        std::span<const MessagePair> pairs, const ChannelHooks& hooks = {});

inline Transcript run_honest(const ProtocolConfig& config, std::span<const Choice> choices,
                             std::span<const MessagePair> pairs) {
  return run_protocol(config, choices, pairs);
}

/// Draws N uniform choices and N uniform pairs from `rng`.
void draw_inputs(std::size_t N, Rng& rng, std::vector<Choice>& choices, std::vector<MessagePair>& pairs);

}  // namespace qot
