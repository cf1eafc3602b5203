#pragma once

// Attacks on the protocol: Eve on the quantum channel (intercept-and-resend,
// per-qubit entangling probe), a dishonest Bob holding Bell partners of his
// slots, and a dishonest Alice measuring Bob's slots to learn his choices.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qot/protocol.hpp"

namespace qot {

using AncillaVector = Eigen::Vector4cd;
/// Columns are U_e|0>|E> and U_e|1>|E>; row index = qubit * 4 + ancilla.
using ProbeIsometry = Eigen::Matrix<std::complex<double>, 8, 2>;

/// Eve's probe:
///   U_e|0>|E> = a|0>|e00> + b|1>|e01>
///   U_e|1>|E> = c|0>|e10> + d|1>|e11>
/// with the ancilla held as two qubits (dimension 4).
struct UeParams {
  std::complex<double> a{1.0}, b{0.0}, c{0.0}, d{1.0};
  AncillaVector e00 = AncillaVector::UnitX();
  AncillaVector e01 = AncillaVector::UnitX();
  AncillaVector e10 = AncillaVector::UnitX();
  AncillaVector e11 = AncillaVector::UnitX();

  /// Throws std::invalid_argument unless |a|^2+|b|^2 = |c|^2+|d|^2 = 1 and
  /// every e_ij is a unit vector (1e-10), and the two output columns are
  /// orthogonal (1e-10), i.e. the probe is an isometry.
  void validate() const;
  ProbeIsometry isometry() const;

  /// a = d = 1, b = c = 0, e00 = e11 = `ancilla`.
  static UeParams undetectable(const AncillaVector& ancilla = AncillaVector::UnitX());
  /// Splits an isometry's columns into amplitudes and unit ancilla states.
  static UeParams from_isometry(const ProbeIsometry& v);
};

/// Text format, one `key = values` per line, `#` starts a comment:
///   a = re im          (likewise b, c, d)
///   e00 = re im re im re im re im   (likewise e01, e10, e11)
/// Every key must appear exactly once. Throws std::invalid_argument.
UeParams read_ue_params(std::istream& in);
void write_ue_params(std::ostream& out, const UeParams& p);

enum class ResendPolicy : std::uint8_t {
  /// Conclusive slots: resend the identified state. Inconclusive: guess the
  /// choice uniformly and resend |0> or |+>.
  GuessChoice,
  /// Resend the post-measurement state of every slot.
  Collapsed,
  /// Conclusive slots: resend the identified state. Inconclusive: resend one
  /// of |0>, |1>, |+>, |-> uniformly.
  UniformFour,
};

std::string_view to_string(ResendPolicy p) noexcept;
std::optional<ResendPolicy> parse_resend_policy(std::string_view s) noexcept;

struct NoAttack {};
struct InterceptResend {};
struct Entangling {
  UeParams params;
};
struct BobBellCheat {};
struct AliceMeasureResend {
  ResendPolicy policy = ResendPolicy::GuessChoice;
};
struct AliceMeasureResendDummy {
  ResendPolicy policy = ResendPolicy::GuessChoice;
};

/// Exactly one adversary per run; NoAttack is the honest run.
using AttackScenario =
    std::variant<NoAttack, InterceptResend, Entangling, BobBellCheat, AliceMeasureResend, AliceMeasureResendDummy>;

/// "honest", "intercept", "entangling", "bell-cheat", "alice-resend", "alice-resend-dummy".
std::string_view scenario_name(const AttackScenario& s) noexcept;
/// Throws std::invalid_argument for an unknown name. `entangling` uses
/// `params` if given, otherwise UeParams::undetectable().
AttackScenario scenario_from_name(std::string_view name, const std::optional<UeParams>& params = std::nullopt);
std::vector<std::string_view> scenario_names();

// ---- Eve -------------------------------------------------------------------

/// Measures every carried qubit in a uniformly random basis and forwards the
/// collapsed state.
Sequence eve_intercept_resend(Sequence slots, Rng& rng);

struct EntangledSequence {
  Sequence slots;                     ///< each slot is now qubit (x) 2-qubit ancilla
  std::vector<std::uint32_t> probed;  ///< labels of the slots Eve holds an ancilla for
};

/// Applies U_e to every slot. Each slot must be a single qubit; the result
/// is a three-qubit state whose qubits 1..2 are Eve's ancilla.
EntangledSequence eve_entangling_attack(Sequence slots, const UeParams& params);

/// Probability that a decoy drawn uniformly from {|0>,|1>,|+>,|->} and
/// measured in its own basis after U_e reads the wrong bit.
double ue_detection_probability(const UeParams& params);

/// Trace distance between Eve's ancilla states when Bob sent |0> and when he
/// sent |+>.
double ue_leakage(const UeParams& params);

enum class UeSampleKind : std::uint8_t { Haar, Undetectable, NearUndetectable };

/// Random probe. Haar: a random 8x2 isometry. Undetectable: a = d = 1,
/// b = c = 0 with a random shared ancilla state. NearUndetectable: an
/// undetectable probe followed by a random unitary of strength `epsilon`.
UeParams sample_ue_params(Rng& rng, UeSampleKind kind, double epsilon = 1e-3);

// ---- dishonest Bob -----------------------------------------------------------

/// Every payload and loyalty slot is qubit 0 of a fresh |Phi+>; qubit 1 is
/// the half Bob keeps. The M decoys are honest. Record `prepared` fields of
/// non-decoy slots are meaningless.
PreparedSequence bob_bell_cheat(const ProtocolConfig& config, Rng& rng);

/// A basis answer for each tested slot, uniformly random.
BasisOracle random_basis_oracle(Rng& rng);

/// Bell measurement on (carried qubit, kept half): Phi+ -> 00, Psi+ -> 10,
/// Psi- -> 11, Phi- -> 01. Throws std::invalid_argument if the pair is not in
/// a Bell state.
MessagePair bob_bell_cheat_readout(const Slot& returned);

struct BellCheatRun {
  bool detected = false;             ///< loyalty test caught Bob
  bool channel_abort = false;        ///< a decoy check aborted
  std::vector<MessagePair> readout;  ///< both bits of every pair, when not detected
};

/// Full run with a Bell-cheating Bob against honest Alice.
BellCheatRun run_bell_cheat(const ProtocolConfig& config, std::span<const MessagePair> pairs, Rng& rng);

// ---- dishonest Alice ---------------------------------------------------------

struct AliceMeasurement {
  std::vector<std::optional<Choice>> guesses;  ///< per slot, in sequence order
  Sequence slots;                              ///< what Alice continues with
};

/// Measures each slot in a random basis. Outcome |1> proves Bob sent |+>,
/// outcome |-> proves he sent |0>; those are the only conclusive guesses.
AliceMeasurement alice_measure_resend(Sequence slots, ResendPolicy policy, Rng& rng);

struct AliceAttackRun {
  std::size_t attacked = 0;          ///< slots Alice measured
  std::size_t conclusive = 0;        ///< of those, conclusive guesses
  std::size_t false_conclusive = 0;  ///< conclusive guesses contradicting Bob's record
  std::size_t payload = 0;           ///< bits Bob decoded
  std::size_t bit_errors = 0;        ///< decoded bit != m_j
  std::size_t dummy_errors = 0;      ///< dummy-message readout errors
};

/// Honest Bob against an Alice who runs her checks honestly, then measures
/// and resends every remaining slot before reordering. In the dummy-message
/// readout a wrong carrier bit is replaced by a fair coin.
AliceAttackRun run_alice_attack(const ProtocolConfig& config, std::span<const Choice> choices,
                                std::span<const MessagePair> pairs, ResendPolicy policy, Rng& rng);

}  // namespace qot
