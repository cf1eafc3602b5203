#include "qot/adversary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sampling.hpp"

namespace qot {

namespace {

constexpr double kParamTol = 1e-10;

using Complex = std::complex<double>;

double gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform_real(rng);
  const double u2 = uniform_real(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Complex complex_gaussian(Rng& rng) {
  const double re = gaussian(rng);
  return {re, gaussian(rng)};
}

AncillaVector random_unit_ancilla(Rng& rng) {
  AncillaVector v;
  do {
    for (int i = 0; i < 4; ++i) v(i) = complex_gaussian(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

// Probe output for a single-qubit input state.
PureState apply_probe(const ProbeIsometry& v, const PureState& qubit) {
  StateVector<double> out = v.col(0) * qubit[0] + v.col(1) * qubit[1];
  return PureState::normalized(out);
}

}  // namespace

void UeParams::validate() const {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > kParamTol) {
    throw std::invalid_argument("UeParams: |a|^2 + |b|^2 must be 1");
  }
  if (std::abs(std::norm(c) + std::norm(d) - 1.0) > kParamTol) {
    throw std::invalid_argument("UeParams: |c|^2 + |d|^2 must be 1");
  }
  const std::array<const AncillaVector*, 4> es{&e00, &e01, &e10, &e11};
  for (const auto* e : es) {
    if (!e->allFinite() || std::abs(e->norm() - 1.0) > kParamTol) {
      throw std::invalid_argument("UeParams: ancilla states must be unit vectors");
    }
  }
  const ProbeIsometry v = isometry();
  if (std::abs(v.col(0).dot(v.col(1))) > kParamTol) {
    throw std::invalid_argument("UeParams: probe is not an isometry (outputs for |0> and |1> overlap)");
  }
}

ProbeIsometry UeParams::isometry() const {
  ProbeIsometry v;
  v.block<4, 1>(0, 0) = a * e00;
  v.block<4, 1>(4, 0) = b * e01;
  v.block<4, 1>(0, 1) = c * e10;
  v.block<4, 1>(4, 1) = d * e11;
  return v;
}

UeParams UeParams::undetectable(const AncillaVector& ancilla) {
  UeParams p;
  p.e00 = p.e01 = p.e10 = p.e11 = ancilla;
  return p;
}

UeParams UeParams::from_isometry(const ProbeIsometry& v) {
  auto split = [](const AncillaVector& u, Complex& amp, AncillaVector& e) {
    const double n = u.norm();
    amp = n;
    e = n > 0.0 ? AncillaVector(u / n) : AncillaVector(AncillaVector::UnitX());
  };
  UeParams p;
  split(v.block<4, 1>(0, 0), p.a, p.e00);
  split(v.block<4, 1>(4, 0), p.b, p.e01);
  split(v.block<4, 1>(0, 1), p.c, p.e10);
  split(v.block<4, 1>(4, 1), p.d, p.e11);
  return p;
}

UeParams read_ue_params(std::istream& in) {
  std::map<std::string, std::vector<double>> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument("Ue parameters, line " + std::to_string(line_no) + ": expected key = values");
    }
    std::istringstream key_in(line.substr(0, eq));
    std::string key;
    key_in >> key;
    std::istringstream vals_in(line.substr(eq + 1));
    std::vector<double> nums;
    std::string tok;
    while (vals_in >> tok) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::invalid_argument("Ue parameters, line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
    }
    if (!values.emplace(key, std::move(nums)).second) {
      throw std::invalid_argument("Ue parameters: key '" + key + "' given twice");
    }
  }

  auto take = [&](const std::string& key, std::size_t count) {
    auto it = values.find(key);
    if (it == values.end()) throw std::invalid_argument("Ue parameters: missing key '" + key + "'");
    if (it->second.size() != count) {
      throw std::invalid_argument("Ue parameters: key '" + key + "' needs " + std::to_string(count) + " numbers");
    }
    auto v = std::move(it->second);
    values.erase(it);
    return v;
  };
  auto scalar = [&](const std::string& key) {
    const auto v = take(key, 2);
    return Complex(v[0], v[1]);
  };
  auto vec = [&](const std::string& key) {
    const auto v = take(key, 8);
    AncillaVector e;
    for (int i = 0; i < 4; ++i) e(i) = Complex(v[2 * i], v[2 * i + 1]);
    return e;
  };

  UeParams p;
  p.a = scalar("a");
  p.b = scalar("b");
  p.c = scalar("c");
  p.d = scalar("d");
  p.e00 = vec("e00");
  p.e01 = vec("e01");
  p.e10 = vec("e10");
  p.e11 = vec("e11");
  if (!values.empty()) throw std::invalid_argument("Ue parameters: unknown key '" + values.begin()->first + "'");
  p.validate();
  return p;
}

void write_ue_params(std::ostream& out, const UeParams& p) {
  const auto old_precision = out.precision(17);
  auto scalar = [&](const char* key, Complex z) { out << key << " = " << z.real() << ' ' << z.imag() << '\n'; };
  auto vec = [&](const char* key, const AncillaVector& e) {
    out << key << " =";
    for (int i = 0; i < 4; ++i) out << ' ' << e(i).real() << ' ' << e(i).imag();
    out << '\n';
  };
  scalar("a", p.a);
  scalar("b", p.b);
  scalar("c", p.c);
  scalar("d", p.d);
  vec("e00", p.e00);
  vec("e01", p.e01);
  vec("e10", p.e10);
  vec("e11", p.e11);
  out.precision(old_precision);
}

std::string_view to_string(ResendPolicy p) noexcept {
  switch (p) {
    case ResendPolicy::GuessChoice: return "guess-choice";
    case ResendPolicy::Collapsed: return "collapsed";
    case ResendPolicy::UniformFour: return "uniform-four";
  }
  return "?";
}

std::optional<ResendPolicy> parse_resend_policy(std::string_view s) noexcept {
  for (auto p : {ResendPolicy::GuessChoice, ResendPolicy::Collapsed, ResendPolicy::UniformFour}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

namespace {

struct ScenarioName {
  std::string_view operator()(const NoAttack&) const { return "honest"; }
  std::string_view operator()(const InterceptResend&) const { return "intercept"; }
  std::string_view operator()(const Entangling&) const { return "entangling"; }
  std::string_view operator()(const BobBellCheat&) const { return "bell-cheat"; }
  std::string_view operator()(const AliceMeasureResend&) const { return "alice-resend"; }
  std::string_view operator()(const AliceMeasureResendDummy&) const { return "alice-resend-dummy"; }
};

}  // namespace

std::string_view scenario_name(const AttackScenario& s) noexcept { return std::visit(ScenarioName{}, s); }

std::vector<std::string_view> scenario_names() {
  return {"honest", "intercept", "entangling", "bell-cheat", "alice-resend", "alice-resend-dummy"};
}

AttackScenario scenario_from_name(std::string_view name, const std::optional<UeParams>& params) {
  if (name == "honest") return NoAttack{};
  if (name == "intercept") return InterceptResend{};
  if (name == "entangling") return Entangling{params.value_or(UeParams::undetectable())};
  if (name == "bell-cheat") return BobBellCheat{};
  if (name == "alice-resend") return AliceMeasureResend{};
  if (name == "alice-resend-dummy") return AliceMeasureResendDummy{};
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

Sequence eve_intercept_resend(Sequence slots, Rng& rng) {
  for (auto& slot : slots) {
    const Basis basis = random_bit(rng) ? Basis::X : Basis::Z;
    slot.state = measure(slot.state, basis, 0, rng).state;
  }
  return slots;
}

EntangledSequence eve_entangling_attack(Sequence slots, const UeParams& params) {
  params.validate();
  const ProbeIsometry v = params.isometry();
  EntangledSequence out;
  out.probed.reserve(slots.size());
  for (auto& slot : slots) {
    if (slot.state.qubits() != 1) {
      throw std::invalid_argument("eve_entangling_attack: slot already carries extra qubits");
    }
    slot.state = apply_probe(v, slot.state);
    out.probed.push_back(slot.label);
  }
  out.slots = std::move(slots);
  return out;
}

double ue_detection_probability(const UeParams& p) {
  p.validate();
  const double flip_zero = std::norm(p.b);
  const double flip_one = std::norm(p.c);
  const double flip_plus = 0.25 * (p.a * p.e00 - p.b * p.e01 + p.c * p.e10 - p.d * p.e11).squaredNorm();
  const double flip_minus = 0.25 * (p.a * p.e00 + p.b * p.e01 - p.c * p.e10 - p.d * p.e11).squaredNorm();
  return std::clamp(0.25 * (flip_zero + flip_one + flip_plus + flip_minus), 0.0, 1.0);
}

double ue_leakage(const UeParams& p) {
  p.validate();
  // rho_plus - rho_zero = (rho_one - rho_zero) / 2 + (X + X^dagger) / 2 with
  // X = a c* |e00><e10| + b d* |e01><e11|. Built this way the difference is
  // exactly zero when Eve's state does not depend on the input.
  using Op = Eigen::Matrix4cd;
  const Op rho_zero = std::norm(p.a) * p.e00 * p.e00.adjoint() + std::norm(p.b) * p.e01 * p.e01.adjoint();
  const Op rho_one = std::norm(p.c) * p.e10 * p.e10.adjoint() + std::norm(p.d) * p.e11 * p.e11.adjoint();
  const Op cross = p.a * std::conj(p.c) * p.e00 * p.e10.adjoint() + p.b * std::conj(p.d) * p.e01 * p.e11.adjoint();
  const Op diff = 0.5 * (rho_one - rho_zero) + 0.5 * (cross + cross.adjoint());
  Eigen::SelfAdjointEigenSolver<Op> es(diff, Eigen::EigenvaluesOnly);
  return std::clamp(0.5 * es.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

UeParams sample_ue_params(Rng& rng, UeSampleKind kind, double epsilon) {
  if (kind == UeSampleKind::Haar) {
    Eigen::Matrix<Complex, 8, 2> g;
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 2; ++c) g(r, c) = complex_gaussian(rng);
    Eigen::HouseholderQR<Eigen::Matrix<Complex, 8, 2>> qr(g);
    const Eigen::Matrix<Complex, 8, 8> q = qr.householderQ();
    return UeParams::from_isometry(q.leftCols<2>());
  }
  const UeParams base = UeParams::undetectable(random_unit_ancilla(rng));
  if (kind == UeSampleKind::Undetectable) return base;

  // exp(i * epsilon * H) for a random Hermitian H with unit spectral scale.
  Eigen::Matrix<Complex, 8, 8> g;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) g(r, c) = complex_gaussian(rng);
  const Eigen::Matrix<Complex, 8, 8> h = (g + g.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex, 8, 8>> es(h);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::Matrix<Complex, 8, 1> phases;
  for (int i = 0; i < 8; ++i) phases(i) = std::polar(1.0, epsilon * es.eigenvalues()(i) / scale);
  const Eigen::Matrix<Complex, 8, 8> u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return UeParams::from_isometry(u * base.isometry());
}

PreparedSequence bob_bell_cheat(const ProtocolConfig& config, Rng& rng) {
  config.validate();
  const std::vector<Choice> placeholders(config.N + 2 * config.K, Choice::Z);
  auto out = bob_prepare_sequence(placeholders, config.N, config.M, rng);
  const PureState half = make_bell(BellKind::PhiPlus);
  for (auto& slot : out.slots) {
    if (out.record.slots[slot.label].role != Role::Decoy) slot.state = half;
  }
  return out;
}

BasisOracle random_basis_oracle(Rng& rng) {
  return [&rng](std::uint32_t) { return random_bit(rng) ? Basis::X : Basis::Z; };
}

MessagePair bob_bell_cheat_readout(const Slot& returned) {
  if (returned.state.qubits() < 2) throw std::invalid_argument("bob_bell_cheat_readout: no kept half in slot");
  switch (bell_measure(returned.state, 0, 1)) {
    case BellKind::PhiPlus: return {0, 0};
    case BellKind::PsiPlus: return {1, 0};
    case BellKind::PsiMinus: return {1, 1};
    case BellKind::PhiMinus: return {0, 1};
  }
  throw std::logic_error("bob_bell_cheat_readout: unreachable");
}

BellCheatRun run_bell_cheat(const ProtocolConfig& config, std::span<const MessagePair> pairs, Rng& rng) {
  if (pairs.size() != config.N) throw std::invalid_argument("run_bell_cheat: need N message pairs");
  BellCheatRun run;
  auto bob = bob_bell_cheat(config, rng);
  const auto published = publish_decoys(bob.record);
  auto channel = alice_check_channel(std::move(bob.slots), published, config.tau, rng);
  if (channel.check.abort) {
    run.channel_abort = true;
    return run;
  }
  auto tested = alice_test_loyalty(std::move(channel.remaining), config.K, config.tau, rng, random_basis_oracle(rng));
  if (tested.test.dishonest) {
    run.detected = true;
    return run;
  }
  // Every surviving slot is an identical Bell half, so any order will do.
  std::vector<std::size_t> identity(tested.remaining.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  Sequence ordered = bob_reorder(std::move(tested.remaining), identity, config.N);
  Sequence encoded = alice_encode(std::move(ordered), pairs);
  auto inserted = alice_insert_decoys(std::move(encoded), config.M2, rng);
  auto back = check_decoys(std::move(inserted.slots), inserted.decoys, config.tau, rng);
  if (back.check.abort) {
    run.channel_abort = true;
    return run;
  }
  for (const auto& slot : back.remaining) run.readout.push_back(bob_bell_cheat_readout(slot));
  return run;
}

AliceMeasurement alice_measure_resend(Sequence slots, ResendPolicy policy, Rng& rng) {
  AliceMeasurement out;
  out.guesses.reserve(slots.size());
  for (auto& slot : slots) {
    const Basis basis = random_bit(rng) ? Basis::X : Basis::Z;
    const auto m = measure(slot.state, basis, 0, rng);
    std::optional<Choice> guess;
    if (m.bit == 1) guess = basis == Basis::Z ? Choice::X : Choice::Z;
    out.guesses.push_back(guess);

    switch (policy) {
      case ResendPolicy::Collapsed:
        slot.state = m.state;
        break;
      case ResendPolicy::GuessChoice:
        slot.state = prepare(prep_state(guess ? *guess : choice_from_bit(random_bit(rng))));
        break;
      case ResendPolicy::UniformFour:
        slot.state = prepare(guess ? prep_state(*guess) : kPrepStates[uniform_index(rng, kPrepStates.size())]);
        break;
    }
  }
  out.slots = std::move(slots);
  return out;
}

AliceAttackRun run_alice_attack(const ProtocolConfig& config, std::span<const Choice> choices,
                                std::span<const MessagePair> pairs, ResendPolicy policy, Rng& rng) {
  config.validate();
  if (choices.size() != config.N || pairs.size() != config.N) {
    throw std::invalid_argument("run_alice_attack: choices and pairs must both have length N");
  }
  std::vector<Choice> prepared(choices.begin(), choices.end());
  const auto loyalty = loyalty_choices(config.K);
  prepared.insert(prepared.end(), loyalty.begin(), loyalty.end());

  auto bob = bob_prepare_sequence(prepared, config.N, config.M, rng);
  const auto published = publish_decoys(bob.record);
  auto channel = alice_check_channel(std::move(bob.slots), published, config.tau, rng);
  auto tested = alice_test_loyalty(std::move(channel.remaining), config.K, config.tau, rng,
                                   honest_basis_oracle(bob.record));

  auto attacked = alice_measure_resend(std::move(tested.remaining), policy, rng);
  AliceAttackRun run;
  run.attacked = attacked.slots.size();
  for (std::size_t i = 0; i < attacked.slots.size(); ++i) {
    if (!attacked.guesses[i]) continue;
    ++run.conclusive;
    const PrepState truth = bob.record.slots[attacked.slots[i].label].prepared;
    if (prep_state(*attacked.guesses[i]) != truth) ++run.false_conclusive;
  }

  const auto perm = bob_plan_reorder(attacked.slots, bob.record, choices);
  Sequence ordered = bob_reorder(std::move(attacked.slots), perm, config.N);
  Sequence encoded = alice_encode(std::move(ordered), pairs);
  auto inserted = alice_insert_decoys(std::move(encoded), config.M2, rng);
  auto decoded = bob_check_and_decode(std::move(inserted.slots), inserted.decoys, choices, config.tau, rng);

  run.payload = decoded.bits.size();
  for (std::size_t i = 0; i < decoded.bits.size(); ++i) {
    if (decoded.bits[i] == pairs[i].chosen(choices[i])) continue;
    ++run.bit_errors;
    if (random_bit(rng)) ++run.dummy_errors;
  }
  return run;
}

}  // namespace qot
