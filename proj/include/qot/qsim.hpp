#pragma once

// Small pure-state simulator for registers of one to three qubits.
//
// Qubit 0 is the leftmost factor of a ket, so |q0 q1 q2> has amplitude index
// q0*4 + q1*2 + q2. All storage is Eigen with a fixed maximum size of 8, so
// no operation here touches the heap.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qot/random.hpp"

namespace qot {

inline constexpr int kMaxQubits = 3;
inline constexpr int kMaxDim = 1 << kMaxQubits;

enum class Basis : std::uint8_t { Z, X };
enum class Gate : std::uint8_t { I, X, Y, Z, H };
enum class BellKind : std::uint8_t { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

inline constexpr std::array<Gate, 4> kPauliGates{Gate::I, Gate::X, Gate::Y, Gate::Z};
inline constexpr std::array<BellKind, 4> kBellKinds{BellKind::PhiPlus, BellKind::PhiMinus,
                                                    BellKind::PsiPlus, BellKind::PsiMinus};

constexpr std::string_view to_string(Basis b) noexcept { return b == Basis::Z ? "Z" : "X"; }

constexpr std::string_view to_string(Gate g) noexcept {
  switch (g) {
    case Gate::I: return "I";
    case Gate::X: return "X";
    case Gate::Y: return "Y";
    case Gate::Z: return "Z";
    case Gate::H: return "H";
  }
  return "?";
}

constexpr std::string_view to_string(BellKind k) noexcept {
  switch (k) {
    case BellKind::PhiPlus: return "PhiPlus";
    case BellKind::PhiMinus: return "PhiMinus";
    case BellKind::PsiPlus: return "PsiPlus";
    case BellKind::PsiMinus: return "PsiMinus";
  }
  return "?";
}

template <typename Real>
using Amplitude = std::complex<Real>;

template <typename Real>
using StateVector = Eigen::Matrix<Amplitude<Real>, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

template <typename Real>
using OperatorMatrix =
    Eigen::Matrix<Amplitude<Real>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

template <typename Real>
using Matrix2 = Eigen::Matrix<Amplitude<Real>, 2, 2>;

/// Tolerances. `algebraic` is for exact identities, `normalization` for unit
/// norm / unit trace, `phase` is the default for global-phase comparison.
template <typename Real>
struct Tolerance {
  static constexpr Real floor = Real(64) * std::numeric_limits<Real>::epsilon();
  static constexpr Real algebraic = std::max(Real(1e-12), floor);
  static constexpr Real normalization = std::max(Real(1e-10), floor);
  static constexpr Real phase = std::max(Real(1e-9), floor);
};

namespace detail {

constexpr bool valid_dim(Eigen::Index dim) noexcept { return dim == 2 || dim == 4 || dim == 8; }

constexpr int qubits_for_dim(Eigen::Index dim) noexcept { return dim == 2 ? 1 : dim == 4 ? 2 : 3; }

// Bit of amplitude index `index` that belongs to qubit `q` in an n-qubit register.
constexpr int bit_of(Eigen::Index index, int q, int n) noexcept {
  return static_cast<int>((index >> (n - 1 - q)) & 1);
}

}  // namespace detail

/// Unit-norm amplitude vector over 1..3 qubits.
template <typename Real>
class BasicPureState {
 public:
  using Scalar = Amplitude<Real>;
  using VectorType = StateVector<Real>;

  /// Throws std::invalid_argument unless the dimension is 2, 4 or 8, every
  /// amplitude is finite, and the norm is 1 within Tolerance::normalization.
  explicit BasicPureState(const VectorType& amps) : amps_(amps) {
    if (!detail::valid_dim(amps_.size())) {
      throw std::invalid_argument("PureState: dimension must be 2, 4 or 8, got " +
                                  std::to_string(amps_.size()));
    }
    if (!amps_.allFinite()) throw std::invalid_argument("PureState: non-finite amplitude");
    const Real n2 = amps_.squaredNorm();
    if (std::abs(n2 - Real(1)) > Tolerance<Real>::normalization) {
      throw std::invalid_argument("PureState: amplitudes are not normalized");
    }
  }

  BasicPureState(std::initializer_list<Scalar> amps) : BasicPureState(from_list(amps)) {}

  /// Computational basis state |index> on `n_qubits` qubits.
  static BasicPureState computational(int n_qubits, Eigen::Index index) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
      throw std::invalid_argument("PureState: qubit count must be 1..3");
    }
    VectorType v = VectorType::Zero(Eigen::Index{1} << n_qubits);
    if (index < 0 || index >= v.size()) throw std::out_of_range("PureState: basis index out of range");
    v(index) = Scalar(1);
    return BasicPureState(v);
  }

  /// Renormalizes `v` (which must have nonzero norm) before validation.
  static BasicPureState normalized(VectorType v) {
    const Real n = v.norm();
    if (!(n > Real(0))) throw std::invalid_argument("PureState: zero vector cannot be normalized");
    v /= n;
    return BasicPureState(v);
  }

  int qubits() const noexcept { return detail::qubits_for_dim(amps_.size()); }
  Eigen::Index dim() const noexcept { return amps_.size(); }
  const VectorType& amplitudes() const noexcept { return amps_; }
  Scalar operator[](Eigen::Index i) const { return amps_(i); }

  friend bool operator==(const BasicPureState& a, const BasicPureState& b) {
    return a.amps_.size() == b.amps_.size() && a.amps_ == b.amps_;
  }

 private:
  static VectorType from_list(std::initializer_list<Scalar> amps) {
    VectorType v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const auto& a : amps) v(i++) = a;
    return v;
  }

  VectorType amps_;
};

using PureState = BasicPureState<double>;

template <typename Real>
Matrix2<Real> gate_matrix(Gate g) {
  using C = Amplitude<Real>;
  Matrix2<Real> m;
  switch (g) {
    case Gate::I: m << C(1), C(0), C(0), C(1); break;
    case Gate::X: m << C(0), C(1), C(1), C(0); break;
    // Real form ZX rather than the Hermitian sigma_y; Y|0> = -|1>.
    case Gate::Y: m << C(0), C(1), C(-1), C(0); break;
    case Gate::Z: m << C(1), C(0), C(0), C(-1); break;
    case Gate::H: {
      const Real s = Real(1) / std::sqrt(Real(2));
      m << C(s), C(s), C(s), C(-s);
      break;
    }
  }
  return m;
}

/// Single-qubit eigenstate of `basis`: bit 0 is |0> or |+>, bit 1 is |1> or |->.
template <typename Real = double>
BasicPureState<Real> eigenstate(Basis basis, int bit) {
  using C = Amplitude<Real>;
  if (bit != 0 && bit != 1) throw std::invalid_argument("eigenstate: bit must be 0 or 1");
  if (basis == Basis::Z) return bit == 0 ? BasicPureState<Real>{C(1), C(0)} : BasicPureState<Real>{C(0), C(1)};
  const Real s = Real(1) / std::sqrt(Real(2));
  return bit == 0 ? BasicPureState<Real>{C(s), C(s)} : BasicPureState<Real>{C(s), C(-s)};
}

template <typename Real>
void check_target(const BasicPureState<Real>& state, int target) {
  if (target < 0 || target >= state.qubits()) {
    throw std::out_of_range("qubit index " + std::to_string(target) + " out of range for " +
                            std::to_string(state.qubits()) + "-qubit state");
  }
}

namespace detail {

// Applies a 2x2 matrix to one tensor factor without re-validating the norm.
template <typename Real>
StateVector<Real> apply_local(const StateVector<Real>& amps, const Matrix2<Real>& m, int target) {
  const int n = qubits_for_dim(amps.size());
  const Eigen::Index stride = Eigen::Index{1} << (n - 1 - target);
  StateVector<Real> out = amps;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (i & stride) continue;
    const auto a0 = amps(i);
    const auto a1 = amps(i | stride);
    out(i) = m(0, 0) * a0 + m(0, 1) * a1;
    out(i | stride) = m(1, 0) * a0 + m(1, 1) * a1;
  }
  return out;
}

}  // namespace detail

template <typename Real>
BasicPureState<Real> apply_gate(const BasicPureState<Real>& state, Gate gate, int target) {
  check_target(state, target);
  return BasicPureState<Real>(detail::apply_local(state.amplitudes(), gate_matrix<Real>(gate), target));
}

/// Born-rule probability that measuring `target` in `basis` yields `bit`.
template <typename Real>
Real outcome_probability(const BasicPureState<Real>& state, Basis basis, int target, int bit) {
  check_target(state, target);
  StateVector<Real> amps = state.amplitudes();
  if (basis == Basis::X) amps = detail::apply_local(amps, gate_matrix<Real>(Gate::H), target);
  const int n = state.qubits();
  Real p = 0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (detail::bit_of(i, target, n) == bit) p += std::norm(amps(i));
  }
  return p;
}

template <typename Real>
struct Measurement {
  int bit;
  BasicPureState<Real> state;
};

/// Projective measurement of one qubit. Z basis: |0> -> 0, |1> -> 1.
/// X basis: |+> -> 0, |-> -> 1. One uniform draw is consumed per call.
template <typename Real, typename Urbg>
Measurement<Real> measure(const BasicPureState<Real>& state, Basis basis, int target, Urbg& rng) {
  check_target(state, target);
  const Matrix2<Real> h = gate_matrix<Real>(Gate::H);
  StateVector<Real> amps = state.amplitudes();
  if (basis == Basis::X) amps = detail::apply_local(amps, h, target);

  const int n = state.qubits();
  Real p0 = 0;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (detail::bit_of(i, target, n) == 0) p0 += std::norm(amps(i));
  }
  const int bit = static_cast<Real>(uniform_real(rng)) < p0 ? 0 : 1;
  for (Eigen::Index i = 0; i < amps.size(); ++i) {
    if (detail::bit_of(i, target, n) != bit) amps(i) = Amplitude<Real>(0);
  }
  amps /= amps.norm();
  if (basis == Basis::X) amps = detail::apply_local(amps, h, target);
  return {bit, BasicPureState<Real>(amps)};
}

template <typename Real = double>
BasicPureState<Real> make_bell(BellKind kind) {
  using C = Amplitude<Real>;
  const Real s = Real(1) / std::sqrt(Real(2));
  switch (kind) {
    case BellKind::PhiPlus: return {C(s), C(0), C(0), C(s)};
    case BellKind::PhiMinus: return {C(s), C(0), C(0), C(-s)};
    case BellKind::PsiPlus: return {C(0), C(s), C(s), C(0)};
    case BellKind::PsiMinus: return {C(0), C(s), C(-s), C(0)};
  }
  throw std::invalid_argument("make_bell: unknown kind");
}

/// Kronecker product; the combined register may not exceed three qubits.
template <typename Real>
BasicPureState<Real> tensor(const BasicPureState<Real>& a, const BasicPureState<Real>& b) {
  if (a.qubits() + b.qubits() > kMaxQubits) {
    throw std::length_error("tensor: combined register exceeds " + std::to_string(kMaxQubits) + " qubits");
  }
  StateVector<Real> out(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  return BasicPureState<Real>(out);
}

template <typename Real>
Amplitude<Real> inner_product(const BasicPureState<Real>& a, const BasicPureState<Real>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());  // conjugate-linear in a
}

/// True iff |<a|b>| >= 1 - tol.
template <typename Real>
bool equal_up_to_global_phase(const BasicPureState<Real>& a, const BasicPureState<Real>& b,
                              Real tol = Tolerance<Real>::phase) {
  if (a.dim() != b.dim()) throw std::invalid_argument("equal_up_to_global_phase: dimension mismatch");
  return std::abs(inner_product(a, b)) >= Real(1) - tol;
}

/// Hermitian, positive semidefinite, unit-trace matrix of dimension 2, 4 or 8
/// (or 1 when every qubit has been traced out).
template <typename Real>
class BasicDensityMatrix {
 public:
  using MatrixType = OperatorMatrix<Real>;

  explicit BasicDensityMatrix(const MatrixType& entries) : rho_(entries) {
    if (rho_.rows() != rho_.cols()) throw std::invalid_argument("DensityMatrix: not square");
    if (!(rho_.rows() == 1 || detail::valid_dim(rho_.rows()))) {
      throw std::invalid_argument("DensityMatrix: dimension must be 1, 2, 4 or 8");
    }
    if (!rho_.allFinite()) throw std::invalid_argument("DensityMatrix: non-finite entry");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > Tolerance<Real>::algebraic) {
      throw std::invalid_argument("DensityMatrix: not Hermitian");
    }
    if (std::abs(rho_.trace() - Amplitude<Real>(1)) > Tolerance<Real>::normalization) {
      throw std::invalid_argument("DensityMatrix: trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<MatrixType> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -Tolerance<Real>::normalization) {
      throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }
  }

  static BasicDensityMatrix pure(const BasicPureState<Real>& psi) {
    return BasicDensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
  }

  Eigen::Index dim() const noexcept { return rho_.rows(); }
  const MatrixType& entries() const noexcept { return rho_; }
  Amplitude<Real> operator()(Eigen::Index r, Eigen::Index c) const { return rho_(r, c); }

 private:
  MatrixType rho_;
};

using DensityMatrix = BasicDensityMatrix<double>;

template <typename Real>
struct WeightedState {
  Real weight;
  BasicPureState<Real> state;
};

/// Sum_i w_i |psi_i><psi_i| reduced to the qubits in `keep`, in the order
/// given (so keep = {1, 0} swaps the two factors of the reduced matrix).
template <typename Real>
BasicDensityMatrix<Real> density_of(std::span<const WeightedState<Real>> states, std::span<const int> keep) {
  if (states.empty()) throw std::invalid_argument("density_of: empty ensemble");
  const int n = states.front().state.qubits();
  Real total = 0;
  for (const auto& ws : states) {
    if (!(ws.weight >= Real(0)) || !std::isfinite(ws.weight)) {
      throw std::invalid_argument("density_of: weights must be finite and nonnegative");
    }
    if (ws.state.qubits() != n) throw std::invalid_argument("density_of: mixed register sizes");
    total += ws.weight;
  }
  if (std::abs(total - Real(1)) > Tolerance<Real>::normalization) {
    throw std::invalid_argument("density_of: weights must sum to 1");
  }
  if (static_cast<int>(keep.size()) > n) throw std::invalid_argument("density_of: too many kept qubits");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n) throw std::out_of_range("density_of: kept qubit out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (keep[i] == keep[j]) throw std::invalid_argument("density_of: duplicate kept qubit");
    }
  }

  const int kept = static_cast<int>(keep.size());
  const Eigen::Index full = Eigen::Index{1} << n;
  const Eigen::Index reduced = Eigen::Index{1} << kept;

  Eigen::Index kept_mask = 0;
  for (int q : keep) kept_mask |= Eigen::Index{1} << (n - 1 - q);
  auto reduced_index = [&](Eigen::Index i) {
    Eigen::Index r = 0;
    for (int m = 0; m < kept; ++m) r = (r << 1) | detail::bit_of(i, keep[m], n);
    return r;
  };

  OperatorMatrix<Real> rho = OperatorMatrix<Real>::Zero(reduced, reduced);
  for (const auto& ws : states) {
    const auto& psi = ws.state.amplitudes();
    for (Eigen::Index i = 0; i < full; ++i) {
      for (Eigen::Index j = 0; j < full; ++j) {
        if ((i & ~kept_mask) != (j & ~kept_mask)) continue;
        rho(reduced_index(i), reduced_index(j)) += ws.weight * psi(i) * std::conj(psi(j));
      }
    }
  }
  return BasicDensityMatrix<Real>(rho);
}

template <typename Real>
BasicDensityMatrix<Real> density_of(std::initializer_list<WeightedState<Real>> states,
                                    std::initializer_list<int> keep) {
  const std::vector<WeightedState<Real>> s(states);
  const std::vector<int> k(keep);
  return density_of<Real>(std::span<const WeightedState<Real>>(s), std::span<const int>(k));
}

/// Reduced density matrix of a single pure state.
template <typename Real>
BasicDensityMatrix<Real> reduce(const BasicPureState<Real>& psi, std::span<const int> keep) {
  const WeightedState<Real> one{Real(1), psi};
  return density_of<Real>(std::span<const WeightedState<Real>>(&one, 1), keep);
}

/// (1/2) sum |eigenvalues(rho - sigma)|, clamped into [0, 1].
template <typename Real>
Real trace_distance(const BasicDensityMatrix<Real>& rho, const BasicDensityMatrix<Real>& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const OperatorMatrix<Real> diff = rho.entries() - sigma.entries();
  Eigen::SelfAdjointEigenSolver<OperatorMatrix<Real>> es(diff, Eigen::EigenvaluesOnly);
  const Real d = Real(0.5) * es.eigenvalues().cwiseAbs().sum();
  return std::clamp(d, Real(0), Real(1));
}

/// Identifies which Bell state the pair (first, second) is in. Works on a
/// larger register as long as the pair is in a pure Bell state (fidelity
/// 1 within Tolerance::normalization); throws std::invalid_argument otherwise.
template <typename Real>
BellKind bell_measure(const BasicPureState<Real>& state, int first, int second) {
  check_target(state, first);
  check_target(state, second);
  if (first == second) throw std::invalid_argument("bell_measure: qubits must differ");
  const std::array<int, 2> pair{first, second};
  const auto rho = reduce(state, std::span<const int>(pair));
  for (BellKind k : kBellKinds) {
    const auto b = make_bell<Real>(k).amplitudes();
    const Real fidelity = std::real(b.dot(rho.entries() * b));
    if (fidelity >= Real(1) - Tolerance<Real>::normalization) return k;
  }
  throw std::invalid_argument("bell_measure: qubits are not in a Bell state");
}

}  // namespace qot
