#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qot/qsim.hpp"
#include "qot/random.hpp"

using namespace qot;
using C = std::complex<double>;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

PureState random_state(int n, Rng& rng) {
  std::normal_distribution<double> g;
  StateVector<double> v(1 << n);
  for (auto& a : v) a = C(g(rng), g(rng));
  return PureState::normalized(v);
}

// Dense 2x2 oracle, written out independently of gate_matrix.
Matrix2<double> oracle_gate(Gate g) {
  Matrix2<double> m;
  switch (g) {
    case Gate::I: m << 1, 0, 0, 1; break;
    case Gate::X: m << 0, 1, 1, 0; break;
    case Gate::Y: m << 0, 1, -1, 0; break;
    case Gate::Z: m << 1, 0, 0, -1; break;
    case Gate::H: m << kS, kS, kS, -kS; break;
  }
  return m;
}

}  // namespace

TEST_CASE("gates are unitary and match the written-out matrices") {
  for (Gate g : {Gate::I, Gate::X, Gate::Y, Gate::Z, Gate::H}) {
    const auto m = gate_matrix<double>(g);
    CHECK((m * m.adjoint() - Matrix2<double>::Identity()).norm() < 1e-12);
    CHECK((m - oracle_gate(g)).norm() < 1e-15);
  }
}

TEST_CASE("gate actions on basis states") {
  const PureState zero{1, 0};
  const PureState one{0, 1};
  const PureState plus{kS, kS};
  const PureState minus{kS, -kS};
  CHECK(apply_gate(zero, Gate::Y, 0) == PureState{0, -1});
  CHECK(apply_gate(one, Gate::Y, 0) == PureState{1, 0});
  CHECK(equal_up_to_global_phase(apply_gate(zero, Gate::H, 0), plus));
  CHECK(equal_up_to_global_phase(apply_gate(plus, Gate::Z, 0), minus));
  CHECK(equal_up_to_global_phase(apply_gate(plus, Gate::X, 0), plus));
  CHECK(equal_up_to_global_phase(apply_gate(zero, Gate::Z, 0), zero));
  CHECK(equal_up_to_global_phase(eigenstate(Basis::X, 1), minus));
  CHECK(equal_up_to_global_phase(eigenstate(Basis::Z, 1), one));
}

TEST_CASE("apply_gate on a register agrees with a Kronecker-product oracle") {
  Rng rng(11);
  for (int n = 1; n <= 3; ++n) {
    for (int t = 0; t < n; ++t) {
      const auto psi = random_state(n, rng);
      for (Gate g : {Gate::X, Gate::Y, Gate::Z, Gate::H}) {
        // Build I (x) ... (x) G (x) ... (x) I by hand; qubit 0 is the most significant.
        const int dim = 1 << n;
        OperatorMatrix<double> full = OperatorMatrix<double>::Zero(dim, dim);
        const auto m = oracle_gate(g);
        const int shift = n - 1 - t;
        for (int r = 0; r < dim; ++r) {
          for (int c = 0; c < dim; ++c) {
            if ((r & ~(1 << shift)) != (c & ~(1 << shift))) continue;
            full(r, c) = m((r >> shift) & 1, (c >> shift) & 1);
          }
        }
        const StateVector<double> expect = full * psi.amplitudes();
        CHECK((apply_gate(psi, g, t).amplitudes() - expect).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("measurement follows the Born rule") {
  Rng rng(5);
  const PureState psi{C(std::sqrt(0.3)), C(0, std::sqrt(0.7))};
  constexpr int trials = 100000;
  int ones = 0;
  for (int i = 0; i < trials; ++i) ones += measure(psi, Basis::Z, 0, rng).bit;
  const double se = std::sqrt(0.7 * 0.3 / trials);
  CHECK(std::abs(ones / double(trials) - 0.7) < 4 * se);
  CHECK(outcome_probability(psi, Basis::Z, 0, 1) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(outcome_probability(psi, Basis::X, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("measurement collapses and leaves the other qubit consistent") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto m = measure(make_bell(BellKind::PhiPlus), Basis::X, 0, rng);
    CHECK(outcome_probability(m.state, Basis::X, 1, m.bit) == doctest::Approx(1.0).epsilon(1e-12));
    const auto again = measure(m.state, Basis::X, 0, rng);
    CHECK(again.bit == m.bit);
  }
}

TEST_CASE("eigenstates are immune to measurement in their own basis") {
  Rng rng(9);
  for (Basis b : {Basis::Z, Basis::X}) {
    for (int bit : {0, 1}) {
      const auto e = eigenstate(b, bit);
      for (int i = 0; i < 100; ++i) {
        const auto m = measure(e, b, 0, rng);
        CHECK(m.bit == bit);
        CHECK(equal_up_to_global_phase(m.state, e));
      }
    }
  }
}

TEST_CASE("Bell states read identically in the Z and X bases") {
  Rng rng(21);
  for (BellKind k : {BellKind::PhiPlus, BellKind::PsiPlus}) {
    for (int i = 0; i < 200; ++i) {
      const auto bell = make_bell(k);
      const auto mx = measure(bell, Basis::X, 0, rng);
      CHECK(measure(mx.state, Basis::X, 1, rng).bit == mx.bit);
      const auto mz = measure(bell, Basis::Z, 0, rng);
      CHECK(measure(mz.state, Basis::Z, 1, rng).bit == (k == BellKind::PhiPlus ? mz.bit : 1 - mz.bit));
    }
  }
}

TEST_CASE("the four Paulis on one half of Phi+ give four orthogonal Bell states") {
  std::vector<PureState> images;
  for (Gate g : kPauliGates) images.push_back(apply_gate(make_bell(BellKind::PhiPlus), g, 0));
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = 0; j < images.size(); ++j) {
      CHECK(std::abs(inner_product(images[i], images[j])) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
  }
  CHECK(bell_measure(images[0], 0, 1) == BellKind::PhiPlus);
  CHECK(bell_measure(images[1], 0, 1) == BellKind::PsiPlus);
  CHECK(bell_measure(images[3], 0, 1) == BellKind::PhiMinus);
  CHECK(bell_measure(apply_gate(make_bell(BellKind::PhiPlus), Gate::Y, 1), 0, 1) == BellKind::PsiMinus);
  CHECK_THROWS_AS(bell_measure(PureState::computational(2, 0), 0, 1), std::invalid_argument);
}

TEST_CASE("trace distance is a metric on random triples") {
  Rng rng(17);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(i % 2);
    auto mixed = [&] {
      const double p = w(rng);
      const std::vector<WeightedState<double>> ens{{p, random_state(n, rng)}, {1 - p, random_state(n, rng)}};
      std::vector<int> keep(n);
      for (int q = 0; q < n; ++q) keep[q] = q;
      return density_of<double>(ens, keep);
    };
    const auto a = mixed();
    const auto b = mixed();
    const auto c = mixed();
    const double ab = trace_distance(a, b);
    CHECK(trace_distance(a, a) < 1e-12);
    CHECK(ab == doctest::Approx(trace_distance(b, a)).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12);
  }
}

TEST_CASE("trace distance of pure states equals sqrt(1 - |<a|b>|^2)") {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_state(1, rng);
    const auto b = random_state(1, rng);
    const double expect = std::sqrt(1 - std::norm(inner_product(a, b)));
    CHECK(trace_distance(DensityMatrix::pure(a), DensityMatrix::pure(b)) == doctest::Approx(expect).epsilon(1e-10));
  }
  // |0> against |+>: sqrt(1 - 1/2).
  CHECK(trace_distance(DensityMatrix::pure(eigenstate(Basis::Z, 0)), DensityMatrix::pure(eigenstate(Basis::X, 0))) ==
        doctest::Approx(kS).epsilon(1e-12));
}

TEST_CASE("partial trace") {
  // Either half of a Bell state is maximally mixed.
  const auto half = reduce(make_bell(BellKind::PsiMinus), std::vector<int>{1});
  CHECK(std::abs(half(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(half(1, 1) - 0.5) < 1e-12);
  CHECK(std::abs(half(0, 1)) < 1e-12);

  // Product state: reduce keeps the factor, in the requested order.
  Rng rng(4);
  const auto a = random_state(1, rng);
  const auto b = random_state(2, rng);
  const auto ab = tensor(a, b);
  CHECK((reduce(ab, std::vector<int>{0}).entries() - DensityMatrix::pure(a).entries()).norm() < 1e-12);
  CHECK((reduce(ab, std::vector<int>{1, 2}).entries() - DensityMatrix::pure(b).entries()).norm() < 1e-12);
  const auto swapped = reduce(tensor(b, a), std::vector<int>{2, 0, 1});
  CHECK((swapped.entries() - DensityMatrix::pure(ab).entries()).norm() < 1e-12);

  // Equal mix of |0> and |1> is the same operator as an equal mix of |+> and |->.
  const auto zmix = density_of<double>({{0.5, eigenstate(Basis::Z, 0)}, {0.5, eigenstate(Basis::Z, 1)}}, {0});
  const auto xmix = density_of<double>({{0.5, eigenstate(Basis::X, 0)}, {0.5, eigenstate(Basis::X, 1)}}, {0});
  CHECK(trace_distance(zmix, xmix) < 1e-12);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(PureState({1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(PureState({1, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(PureState({C(std::nan("")), 0}), std::invalid_argument);
  CHECK_THROWS_AS(PureState::computational(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(PureState::computational(1, 2), std::out_of_range);
  CHECK_THROWS_AS(tensor(PureState::computational(2, 0), PureState::computational(2, 0)), std::length_error);
  CHECK_THROWS(apply_gate(PureState::computational(1, 0), Gate::X, 1));
  OperatorMatrix<double> bad(2, 2);
  bad << 1, 0, 0, 1;
  CHECK_THROWS_AS(DensityMatrix{bad}, std::invalid_argument);
  bad << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS(DensityMatrix{bad}, std::invalid_argument);
}

TEST_CASE("long double instantiation works") {
  using PS = BasicPureState<long double>;
  const auto plus = apply_gate(PS::computational(1, 0), Gate::H, 0);
  CHECK(std::abs(outcome_probability(plus, Basis::X, 0, 0) - 1.0L) < 1e-15L);
}
