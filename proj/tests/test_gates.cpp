#include "qaesim/gate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qaesim/builders.hpp"
#include "qaesim/decompose.hpp"
#include "qaesim/risk_models.hpp"
#include "qaesim/statevector.hpp"
#include "test_util.hpp"

using namespace qaesim;
using testutil::random_state;
using testutil::run_on_zero;

namespace {

// Phase state (1/2^(n/2)) sum_x e^{i 2 pi x (z0 + eps) / 2^n} |x>.
StateVector phase_state(int n, double z0_plus_eps) {
  StateVector s = StateVector::zero(n);
  const std::uint64_t dim = std::uint64_t(1) << n;
  const double scale = 1.0 / std::sqrt(double(dim));
  for (std::uint64_t x = 0; x < dim; ++x)
    s.amplitudes()[x] =
        std::polar(scale, 2.0 * std::numbers::pi * double(x) * z0_plus_eps / double(dim));
  return s;
}

}  // namespace

TEST(Inverse, UndoesTheEquityDistribution) {
  const BinomialParams params = calibrate_binomial(0.08, 0.20, 1.0, 6);
  const RegisterLayout layout = make_equity_layout(6, 0);
  const Circuit d = build_d_eq(params, layout);
  StateVector s = StateVector::zero(d.num_qubits);
  s.run(d);
  s.run(inverse(d));
  EXPECT_GE(s.probability_of({0}, 0), 1.0 - 1e-9);
  const StateVector zero = StateVector::zero(d.num_qubits);
  EXPECT_GE(fidelity(zero, s), 1.0 - 1e-9);
}

TEST(Inverse, MeasureGatesAreStructurallySelfInverse) {
  const RegisterLayout layout = make_equity_layout(6, 0);
  const Circuit m_max = build_m_max(6, layout);
  EXPECT_TRUE(inverse(m_max) == m_max);
  const Circuit m_min = build_m_min(6, layout);
  EXPECT_TRUE(inverse(m_min) == m_min);
}

TEST(Inverse, InvolutionIsStructural) {
  Circuit c(3);
  c.add(Gate::ry(0.7), {0});
  c.add(Gate::x(), {2}, {0, 1});
  c.add(Gate::rz(-1.3), {1}, {2});
  c.add(Gate::swap(), {0, 2});
  EXPECT_TRUE(inverse(inverse(c)) == c);
  EXPECT_EQ(inverse(c).size(), c.size());
}

TEST(Controlled, CnotTruthTable) {
  Circuit x(2);
  x.add(Gate::x(), {1});
  const Circuit cnot = controlled(x, {0});
  for (int control = 0; control <= 1; ++control) {
    for (int target = 0; target <= 1; ++target) {
      StateVector s = StateVector::zero(2);
      if (control) s.apply({Gate::x(), {0}, {}});
      if (target) s.apply({Gate::x(), {1}, {}});
      s.run(cnot);
      const int expect_target = control ? 1 - target : target;
      EXPECT_NEAR(s.probability_of({1}, expect_target), 1.0, 1e-12);
      EXPECT_NEAR(s.probability_of({0}, control), 1.0, 1e-12);
    }
  }
}

TEST(Controlled, InactiveControlIsIdentity) {
  const BinomialParams params = calibrate_binomial(0.08, 0.20, 1.0, 3);
  RegisterLayout layout = make_equity_layout(3, 1);
  Circuit d = build_d_eq(params, layout);
  d.append(build_m_max(3, layout));
  const Circuit cd = controlled(d, {layout.out.begin});
  StateVector s = random_state(cd.num_qubits, 5);
  // Zero out the control's |1> component so the control reads |0>.
  for (std::uint64_t i = 0; i < s.dimension(); ++i)
    if ((i >> layout.out.begin) & 1) s.amplitudes()[i] = 0.0;
  double norm2 = 0.0;
  for (const Amplitude& a : s.amplitudes()) norm2 += std::norm(a);
  for (Amplitude& a : s.amplitudes()) a /= std::sqrt(norm2);
  const StateVector before = s;
  s.run(cd);
  EXPECT_GE(fidelity(before, s), 1.0 - 1e-9);
}

TEST(Controlled, RejectsOverlappingControls) {
  Circuit c(2);
  c.add(Gate::x(), {1});
  EXPECT_THROW(controlled(c, {1}), CircuitError);
  EXPECT_THROW(controlled(c, {5}), CircuitError);
}

TEST(Controlled, CommutesWithInverse) {
  const BinomialParams params = calibrate_binomial(0.05, 0.3, 1.0, 3);
  RegisterLayout layout = make_equity_layout(3, 1);
  Circuit d = build_d_eq(params, layout);
  d.append(build_m_max(3, layout));
  const Circuit a = controlled(inverse(d), {layout.out.begin});
  const Circuit b = inverse(controlled(d, {layout.out.begin}));
  StateVector sa = random_state(a.num_qubits, 17);
  StateVector sb = sa;
  sa.run(a);
  sb.run(b);
  EXPECT_GE(fidelity(sa, sb), 1.0 - 1e-9);
}

TEST(Toffoli, TruthTable) {
  const Circuit t = toffoli();
  for (std::uint64_t in = 0; in < 8; ++in) {
    StateVector s = StateVector::zero(3);
    for (int b = 0; b < 3; ++b)
      if ((in >> b) & 1) s.apply({Gate::x(), {b}, {}});
    s.run(t);
    const std::uint64_t expect = ((in & 3) == 3) ? (in ^ 4) : in;
    EXPECT_NEAR(s.probability_of({0, 1, 2}, expect), 1.0, 1e-12);
  }
}

TEST(AndCascade, FlipsOnlyOnAllOnes) {
  // 4 inputs, 2 ancillas, result on qubit 6.
  const Circuit c = and_cascade(7, {0, 1, 2, 3}, {4, 5}, 6);
  for (std::uint64_t in = 0; in < 16; ++in) {
    StateVector s = StateVector::zero(7);
    for (int b = 0; b < 4; ++b)
      if ((in >> b) & 1) s.apply({Gate::x(), {b}, {}});
    s.run(c);
    EXPECT_NEAR(s.probability_of({6}, in == 15 ? 1 : 0), 1.0, 1e-12);
    EXPECT_NEAR(s.probability_of({4, 5}, 0), 1.0, 1e-12);  // ancillas restored
  }
  EXPECT_THROW(and_cascade(7, {0, 1, 2, 3}, {4}, 6), CircuitError);
}

TEST(Or3, TruthTable) {
  const Circuit c = or3();
  for (std::uint64_t in = 0; in < 4; ++in) {
    StateVector s = StateVector::zero(3);
    for (int b = 0; b < 2; ++b)
      if ((in >> b) & 1) s.apply({Gate::x(), {b}, {}});
    s.run(c);
    EXPECT_NEAR(s.probability_of({2}, in != 0 ? 1 : 0), 1.0, 1e-12);
    EXPECT_NEAR(s.probability_of({0, 1}, in), 1.0, 1e-12);  // inputs restored
  }
}

TEST(MultiControlledX, ExhaustiveSixControls) {
  // 6 controls, 4 ancillas, target 10: brute force over all 64 inputs.
  const Circuit c = multi_controlled_x(11, {0, 1, 2, 3, 4, 5}, {6, 7, 8, 9}, 10);
  for (std::uint64_t in = 0; in < 64; ++in) {
    StateVector s = StateVector::zero(11);
    for (int b = 0; b < 6; ++b)
      if ((in >> b) & 1) s.apply({Gate::x(), {b}, {}});
    s.run(c);
    EXPECT_NEAR(s.probability_of({10}, in == 63 ? 1 : 0), 1.0, 1e-12);
    EXPECT_NEAR(s.probability_of({6, 7, 8, 9}, 0), 1.0, 1e-12);
  }
}

TEST(AncillaRestoration, HoldsForEveryBasisInput) {
  // Cascade over 5 inputs with superposition inputs too: ancilla marginal is
  // exactly {0: 1} after the gate for all computational-basis inputs.
  const Circuit c = and_cascade(9, {0, 1, 2, 3, 4}, {5, 6, 7}, 8);
  for (std::uint64_t in = 0; in < 32; ++in) {
    StateVector s = StateVector::zero(9);
    for (int b = 0; b < 5; ++b)
      if ((in >> b) & 1) s.apply({Gate::x(), {b}, {}});
    s.run(c);
    const OutcomeHistogram anc = s.marginal_distribution({5, 6, 7});
    EXPECT_NEAR(anc.probabilities.at(0), 1.0, 1e-12);
  }
}

TEST(Qft, ParallelHadamardsOnZero) {
  const Circuit q = qft(3);
  EXPECT_EQ(q.size(), 3u);
  const StateVector s = run_on_zero(q);
  for (std::uint64_t i = 0; i < 8; ++i)
    EXPECT_NEAR(std::norm(s.amplitude(i)), 1.0 / 8.0, 1e-12);
}

TEST(InverseQft, SingleQubitIsHadamard) {
  const Circuit q = inverse_qft(1);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q.instances[0].gate.kind, GateKind::H);
}

TEST(InverseQft, GridPhaseStateDecodesExactly) {
  for (int n : {2, 3, 5}) {
    const std::uint64_t dim = std::uint64_t(1) << n;
    for (std::uint64_t z0 : {std::uint64_t(1), dim / 2, dim - 3}) {
      StateVector s = phase_state(n, double(z0));
      s.run(inverse_qft(n));
      EXPECT_NEAR(s.probability_of_all(z0), 1.0, 1e-9) << "n=" << n << " z0=" << z0;
    }
  }
}

TEST(InverseQft, HalfOffsetNearestIntegerBound) {
  const int n = 6;
  StateVector s = phase_state(n, 5.5);
  s.run(inverse_qft(n));
  const double nearest = s.probability_of_all(5) + s.probability_of_all(6);
  EXPECT_GE(s.probability_of_all(5), 1.0 - std::numbers::pi * std::numbers::pi / 12.0 - 1e-6);
  EXPECT_GE(s.probability_of_all(6), 1.0 - std::numbers::pi * std::numbers::pi / 12.0 - 1e-6);
  EXPECT_GE(nearest, 0.8);
}

TEST(InverseQft, InvertsTheFullQft) {
  for (int n : {1, 2, 4, 8}) {
    Circuit round_trip = qft_full(n);
    round_trip.append(inverse_qft(n));
    StateVector s = random_state(n, 23 + n);
    const StateVector before = s;
    s.run(round_trip);
    EXPECT_GE(fidelity(before, s), 1.0 - 1e-9) << "n=" << n;
  }
}

TEST(Depth, InvariantUnderRelabeling) {
  Circuit c(4);
  c.add(Gate::h(), {0});
  c.add(Gate::x(), {2}, {0, 1});
  c.add(Gate::ry(0.4), {3});
  c.add(Gate::x(), {3}, {2});
  const long long base = depth(c);
  const std::vector<int> perm = {2, 0, 3, 1};
  const Circuit renamed = embed(c, perm, 4);
  EXPECT_EQ(depth(renamed), base);
}

TEST(Composite, InverseControlledAndApply) {
  auto body = std::make_shared<Circuit>(2);
  body->add(Gate::ry(0.9), {0});
  body->add(Gate::x(), {1}, {0});
  Circuit c(3);
  c.add(Gate::composite("pair", body), {1, 2}, {0});

  // Apply with control off: identity.
  StateVector s = StateVector::zero(3);
  s.run(c);
  EXPECT_NEAR(s.probability_of({0, 1, 2}, 0), 1.0, 1e-12);

  // Control on: behaves like the body on wires 1, 2.
  StateVector t = StateVector::zero(3);
  t.apply({Gate::x(), {0}, {}});
  t.run(c);
  EXPECT_NEAR(t.probability_of({1}, 1), std::pow(std::sin(0.45), 2), 1e-12);

  // Round trip through the inverse, structurally an involution.
  StateVector u = random_state(3, 9);
  const StateVector before = u;
  u.run(c);
  u.run(inverse(c));
  EXPECT_GE(fidelity(before, u), 1.0 - 1e-9);
  EXPECT_TRUE(inverse(inverse(c)) == c);
}

TEST(Serialization, LineFormat) {
  RegisterLayout layout = make_equity_layout(2, 1);
  Circuit c(layout.num_qubits(), layout);
  c.add(Gate::ry(0.5), {0});
  c.add(Gate::x(), {2}, {0, 1});
  c.add(Gate::swap(), {0, 1});
  const std::string text = dump_circuit(c);
  EXPECT_NE(text.find("qubits=5"), std::string::npos);
  EXPECT_NE(text.find("RY(0.5) targets=[0] controls=[]"), std::string::npos);
  EXPECT_NE(text.find("X targets=[2] controls=[0,1]"), std::string::npos);
  EXPECT_NE(text.find("SWAP targets=[0,1] controls=[]"), std::string::npos);
  EXPECT_NE(text.find("rf=[0,2)"), std::string::npos);
}

TEST(Layout, ValidationRejectsGapsAndOverlaps) {
  RegisterLayout ok = make_equity_layout(3, 2);
  ok.validate(ok.num_qubits());

  RegisterLayout gap = ok;
  gap.out.end += 1;  // extends past the register
  EXPECT_THROW(gap.validate(ok.num_qubits()), LayoutError);

  RegisterLayout overlap = ok;
  overlap.rm = {0, 1};
  EXPECT_THROW(overlap.validate(ok.num_qubits()), LayoutError);
}
