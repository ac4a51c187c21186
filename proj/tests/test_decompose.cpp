#include "qaesim/decompose.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qaesim/builders.hpp"
#include "qaesim/risk_models.hpp"
#include "qaesim/statevector.hpp"
#include "test_util.hpp"

using namespace qaesim;
using testutil::random_state;

namespace {

bool in_basis(const Circuit& c) {
  for (const GateInstance& inst : c.instances) {
    if (inst.gate.kind == GateKind::Composite || inst.gate.kind == GateKind::Swap) return false;
    if (inst.controls.size() > 1) return false;
    if (inst.controls.size() == 1 && inst.gate.kind != GateKind::X) return false;
  }
  return true;
}

// Fidelity between applying `a` and `b` to the same random state.
double agreement(const Circuit& a, const Circuit& b, std::uint64_t seed) {
  StateVector sa = random_state(a.num_qubits, seed);
  StateVector sb = sa;
  sa.run(a);
  sb.run(b);
  return fidelity(sa, sb);
}

}  // namespace

TEST(Depth, ParallelHadamardsCountOnce) {
  Circuit c(2);
  c.add(Gate::h(), {0});
  c.add(Gate::h(), {1});
  EXPECT_EQ(depth(c), 1);
  c.add(Gate::x(), {1}, {0});
  EXPECT_EQ(depth(c), 2);
}

TEST(Depth, ToffoliNetworkIsElevenDeep) {
  const Circuit t = decompose_to_basis(toffoli());
  EXPECT_TRUE(in_basis(t));
  EXPECT_EQ(depth(t), 11);
}

TEST(Decompose, ToffoliMatchesOnBasisStatesAndRandomStates) {
  const Circuit primitive = toffoli();
  const Circuit network = decompose_to_basis(primitive);
  for (std::uint64_t in = 0; in < 8; ++in) {
    StateVector s = StateVector::zero(3);
    for (int b = 0; b < 3; ++b)
      if ((in >> b) & 1) s.apply({Gate::x(), {b}, {}});
    s.run(network);
    const std::uint64_t expect = ((in & 3) == 3) ? (in ^ 4) : in;
    EXPECT_NEAR(s.probability_of_all(expect), 1.0, 1e-12);
  }
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    EXPECT_GE(agreement(primitive, network, seed), 1.0 - 1e-9);
}

TEST(Decompose, ControlledRotations) {
  Circuit cry(2);
  cry.add(Gate::ry(1.2345), {1}, {0});
  EXPECT_GE(agreement(cry, decompose_to_basis(cry), 1), 1.0 - 1e-9);
  EXPECT_TRUE(in_basis(decompose_to_basis(cry)));

  Circuit crz(2);
  crz.add(Gate::rz(-0.777), {1}, {0});
  EXPECT_GE(agreement(crz, decompose_to_basis(crz), 2), 1.0 - 1e-9);

  Circuit ccry(3);
  ccry.add(Gate::ry(0.9), {2}, {0, 1});
  EXPECT_GE(agreement(ccry, decompose_to_basis(ccry), 3), 1.0 - 1e-9);

  Circuit ccrz(3);
  ccrz.add(Gate::rz(2.1), {2}, {0, 1});
  EXPECT_GE(agreement(ccrz, decompose_to_basis(ccrz), 4), 1.0 - 1e-9);
}

TEST(Decompose, ControlledZHAndSwap) {
  Circuit cz(2);
  cz.add(Gate::z(), {1}, {0});
  EXPECT_GE(agreement(cz, decompose_to_basis(cz), 5), 1.0 - 1e-9);

  Circuit ccz(3);
  ccz.add(Gate::z(), {2}, {0, 1});
  EXPECT_GE(agreement(ccz, decompose_to_basis(ccz), 6), 1.0 - 1e-9);

  Circuit ch(2);
  ch.add(Gate::h(), {1}, {0});
  EXPECT_GE(agreement(ch, decompose_to_basis(ch), 7), 1.0 - 1e-9);

  Circuit cswap(3);
  cswap.add(Gate::swap(), {1, 2}, {0});
  EXPECT_GE(agreement(cswap, decompose_to_basis(cswap), 8), 1.0 - 1e-9);

  Circuit swap2(2);
  swap2.add(Gate::swap(), {0, 1});
  EXPECT_GE(agreement(swap2, decompose_to_basis(swap2), 9), 1.0 - 1e-9);
}

TEST(Decompose, TripleControlledXThroughBorrowedQubit) {
  // 5 wires: controls 0,1,2, target 3, spare 4 (left dirty on purpose).
  Circuit c3x(5);
  c3x.add(Gate::x(), {3}, {0, 1, 2});
  const Circuit network = decompose_to_basis(c3x);
  EXPECT_TRUE(in_basis(network));
  for (std::uint64_t in = 0; in < 32; ++in) {
    StateVector s = StateVector::zero(5);
    for (int b = 0; b < 5; ++b)
      if ((in >> b) & 1) s.apply({Gate::x(), {b}, {}});
    s.run(network);
    const std::uint64_t expect = ((in & 7) == 7) ? (in ^ 8) : in;
    EXPECT_NEAR(s.probability_of_all(expect), 1.0, 1e-12);
  }
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    EXPECT_GE(agreement(c3x, network, 100 + seed), 1.0 - 1e-9);

  // With no spare wire the decomposition must refuse.
  Circuit cramped(4);
  cramped.add(Gate::x(), {3}, {0, 1, 2});
  EXPECT_THROW(decompose_to_basis(cramped), CircuitError);
}

TEST(Decompose, EquityGateDepthsScaleAsExpected) {
  long long d_eq_depth[4];
  long long m_max_depth[4];
  int idx = 0;
  for (int m : {4, 6, 8, 10}) {
    const RegisterLayout layout = make_equity_layout(m, 0);
    d_eq_depth[idx] =
        depth(decompose_to_basis(build_d_eq(calibrate_binomial(0.08, 0.2, 1.0, m), layout)));
    m_max_depth[idx] = depth(decompose_to_basis(build_m_max(m, layout)));
    ++idx;
  }
  for (int i = 0; i < 4; ++i) EXPECT_EQ(d_eq_depth[i], 1);  // parallel Ry layer
  EXPECT_GT(m_max_depth[1], m_max_depth[0]);
  EXPECT_GT(m_max_depth[3], m_max_depth[2]);
  // Linear growth: constant increment between equal m-steps.
  EXPECT_EQ(m_max_depth[1] - m_max_depth[0], m_max_depth[3] - m_max_depth[2]);
}

TEST(Decompose, CompositeFlattens) {
  auto body = std::make_shared<Circuit>(2);
  body->add(Gate::x(), {1}, {0});
  Circuit c(4);
  c.add(Gate::composite("inner", body), {2, 3}, {0});
  const Circuit network = decompose_to_basis(c);
  EXPECT_TRUE(in_basis(network));
  EXPECT_GE(agreement(c, network, 11), 1.0 - 1e-9);
}
