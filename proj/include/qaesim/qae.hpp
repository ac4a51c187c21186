#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "qaesim/builders.hpp"
#include "qaesim/gate.hpp"
#include "qaesim/statevector.hpp"

namespace qaesim {

// A scenario-generation circuit paired with a risk-measure circuit over one
// shared register, plus the output register used for phase estimation.
//
// `reflection` lists the input qubits whose joint |0...0> state the zero
// reflection must flip: every register the two circuits leave live (risk
// factors, any persistent state qubits) with the risk-measure qubit last.
// Scratch qubits that the circuits restore on every basis input stay out of
// the list.
struct QaeProblem {
  Circuit d;
  Circuit m;
  RegisterLayout layout;
  int output_qubits = 0;
  std::vector<int> reflection;
};

inline QaeProblem make_problem(Circuit d, Circuit m, const RegisterLayout& layout,
                               int output_qubits, std::vector<int> extra_live = {}) {
  if (d.num_qubits != m.num_qubits) throw CircuitError("d and m span different registers");
  if (layout.out.size() != output_qubits)
    throw LayoutError("layout reserves " + std::to_string(layout.out.size()) +
                      " output qubits, problem needs " + std::to_string(output_qubits));
  QaeProblem p;
  p.d = std::move(d);
  p.m = std::move(m);
  p.layout = layout;
  p.output_qubits = output_qubits;
  p.reflection = layout.rf.indices();
  p.reflection.insert(p.reflection.end(), extra_live.begin(), extra_live.end());
  p.reflection.push_back(layout.rm_qubit());
  return p;
}

// Sign flip on the rm |0> component: X Z X.
inline Circuit build_q_psi0(const RegisterLayout& layout) {
  Circuit c(layout.num_qubits(), layout);
  const int rm = layout.rm_qubit();
  c.add(Gate::x(), {rm});
  c.add(Gate::z(), {rm});
  c.add(Gate::x(), {rm});
  return c;
}

// Reflection about the all-|0> input state: X every reflection qubit, AND the
// flipped register into the ancilla chain, pick up the phase with a
// controlled Z against the risk-measure qubit, then uncompute.
inline Circuit build_q00(const RegisterLayout& layout, const std::vector<int>& reflection) {
  if (reflection.empty()) throw CircuitError("empty reflection register");
  const int k = static_cast<int>(reflection.size());
  const int rm = reflection.back();
  Circuit c(layout.num_qubits(), layout);
  for (int q : reflection) c.add(Gate::x(), {q});
  if (k == 1) {
    c.add(Gate::z(), {rm});
  } else if (k == 2) {
    c.add(Gate::z(), {rm}, {reflection.front()});
  } else {
    const std::vector<int> anc = layout.anc.indices();
    if (static_cast<int>(anc.size()) < k - 1)
      throw LayoutError("zero reflection over " + std::to_string(k) + " inputs needs " +
                        std::to_string(k - 1) + " ancillas");
    c.add(Gate::x(), {anc[0]}, {reflection[0], reflection[1]});
    for (int i = 1; i < k - 1; ++i)
      c.add(Gate::x(), {anc[i]}, {anc[i - 1], reflection[i + 1]});
    c.add(Gate::z(), {rm}, {anc[k - 2]});
    for (int i = k - 2; i >= 1; --i)
      c.add(Gate::x(), {anc[i]}, {anc[i - 1], reflection[i + 1]});
    c.add(Gate::x(), {anc[0]}, {reflection[0], reflection[1]});
  }
  for (int q : reflection) c.add(Gate::x(), {q});
  return c;
}

// Grover operator Q = Q_psi Q_psi0 with Q_psi = M D Q00 D^dagger M^dagger.
inline Circuit build_q(const QaeProblem& problem) {
  Circuit q = build_q_psi0(problem.layout);
  q.append(inverse(problem.m));
  q.append(inverse(problem.d));
  q.append(build_q00(problem.layout, problem.reflection));
  q.append(problem.d);
  q.append(problem.m);
  return q;
}

// D, M, the Hadamard layer on the outputs, 2^l literal applications of Q
// controlled from output qubit l, and the inverse QFT readout.
inline Circuit build_full_circuit(const QaeProblem& problem) {
  const int n = problem.output_qubits;
  if (n < 1) throw CircuitError("need at least one output qubit");
  Circuit full(problem.layout.num_qubits(), problem.layout);
  full.append(problem.d);
  full.append(problem.m);
  for (int q : problem.layout.out.indices()) full.add(Gate::h(), {q});
  const Circuit q_op = build_q(problem);
  for (int l = 0; l < n; ++l) {
    const Circuit cq = controlled(q_op, {problem.layout.out.begin + l});
    const std::uint64_t reps = std::uint64_t(1) << l;
    for (std::uint64_t r = 0; r < reps; ++r) full.append(cq);
  }
  full.append(embed(inverse_qft(n), problem.layout.out.indices(), full.num_qubits, problem.layout));
  return full;
}

// delta_p = sin(theta) * pi / 2^n
inline double error_bound(double theta, int n) {
  if (theta < -1e-12 || theta > std::numbers::pi + 1e-12)
    throw CircuitError("theta outside [0, pi]");
  return std::sin(theta) * std::numbers::pi / double(std::uint64_t(1) << n);
}

struct EstimationResult {
  int n = 0;
  std::uint64_t z0 = 0;
  double theta = 0.0;    // 2 pi z0 / 2^n
  double p_est = 0.0;    // sin^2(pi z0 / 2^n)
  double delta_p = 0.0;  // sin(theta) pi / 2^n
  std::array<std::uint64_t, 2> peaks{0, 0};  // z0 and its mirror 2^n - z0
  OutcomeHistogram histogram;
};

namespace detail {

// z and 2^n - z encode the same p; fold onto z <= 2^(n-1) and take the modal
// bin, preferring the smaller z on ties.
inline EstimationResult estimate_from_masses(const std::vector<double>& mass, int n,
                                             OutcomeHistogram histogram) {
  const std::uint64_t dim = std::uint64_t(1) << n;
  const std::uint64_t half = dim / 2;
  std::vector<double> folded(half + 1, 0.0);
  for (std::uint64_t z = 0; z < dim; ++z) {
    const std::uint64_t zf = z <= half ? z : dim - z;
    folded[zf] += mass[z];
  }
  std::uint64_t z0 = 0;
  for (std::uint64_t z = 1; z <= half; ++z)
    if (folded[z] > folded[z0]) z0 = z;
  EstimationResult result;
  result.n = n;
  result.z0 = z0;
  result.theta = 2.0 * std::numbers::pi * double(z0) / double(dim);
  result.p_est = std::pow(std::sin(std::numbers::pi * double(z0) / double(dim)), 2);
  result.delta_p = error_bound(result.theta, n);
  result.peaks = {z0, (dim - z0) % dim};
  result.histogram = std::move(histogram);
  return result;
}

}  // namespace detail

// Exact-readout estimation: simulate, take the full output marginal, fold.
inline EstimationResult estimate(const QaeProblem& problem, int max_qubits = kDefaultMaxQubits) {
  const Circuit full = build_full_circuit(problem);
  StateVector state = StateVector::zero(full.num_qubits, max_qubits);
  state.run(full);
  OutcomeHistogram hist = state.marginal_distribution(problem.layout.out.indices());
  std::vector<double> mass(std::uint64_t(1) << problem.output_qubits, 0.0);
  for (const auto& [z, p] : hist.probabilities) mass[z] = p;
  return detail::estimate_from_masses(mass, problem.output_qubits, std::move(hist));
}

struct ShotSpec {
  std::uint64_t shots = 10000;
  std::uint64_t seed = 1;
};

// Sampled estimation: identical circuit, modal folded outcome of the shots.
inline EstimationResult estimate(const QaeProblem& problem, const ShotSpec& spec,
                                 int max_qubits = kDefaultMaxQubits) {
  const Circuit full = build_full_circuit(problem);
  StateVector state = StateVector::zero(full.num_qubits, max_qubits);
  state.run(full);
  OutcomeHistogram hist =
      state.sample(problem.layout.out.indices(), spec.shots, spec.seed);
  std::vector<double> mass(std::uint64_t(1) << problem.output_qubits, 0.0);
  for (const auto& [z, c] : hist.counts) mass[z] = double(c);
  return detail::estimate_from_masses(mass, problem.output_qubits, std::move(hist));
}

}  // namespace qaesim
