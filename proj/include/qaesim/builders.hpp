#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qaesim/gate.hpp"

namespace qaesim {

inline Circuit toffoli() {
  Circuit c(3);
  c.layout.anc = {0, 3};
  c.add(Gate::x(), {2}, {0, 1});
  return c;
}

// Flips `result` iff every input is |1>, computing the conjunction through a
// chain of Toffolis whose partial products live in `ancillas`. The second,
// mirrored half of the chain restores every ancilla to |0>.
inline Circuit and_cascade(Circuit base, const std::vector<int>& inputs,
                           const std::vector<int>& ancillas, int result) {
  const int k = static_cast<int>(inputs.size());
  if (k == 0) throw CircuitError("and_cascade needs at least one input");
  const int needed = std::max(0, k - 2);
  if (static_cast<int>(ancillas.size()) < needed)
    throw CircuitError("and_cascade over " + std::to_string(k) + " inputs needs " +
                       std::to_string(needed) + " ancillas");
  if (k == 1) {
    base.add(Gate::x(), {result}, {inputs[0]});
    return base;
  }
  if (k == 2) {
    base.add(Gate::x(), {result}, {inputs[0], inputs[1]});
    return base;
  }
  base.add(Gate::x(), {ancillas[0]}, {inputs[0], inputs[1]});
  for (int i = 1; i < k - 2; ++i)
    base.add(Gate::x(), {ancillas[i]}, {ancillas[i - 1], inputs[i + 1]});
  base.add(Gate::x(), {result}, {ancillas[k - 3], inputs[k - 1]});
  for (int i = k - 3; i >= 1; --i)
    base.add(Gate::x(), {ancillas[i]}, {ancillas[i - 1], inputs[i + 1]});
  base.add(Gate::x(), {ancillas[0]}, {inputs[0], inputs[1]});
  return base;
}

inline Circuit and_cascade(int num_qubits, const std::vector<int>& inputs,
                           const std::vector<int>& ancillas, int result) {
  return and_cascade(Circuit(num_qubits), inputs, ancillas, result);
}

// X/Toffoli realisation of a two-input OR; inputs are restored, the third
// qubit flips iff either input is |1>.
inline Circuit or3() {
  Circuit c(3);
  c.layout.anc = {0, 3};
  c.add(Gate::x(), {1});
  c.add(Gate::x(), {2}, {0, 1});
  c.add(Gate::x(), {0});
  c.add(Gate::x(), {1});
  c.add(Gate::x(), {2}, {0, 1});
  c.add(Gate::x(), {0});
  c.add(Gate::x(), {2}, {0, 1});
  return c;
}

// Flips `result` iff any input is |1> (De Morgan over the AND cascade for
// three or more inputs).
inline Circuit or_onto(Circuit base, const std::vector<int>& inputs,
                       const std::vector<int>& ancillas, int result) {
  const int k = static_cast<int>(inputs.size());
  if (k == 0) throw CircuitError("or_onto needs at least one input");
  if (k == 1) {
    base.add(Gate::x(), {result}, {inputs[0]});
    return base;
  }
  if (k == 2) {
    base.append(embed(or3(), {inputs[0], inputs[1], result}, base.num_qubits, base.layout));
    return base;
  }
  for (int q : inputs) base.add(Gate::x(), {q});
  base.add(Gate::x(), {result});
  base = and_cascade(std::move(base), inputs, ancillas, result);
  for (int q : inputs) base.add(Gate::x(), {q});
  return base;
}

inline Circuit multi_controlled_x(int num_qubits, const std::vector<int>& controls,
                                  const std::vector<int>& ancillas, int target) {
  return and_cascade(Circuit(num_qubits), controls, ancillas, target);
}

namespace detail {

// Controlled phase diag(1,1,1,e^{i*phi}) expressed with the Rz gate set: the
// controlled Rz plus a half-angle Rz on the control (global phase dropped).
inline void add_controlled_phase(Circuit& c, int control, int target, double phi) {
  c.add(Gate::rz(phi / 2), {control});
  c.add(Gate::rz(phi), {target}, {control});
}

}  // namespace detail

// The circuit-level QFT as used on an all-|0> output register: a parallel
// layer of Hadamards.
inline Circuit qft(int n) {
  if (n < 1) throw CircuitError("qft needs at least one qubit");
  Circuit c(n);
  c.layout.out = {0, n};
  for (int q = 0; q < n; ++q) c.add(Gate::h(), {q});
  return c;
}

// Full inverse quantum Fourier transform: the swap network followed by the
// Hadamard / controlled-phase ladder, phases -pi/2^(l2-l1).
inline Circuit inverse_qft(int n) {
  if (n < 1) throw CircuitError("inverse_qft needs at least one qubit");
  Circuit c(n);
  c.layout.out = {0, n};
  for (int q = 0; q < n / 2; ++q) c.add(Gate::swap(), {q, n - 1 - q});
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < k; ++j)
      detail::add_controlled_phase(c, j, k, -std::numbers::pi / double(1LL << (k - j)));
    c.add(Gate::h(), {k});
  }
  return c;
}

// Full forward QFT (exact inverse of inverse_qft on every state, not just the
// all-|0> shortcut above).
inline Circuit qft_full(int n) {
  if (n < 1) throw CircuitError("qft_full needs at least one qubit");
  Circuit c(n);
  c.layout.out = {0, n};
  for (int k = n - 1; k >= 0; --k) {
    c.add(Gate::h(), {k});
    for (int j = k - 1; j >= 0; --j)
      detail::add_controlled_phase(c, j, k, std::numbers::pi / double(1LL << (k - j)));
  }
  for (int q = n / 2 - 1; q >= 0; --q) c.add(Gate::swap(), {q, n - 1 - q});
  return c;
}

}  // namespace qaesim
