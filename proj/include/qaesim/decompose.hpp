#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <vector>

#include "qaesim/gate.hpp"

namespace qaesim {

// Critical-path length under greedy as-soon-as-possible layering: gates on
// disjoint qubit sets may share a layer.
inline long long depth(const Circuit& circuit) {
  std::vector<long long> ready(static_cast<std::size_t>(circuit.num_qubits), 0);
  long long total = 0;
  for (const GateInstance& inst : circuit.instances) {
    long long layer = 0;
    for (int q : inst.targets) layer = std::max(layer, ready[static_cast<std::size_t>(q)]);
    for (int q : inst.controls) layer = std::max(layer, ready[static_cast<std::size_t>(q)]);
    ++layer;
    for (int q : inst.targets) ready[static_cast<std::size_t>(q)] = layer;
    for (int q : inst.controls) ready[static_cast<std::size_t>(q)] = layer;
    total = std::max(total, layer);
  }
  return total;
}

namespace detail {

inline void decompose_instance(const GateInstance& inst, Circuit& out);

inline std::vector<int> with(const std::vector<int>& controls, int extra) {
  std::vector<int> v = controls;
  v.push_back(extra);
  return v;
}

inline void emit(Circuit& out, Gate gate, std::vector<int> targets, std::vector<int> controls = {}) {
  decompose_instance({std::move(gate), std::move(targets), std::move(controls)}, out);
}

// Standard 15-gate {H, CNOT, Rz(+-pi/4)} network for the Toffoli; equals CCX
// up to a global phase and schedules to depth 11.
inline void emit_toffoli_network(Circuit& out, int a, int b, int t) {
  const double q = std::numbers::pi / 4;
  out.add(Gate::h(), {t});
  out.add(Gate::x(), {t}, {b});
  out.add(Gate::rz(-q), {t});
  out.add(Gate::x(), {t}, {a});
  out.add(Gate::rz(q), {t});
  out.add(Gate::x(), {t}, {b});
  out.add(Gate::rz(-q), {t});
  out.add(Gate::x(), {t}, {a});
  out.add(Gate::rz(q), {b});
  out.add(Gate::rz(q), {t});
  out.add(Gate::h(), {t});
  out.add(Gate::x(), {b}, {a});
  out.add(Gate::rz(q), {a});
  out.add(Gate::rz(-q), {b});
  out.add(Gate::x(), {b}, {a});
}

inline int find_borrow(const Circuit& out, const std::vector<int>& busy) {
  std::set<int> taken(busy.begin(), busy.end());
  for (int q = 0; q < out.num_qubits; ++q)
    if (!taken.count(q)) return q;
  throw CircuitError("multi-controlled X needs a spare qubit to borrow");
}

// k>=3 controls: two halves through a borrowed (possibly dirty) qubit, four
// half-sized multi-controlled X applications.
inline void emit_mcx(Circuit& out, std::vector<int> controls, int target) {
  const int k = static_cast<int>(controls.size());
  if (k == 0) {
    out.add(Gate::x(), {target});
    return;
  }
  if (k == 1) {
    out.add(Gate::x(), {target}, {controls[0]});
    return;
  }
  if (k == 2) {
    emit_toffoli_network(out, controls[0], controls[1], target);
    return;
  }
  std::vector<int> busy = controls;
  busy.push_back(target);
  const int borrow = find_borrow(out, busy);
  const int half = (k + 1) / 2;
  std::vector<int> lo(controls.begin(), controls.begin() + half);
  std::vector<int> hi(controls.begin() + half, controls.end());
  hi.push_back(borrow);
  for (int rep = 0; rep < 2; ++rep) {
    emit_mcx(out, lo, borrow);
    emit_mcx(out, hi, target);
  }
}

// Controlled rotation about y or z: two CNOTs and two half-angle rotations;
// extra controls recurse through the standard V / V-dagger sandwich.
inline void emit_controlled_rotation(Circuit& out, GateKind kind, double angle,
                                     std::vector<int> controls, int target) {
  auto rot = [kind](double a) { return kind == GateKind::Ry ? Gate::ry(a) : Gate::rz(a); };
  if (controls.empty()) {
    out.add(rot(angle), {target});
    return;
  }
  if (controls.size() == 1) {
    const int c = controls[0];
    out.add(Gate::x(), {target}, {c});
    out.add(rot(-angle / 2), {target});
    out.add(Gate::x(), {target}, {c});
    out.add(rot(angle / 2), {target});
    return;
  }
  const int last = controls.back();
  std::vector<int> rest(controls.begin(), controls.end() - 1);
  emit_controlled_rotation(out, kind, angle / 2, {last}, target);
  emit_mcx(out, rest, last);
  emit_controlled_rotation(out, kind, -angle / 2, {last}, target);
  emit_mcx(out, rest, last);
  emit_controlled_rotation(out, kind, angle / 2, rest, target);
}

inline void decompose_instance(const GateInstance& inst, Circuit& out) {
  const std::vector<int>& ctl = inst.controls;
  switch (inst.gate.kind) {
    case GateKind::Composite:
      for (const GateInstance& sub : inst.gate.body->instances) {
        GateInstance mapped = sub;
        for (int& q : mapped.targets) q = inst.targets.at(static_cast<std::size_t>(q));
        for (int& q : mapped.controls) q = inst.targets.at(static_cast<std::size_t>(q));
        mapped.controls.insert(mapped.controls.end(), ctl.begin(), ctl.end());
        decompose_instance(mapped, out);
      }
      return;
    case GateKind::Swap: {
      const int a = inst.targets[0];
      const int b = inst.targets[1];
      emit(out, Gate::x(), {b}, with(ctl, a));
      emit(out, Gate::x(), {a}, with(ctl, b));
      emit(out, Gate::x(), {b}, with(ctl, a));
      return;
    }
    case GateKind::X:
      emit_mcx(out, ctl, inst.targets[0]);
      return;
    case GateKind::Z: {
      // Z = H X H
      const int t = inst.targets[0];
      if (ctl.empty()) {
        out.add(Gate::z(), {t});
        return;
      }
      out.add(Gate::h(), {t});
      emit_mcx(out, ctl, t);
      out.add(Gate::h(), {t});
      return;
    }
    case GateKind::H: {
      // H = Ry(pi/4) Z Ry(-pi/4), exactly.
      const int t = inst.targets[0];
      if (ctl.empty()) {
        out.add(Gate::h(), {t});
        return;
      }
      out.add(Gate::ry(-std::numbers::pi / 4), {t});
      emit(out, Gate::z(), {t}, ctl);
      out.add(Gate::ry(std::numbers::pi / 4), {t});
      return;
    }
    case GateKind::Ry:
    case GateKind::Rz:
      emit_controlled_rotation(out, inst.gate.kind, inst.gate.angle, ctl, inst.targets[0]);
      return;
  }
}

}  // namespace detail

// Rewrites the circuit over the {one-qubit gates, CNOT} basis. Multi-controlled
// X gates expand through Toffoli networks (borrowing a spare wire when three or
// more controls remain); the result matches the original unitary up to global
// phase. Intended for depth accounting, not for further controlled promotion.
inline Circuit decompose_to_basis(const Circuit& circuit) {
  Circuit out(circuit.num_qubits, circuit.layout);
  for (const GateInstance& inst : circuit.instances) detail::decompose_instance(inst, out);
  return out;
}

}  // namespace qaesim
