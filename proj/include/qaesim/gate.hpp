#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qaesim/error.hpp"

namespace qaesim {

struct Circuit;

enum class GateKind { X, Z, H, Ry, Rz, Swap, Composite };

inline const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::Ry: return "RY";
    case GateKind::Rz: return "RZ";
    case GateKind::Swap: return "SWAP";
    case GateKind::Composite: return "COMPOSITE";
  }
  return "?";
}

struct Gate {
  GateKind kind = GateKind::X;
  double angle = 0.0;  // Ry/Rz only
  std::shared_ptr<const Circuit> body;  // Composite only
  std::string name;                     // Composite label

  static Gate x() { return {GateKind::X}; }
  static Gate z() { return {GateKind::Z}; }
  static Gate h() { return {GateKind::H}; }
  static Gate ry(double angle) { return {GateKind::Ry, angle}; }
  static Gate rz(double angle) { return {GateKind::Rz, angle}; }
  static Gate swap() { return {GateKind::Swap}; }
  static Gate composite(std::string name, std::shared_ptr<const Circuit> body) {
    Gate g{GateKind::Composite};
    g.body = std::move(body);
    g.name = std::move(name);
    return g;
  }

  // Number of target wires the gate occupies.
  int arity() const;
};

// One gate bound to concrete wires. Controls condition the whole gate on
// every listed qubit being |1>.
struct GateInstance {
  Gate gate;
  std::vector<int> targets;
  std::vector<int> controls;
};

struct QubitRange {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(int q) const { return q >= begin && q < end; }
  std::vector<int> indices() const {
    std::vector<int> out;
    out.reserve(size());
    for (int q = begin; q < end; ++q) out.push_back(q);
    return out;
  }
};

// Assignment of qubit indices to circuit roles. Ranges must be disjoint and
// together cover every qubit of the register they describe.
struct RegisterLayout {
  QubitRange rf;     // risk factor
  QubitRange rm;     // risk measure (single qubit in practice)
  QubitRange out;    // phase-estimation output
  QubitRange anc;    // scratch pool, restored to |0> by every composite gate
  QubitRange count;  // binary counter
  QubitRange st;     // one-hot state marker

  int num_qubits() const {
    int n = 0;
    for (const QubitRange* r : ranges()) n = std::max(n, r->end);
    return n;
  }

  std::vector<const QubitRange*> ranges() const {
    return {&rf, &rm, &out, &anc, &count, &st};
  }

  int rm_qubit() const {
    if (rm.size() != 1) throw LayoutError("layout does not define a single rm qubit");
    return rm.begin;
  }

  void validate(int total_qubits) const {
    std::vector<char> seen(static_cast<std::size_t>(total_qubits), 0);
    for (const QubitRange* r : ranges()) {
      if (r->begin < 0 || r->end > total_qubits || r->begin > r->end)
        throw LayoutError("layout range out of bounds");
      for (int q = r->begin; q < r->end; ++q) {
        if (seen[static_cast<std::size_t>(q)]) throw LayoutError("layout ranges overlap at qubit " + std::to_string(q));
        seen[static_cast<std::size_t>(q)] = 1;
      }
    }
    for (int q = 0; q < total_qubits; ++q)
      if (!seen[static_cast<std::size_t>(q)]) throw LayoutError("layout leaves qubit " + std::to_string(q) + " without a role");
  }
};

// An ordered gate program over a fixed-size register.
struct Circuit {
  int num_qubits = 0;
  std::vector<GateInstance> instances;
  RegisterLayout layout;

  Circuit() = default;
  explicit Circuit(int qubits) : num_qubits(qubits) {}
  Circuit(int qubits, RegisterLayout lay) : num_qubits(qubits), layout(std::move(lay)) {}

  Circuit& add(Gate gate, std::vector<int> targets, std::vector<int> controls = {}) {
    instances.push_back({std::move(gate), std::move(targets), std::move(controls)});
    return *this;
  }

  Circuit& append(const Circuit& other) {
    if (other.num_qubits != num_qubits)
      throw CircuitError("appending circuits over different register sizes");
    instances.insert(instances.end(), other.instances.begin(), other.instances.end());
    return *this;
  }

  std::size_t size() const { return instances.size(); }
};

inline int Gate::arity() const {
  switch (kind) {
    case GateKind::Swap: return 2;
    case GateKind::Composite: return body ? body->num_qubits : 0;
    default: return 1;
  }
}

namespace detail {

inline void check_distinct(const std::vector<int>& qubits, const char* what) {
  std::set<int> s(qubits.begin(), qubits.end());
  if (s.size() != qubits.size()) throw CircuitError(std::string("duplicate ") + what + " qubit index");
}

}  // namespace detail

inline void validate_instance(const GateInstance& inst, int num_qubits) {
  if (static_cast<int>(inst.targets.size()) != inst.gate.arity())
    throw CircuitError(std::string(gate_name(inst.gate.kind)) + " expects " +
                       std::to_string(inst.gate.arity()) + " target(s), got " +
                       std::to_string(inst.targets.size()));
  if (inst.gate.kind == GateKind::Ry || inst.gate.kind == GateKind::Rz) {
    if (!std::isfinite(inst.gate.angle)) throw CircuitError("non-finite rotation angle");
  }
  std::vector<int> all = inst.targets;
  all.insert(all.end(), inst.controls.begin(), inst.controls.end());
  detail::check_distinct(inst.targets, "target");
  detail::check_distinct(inst.controls, "control");
  detail::check_distinct(all, "instance");
  for (int q : all)
    if (q < 0 || q >= num_qubits)
      throw CircuitError("qubit index " + std::to_string(q) + " out of range for " +
                         std::to_string(num_qubits) + "-qubit register");
}

inline void validate(const Circuit& circuit) {
  for (const GateInstance& inst : circuit.instances) {
    validate_instance(inst, circuit.num_qubits);
    if (inst.gate.kind == GateKind::Composite) validate(*inst.gate.body);
  }
}

// Structural equality (angles compared exactly).
inline bool operator==(const Gate& a, const Gate& b);
inline bool operator==(const GateInstance& a, const GateInstance& b) {
  return a.gate == b.gate && a.targets == b.targets && a.controls == b.controls;
}
inline bool operator==(const Circuit& a, const Circuit& b) {
  return a.num_qubits == b.num_qubits && a.instances == b.instances;
}
inline bool operator==(const Gate& a, const Gate& b) {
  if (a.kind != b.kind || a.angle != b.angle) return false;
  if (a.kind != GateKind::Composite) return true;
  if (a.name != b.name) return false;
  if (!a.body || !b.body) return a.body == b.body;
  return *a.body == *b.body;
}

inline Gate inverse(const Gate& gate);

// Reversed instance order with each gate replaced by its inverse. Rotation
// angles flip sign; X/Z/H/Swap (and their controlled forms) are self-inverse.
inline Circuit inverse(const Circuit& circuit) {
  Circuit inv(circuit.num_qubits, circuit.layout);
  inv.instances.reserve(circuit.instances.size());
  for (auto it = circuit.instances.rbegin(); it != circuit.instances.rend(); ++it)
    inv.instances.push_back({inverse(it->gate), it->targets, it->controls});
  return inv;
}

inline Gate inverse(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::Ry: return Gate::ry(-gate.angle);
    case GateKind::Rz: return Gate::rz(-gate.angle);
    case GateKind::Composite:
      return Gate::composite(gate.name, std::make_shared<Circuit>(inverse(*gate.body)));
    default: return gate;
  }
}

// Promotes every instance with an extra control set; the result applies the
// whole circuit when all controls are |1> and the identity otherwise.
inline Circuit controlled(const Circuit& circuit, const std::vector<int>& control_qubits) {
  detail::check_distinct(control_qubits, "control");
  std::set<int> used;
  for (const GateInstance& inst : circuit.instances) {
    used.insert(inst.targets.begin(), inst.targets.end());
    used.insert(inst.controls.begin(), inst.controls.end());
  }
  for (int c : control_qubits) {
    if (c < 0 || c >= circuit.num_qubits)
      throw CircuitError("control qubit " + std::to_string(c) + " out of range");
    if (used.count(c)) throw CircuitError("control qubit " + std::to_string(c) + " overlaps the circuit");
  }
  Circuit result(circuit.num_qubits, circuit.layout);
  result.instances.reserve(circuit.instances.size());
  for (const GateInstance& inst : circuit.instances) {
    GateInstance promoted = inst;
    promoted.controls.insert(promoted.controls.end(), control_qubits.begin(), control_qubits.end());
    result.instances.push_back(std::move(promoted));
  }
  return result;
}

// Rebinds a circuit built over local wires 0..k-1 onto the global wires listed
// in `mapping`, producing a circuit over `total_qubits`.
inline Circuit embed(const Circuit& local, const std::vector<int>& mapping, int total_qubits,
                     RegisterLayout layout = {}) {
  if (static_cast<int>(mapping.size()) != local.num_qubits)
    throw CircuitError("embed mapping size does not match circuit");
  Circuit result(total_qubits, std::move(layout));
  result.instances.reserve(local.instances.size());
  for (const GateInstance& inst : local.instances) {
    GateInstance mapped = inst;
    for (int& q : mapped.targets) q = mapping.at(static_cast<std::size_t>(q));
    for (int& q : mapped.controls) q = mapping.at(static_cast<std::size_t>(q));
    validate_instance(mapped, total_qubits);
    result.instances.push_back(std::move(mapped));
  }
  return result;
}

namespace detail {

inline void dump_instance(std::ostream& os, const GateInstance& inst) {
  if (inst.gate.kind == GateKind::Composite) {
    // Composites are flattened on output; the text format carries primitives only.
    for (const GateInstance& sub : inst.gate.body->instances) {
      GateInstance mapped = sub;
      for (int& q : mapped.targets) q = inst.targets.at(static_cast<std::size_t>(q));
      for (int& q : mapped.controls) q = inst.targets.at(static_cast<std::size_t>(q));
      mapped.controls.insert(mapped.controls.end(), inst.controls.begin(), inst.controls.end());
      dump_instance(os, mapped);
    }
    return;
  }
  os << gate_name(inst.gate.kind);
  if (inst.gate.kind == GateKind::Ry || inst.gate.kind == GateKind::Rz) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", inst.gate.angle);
    os << '(' << buf << ')';
  }
  os << " targets=[";
  for (std::size_t i = 0; i < inst.targets.size(); ++i) os << (i ? "," : "") << inst.targets[i];
  os << "] controls=[";
  for (std::size_t i = 0; i < inst.controls.size(); ++i) os << (i ? "," : "") << inst.controls[i];
  os << "]\n";
}

inline void dump_range(std::ostream& os, const char* role, const QubitRange& r) {
  os << ' ' << role << "=[" << r.begin << ',' << r.end << ')';
}

}  // namespace detail

// Line-oriented text format: a header with the register size and layout,
// then one `GATE(angle?) targets=[..] controls=[..]` line per instance.
inline void dump_circuit(std::ostream& os, const Circuit& circuit) {
  os << "qubits=" << circuit.num_qubits << '\n';
  os << "layout";
  detail::dump_range(os, "rf", circuit.layout.rf);
  detail::dump_range(os, "rm", circuit.layout.rm);
  detail::dump_range(os, "out", circuit.layout.out);
  detail::dump_range(os, "anc", circuit.layout.anc);
  detail::dump_range(os, "c", circuit.layout.count);
  detail::dump_range(os, "st", circuit.layout.st);
  os << '\n';
  for (const GateInstance& inst : circuit.instances) detail::dump_instance(os, inst);
}

inline std::string dump_circuit(const Circuit& circuit) {
  std::ostringstream os;
  dump_circuit(os, circuit);
  return os.str();
}

}  // namespace qaesim
