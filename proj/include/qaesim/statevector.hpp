#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <thread>
#include <vector>

#include "qaesim/gate.hpp"

namespace qaesim {

using Amplitude = std::complex<double>;

// Default memory budget: 2^26 complex doubles = 1 GiB of amplitudes.
inline constexpr int kDefaultMaxQubits = 26;

// Exact probabilities or shot counts over a measured qubit subset. Bit j of a
// histogram key is the value of qubits[j].
struct OutcomeHistogram {
  std::vector<int> qubits;
  std::map<std::uint64_t, double> probabilities;
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total_shots = 0;

  bool exact() const { return total_shots == 0; }
};

namespace detail {

// Inserts zero bits at the given (ascending) positions so that `base`
// enumerates exactly the indices whose fixed bits are clear.
inline std::uint64_t expand_index(std::uint64_t base, const std::vector<int>& positions) {
  for (int p : positions) {
    const std::uint64_t low = base & ((std::uint64_t(1) << p) - 1);
    base = ((base >> p) << (p + 1)) | low;
  }
  return base;
}

template <typename Body>
void parallel_for(std::uint64_t count, Body&& body) {
  static const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw < 2 || count < (std::uint64_t(1) << 18)) {
    body(std::uint64_t(0), count);
    return;
  }
  const unsigned workers = std::min<unsigned>(hw, 8);
  const std::uint64_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace detail

// Dense complex amplitude vector over the 2^k computational basis states of a
// k-qubit register. Qubit l is bit 2^l of the basis index (little-endian).
class StateVector {
 public:
  static StateVector zero(int num_qubits, int max_qubits = kDefaultMaxQubits) {
    if (num_qubits < 1) throw CircuitError("state needs at least one qubit");
    if (num_qubits > max_qubits) throw CapacityError(num_qubits, max_qubits);
    StateVector s;
    s.num_qubits_ = num_qubits;
    s.amps_.assign(std::uint64_t(1) << num_qubits, Amplitude(0.0, 0.0));
    s.amps_[0] = Amplitude(1.0, 0.0);
    return s;
  }

  int num_qubits() const { return num_qubits_; }
  std::uint64_t dimension() const { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }
  std::vector<Amplitude>& amplitudes() { return amps_; }
  Amplitude amplitude(std::uint64_t basis) const { return amps_[basis]; }

  double norm() const {
    double n = 0.0;
    for (const Amplitude& a : amps_) n += std::norm(a);
    return std::sqrt(n);
  }

  void apply(const GateInstance& inst) {
    validate_instance(inst, num_qubits_);
    apply_unchecked(inst);
  }

  void run(const Circuit& circuit) {
    if (circuit.num_qubits != num_qubits_)
      throw CircuitError("circuit register size does not match state");
    for (const GateInstance& inst : circuit.instances) apply(inst);
  }

  // Probability of one full-register basis outcome.
  double probability_of_all(std::uint64_t basis) const { return std::norm(amps_[basis]); }

  // Probability that the listed qubits read exactly `value`.
  double probability_of(const std::vector<int>& qubit_subset, std::uint64_t value) const {
    check_subset(qubit_subset);
    if (qubit_subset.size() < 64 && value >> qubit_subset.size())
      throw CircuitError("value has more bits than the measured subset");
    double p = 0.0;
    const std::uint64_t dim = dimension();
    for (std::uint64_t i = 0; i < dim; ++i)
      if (extract(i, qubit_subset) == value) p += std::norm(amps_[i]);
    return p;
  }

  // Exact marginal over the listed qubits (no collapse).
  OutcomeHistogram marginal_distribution(const std::vector<int>& qubit_subset) const {
    check_subset(qubit_subset);
    std::vector<double> dense(std::uint64_t(1) << qubit_subset.size(), 0.0);
    const std::uint64_t dim = dimension();
    for (std::uint64_t i = 0; i < dim; ++i) dense[extract(i, qubit_subset)] += std::norm(amps_[i]);
    OutcomeHistogram hist;
    hist.qubits = qubit_subset;
    for (std::uint64_t v = 0; v < dense.size(); ++v) hist.probabilities[v] = dense[v];
    return hist;
  }

  // Seeded i.i.d. sampling from the exact marginal; identical seeds give
  // identical histograms. Draws use raw mt19937_64 output so results do not
  // depend on the standard library's distribution implementations.
  OutcomeHistogram sample(const std::vector<int>& qubit_subset, std::uint64_t shots,
                          std::uint64_t seed) const {
    if (shots == 0) throw CircuitError("sampling needs at least one shot");
    check_subset(qubit_subset);
    std::vector<double> cumulative(std::uint64_t(1) << qubit_subset.size(), 0.0);
    const std::uint64_t dim = dimension();
    for (std::uint64_t i = 0; i < dim; ++i) cumulative[extract(i, qubit_subset)] += std::norm(amps_[i]);
    double acc = 0.0;
    for (double& c : cumulative) {
      acc += c;
      c = acc;
    }
    std::mt19937_64 rng(seed);
    OutcomeHistogram hist;
    hist.qubits = qubit_subset;
    hist.total_shots = shots;
    for (std::uint64_t s = 0; s < shots; ++s) {
      const double u = double(rng() >> 11) * 0x1.0p-53 * acc;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const std::uint64_t v = std::min<std::uint64_t>(
          std::uint64_t(it - cumulative.begin()), cumulative.size() - 1);
      ++hist.counts[v];
    }
    return hist;
  }

 private:
  void check_subset(const std::vector<int>& subset) const {
    if (subset.empty()) throw CircuitError("empty qubit subset");
    detail::check_distinct(subset, "subset");
    for (int q : subset)
      if (q < 0 || q >= num_qubits_) throw CircuitError("subset qubit out of range");
  }

  std::uint64_t extract(std::uint64_t index, const std::vector<int>& subset) const {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < subset.size(); ++j) v |= ((index >> subset[j]) & 1u) << j;
    return v;
  }

  void apply_unchecked(const GateInstance& inst) {
    if (inst.gate.kind == GateKind::Composite) {
      for (const GateInstance& sub : inst.gate.body->instances) {
        GateInstance mapped = sub;
        for (int& q : mapped.targets) q = inst.targets.at(static_cast<std::size_t>(q));
        for (int& q : mapped.controls) q = inst.targets.at(static_cast<std::size_t>(q));
        mapped.controls.insert(mapped.controls.end(), inst.controls.begin(), inst.controls.end());
        apply(mapped);
      }
      return;
    }

    std::uint64_t cmask = 0;
    for (int c : inst.controls) cmask |= std::uint64_t(1) << c;

    if (inst.gate.kind == GateKind::Swap) {
      const int a = inst.targets[0];
      const int b = inst.targets[1];
      std::vector<int> fixed = {std::min(a, b), std::max(a, b)};
      append_sorted_controls(fixed, inst.controls);
      const std::uint64_t abit = std::uint64_t(1) << a;
      const std::uint64_t bbit = std::uint64_t(1) << b;
      const std::uint64_t bases = dimension() >> fixed.size();
      Amplitude* amps = amps_.data();
      detail::parallel_for(bases, [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t base = lo; base < hi; ++base) {
          const std::uint64_t i = detail::expand_index(base, fixed) | cmask;
          std::swap(amps[i | abit], amps[i | bbit]);
        }
      });
      return;
    }

    const int t = inst.targets[0];
    std::vector<int> fixed = {t};
    append_sorted_controls(fixed, inst.controls);
    const std::uint64_t tbit = std::uint64_t(1) << t;
    const std::uint64_t bases = dimension() >> fixed.size();
    Amplitude* amps = amps_.data();

    switch (inst.gate.kind) {
      case GateKind::X:
        detail::parallel_for(bases, [&](std::uint64_t lo, std::uint64_t hi) {
          for (std::uint64_t base = lo; base < hi; ++base) {
            const std::uint64_t i0 = detail::expand_index(base, fixed) | cmask;
            std::swap(amps[i0], amps[i0 | tbit]);
          }
        });
        break;
      case GateKind::Z:
        detail::parallel_for(bases, [&](std::uint64_t lo, std::uint64_t hi) {
          for (std::uint64_t base = lo; base < hi; ++base) {
            const std::uint64_t i0 = detail::expand_index(base, fixed) | cmask;
            amps[i0 | tbit] = -amps[i0 | tbit];
          }
        });
        break;
      case GateKind::H: {
        const double inv_sqrt2 = 0.70710678118654752440;
        detail::parallel_for(bases, [&](std::uint64_t lo, std::uint64_t hi) {
          for (std::uint64_t base = lo; base < hi; ++base) {
            const std::uint64_t i0 = detail::expand_index(base, fixed) | cmask;
            const Amplitude a0 = amps[i0];
            const Amplitude a1 = amps[i0 | tbit];
            amps[i0] = (a0 + a1) * inv_sqrt2;
            amps[i0 | tbit] = (a0 - a1) * inv_sqrt2;
          }
        });
        break;
      }
      case GateKind::Ry: {
        const double c = std::cos(inst.gate.angle / 2);
        const double s = std::sin(inst.gate.angle / 2);
        detail::parallel_for(bases, [&](std::uint64_t lo, std::uint64_t hi) {
          for (std::uint64_t base = lo; base < hi; ++base) {
            const std::uint64_t i0 = detail::expand_index(base, fixed) | cmask;
            const Amplitude a0 = amps[i0];
            const Amplitude a1 = amps[i0 | tbit];
            amps[i0] = c * a0 - s * a1;
            amps[i0 | tbit] = s * a0 + c * a1;
          }
        });
        break;
      }
      case GateKind::Rz: {
        const Amplitude e0 = std::polar(1.0, -inst.gate.angle / 2);
        const Amplitude e1 = std::polar(1.0, inst.gate.angle / 2);
        detail::parallel_for(bases, [&](std::uint64_t lo, std::uint64_t hi) {
          for (std::uint64_t base = lo; base < hi; ++base) {
            const std::uint64_t i0 = detail::expand_index(base, fixed) | cmask;
            amps[i0] *= e0;
            amps[i0 | tbit] *= e1;
          }
        });
        break;
      }
      default:
        throw CircuitError("unhandled gate kind");
    }
  }

  static void append_sorted_controls(std::vector<int>& fixed, const std::vector<int>& controls) {
    fixed.insert(fixed.end(), controls.begin(), controls.end());
    std::sort(fixed.begin(), fixed.end());
  }

  int num_qubits_ = 0;
  std::vector<Amplitude> amps_;
};

// |<a|b>| -- global-phase-insensitive overlap.
inline double fidelity(const StateVector& a, const StateVector& b) {
  if (a.num_qubits() != b.num_qubits()) throw CircuitError("fidelity over mismatched registers");
  Amplitude inner(0.0, 0.0);
  const auto& av = a.amplitudes();
  const auto& bv = b.amplitudes();
  for (std::uint64_t i = 0; i < av.size(); ++i) inner += std::conj(av[i]) * bv[i];
  return std::abs(inner);
}

}  // namespace qaesim
