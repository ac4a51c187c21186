#pragma once

#include <cstdint>
#include <random>

#include "qaesim/statevector.hpp"

namespace qaesim::testutil {

inline StateVector run_on_zero(const Circuit& circuit, int max_qubits = kDefaultMaxQubits) {
  StateVector s = StateVector::zero(circuit.num_qubits, max_qubits);
  s.run(circuit);
  return s;
}

// Haar-ish random state: normalized complex gaussians, fixed seed.
inline StateVector random_state(int num_qubits, std::uint64_t seed) {
  StateVector s = StateVector::zero(num_qubits);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double norm2 = 0.0;
  for (Amplitude& a : s.amplitudes()) {
    a = Amplitude(gauss(rng), gauss(rng));
    norm2 += std::norm(a);
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (Amplitude& a : s.amplitudes()) a *= scale;
  return s;
}

inline int popcount(std::uint64_t v) {
  int c = 0;
  while (v) {
    c += int(v & 1);
    v >>= 1;
  }
  return c;
}

}  // namespace qaesim::testutil
