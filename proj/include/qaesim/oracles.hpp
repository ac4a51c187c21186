#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qaesim/error.hpp"

// Closed-form and brute-force references for every quantity the circuits are
// expected to produce. Nothing in this header touches the simulator.

namespace qaesim::oracles {

enum class Method { ClosedForm, PathEnumeration, MatrixPower, MonteCarlo };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed-form";
    case Method::PathEnumeration: return "path-enumeration";
    case Method::MatrixPower: return "matrix-power";
    case Method::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

struct OracleReport {
  std::string quantity;
  double value = 0.0;
  Method method = Method::ClosedForm;
};

// C(m, j) q^j (1-q)^(m-j)
inline double binomial_pmf(int j, int m, double q) {
  if (m < 0 || j < 0 || j > m) throw Error("binomial_pmf: j out of range");
  if (q < 0.0 || q > 1.0) throw Error("binomial_pmf: q outside [0, 1]");
  double coeff = 1.0;
  for (int i = 1; i <= j; ++i) coeff *= double(m - j + i) / double(i);
  return coeff * std::pow(q, j) * std::pow(1.0 - q, m - j);
}

using TransitionMatrix = std::array<std::array<double, 3>, 3>;

inline void check_row_stochastic(const TransitionMatrix& m, double tol = 1e-9) {
  for (const auto& row : m) {
    double sum = 0.0;
    for (double p : row) {
      if (p < -tol || p > 1.0 + tol) throw Error("transition probability outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) throw Error("transition matrix row does not sum to 1");
  }
}

// Distribution over the three levels after `steps` transitions, by repeated
// vector-matrix multiplication.
inline std::array<double, 3> trinomial_distribution(const TransitionMatrix& transition,
                                                    int initial, int steps) {
  check_row_stochastic(transition);
  if (initial < 0 || initial > 2) throw Error("initial level must be 0, 1, or 2");
  if (steps < 0) throw Error("steps must be non-negative");
  std::array<double, 3> v{0.0, 0.0, 0.0};
  v[initial] = 1.0;
  for (int s = 0; s < steps; ++s) {
    std::array<double, 3> next{0.0, 0.0, 0.0};
    for (int from = 0; from < 3; ++from)
      for (int to = 0; to < 3; ++to) next[to] += v[from] * transition[from][to];
    v = next;
  }
  return v;
}

// Same distribution by explicit enumeration of all 3^steps paths. Capped at
// six steps; use the matrix power beyond that.
inline std::array<double, 3> trinomial_distribution_by_paths(const TransitionMatrix& transition,
                                                             int initial, int steps) {
  check_row_stochastic(transition);
  if (steps < 0 || steps > 6) throw Error("path enumeration is capped at 6 steps");
  std::array<double, 3> v{0.0, 0.0, 0.0};
  std::uint64_t total = 1;
  for (int s = 0; s < steps; ++s) total *= 3;
  for (std::uint64_t path = 0; path < total; ++path) {
    double weight = 1.0;
    int level = initial;
    std::uint64_t code = path;
    for (int s = 0; s < steps; ++s) {
      const int next = int(code % 3);
      code /= 3;
      weight *= transition[level][next];
      level = next;
    }
    v[level] += weight;
  }
  return v;
}

inline double survival_prob(double q_def, int m) {
  if (q_def < 0.0 || q_def > 1.0) throw Error("survival_prob: q_def outside [0, 1]");
  if (m < 0) throw Error("survival_prob: negative step count");
  return std::pow(1.0 - q_def, m);
}

inline double default_region_prob(double q, int m, const std::set<int>& j_set) {
  double p = 0.0;
  for (int j : j_set) p += binomial_pmf(j, m, q);
  return p;
}

struct McEstimate {
  double p_hat = 0.0;
  double stderr_ = 0.0;
};

// Plain Bernoulli Monte Carlo with the standard error sqrt(p(1-p)/N).
inline McEstimate classical_mc(double p_true, std::uint64_t shots, std::uint64_t seed) {
  if (shots < 2) throw Error("classical_mc needs at least two shots");
  if (p_true < 0.0 || p_true > 1.0) throw Error("classical_mc: p outside [0, 1]");
  std::mt19937_64 rng(seed);
  std::uint64_t ones = 0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = double(rng() >> 11) * 0x1.0p-53;
    if (u < p_true) ++ones;
  }
  McEstimate est;
  est.p_hat = double(ones) / double(shots);
  est.stderr_ = std::sqrt(est.p_hat * (1.0 - est.p_hat) / double(shots));
  return est;
}

}  // namespace qaesim::oracles
