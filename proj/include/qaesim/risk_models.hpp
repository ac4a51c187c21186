#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "qaesim/builders.hpp"
#include "qaesim/gate.hpp"
#include "qaesim/oracles.hpp"

namespace qaesim {

// Angle whose Ry rotation puts probability p on |1>: p = sin^2(theta/2).
inline double rotation_angle_for(double p) {
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw CalibrationError("probability outside [0, 1]");
  p = std::min(1.0, std::max(0.0, p));
  return 2.0 * std::asin(std::sqrt(p));
}

// ---------------------------------------------------------------------------
// Binomial lattice (up/down factors matched to drift and volatility)

struct BinomialParams {
  double mu = 0.0;       // drift per year
  double sigma = 0.0;    // volatility per sqrt(year)
  double maturity = 0.0; // years
  int steps = 0;         // m
  double dt = 0.0;       // maturity / steps
  double u = std::numeric_limits<double>::quiet_NaN();
  double d = std::numeric_limits<double>::quiet_NaN();
  double q = 0.0;        // up probability
  double theta_u = 0.0;  // 2 asin sqrt(q)
};

inline BinomialParams calibrate_binomial(double mu, double sigma, double maturity, int steps) {
  if (sigma <= 0.0) throw CalibrationError("volatility must be positive");
  if (maturity <= 0.0) throw CalibrationError("maturity must be positive");
  if (steps < 1) throw CalibrationError("need at least one timestep");
  BinomialParams p;
  p.mu = mu;
  p.sigma = sigma;
  p.maturity = maturity;
  p.steps = steps;
  p.dt = maturity / steps;
  p.u = std::exp(sigma * std::sqrt(p.dt));
  p.d = 1.0 / p.u;
  p.q = (p.u * std::exp(mu * p.dt) - 1.0) / (p.u * p.u - 1.0);
  if (p.q < -1e-12 || p.q > 1.0 + 1e-12)
    throw CalibrationError("drift too large for the step size: q = " + std::to_string(p.q));
  p.q = std::min(1.0, std::max(0.0, p.q));
  p.theta_u = rotation_angle_for(p.q);
  return p;
}

// Lattice with a directly specified up probability (no drift/volatility
// attached); used for worked examples and degenerate q in {0, 1}.
inline BinomialParams binomial_from_up_probability(double q, int steps, double maturity = 1.0) {
  if (q < 0.0 || q > 1.0) throw CalibrationError("q outside [0, 1]");
  if (steps < 1) throw CalibrationError("need at least one timestep");
  BinomialParams p;
  p.maturity = maturity;
  p.steps = steps;
  p.dt = maturity / steps;
  p.q = q;
  p.theta_u = rotation_angle_for(q);
  return p;
}

// ---------------------------------------------------------------------------
// Bounded trinomial lattice for mean-reverting rates

enum class RateLevel : int { High = 0, Mid = 1, Low = 2 };

struct TrinomialParams {
  double a_dt = 0.0;  // reversion speed times timestep, dimensionless
  oracles::TransitionMatrix transition{};  // rows and columns ordered High, Mid, Low
  RateLevel initial_level = RateLevel::Mid;
  int steps = 0;
  double dr_stddev_multiple = std::numbers::sqrt3;  // level spacing in per-step stddevs
};

inline TrinomialParams calibrate_trinomial(double a_dt, RateLevel initial = RateLevel::Mid,
                                           int steps = 3) {
  if (!(a_dt > 1.0 / 6.0 && a_dt < 2.0 / 6.0))
    throw CalibrationError("a*dt must lie in (1/6, 2/6) for positive probabilities");
  if (steps < 0) throw CalibrationError("negative step count");
  TrinomialParams p;
  p.a_dt = a_dt;
  p.initial_level = initial;
  p.steps = steps;
  const double stay = 7.0 / 6.0 - 1.5 * a_dt;   // boundary level holds
  const double to_mid = -1.0 / 3.0 + 2.0 * a_dt;
  const double cross = 1.0 / 6.0 - 0.5 * a_dt;  // boundary level jumps across
  p.transition = {{{stay, to_mid, cross},
                   {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                   {cross, to_mid, stay}}};
  oracles::check_row_stochastic(p.transition, 1e-12);
  return p;
}

inline TrinomialParams trinomial_from_matrix(const oracles::TransitionMatrix& transition,
                                             RateLevel initial, int steps) {
  oracles::check_row_stochastic(transition);
  TrinomialParams p;
  p.a_dt = std::numeric_limits<double>::quiet_NaN();
  p.transition = transition;
  p.initial_level = initial;
  p.steps = steps;
  return p;
}

// ---------------------------------------------------------------------------
// Reduced-form (hazard rate) credit parameters

struct HazardParams {
  double q_def = 0.0;       // per-step default probability
  int steps = 0;
  double maturity = 0.0;    // years
  double theta_def = 0.0;   // 2 asin sqrt(q_def)
  double theta_def_c = 0.0; // pi - theta_def, the absorbing complement
  double hazard_rate = 0.0; // lambda = 1 / t_def
  double t_def = 0.0;       // characteristic timescale
};

inline HazardParams hazard_from_step_probability(double q_def, int steps, double maturity = 1.0) {
  if (q_def < 0.0 || q_def > 1.0) throw CalibrationError("q_def outside [0, 1]");
  if (steps < 1) throw CalibrationError("need at least one timestep");
  HazardParams p;
  p.q_def = q_def;
  p.steps = steps;
  p.maturity = maturity;
  p.theta_def = rotation_angle_for(q_def);
  p.theta_def_c = std::numbers::pi - p.theta_def;
  if (q_def > 0.0 && q_def < 1.0) {
    const double dt = maturity / steps;
    p.t_def = -dt / std::log1p(-q_def);
    p.hazard_rate = 1.0 / p.t_def;
  }
  return p;
}

inline HazardParams hazard_from_rate(double lambda, int steps, double maturity = 1.0) {
  if (lambda < 0.0) throw CalibrationError("hazard rate must be non-negative");
  if (steps < 1) throw CalibrationError("need at least one timestep");
  const double dt = maturity / steps;
  HazardParams p = hazard_from_step_probability(-std::expm1(-lambda * dt), steps, maturity);
  p.hazard_rate = lambda;
  p.t_def = lambda > 0.0 ? 1.0 / lambda : std::numeric_limits<double>::infinity();
  return p;
}

// ---------------------------------------------------------------------------
// Structural credit default region

struct DefaultRegion {
  std::set<int> j_set;       // up-move counts that constitute default
  std::string barrier_note;  // documentation of the barrier that produced it
};

// All up-move counts j with A0 u^j d^(m-j) <= A0 d^(j_star). With d = 1/u the
// condition is integral: 2j - m <= -j_star.
inline DefaultRegion region_from_barrier(int steps, int barrier_down_exponent) {
  DefaultRegion region;
  for (int j = 0; j <= steps; ++j)
    if (2 * j - steps <= -barrier_down_exponent) region.j_set.insert(j);
  region.barrier_note = "D_T = A0 * d^" + std::to_string(barrier_down_exponent);
  return region;
}

// ---------------------------------------------------------------------------
// Layouts. Ancilla pools are sized for the largest consumer: the measure
// gate cascades and the |0><0| reflection cascade of the amplitude-estimation
// operator (which spans every live input qubit plus the risk-measure qubit).

inline int reflection_ancillas(int reflection_inputs) {
  return reflection_inputs >= 3 ? reflection_inputs - 1 : 0;
}

inline int count_bits_for(int steps) {
  int s = 1;
  while ((1 << s) < steps + 1) ++s;
  return s;
}

inline RegisterLayout make_equity_layout(int m, int n) {
  if (m < 1) throw LayoutError("need at least one risk-factor qubit");
  RegisterLayout lay;
  int q = 0;
  lay.rf = {q, q + m};
  q += m;
  lay.rm = {q, q + 1};
  q += 1;
  const int pool = std::max(std::max(0, m - 2), reflection_ancillas(m + 1));
  lay.anc = {q, q + pool};
  q += pool;
  lay.out = {q, q + n};
  return lay;
}

inline RegisterLayout make_rate_layout(int m, int n) {
  if (m < 0) throw LayoutError("negative step count");
  RegisterLayout lay;
  int q = 0;
  lay.rf = {q, q + 2 * m};
  q += 2 * m;
  lay.st = {q, q + 3};
  q += 3;
  lay.rm = {q, q + 1};
  q += 1;
  const int pool = std::max(1, reflection_ancillas(2 * m + 3 + 1));
  lay.anc = {q, q + pool};
  q += pool;
  lay.out = {q, q + n};
  return lay;
}

inline RegisterLayout make_structural_layout(int m, int default_states, int n) {
  if (m < 1) throw LayoutError("need at least one risk-factor qubit");
  if (default_states < 1) throw LayoutError("empty default region");
  RegisterLayout lay;
  const int s = count_bits_for(m);
  int q = 0;
  lay.rf = {q, q + m};
  q += m;
  lay.count = {q, q + s};
  q += s;
  lay.st = {q, q + default_states};
  q += default_states;
  lay.rm = {q, q + 1};
  q += 1;
  int pool = std::max(s - 1, std::max(0, s - 2));       // counter / j-marker cascades
  pool = std::max(pool, std::max(0, default_states - 2));  // OR cascade
  pool = std::max(pool, reflection_ancillas(m + 1));
  lay.anc = {q, q + pool};
  q += pool;
  lay.out = {q, q + n};
  return lay;
}

// ---------------------------------------------------------------------------
// Scenario-generation gates (D) and risk-measure gates (M)

// One Ry(theta_u) per risk-factor qubit; the Hamming weight of the register is
// then Binomial(m, q).
inline Circuit build_d_eq(const BinomialParams& params, const RegisterLayout& layout) {
  if (layout.rf.size() != params.steps) throw LayoutError("layout rf size does not match steps");
  Circuit c(layout.num_qubits(), layout);
  for (int q = layout.rf.begin; q < layout.rf.end; ++q) c.add(Gate::ry(params.theta_u), {q});
  return c;
}

// Risk-measure qubit flips iff the rf register is all |1>.
inline Circuit build_m_max(int m, const RegisterLayout& layout) {
  if (layout.rf.size() != m) throw LayoutError("layout rf size does not match steps");
  if (layout.anc.size() < std::max(0, m - 2))
    throw LayoutError("m_max needs " + std::to_string(std::max(0, m - 2)) + " ancillas");
  Circuit c(layout.num_qubits(), layout);
  std::vector<int> anc = layout.anc.indices();
  anc.resize(static_cast<std::size_t>(std::max(0, m - 2)));
  return and_cascade(std::move(c), layout.rf.indices(), anc, layout.rm_qubit());
}

// Risk-measure qubit flips iff the rf register is all |0>.
inline Circuit build_m_min(int m, const RegisterLayout& layout) {
  if (layout.rf.size() != m) throw LayoutError("layout rf size does not match steps");
  Circuit c(layout.num_qubits(), layout);
  for (int q : layout.rf.indices()) c.add(Gate::x(), {q});
  c.append(build_m_max(m, layout));
  for (int q : layout.rf.indices()) c.add(Gate::x(), {q});
  return c;
}

namespace detail {

inline int st_qubit(const RegisterLayout& layout, RateLevel level) {
  if (layout.st.size() != 3) throw LayoutError("rate layout needs three state qubits");
  return layout.st.begin + static_cast<int>(level);
}

// Write gate: reads the step's rf pair and flips the matching one-hot state
// qubit. Pair encoding: |00> mid, |11> high, |01> low ( |10> unreachable ).
inline void append_write(Circuit& c, const RegisterLayout& layout, int rf0, int rf1) {
  const int st_h = st_qubit(layout, RateLevel::High);
  const int st_m = st_qubit(layout, RateLevel::Mid);
  const int st_l = st_qubit(layout, RateLevel::Low);
  c.add(Gate::x(), {st_h}, {rf0, rf1});
  c.add(Gate::x(), {rf0});
  c.add(Gate::x(), {rf1});
  c.add(Gate::x(), {st_m}, {rf0, rf1});
  c.add(Gate::x(), {rf0});
  c.add(Gate::x(), {rf1});
  c.add(Gate::x(), {rf1});
  c.add(Gate::x(), {st_l}, {rf0, rf1});
  c.add(Gate::x(), {rf1});
}

// Read gate for one source level: encode P(leave the mid column) on rf0, then
// the conditional high-vs-low split on rf1 through a scratch AND.
inline void append_read_block(Circuit& c, const RegisterLayout& layout, int rf0, int rf1,
                              RateLevel from, const oracles::TransitionMatrix& t, int anc) {
  const auto& row = t[static_cast<int>(from)];
  const double q_to_mid = row[static_cast<int>(RateLevel::Mid)];
  const double q_to_high = row[static_cast<int>(RateLevel::High)];
  if (q_to_mid < -1e-12 || q_to_mid > 1.0 + 1e-12 || q_to_high < -1e-12)
    throw CalibrationError("transition probability outside [0, 1]");
  const double q_change = 1.0 - q_to_mid;
  const double q_high_given_change = q_change > 1e-15 ? q_to_high / q_change : 0.0;
  if (q_high_given_change > 1.0 + 1e-9)
    throw CalibrationError("conditional transition probability outside [0, 1]");
  const int st_s = st_qubit(layout, from);
  c.add(Gate::ry(rotation_angle_for(q_change)), {rf0}, {st_s});
  c.add(Gate::x(), {anc}, {rf0, st_s});
  c.add(Gate::ry(rotation_angle_for(std::min(1.0, q_high_given_change))), {rf1}, {anc});
  c.add(Gate::x(), {anc}, {rf0, st_s});
}

}  // namespace detail

// Trinomial evolution: W0 prepares the initial one-hot state, then each step
// reads the current level into a fresh rf pair and rewrites the state qubits.
inline Circuit build_d_ir(const TrinomialParams& params, const RegisterLayout& layout) {
  const int m = params.steps;
  if (layout.rf.size() != 2 * m) throw LayoutError("rate layout needs 2m rf qubits");
  if (layout.anc.size() < 1) throw LayoutError("rate layout needs a scratch ancilla");
  oracles::check_row_stochastic(params.transition);
  Circuit c(layout.num_qubits(), layout);
  const int anc = layout.anc.begin;
  const int init_st = detail::st_qubit(layout, params.initial_level);
  c.add(Gate::x(), {init_st});  // W0
  for (int t = 1; t <= m; ++t) {
    const int rf0 = layout.rf.begin + 2 * (t - 1);
    const int rf1 = rf0 + 1;
    for (RateLevel from : {RateLevel::High, RateLevel::Mid, RateLevel::Low})
      detail::append_read_block(c, layout, rf0, rf1, from, params.transition, anc);
    if (t == 1) {
      c.add(Gate::x(), {init_st});  // W0 dagger
    } else {
      const int prev0 = layout.rf.begin + 2 * (t - 2);
      detail::append_write(c, layout, prev0, prev0 + 1);  // self-inverse
    }
    detail::append_write(c, layout, rf0, rf1);
  }
  return c;
}

// CNOT from one state qubit onto the risk-measure qubit.
inline Circuit build_m_level(RateLevel level, const RegisterLayout& layout) {
  Circuit c(layout.num_qubits(), layout);
  c.add(Gate::x(), {layout.rm_qubit()}, {detail::st_qubit(layout, level)});
  return c;
}

inline Circuit build_m_mid(const RegisterLayout& layout) {
  return build_m_level(RateLevel::Mid, layout);
}

// Rating migration reuses the trinomial machinery: initial rating on the high
// slot, absorbing default on the low slot.
inline Circuit build_d_migr(const TrinomialParams& params, const RegisterLayout& layout) {
  const auto& default_row = params.transition[static_cast<int>(RateLevel::Low)];
  if (!(default_row[0] == 0.0 && default_row[1] == 0.0 && std::abs(default_row[2] - 1.0) < 1e-12))
    throw CalibrationError("default row must be absorbing: (0, 0, 1)");
  return build_d_ir(params, layout);
}

namespace detail {

// Increment of the count register conditioned on one rf qubit. Partial carry
// products are computed into the ancilla chain, the bits flip top-down, and
// the chain uncomputes against the still-unflipped lower bits.
inline void append_counter_step(Circuit& c, int rf, const std::vector<int>& count,
                                const std::vector<int>& anc) {
  const int s = static_cast<int>(count.size());
  if (s == 1) {
    c.add(Gate::x(), {count[0]}, {rf});
    return;
  }
  c.add(Gate::x(), {anc[0]}, {rf, count[0]});
  for (int i = 1; i <= s - 2; ++i) c.add(Gate::x(), {anc[i]}, {anc[i - 1], count[i]});
  c.add(Gate::x(), {count[s - 1]}, {anc[s - 2]});
  for (int i = s - 2; i >= 1; --i) {
    c.add(Gate::x(), {anc[i]}, {anc[i - 1], count[i]});
    c.add(Gate::x(), {count[i]}, {anc[i - 1]});
  }
  c.add(Gate::x(), {anc[0]}, {rf, count[0]});
  c.add(Gate::x(), {count[0]}, {rf});
}

// Flips `st` iff the count register holds exactly j: X-mask the zero bits of
// j, AND the register, unmask.
inline void append_j_marker(Circuit& c, int j, const std::vector<int>& count,
                            const std::vector<int>& anc, int st) {
  const int s = static_cast<int>(count.size());
  std::vector<int> mask;
  for (int b = 0; b < s; ++b)
    if (((j >> b) & 1) == 0) mask.push_back(count[b]);
  for (int q : mask) c.add(Gate::x(), {q});
  c = and_cascade(std::move(c), count, anc, st);
  for (int q : mask) c.add(Gate::x(), {q});
}

}  // namespace detail

// Structural-default measure: count the up moves, mark the counts inside the
// default region, OR the marks onto the risk-measure qubit, then uncompute the
// marks and the counter so only rf and rm stay live.
inline Circuit build_m_def(const BinomialParams& params, const DefaultRegion& region,
                           const RegisterLayout& layout) {
  const int m = params.steps;
  if (region.j_set.empty()) throw CalibrationError("default region is empty");
  for (int j : region.j_set)
    if (j < 0 || j > m) throw CalibrationError("default region outside 0..m");
  if (layout.rf.size() != m) throw LayoutError("layout rf size does not match steps");
  const int s = count_bits_for(m);
  if (layout.count.size() != s)
    throw LayoutError("count register needs " + std::to_string(s) + " qubits");
  if (layout.st.size() != static_cast<int>(region.j_set.size()))
    throw LayoutError("state register size does not match the default region");
  const std::vector<int> count = layout.count.indices();
  const std::vector<int> anc = layout.anc.indices();
  if (static_cast<int>(anc.size()) < std::max(s - 1, std::max(0, s - 2)))
    throw LayoutError("insufficient ancillas for the counter");

  Circuit compute(layout.num_qubits(), layout);
  for (int q : layout.rf.indices()) detail::append_counter_step(compute, q, count, anc);
  int slot = layout.st.begin;
  for (int j : region.j_set) detail::append_j_marker(compute, j, count, anc, slot++);

  Circuit c = compute;
  c = or_onto(std::move(c), layout.st.indices(), anc, layout.rm_qubit());
  c.append(inverse(compute));
  return c;
}

// Absorbing default chain: each step survives with 1 - q_def unless the
// previous step already defaulted, in which case the controlled complement
// rotation composes with the step rotation to Ry(pi) and pins the qubit to
// |1>.
inline Circuit build_d_surv(const HazardParams& params, const RegisterLayout& layout) {
  const int m = params.steps;
  if (layout.rf.size() != m) throw LayoutError("layout rf size does not match steps");
  Circuit c(layout.num_qubits(), layout);
  const int base = layout.rf.begin;
  c.add(Gate::ry(params.theta_def), {base});
  for (int l = 1; l < m; ++l) {
    c.add(Gate::ry(params.theta_def_c), {base + l}, {base + l - 1});
    c.add(Gate::ry(params.theta_def), {base + l});
  }
  return c;
}

// Survival measure: all-|0> detector, i.e. the minimum gate.
inline Circuit build_m_surv(int m, const RegisterLayout& layout) {
  return build_m_min(m, layout);
}

}  // namespace qaesim
