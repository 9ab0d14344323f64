#pragma once

#include "herd/game.hpp"
#include "herd/profile.hpp"
#include "herd/rational.hpp"
#include "herd/values.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace herd {

// Raised by fpe2_residual when an enumerated finite state maps to an
// infeasible quadratic state; indicates a feasibility-rule bug.
class MappingDomainError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Full joint public belief over (V, X^1..X^N), exact. Signals are encoded
// as an N-bit mask (bit m set means x^{m+1} = +1), v as 0 for -1 and 1 for +1.
class JointBelief {
 public:
  explicit JointBelief(int n_players)
      : n_(n_players), table_(2ull << n_players, Rational(0)) {}

  int n_players() const { return n_; }

  Rational& at(int v, std::uint32_t xmask) { return table_[index(v, xmask)]; }
  const Rational& at(int v, std::uint32_t xmask) const { return table_[index(v, xmask)]; }

  Rational marginal_v(int v) const;
  // P(X^m = x | V = v), conditional on the current belief.
  Rational conditional_signal(int m, int x, int v) const;
  Rational total() const;

  // Largest absolute defect of the product-form decomposition
  // pi(x, v) = pi(v) * prod_m pi(x^m | v); exactly 0 when conditional
  // independence given V holds.
  Rational factorization_defect() const;

  friend bool operator==(const JointBelief& a, const JointBelief& b) {
    return a.n_ == b.n_ && a.table_ == b.table_;
  }

 private:
  std::size_t index(int v, std::uint32_t xmask) const {
    if ((v != 0 && v != 1) || xmask >= (1u << n_))
      throw std::out_of_range("JointBelief: bad index");
    return (static_cast<std::size_t>(v) << n_) | xmask;
  }

  int n_;
  std::vector<Rational> table_;
};

// Prior belief: uniform on V, signals i.i.d. Q(.|v).
JointBelief initial_belief(const GameParams& params);

// One Bayes step for an observed action of `actor` under partial function
// gamma. A non-revealing gamma leaves the belief unchanged; a zero
// denominator (off-equilibrium action) also leaves it unchanged.
JointBelief bayes_update(const JointBelief& pi, Gamma gamma, int a, int actor,
                         const GameParams& params);

// Closed-form belief from the revealed-information vector x~ (entries in
// {-1, 0, +1}).
JointBelief closed_form_belief(const std::vector<int>& x_tilde, const GameParams& params);

// pi^pr(v = 1 | x): private posterior with the player's own revealed
// information cancelled out of the public exponent.
Rational private_posterior(int x, int x_tilde_self, int y, const GameParams& params);

// Largest absolute defect of the finite-dimensional fixed point under the
// quadratic-to-finite value mapping; exactly 0 for exact quadratic solutions.
// Requires N <= 4 (full enumeration).
Rational fpe2_residual(const StrategyProfile& profile, const ValueTables<Rational>& quad_values,
                       const GameParams& params);

struct DeviationReport {
  struct Entry {
    std::string name;
    double mean_improvement;
    double std_error;
  };
  // Deviation with the largest estimated improvement over the profile.
  Entry best{};
  int n_deviations = 0;
  int n_samples = 0;
  int horizon = 0;
  // True when best improvement exceeds 3 standard errors (profile rejected).
  bool significant_improvement = false;
};

// Monte Carlo unilateral-deviation test for player 1: estimates the payoff
// of every map from the clamped public state y in {-2..2} to a partial
// function (3^5 deviations) against the profile path, with common random
// numbers. horizon = 0 picks ceil(log(tolerance)/log(delta)) for delta < 1.
DeviationReport deviation_test(const StrategyProfile& profile, const GameParams& params,
                               std::uint64_t seed, int n_samples, int horizon = 0,
                               double tolerance = 1e-6);

}  // namespace herd
