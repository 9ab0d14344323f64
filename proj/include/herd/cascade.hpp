#pragma once

#include "herd/game.hpp"
#include "herd/profile.hpp"
#include "herd/rational.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace herd {

class NotAbsorbingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DeltaOneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Markov chain of the aggregated state y sampled at revelation epochs,
// valid when the profile's REVEAL region is constant in w.
// Transition probabilities are posterior-mixed over V.
struct RevelationChain {
  int y_lo = 0, y_hi = 0;  // inclusive state range
  std::vector<Rational> up;  // up[y - y_lo]; meaningful on transient states
  std::vector<bool> absorbing;
  // Set when the profile's REVEAL region varies with w at some y in the
  // band; the chain is then only valid pathwise (use the exact DP).
  bool w_dependent = false;

  bool is_absorbing(int y) const { return absorbing.at(static_cast<std::size_t>(y - y_lo)); }
  const Rational& up_prob(int y) const { return up.at(static_cast<std::size_t>(y - y_lo)); }
};

RevelationChain revelation_chain(const StrategyProfile& profile, const GameParams& params);

struct Absorption {
  std::map<int, Rational> hit_probability;  // per absorbing state
  Rational expected_steps;
};

// Exact first-step solve of the absorbing chain from start_y.
Absorption absorption(const RevelationChain& chain, int start_y);

// Y_max = ceil(1 + log_q((1+delta)/(1-delta))), computed by exact integer
// power search. Throws DeltaOneError at delta = 1.
int y_max_bound(const GameParams& params);

enum class CascadeClass : int { Buy = 0, Wait = 1, Exhaustion = 2, None = 3 };

const char* cascade_class_name(CascadeClass c);

// Exact per-v outcome distribution of the embedded free-player chain.
struct CascadeDistribution {
  struct PerV {
    Rational p_buy, p_wait, p_exhaustion;
    // onset_w[c][w]: probability that class c (Buy/Wait/Exhaustion) starts
    // with exactly w players absorbed.
    std::array<std::vector<Rational>, 3> onset_w;
    Rational expected_revelations;                 // E[w at onset], all classes
    Rational expected_revelations_given_cascade;   // conditional on Buy or Wait
    Rational p_cascade() const { return p_buy + p_wait; }
  };
  PerV for_v(int v) const { return v > 0 ? plus : minus; }
  PerV minus, plus;
  // A BUY region that is not closed under increasing w was encountered;
  // onset classification fell back to pathwise semantics.
  bool non_closed_buy = false;

  Rational bad_buy() const { return minus.p_buy; }      // buy-cascade under V=-1
  Rational bad_wait() const { return plus.p_wait; }     // wait-cascade under V=+1
};

CascadeDistribution exact_cascade_dp(const StrategyProfile& profile, const GameParams& params);

// Forward Monte Carlo of the full turn process. Classification uses the
// same state-arrival rule as the DP; runs exceeding max_turns count as
// None (never dropped).
struct SimulationResult {
  struct PerV {
    long runs = 0;
    std::array<long, 4> class_counts{};  // Buy, Wait, Exhaustion, None
    double mean_onset_w = 0.0;           // over classified runs
    double mean_revelations = 0.0;       // reveals before onset, over classified runs
    double mean_turns_to_onset = 0.0;
  };
  PerV& for_v(int v) { return v > 0 ? plus : minus; }
  const PerV& for_v(int v) const { return v > 0 ? plus : minus; }
  PerV minus, plus;
  long n_runs = 0;
  int max_turns = 0;
  double mean_total_discounted_utility = 0.0;  // summed over players
};

SimulationResult simulate(const StrategyProfile& profile, const GameParams& params,
                          std::uint64_t seed, long n_runs, int max_turns = 0);

}  // namespace herd
