#pragma once

#include "herd/game.hpp"
#include "herd/profile.hpp"
#include "herd/values.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace herd {

// How one sweep recomputes a (y, w) cell: SingleUpdate applies the value
// recursion once per entry (classic value iteration); DirectSolve solves the
// cell's coupled entries for the fixed profile, which converges in far fewer
// sweeps when delta is close to 1.
enum class SweepMode { SingleUpdate, DirectSolve };

struct SolveConfig {
  // Preference order among self-consistent candidates at (near-)indifference.
  std::array<Gamma, 3> tie_break{Gamma::Reveal, Gamma::Buy, Gamma::Wait};
  double tol = 1e-10;
  int max_iters = 200000;
  double indifference_eps = 1e-9;
  SweepMode sweep_mode = SweepMode::SingleUpdate;
  // Optional warm start; when absent the iteration starts from the all-zero
  // value tables (the all-wait fixed point).
  std::optional<StrategyProfile> warm_start;
};

struct BestResponseResult {
  Gamma gamma = Gamma::Wait;
  bool consistent = false;
  // Buy-minus-wait payoff margin per signal, index 0 for x=-1, 1 for x=+1.
  std::array<double, 2> margin{0.0, 0.0};
};

struct SolveResult {
  StrategyProfile profile;
  ValueTables<double> values;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<std::string> flags;
};

// Candidate continuation A at an acting state: the discounted one-step
// expectation with gamma substituted into the G-updates and a=0. Throws on
// infeasible states (negative population coefficients).
double continuation_value(int r, int y, int w, int x, Gamma gamma,
                          const ValueTables<double>& values, const GameParams& params);

// Enumerates the three candidates, keeps those self-consistent within
// indifference_eps, and picks the tie_break-preferred one. A consistent
// incumbent is kept as-is, so ties never flip an already-certified cell.
// When no candidate is consistent, returns the least-violating one with
// consistent=false.
BestResponseResult best_response(int r, int y, int w, const ValueTables<double>& values,
                                 const SolveConfig& config, const GameParams& params,
                                 std::optional<Gamma> incumbent = std::nullopt);

// One full Gauss-Seidel pass in decreasing-w order, recomputing every cell
// per the chosen mode. Returns the sup-norm change.
double sweep(ValueTables<double>& values, const StrategyProfile& profile,
             const GameParams& params, SweepMode mode = SweepMode::SingleUpdate);

// Alternates sweeps and per-state best responses until the profile is stable
// across a full pass and the residual drops below tol. For delta = 1 the
// iteration itself runs at 1 - 1e-9 (certify the result at true delta with
// the exact verifier).
SolveResult solve(const GameParams& params, const SolveConfig& config = {});

}  // namespace herd
