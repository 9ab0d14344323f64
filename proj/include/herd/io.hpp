#pragma once

#include "herd/cascade.hpp"
#include "herd/game.hpp"
#include "herd/profile.hpp"
#include "herd/solver.hpp"
#include "herd/verifier.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace herd {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Profile document: { "n": int, "p": "a/b", "delta": "a/b",
//   "phi": { "r0": [[code,...],...], "r1": [[...]] } }
// with row 0 = y = N (rows descend in y), columns w = 0..N; codes are
// "00" wait, "01" reveal, "11" buy, "--" infeasible.
std::string profile_to_json(const StrategyProfile& profile, const GameParams& params);

struct ProfileDocument {
  StrategyProfile profile;
  int n_players;
  Rational p, delta;
};

// Throws SchemaError on malformed documents.
ProfileDocument profile_from_json(const std::string& text);

// Grid rendering with the same codes, one grid per r.
std::string ascii_grids(const StrategyProfile& profile);

std::string report_to_json(const VerificationReport& report, const GameParams& params);

std::string solve_metadata_json(const SolveResult& result, const GameParams& params);

// Float value tables as CSV: table,x,r_or_rtilde,z,y,w,value.
std::string values_to_csv(const ValueTables<double>& values);

// CSV with columns v,class,probability (probability as exact "a/b").
std::string cascade_to_csv(const CascadeDistribution& dist);

// Cumulative bad-cascade probability by onset w:
// columns w,bad_buy_cum_v_minus,bad_wait_cum_v_plus.
std::string cascade_hist_csv(const CascadeDistribution& dist, int n_players);

std::string simulation_to_csv(const SimulationResult& sim);

}  // namespace herd
