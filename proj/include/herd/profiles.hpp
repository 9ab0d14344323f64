#pragma once

#include "herd/game.hpp"
#include "herd/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace herd {

// The profile that is an equilibrium for every discount factor: buy for
// y >= 2, wait for y <= -2, reveal in between (reveal band shrinks to
// [-1, 0] once the player has revealed). The (r=1, y=1) row is
// underdetermined; the caller picks BUY or REVEAL and the verifier decides
// which choice certifies at a given delta.
StrategyProfile myopic_profile(const GameParams& params, Gamma y1_r1_choice);

// Resolves the underdetermined (r=1, y=1) row against the exact verifier:
// tries both uniform choices, then the threshold-in-w completions
// (REVEAL up to some w, BUY above, the shape every solution family has).
// Returns the first profile that certifies, or nullopt if none does.
std::optional<StrategyProfile> certified_myopic_profile(const GameParams& params);

// The delta = 1 profile: reveal everywhere with y >= -1 while a free player
// remains, wait for y <= -2; at w = N buy for y >= 1 and reveal at y in
// {0, -1}.
StrategyProfile delta1_profile(const GameParams& params);

// The large-delta (< 1) profile: reveal while y >= -1 and y + w < N, buy
// once y >= 2 and y + w >= N, plus its boundary rows.
StrategyProfile large_delta_profile(const GameParams& params);

struct StructuralCheckResult {
  std::string id;           // "a" .. "f"
  std::string description;
  bool passed;
  // offending (r, y, w) triples, empty when passed
  std::vector<std::array<int, 3>> witnesses;
};

// Structural properties every solution shares (wait below y = -2, no wait
// at y >= 0 before revealing, reveal at y = 0, w-constant action sets off
// the y = -1 row) plus the threshold-shape report items in w and y.
std::vector<StructuralCheckResult> structural_check(const StrategyProfile& profile,
                                                    const GameParams& params);

}  // namespace herd
