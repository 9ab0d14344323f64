#pragma once

#include "herd/game.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace herd {

// The mapping phi of the quadratic fixed point: feasible acting states
// (r, y, w) -> Gamma. Infeasible cells hold a sentinel, not a Gamma, so
// structural checks and serialization skip them. The implicit rule
// "a player who has bought plays 0" is not stored.
class StrategyProfile {
 public:
  explicit StrategyProfile(int n_players)
      : n_(n_players),
        cells_(2 * (2 * n_players + 1) * (n_players + 1), kUndefined) {}

  int n_players() const { return n_; }

  bool defined(int r, int y, int w) const {
    return in_range(r, y, w) && cells_[index(r, y, w)] != kUndefined;
  }

  Gamma at(int r, int y, int w) const {
    if (!defined(r, y, w))
      throw std::out_of_range("StrategyProfile: undefined cell (r=" + std::to_string(r) +
                              ", y=" + std::to_string(y) + ", w=" + std::to_string(w) + ")");
    return static_cast<Gamma>(cells_[index(r, y, w)]);
  }

  void set(int r, int y, int w, Gamma g) {
    if (!in_range(r, y, w)) throw std::out_of_range("StrategyProfile::set: out of range");
    cells_[index(r, y, w)] = static_cast<std::int8_t>(g);
  }

  void clear(int r, int y, int w) {
    if (!in_range(r, y, w)) throw std::out_of_range("StrategyProfile::clear: out of range");
    cells_[index(r, y, w)] = kUndefined;
  }

  bool total_on_feasible() const {
    bool ok = true;
    for_each_feasible([&](int r, int y, int w) {
      if (!defined(r, y, w)) ok = false;
    });
    return ok;
  }

  template <class Fn>
  void for_each_feasible(Fn&& fn) const {
    for (int r = 0; r <= 1; ++r)
      for (int y = -n_; y <= n_; ++y)
        for (int w = 0; w <= n_; ++w)
          if (is_feasible_acting(r, y, w, n_)) fn(r, y, w);
  }

  friend bool operator==(const StrategyProfile& a, const StrategyProfile& b) {
    return a.n_ == b.n_ && a.cells_ == b.cells_;
  }
  friend bool operator!=(const StrategyProfile& a, const StrategyProfile& b) { return !(a == b); }

 private:
  static constexpr std::int8_t kUndefined = -1;

  bool in_range(int r, int y, int w) const {
    return (r == 0 || r == 1) && y >= -n_ && y <= n_ && w >= 0 && w <= n_;
  }
  std::size_t index(int r, int y, int w) const {
    return static_cast<std::size_t>((r * (2 * n_ + 1) + (y + n_)) * (n_ + 1) + w);
  }

  int n_;
  std::vector<std::int8_t> cells_;
};

}  // namespace herd
