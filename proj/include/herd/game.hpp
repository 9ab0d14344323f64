#pragma once

#include "herd/rational.hpp"

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace herd {

// The acting player's partial function from her private signal to an action.
// Codes follow the grid notation: "00" wait, "01" reveal (buy iff signal is
// +1), "11" buy. The fourth partial function (buy against the signal) is
// dominated and unrepresentable.
enum class Gamma : std::uint8_t { Wait = 0, Reveal = 1, Buy = 2 };

inline const char* gamma_code(Gamma g) {
  switch (g) {
    case Gamma::Wait: return "00";
    case Gamma::Reveal: return "01";
    case Gamma::Buy: return "11";
  }
  return "??";
}

// Action the partial function prescribes for signal x in {-1,+1}.
inline int gamma_action(Gamma g, int x) {
  switch (g) {
    case Gamma::Wait: return 0;
    case Gamma::Buy: return 1;
    case Gamma::Reveal: return x > 0 ? 1 : 0;
  }
  return 0;
}

// Game primitives: N players, binary signal with error p in (0,1/2),
// discount delta in [0,1], uniform prior on the product value. q = (1-p)/p
// is derived, never stored independently.
class GameParams {
 public:
  GameParams(int n_players, Rational p, Rational delta)
      : n_(n_players), p_(std::move(p)), delta_(std::move(delta)),
        q_((Rational(1) - p_) / p_) {
    if (n_ < 1) throw std::invalid_argument("GameParams: need at least one player");
    if (!(p_ > Rational(0) && p_ < Rational(1, 2)))
      throw std::invalid_argument("GameParams: p must lie in (0, 1/2)");
    if (!(delta_ >= Rational(0) && delta_ <= Rational(1)))
      throw std::invalid_argument("GameParams: delta must lie in [0, 1]");
  }

  int n_players() const { return n_; }
  const Rational& p() const { return p_; }
  const Rational& delta() const { return delta_; }
  const Rational& q() const { return q_; }

  // Q(x|v): probability of observing signal x given product value v.
  Rational signal_prob(int x, int v) const {
    return x == v ? Rational(1) - p_ : p_;
  }

 private:
  int n_;
  Rational p_, delta_, q_;
};

template <class S>
S scalar_cast(const Rational& r);
template <>
inline double scalar_cast<double>(const Rational& r) { return r.to_double(); }
template <>
inline Rational scalar_cast<Rational>(const Rational& r) { return r; }

// Private log-likelihood index of an evaluating player who has not yet
// bought: e = y + r_self + x, using x~_self = -r_self.
inline int likelihood_exponent(int y, int r_self, int x) {
  return y + r_self + x;
}

// Expected value of the product under the private belief with exponent e:
// (q^e - 1) / (q^e + 1). Strictly increasing in e, valued in (-1, 1).
template <class S>
S instant_reward(int e, const GameParams& params) {
  Rational qe = Rational::pow(params.q(), e);
  return scalar_cast<S>((qe - Rational(1)) / (qe + Rational(1)));
}

// Predictive probability of the next free player's signal:
// (Q(x_next|-1) + Q(x_next|1) q^e) / (1 + q^e).
template <class S>
S signal_posterior(int x_next, int e, const GameParams& params) {
  Rational qe = Rational::pow(params.q(), e);
  Rational num = params.signal_prob(x_next, -1) + params.signal_prob(x_next, 1) * qe;
  return scalar_cast<S>(num / (Rational(1) + qe));
}

// Public belief pi(V=1) = q^y / (1 + q^y).
template <class S>
S public_belief_v(int y, const GameParams& params) {
  Rational qy = Rational::pow(params.q(), y);
  return scalar_cast<S>(qy / (Rational(1) + qy));
}

// One-step state update (G^z, G^r, G^y, G^w). Total on all inputs.
struct UpdateResult {
  int z, r, y, w;
};

inline UpdateResult apply_update(int z, int r, int y, int w, Gamma gamma, int a) {
  int r2 = (r == 0 && gamma == Gamma::Reveal) ? 1 : r;
  int z2 = (z == 0 && (a == 1 || gamma == Gamma::Reveal)) ? 1 : z;
  int y2 = (z == 0 && gamma == Gamma::Reveal) ? y + (2 * a - 1) : y;
  int w2 = w + z2 - z;
  return {z2, r2, y2, w2};
}

// Feasibility of quadratic states for a player with b = 0.
//
// Every unit of |y| needs a revealed player, so |y| <= w. A player who has
// revealed but not bought must have revealed a bad signal, so a surviving
// player with flag 1 contributes -1 to y, and the remaining y+1 must come
// from the other w-1 blocked players: |y+1| <= w-1.
inline bool quad_counts_ok(int self_revealed, int y, int w) {
  return self_revealed == 0 ? std::abs(y) <= w : std::abs(y + 1) <= w - 1;
}

// Acting player (revealed flag r): she contributes r to w, so w >= r; the
// other N-1 players contribute at most N-1 of the remaining, so w <= N-1+r.
inline bool is_feasible_acting(int r, int y, int w, int n_players) {
  if (r != 0 && r != 1) return false;
  if (w < 0 || w > n_players) return false;
  if (!quad_counts_ok(r, y, w)) return false;
  if (w < r) return false;
  if (w > n_players - 1 + r) return false;
  return true;
}

// Non-acting evaluator (revealed flag r~) watching an actor with
// cannot-reveal flag z; the two are distinct players, so w >= r~ + z and
// the free ones among them are not counted: w <= N-2+r~+z.
inline bool is_feasible_nonacting(int r_tilde, int z, int y, int w, int n_players) {
  if ((r_tilde != 0 && r_tilde != 1) || (z != 0 && z != 1)) return false;
  if (w < 0 || w > n_players) return false;
  if (!quad_counts_ok(r_tilde, y, w)) return false;
  if (w < r_tilde + z) return false;
  if (w > n_players - 2 + r_tilde + z) return false;
  return true;
}

}  // namespace herd
