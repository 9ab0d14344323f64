#pragma once

#include "herd/game.hpp"
#include "herd/rational.hpp"

#include <Eigen/Core>

#include <stdexcept>

namespace herd {

// Value tables of the quadratic fixed point, templated on the scalar kind:
// double for the iterative solver, Rational for the exact verifier.
// u_a(x, r, y, w) is the acting player's value, u_na(x, r~, z, y, w) the
// non-acting player's. Entries at infeasible states stay at S(0) and are
// never read by the solver or verifier.
template <class S>
struct ValueTables {
  using Array = Eigen::Array<S, Eigen::Dynamic, 1>;

  explicit ValueTables(int n_players)
      : n(n_players),
        ua(Array::Constant(2 * 2 * (2 * n_players + 1) * (n_players + 1), S(0))),
        una(Array::Constant(2 * 2 * 2 * (2 * n_players + 1) * (n_players + 1), S(0))) {}

  int n;
  Array ua;   // (x, r, y, w)
  Array una;  // (x, r~, z, y, w)

  static int xi(int x) { return x > 0 ? 1 : 0; }

  S& a(int x, int r, int y, int w) { return ua[a_index(x, r, y, w)]; }
  const S& a(int x, int r, int y, int w) const { return ua[a_index(x, r, y, w)]; }

  S& na(int x, int rt, int z, int y, int w) { return una[na_index(x, rt, z, y, w)]; }
  const S& na(int x, int rt, int z, int y, int w) const { return una[na_index(x, rt, z, y, w)]; }

  Eigen::Index a_index(int x, int r, int y, int w) const {
    check(r, y, w);
    return ((xi(x) * 2 + r) * (2 * n + 1) + (y + n)) * (n + 1) + w;
  }
  Eigen::Index na_index(int x, int rt, int z, int y, int w) const {
    check(rt, y, w);
    check(z, y, w);
    return (((xi(x) * 2 + rt) * 2 + z) * (2 * n + 1) + (y + n)) * (n + 1) + w;
  }

 private:
  void check(int flag, int y, int w) const {
    if (flag < 0 || flag > 1 || y < -n || y > n || w < 0 || w > n)
      throw std::out_of_range("ValueTables: index out of range");
  }
};

}  // namespace herd
