#pragma once

#include "herd/game.hpp"
#include "herd/linalg.hpp"
#include "herd/profile.hpp"
#include "herd/values.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace herd {

// Raised when a (y, w) block of the layered solve is singular and not
// resolvable by the zero-block rule (possible only at delta = 1).
class SingularBlockError : public std::runtime_error {
 public:
  SingularBlockError(int y, int w)
      : std::runtime_error("singular block at (y=" + std::to_string(y) +
                           ", w=" + std::to_string(w) + ")"),
        y(y), w(w) {}
  int y, w;
};

// One (y, w) block of the layered exact solve: unknowns are the feasible
// U_a / U_na entries of the cell for both signals, right-hand sides refer
// only to w+1 cells and instant rewards.
struct BlockSystem {
  struct Unknown {
    int x;        // evaluator signal, -1 or +1
    bool acting;  // U_a if true, U_na otherwise
    int r;        // r for acting, r~ for non-acting
    int z;        // meaningful for non-acting only
  };
  std::vector<Unknown> unknowns;
  MatrixX<Rational> matrix;
  VectorX<Rational> rhs;
};

struct VerificationReport {
  struct Violation {
    int r, y, w, x;
    Rational buy_payoff, wait_payoff;
    Gamma prescribed;
  };
  struct Tie {
    int r, y, w, x;
    Rational payoff;
  };
  struct SingularCell {
    int y, w;
  };

  bool passed = false;       // certifiable and no violations
  bool certifiable = false;  // false iff a singular block was rejected
  std::vector<Violation> violations;
  std::vector<Tie> ties;
  std::vector<SingularCell> singular_cells;
  ValueTables<Rational> values;
};

// Assembles the exact linear system of one (y, w) cell under the fixed
// profile, reading already-solved w+1 entries from `values`.
BlockSystem assemble_block(int y, int w, const StrategyProfile& profile,
                           const GameParams& params, const ValueTables<Rational>& values);

// Layered exact solve in decreasing w. At delta = 1, a singular homogeneous
// block (no reward inflow; the all-WAIT case in particular) is assigned the
// all-zero solution; any other singular block throws SingularBlockError.
ValueTables<Rational> solve_exact_values(const StrategyProfile& profile,
                                         const GameParams& params);

// Exact wait-continuation A at an acting state under the prescribed gamma.
Rational exact_continuation(int r, int y, int w, int x, Gamma gamma,
                            const ValueTables<Rational>& values, const GameParams& params);

// Sequential-rationality certificate: solves the exact values, then checks
// every prescribed action side attains the argmax weakly (ties allowed).
VerificationReport check_profile(const StrategyProfile& profile, const GameParams& params);

}  // namespace herd
