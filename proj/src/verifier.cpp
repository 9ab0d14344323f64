#include "herd/verifier.hpp"

#include <map>

namespace herd {

namespace {

using Unknown = BlockSystem::Unknown;

// Dense index of a cell unknown inside the block, or -1 if not an unknown
// of this cell (infeasible there).
struct CellIndex {
  explicit CellIndex(int y, int w, int n) {
    int next = 0;
    for (int x : {-1, +1}) {
      for (int r = 0; r <= 1; ++r)
        if (is_feasible_acting(r, y, w, n)) {
          order.push_back({x, true, r, 0});
          acting_slot[key(x, r)] = next++;
        }
      for (int rt = 0; rt <= 1; ++rt)
        for (int z = 0; z <= 1; ++z)
          if (is_feasible_nonacting(rt, z, y, w, n)) {
            order.push_back({x, false, rt, z});
            nonacting_slot[key(x, rt) * 2 + z] = next++;
          }
    }
  }
  static int key(int x, int flag) { return (x > 0 ? 1 : 0) * 2 + flag; }

  int acting(int x, int r) const { return acting_slot.count(key(x, r)) ? acting_slot.at(key(x, r)) : -1; }
  int nonacting(int x, int rt, int z) const {
    int k = key(x, rt) * 2 + z;
    return nonacting_slot.count(k) ? nonacting_slot.at(k) : -1;
  }

  std::vector<Unknown> order;
  std::map<int, int> acting_slot, nonacting_slot;
};

// Writes the continuation terms of one value equation. A term whose target
// lies in the current cell contributes a matrix coefficient; a target in the
// already-solved w+1 layer contributes to the right-hand side.
struct EquationWriter {
  BlockSystem& block;
  const CellIndex& cells;
  const ValueTables<Rational>& solved;
  int row, x, cell_y, cell_w, n;

  void add_acting(const Rational& coef, int r, int y, int w) {
    if (coef.is_zero()) return;
    if (!is_feasible_acting(r, y, w, n))
      throw std::logic_error("assemble_block: infeasible acting reference");
    if (y == cell_y && w == cell_w)
      block.matrix(row, cells.acting(x, r)) -= coef;
    else
      block.rhs(row) += coef * solved.a(x, r, y, w);
  }
  void add_nonacting(const Rational& coef, int rt, int z, int y, int w) {
    if (coef.is_zero()) return;
    if (!is_feasible_nonacting(rt, z, y, w, n))
      throw std::logic_error("assemble_block: infeasible non-acting reference");
    if (y == cell_y && w == cell_w)
      block.matrix(row, cells.nonacting(x, rt, z)) -= coef;
    else
      block.rhs(row) += coef * solved.na(x, rt, z, y, w);
  }
  void add_constant(const Rational& c) { block.rhs(row) += c; }
};

// The three components of the acting player's wait continuation for a
// candidate gamma, with a = 0 substituted into the updates.
void write_wait_continuation(EquationWriter& eq, int r, int y, int w, Gamma gamma,
                             const GameParams& params) {
  const Rational dn = params.delta() / Rational(params.n_players());
  UpdateResult next = apply_update(r, r, y, w, gamma, 0);
  eq.add_acting(dn, next.r, next.y, next.w);
  eq.add_nonacting(dn * Rational(params.n_players() - w - 1 + r), next.r, 0, next.y, next.w);
  eq.add_nonacting(dn * Rational(w - r), next.r, 1, next.y, next.w);
}

void write_nonacting_equation(EquationWriter& eq, int rt, int z, int y, int w,
                              const StrategyProfile& profile, const GameParams& params) {
  const int n = params.n_players();
  const Rational dn = params.delta() / Rational(n);
  if (z == 1) {
    // The actor cannot reveal; the public state is frozen this turn.
    eq.add_acting(dn, rt, y, w);
    eq.add_nonacting(dn * Rational(w - rt), rt, 1, y, w);
    eq.add_nonacting(dn * Rational(n - w - 1 + rt), rt, 0, y, w);
    return;
  }
  Gamma g0 = profile.at(0, y, w);
  auto one_branch = [&](const Rational& prob, int a) {
    UpdateResult next = apply_update(0, 0, y, w, g0, a);
    eq.add_acting(dn * prob, rt, next.y, next.w);
    eq.add_nonacting(dn * prob * Rational(next.z == 1 ? 1 + w - rt : 0), rt, 1, next.y, next.w);
    if (next.z == 0) {
      // Actor stays free (only possible under WAIT): she merges with the
      // other free players.
      eq.add_nonacting(dn * prob * Rational(1 + n - w - 2 + rt), rt, 0, next.y, next.w);
      eq.add_nonacting(dn * prob * Rational(w - rt), rt, 1, next.y, next.w);
    } else {
      eq.add_nonacting(dn * prob * Rational(n - w - 2 + rt), rt, 0, next.y, next.w);
    }
  };
  if (g0 == Gamma::Reveal) {
    Rational p_up = signal_posterior<Rational>(+1, likelihood_exponent(y, rt, eq.x), params);
    one_branch(p_up, 1);
    one_branch(Rational(1) - p_up, 0);
  } else {
    one_branch(Rational(1), gamma_action(g0, +1));
  }
}

}  // namespace

BlockSystem assemble_block(int y, int w, const StrategyProfile& profile,
                           const GameParams& params, const ValueTables<Rational>& values) {
  const int n = params.n_players();
  CellIndex cells(y, w, n);
  BlockSystem block;
  block.unknowns = cells.order;
  const int size = static_cast<int>(cells.order.size());
  block.matrix = MatrixX<Rational>::Identity(size, size);
  block.rhs = VectorX<Rational>::Constant(size, Rational(0));

  for (int row = 0; row < size; ++row) {
    const Unknown& u = cells.order[row];
    EquationWriter eq{block, cells, values, row, u.x, y, w, n};
    if (u.acting) {
      Gamma g = profile.at(u.r, y, w);
      if (gamma_action(g, u.x) == 1)
        eq.add_constant(instant_reward<Rational>(likelihood_exponent(y, u.r, u.x), params));
      else
        write_wait_continuation(eq, u.r, y, w, g, params);
    } else {
      write_nonacting_equation(eq, u.r, u.z, y, w, profile, params);
    }
  }
  return block;
}

namespace {

// Solves a block, applying the zero-block rule to singular cells: a
// self-contained homogeneous class of unknowns (no reward inflow, no
// reference outside the class) takes the value 0, which is the delta < 1
// limit; any other singularity is not certifiable.
VectorX<Rational> solve_block(const BlockSystem& block, int y, int w) {
  const Eigen::Index size = block.matrix.rows();
  VectorX<Rational> solution = VectorX<Rational>::Constant(size, Rational(0));
  std::vector<Eigen::Index> active(static_cast<std::size_t>(size));
  for (Eigen::Index i = 0; i < size; ++i) active[static_cast<std::size_t>(i)] = i;

  while (!active.empty()) {
    const Eigen::Index m = static_cast<Eigen::Index>(active.size());
    MatrixX<Rational> sub(m, m);
    VectorX<Rational> rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      rhs(i) = block.rhs(active[static_cast<std::size_t>(i)]);
      for (Eigen::Index j = 0; j < m; ++j)
        sub(i, j) = block.matrix(active[static_cast<std::size_t>(i)],
                                 active[static_cast<std::size_t>(j)]);
    }
    if (auto u = solve_linear<Rational>(sub, rhs)) {
      for (Eigen::Index i = 0; i < m; ++i) solution(active[static_cast<std::size_t>(i)]) = (*u)(i);
      return solution;
    }
    // Strip the largest zero class: rows with zero right-hand side whose
    // references stay inside the class.
    std::vector<bool> in_class(static_cast<std::size_t>(m), true);
    bool changed = true;
    while (changed) {
      changed = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!in_class[static_cast<std::size_t>(i)]) continue;
        bool keep = rhs(i).is_zero();
        for (Eigen::Index j = 0; keep && j < m; ++j)
          if (j != i && !in_class[static_cast<std::size_t>(j)] && !sub(i, j).is_zero())
            keep = false;
        if (!keep) {
          in_class[static_cast<std::size_t>(i)] = false;
          changed = true;
        }
      }
    }
    std::vector<Eigen::Index> rest;
    for (Eigen::Index i = 0; i < m; ++i)
      if (!in_class[static_cast<std::size_t>(i)]) rest.push_back(active[static_cast<std::size_t>(i)]);
    if (rest.size() == active.size()) throw SingularBlockError(y, w);
    active = std::move(rest);  // the stripped class keeps solution 0
  }
  return solution;
}

}  // namespace

ValueTables<Rational> solve_exact_values(const StrategyProfile& profile,
                                         const GameParams& params) {
  const int n = params.n_players();
  if (!profile.total_on_feasible())
    throw std::invalid_argument("solve_exact_values: profile not total on feasible states");
  ValueTables<Rational> values(n);
  for (int w = n; w >= 0; --w) {
    for (int y = -w; y <= w; ++y) {
      BlockSystem block = assemble_block(y, w, profile, params, values);
      if (block.unknowns.empty()) continue;
      VectorX<Rational> u = solve_block(block, y, w);
      for (std::size_t i = 0; i < block.unknowns.size(); ++i) {
        const Unknown& slot = block.unknowns[i];
        if (slot.acting)
          values.a(slot.x, slot.r, y, w) = u(static_cast<Eigen::Index>(i));
        else
          values.na(slot.x, slot.r, slot.z, y, w) = u(static_cast<Eigen::Index>(i));
      }
    }
  }
  return values;
}

Rational exact_continuation(int r, int y, int w, int x, Gamma gamma,
                            const ValueTables<Rational>& values, const GameParams& params) {
  const int n = params.n_players();
  if (!is_feasible_acting(r, y, w, n))
    throw std::invalid_argument("exact_continuation: infeasible acting state");
  const Rational dn = params.delta() / Rational(n);
  UpdateResult next = apply_update(r, r, y, w, gamma, 0);
  Rational acc = dn * values.a(x, next.r, next.y, next.w);
  if (n - w - 1 + r > 0)
    acc += dn * Rational(n - w - 1 + r) * values.na(x, next.r, 0, next.y, next.w);
  if (w - r > 0)
    acc += dn * Rational(w - r) * values.na(x, next.r, 1, next.y, next.w);
  return acc;
}

VerificationReport check_profile(const StrategyProfile& profile, const GameParams& params) {
  VerificationReport report{false, false, {}, {}, {}, ValueTables<Rational>(params.n_players())};
  try {
    report.values = solve_exact_values(profile, params);
    report.certifiable = true;
  } catch (const SingularBlockError& e) {
    report.singular_cells.push_back({e.y, e.w});
    return report;
  }

  profile.for_each_feasible([&](int r, int y, int w) {
    Gamma g = profile.at(r, y, w);
    for (int x : {-1, +1}) {
      Rational buy = instant_reward<Rational>(likelihood_exponent(y, r, x), params);
      Rational wait = exact_continuation(r, y, w, x, g, report.values, params);
      if (buy == wait) {
        report.ties.push_back({r, y, w, x, buy});
        continue;
      }
      bool ok = gamma_action(g, x) == 1 ? buy > wait : wait > buy;
      if (!ok) report.violations.push_back({r, y, w, x, buy, wait, g});
    }
  });
  report.passed = report.certifiable && report.violations.empty();
  return report;
}

}  // namespace herd
