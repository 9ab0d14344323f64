#include "herd/finite_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace herd {

namespace {

Rational rho(int e, const GameParams& params) { return instant_reward<Rational>(e, params); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Rational JointBelief::total() const {
  Rational acc(0);
  for (const Rational& p : table_) acc += p;
  return acc;
}

Rational JointBelief::marginal_v(int v) const {
  Rational acc(0);
  for (std::uint32_t xm = 0; xm < (1u << n_); ++xm) acc += at(v, xm);
  return acc;
}

Rational JointBelief::conditional_signal(int m, int x, int v) const {
  Rational joint(0), margin(0);
  for (std::uint32_t xm = 0; xm < (1u << n_); ++xm) {
    const Rational& p = at(v, xm);
    margin += p;
    bool plus = (xm >> m) & 1u;
    if ((x > 0) == plus) joint += p;
  }
  if (margin.is_zero()) return Rational(0);
  return joint / margin;
}

Rational JointBelief::factorization_defect() const {
  Rational defect(0);
  for (int v = 0; v <= 1; ++v) {
    Rational pv = marginal_v(v);
    for (std::uint32_t xm = 0; xm < (1u << n_); ++xm) {
      Rational prod = pv;
      for (int m = 0; m < n_; ++m) {
        int x = ((xm >> m) & 1u) ? +1 : -1;
        prod *= conditional_signal(m, x, v);
      }
      Rational diff = at(v, xm) - prod;
      if (abs(diff) > defect) defect = abs(diff);
    }
  }
  return defect;
}

JointBelief initial_belief(const GameParams& params) {
  const int n = params.n_players();
  JointBelief pi(n);
  for (int v = 0; v <= 1; ++v) {
    int vv = v == 0 ? -1 : +1;
    for (std::uint32_t xm = 0; xm < (1u << n); ++xm) {
      Rational p(1, 2);
      for (int m = 0; m < n; ++m) {
        int x = ((xm >> m) & 1u) ? +1 : -1;
        p *= params.signal_prob(x, vv);
      }
      pi.at(v, xm) = p;
    }
  }
  return pi;
}

JointBelief bayes_update(const JointBelief& pi, Gamma gamma, int a, int actor,
                         const GameParams& params) {
  (void)params;
  if (gamma != Gamma::Reveal) return pi;  // constant gamma carries no information
  const int n = pi.n_players();
  JointBelief out(n);
  Rational denom(0);
  for (int v = 0; v <= 1; ++v)
    for (std::uint32_t xm = 0; xm < (1u << n); ++xm) {
      int x_actor = ((xm >> actor) & 1u) ? +1 : -1;
      if (gamma_action(Gamma::Reveal, x_actor) != a) continue;
      denom += pi.at(v, xm);
    }
  if (denom.is_zero()) return pi;  // off-equilibrium: belief frozen
  for (int v = 0; v <= 1; ++v)
    for (std::uint32_t xm = 0; xm < (1u << n); ++xm) {
      int x_actor = ((xm >> actor) & 1u) ? +1 : -1;
      if (gamma_action(Gamma::Reveal, x_actor) != a) continue;
      out.at(v, xm) = pi.at(v, xm) / denom;
    }
  return out;
}

JointBelief closed_form_belief(const std::vector<int>& x_tilde, const GameParams& params) {
  const int n = params.n_players();
  if (static_cast<int>(x_tilde.size()) != n)
    throw std::invalid_argument("closed_form_belief: x~ must have one entry per player");
  int y = 0;
  for (int v : x_tilde) y += v;
  JointBelief pi(n);
  for (int v = 0; v <= 1; ++v) {
    int vv = v == 0 ? -1 : +1;
    Rational pv = vv == 1 ? public_belief_v<Rational>(y, params)
                          : Rational(1) - public_belief_v<Rational>(y, params);
    for (std::uint32_t xm = 0; xm < (1u << n); ++xm) {
      Rational p = pv;
      for (int m = 0; m < n; ++m) {
        int x = ((xm >> m) & 1u) ? +1 : -1;
        if (x_tilde[m] != 0)
          p *= x == x_tilde[m] ? Rational(1) : Rational(0);
        else
          p *= params.signal_prob(x, vv);
      }
      pi.at(v, xm) = p;
    }
  }
  return pi;
}

Rational private_posterior(int x, int x_tilde_self, int y, const GameParams& params) {
  Rational qe = Rational::pow(params.q(), y - x_tilde_self + x);
  return qe / (Rational(1) + qe);
}

namespace {

// Per-player (x~, b) pairs that can arise under some strategy; (+1, 0) is
// impossible because revealing a good signal means buying.
constexpr int kPairCount = 5;
constexpr int kPairXt[kPairCount] = {0, -1, 0, -1, +1};
constexpr int kPairB[kPairCount] = {0, 0, 1, 1, 1};

struct FiniteStateView {
  std::vector<int> xt, b, z;
  int y = 0, w = 0;
};

// Sum over the next actor n' of the mapped value function of evaluator m.
Rational mapped_value_sum(const FiniteStateView& s, int m, int x,
                          const ValueTables<Rational>& values, const GameParams& params) {
  const int n = params.n_players();
  if (s.b[m] == 1) return Rational(0);
  Rational acc(0);
  for (int actor = 0; actor < n; ++actor) {
    if (actor == m) {
      int r = std::abs(s.xt[m]);
      if (!is_feasible_acting(r, s.y, s.w, n))
        throw MappingDomainError("acting state infeasible under mapping");
      acc += values.a(x, r, s.y, s.w);
    } else {
      int rt = std::abs(s.xt[m]);
      if (!is_feasible_nonacting(rt, s.z[actor], s.y, s.w, n))
        throw MappingDomainError("non-acting state infeasible under mapping");
      acc += values.na(x, rt, s.z[actor], s.y, s.w);
    }
  }
  return acc;
}

FiniteStateView advance(const FiniteStateView& s, int actor, Gamma gamma, int action) {
  FiniteStateView out = s;
  if (gamma == Gamma::Reveal && s.xt[actor] == 0) {
    out.xt[actor] = 2 * action - 1;
    out.y += out.xt[actor];
  }
  if (action == 1) out.b[actor] = 1;
  int z_new = std::max(std::abs(out.xt[actor]), out.b[actor]);
  out.w += z_new - s.z[actor];
  out.z[actor] = z_new;
  return out;
}

}  // namespace

Rational fpe2_residual(const StrategyProfile& profile, const ValueTables<Rational>& quad_values,
                       const GameParams& params) {
  const int n = params.n_players();
  if (n > 4) throw std::invalid_argument("fpe2_residual: full enumeration requires N <= 4");
  const Rational dn = params.delta() / Rational(n);
  Rational residual(0);
  auto bump = [&](const Rational& r) {
    if (abs(r) > residual) residual = abs(r);
  };

  long total = 1;
  for (int i = 0; i < n; ++i) total *= kPairCount;

  for (long code = 0; code < total; ++code) {
    long c = code;
    FiniteStateView s;
    s.xt.resize(n);
    s.b.resize(n);
    s.z.resize(n);
    s.y = 0;
    s.w = 0;
    for (int i = 0; i < n; ++i) {
      int d = static_cast<int>(c % kPairCount);
      c /= kPairCount;
      s.xt[i] = kPairXt[d];
      s.b[i] = kPairB[d];
      s.z[i] = std::max(std::abs(s.xt[i]), s.b[i]);
      s.y += s.xt[i];
      s.w += s.z[i];
    }

    for (int actor = 0; actor < n; ++actor) {
      Gamma gstar = Gamma::Wait;
      if (s.b[actor] == 0) {
        int r = std::abs(s.xt[actor]);
        if (!is_feasible_acting(r, s.y, s.w, n))
          throw MappingDomainError("actor state infeasible under mapping");
        gstar = profile.at(r, s.y, s.w);
      }

      // Fixed-point argmax consistency for the acting player (fpe2a).
      if (s.b[actor] == 0) {
        FiniteStateView waited = advance(s, actor, gstar, 0);
        for (int x : {-1, +1}) {
          Rational buy = rho(s.y - s.xt[actor] + x, params);
          Rational wait = dn * mapped_value_sum(waited, actor, x, quad_values, params);
          if (gamma_action(gstar, x) == 1) {
            if (wait > buy) bump(wait - buy);
          } else {
            if (buy > wait) bump(buy - wait);
          }
        }
      }

      // Value-equation defect for every evaluator (fpe2b).
      for (int m = 0; m < n; ++m) {
        if (s.b[m] == 1) continue;
        for (int x : {-1, +1}) {
          Rational lhs_single;
          if (m == actor) {
            lhs_single = quad_values.a(x, std::abs(s.xt[m]), s.y, s.w);
          } else {
            if (!is_feasible_nonacting(std::abs(s.xt[m]), s.z[actor], s.y, s.w, n))
              throw MappingDomainError("non-acting state infeasible under mapping");
            lhs_single = quad_values.na(x, std::abs(s.xt[m]), s.z[actor], s.y, s.w);
          }

          Rational rhs;
          if (m == actor) {
            if (gamma_action(gstar, x) == 1) {
              rhs = rho(s.y - s.xt[m] + x, params);
            } else {
              FiniteStateView waited = advance(s, actor, gstar, 0);
              rhs = dn * mapped_value_sum(waited, m, x, quad_values, params);
            }
          } else {
            // Expectation over the actor's signal under the evaluator's
            // predictive kernel (point mass once revealed).
            rhs = Rational(0);
            if (s.xt[actor] != 0) {
              FiniteStateView next = advance(s, actor, gstar, gamma_action(gstar, s.xt[actor]));
              rhs = dn * mapped_value_sum(next, m, x, quad_values, params);
            } else {
              Rational p_plus =
                  signal_posterior<Rational>(+1, s.y - s.xt[m] + x, params);
              for (int xn : {+1, -1}) {
                Rational pr = xn > 0 ? p_plus : Rational(1) - p_plus;
                if (pr.is_zero()) continue;
                FiniteStateView next = advance(s, actor, gstar, gamma_action(gstar, xn));
                rhs += dn * pr * mapped_value_sum(next, m, x, quad_values, params);
              }
            }
          }
          bump(lhs_single - rhs);
        }
      }
    }
  }
  return residual;
}

namespace {

struct World {
  int v;
  std::vector<int> signals;
  std::vector<int> actors;
};

World draw_world(std::uint64_t seed, int n, int horizon, const GameParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  World w;
  w.v = unif(rng) < 0.5 ? -1 : +1;
  double p = params.p().to_double();
  w.signals.resize(n);
  for (int i = 0; i < n; ++i)
    w.signals[i] = unif(rng) < p ? -w.v : w.v;
  w.actors.resize(horizon);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int t = 0; t < horizon; ++t) w.actors[t] = pick(rng);
  return w;
}

// Discounted payoff of player 0 when she acts by `deviation` (or by the
// profile when deviation is null); everyone else follows the profile, and
// the public state updates with the prescribed partial function.
double play_out(const World& world, const StrategyProfile& profile, const GameParams& params,
                const std::array<Gamma, 5>* deviation) {
  const int n = params.n_players();
  const double delta = params.delta().to_double();
  std::vector<int> xt(n, 0), b(n, 0);
  int y = 0, w = 0;
  double payoff = 0.0, disc = 1.0;
  for (std::size_t t = 0; t < world.actors.size(); ++t, disc *= delta) {
    int actor = world.actors[t];
    if (b[actor] == 1) continue;
    Gamma prescribed = profile.at(std::abs(xt[actor]), y, w);
    Gamma used = prescribed;
    if (actor == 0 && deviation)
      used = (*deviation)[static_cast<std::size_t>(std::clamp(y, -2, 2) + 2)];
    int action = gamma_action(used, world.signals[actor]);
    if (prescribed == Gamma::Reveal && xt[actor] == 0) {
      xt[actor] = 2 * action - 1;
      y += xt[actor];
      w += 1;
      if (action == 1) b[actor] = 1;
    } else if (action == 1) {
      b[actor] = 1;
      if (std::abs(xt[actor]) == 0) w += 1;
    }
    if (actor == 0 && action == 1) payoff += disc * world.v;
  }
  return payoff;
}

}  // namespace

DeviationReport deviation_test(const StrategyProfile& profile, const GameParams& params,
                               std::uint64_t seed, int n_samples, int horizon,
                               double tolerance) {
  const int n = params.n_players();
  if (n > 4) throw std::invalid_argument("deviation_test: intended for N <= 4");
  double delta = params.delta().to_double();
  if (horizon <= 0) {
    if (delta >= 1.0)
      throw std::invalid_argument("deviation_test: delta = 1 needs an explicit horizon");
    horizon = delta == 0.0 ? 1 : static_cast<int>(std::ceil(std::log(tolerance) / std::log(delta)));
    horizon = std::max(horizon, 1);
  }

  constexpr int kBuckets = 5;
  const int n_devs = 243;  // 3^5 maps from clamped y to a partial function
  std::vector<std::array<Gamma, kBuckets>> deviations(n_devs);
  std::vector<std::string> names(n_devs);
  for (int d = 0; d < n_devs; ++d) {
    int c = d;
    std::string name;
    for (int j = 0; j < kBuckets; ++j) {
      Gamma g = static_cast<Gamma>(c % 3);
      c /= 3;
      deviations[d][static_cast<std::size_t>(j)] = g;
      name += gamma_code(g);
      if (j + 1 < kBuckets) name += "|";
    }
    names[d] = name;
  }

  std::vector<double> sum(n_devs, 0.0), sumsq(n_devs, 0.0);
  for (int s = 0; s < n_samples; ++s) {
    World world = draw_world(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s))),
                             n, horizon, params);
    double base = play_out(world, profile, params, nullptr);
    for (int d = 0; d < n_devs; ++d) {
      double diff = play_out(world, profile, params, &deviations[d]) - base;
      sum[d] += diff;
      sumsq[d] += diff * diff;
    }
  }

  DeviationReport report;
  report.n_deviations = n_devs;
  report.n_samples = n_samples;
  report.horizon = horizon;
  double best_mean = -std::numeric_limits<double>::infinity();
  int best_d = 0;
  for (int d = 0; d < n_devs; ++d) {
    double mean = sum[d] / n_samples;
    if (mean > best_mean) {
      best_mean = mean;
      best_d = d;
    }
  }
  double mean = sum[best_d] / n_samples;
  double var = std::max(0.0, sumsq[best_d] / n_samples - mean * mean);
  double se = std::sqrt(var / n_samples);
  report.best = {names[best_d], mean, se};
  report.significant_improvement = mean > 3.0 * se;
  return report;
}

}  // namespace herd
