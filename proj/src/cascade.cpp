#include "herd/cascade.hpp"

#include "herd/linalg.hpp"

#include <algorithm>
#include <random>

namespace herd {

namespace {

// Uniform-in-w classification of the free-player row at y:
//  0 = REVEAL everywhere, 1 = REVEAL nowhere, 2 = mixed.
int row_status(const StrategyProfile& profile, int y, int n) {
  bool any_reveal = false, any_other = false;
  for (int w = std::abs(y); w <= n - 1; ++w) {
    if (!is_feasible_acting(0, y, w, n)) continue;
    (profile.at(0, y, w) == Gamma::Reveal ? any_reveal : any_other) = true;
  }
  if (any_reveal && any_other) return 2;
  return any_reveal ? 0 : 1;
}

}  // namespace

RevelationChain revelation_chain(const StrategyProfile& profile, const GameParams& params) {
  const int n = params.n_players();
  if (!profile.total_on_feasible())
    throw std::invalid_argument("revelation_chain: profile not total on feasible states");
  const int y_cap = n - 1;  // acting states with r=0 need w <= N-1 >= |y|

  RevelationChain chain;
  int y_lo = 0;
  while (y_lo > -y_cap && row_status(profile, y_lo, n) == 0) --y_lo;
  int y_hi = 0;
  while (y_hi < y_cap && row_status(profile, y_hi, n) == 0) ++y_hi;

  chain.y_lo = y_lo;
  chain.y_hi = y_hi;
  chain.up.resize(static_cast<std::size_t>(y_hi - y_lo + 1), Rational(0));
  chain.absorbing.resize(static_cast<std::size_t>(y_hi - y_lo + 1), false);
  for (int y = y_lo; y <= y_hi; ++y) {
    int status = row_status(profile, y, n);
    if (status == 2) chain.w_dependent = true;
    bool absorbing = status != 0;
    chain.absorbing[static_cast<std::size_t>(y - y_lo)] = absorbing;
    if (!absorbing)
      chain.up[static_cast<std::size_t>(y - y_lo)] =
          signal_posterior<Rational>(+1, y, params);
  }
  return chain;
}

Absorption absorption(const RevelationChain& chain, int start_y) {
  if (start_y < chain.y_lo || start_y > chain.y_hi)
    throw std::invalid_argument("absorption: start state outside the chain");
  std::vector<int> absorbing_states, transient;
  for (int y = chain.y_lo; y <= chain.y_hi; ++y)
    (chain.is_absorbing(y) ? absorbing_states : transient).push_back(y);
  if (absorbing_states.empty())
    throw NotAbsorbingError("absorption: chain has no absorbing state");

  Absorption out;
  if (chain.is_absorbing(start_y)) {
    for (int a : absorbing_states) out.hit_probability[a] = Rational(a == start_y ? 1 : 0);
    out.expected_steps = Rational(0);
    return out;
  }
  // Transient states in a birth-death chain with absorbing endpoints can
  // always reach them; a transient neighbor of the band edge could not, so
  // reject bands that hit the feasibility cap unabsorbed.
  if (!chain.is_absorbing(chain.y_lo) || !chain.is_absorbing(chain.y_hi))
    throw NotAbsorbingError("absorption: band edge is not absorbing");

  const int t = static_cast<int>(transient.size());
  auto t_index = [&](int y) {
    return static_cast<Eigen::Index>(
        std::lower_bound(transient.begin(), transient.end(), y) - transient.begin());
  };
  MatrixX<Rational> m = MatrixX<Rational>::Identity(t, t);
  for (int i = 0; i < t; ++i) {
    int y = transient[i];
    Rational up = chain.up_prob(y), down = Rational(1) - up;
    if (!chain.is_absorbing(y + 1)) m(i, t_index(y + 1)) -= up;
    if (!chain.is_absorbing(y - 1)) m(i, t_index(y - 1)) -= down;
  }

  for (int target : absorbing_states) {
    VectorX<Rational> b = VectorX<Rational>::Constant(t, Rational(0));
    for (int i = 0; i < t; ++i) {
      int y = transient[i];
      Rational up = chain.up_prob(y);
      if (y + 1 == target) b(i) += up;
      if (y - 1 == target) b(i) += Rational(1) - up;
    }
    auto h = solve_linear<Rational>(m, b);
    if (!h) throw NotAbsorbingError("absorption: singular first-step system");
    out.hit_probability[target] = (*h)(t_index(start_y));
  }
  {
    VectorX<Rational> b = VectorX<Rational>::Constant(t, Rational(1));
    auto tau = solve_linear<Rational>(m, b);
    if (!tau) throw NotAbsorbingError("absorption: singular first-step system");
    out.expected_steps = (*tau)(t_index(start_y));
  }
  return out;
}

int y_max_bound(const GameParams& params) {
  if (params.delta() == Rational(1)) throw DeltaOneError("y_max_bound: delta = 1");
  // Smallest integer k with q^{k-1} >= (1+delta)/(1-delta).
  Rational ratio = (Rational(1) + params.delta()) / (Rational(1) - params.delta());
  int k = 1;
  Rational power(1);
  while (power < ratio) {
    power *= params.q();
    ++k;
    if (k > 4096) throw std::runtime_error("y_max_bound: bound search overflow");
  }
  return k;
}

const char* cascade_class_name(CascadeClass c) {
  switch (c) {
    case CascadeClass::Buy: return "buy-cascade";
    case CascadeClass::Wait: return "wait-cascade";
    case CascadeClass::Exhaustion: return "exhaustion";
    case CascadeClass::None: return "none-within-horizon";
  }
  return "?";
}

namespace {

// Outcome of the embedded free-player chain from one (y, w) state:
// onset-w distributions per class.
struct StateOutcome {
  std::array<std::vector<Rational>, 3> hist;
};

struct DpContext {
  const StrategyProfile& profile;
  const GameParams& params;
  int n;
  int v;
  Rational p_up;  // P(signal = +1 | v)
  std::vector<std::optional<StateOutcome>> memo;
  bool non_closed_buy = false;

  std::size_t key(int y, int w) const {
    return static_cast<std::size_t>((y + n) * (n + 1) + w);
  }

  bool buy_closed(int y, int w) const {
    for (int ww = w; ww <= n - 1; ++ww) {
      if (!is_feasible_acting(0, y, ww, n)) continue;
      if (profile.at(0, y, ww) != Gamma::Buy) return false;
    }
    return true;
  }

  const StateOutcome& solve(int y, int w) {
    auto& slot = memo[key(y, w)];
    if (slot) return *slot;
    StateOutcome out;
    for (auto& h : out.hist) h.assign(static_cast<std::size_t>(n + 1), Rational(0));
    if (w >= n) {
      out.hist[static_cast<int>(CascadeClass::Exhaustion)][static_cast<std::size_t>(w)] = Rational(1);
    } else {
      Gamma g = profile.at(0, y, w);
      if (g == Gamma::Wait) {
        out.hist[static_cast<int>(CascadeClass::Wait)][static_cast<std::size_t>(w)] = Rational(1);
      } else if (g == Gamma::Buy && buy_closed(y, w)) {
        out.hist[static_cast<int>(CascadeClass::Buy)][static_cast<std::size_t>(w)] = Rational(1);
      } else if (g == Gamma::Buy) {
        non_closed_buy = true;  // pathwise fallback: the purchase pools, y frozen
        const StateOutcome& next = solve(y, w + 1);
        out = next;
      } else {
        const StateOutcome& up = solve(y + 1, w + 1);
        for (int c = 0; c < 3; ++c)
          for (int ww = 0; ww <= n; ++ww)
            out.hist[c][static_cast<std::size_t>(ww)] = p_up * up.hist[c][static_cast<std::size_t>(ww)];
        const StateOutcome& down = solve(y - 1, w + 1);
        Rational p_down = Rational(1) - p_up;
        for (int c = 0; c < 3; ++c)
          for (int ww = 0; ww <= n; ++ww)
            out.hist[c][static_cast<std::size_t>(ww)] += p_down * down.hist[c][static_cast<std::size_t>(ww)];
      }
    }
    slot = std::move(out);
    return *slot;
  }
};

CascadeDistribution::PerV run_dp(const StrategyProfile& profile, const GameParams& params,
                                 int v, bool& non_closed_flag) {
  const int n = params.n_players();
  DpContext ctx{profile, params, n, v, params.signal_prob(+1, v),
                std::vector<std::optional<StateOutcome>>(
                    static_cast<std::size_t>((2 * n + 1) * (n + 1))),
                false};
  const StateOutcome& root = ctx.solve(0, 0);
  non_closed_flag = non_closed_flag || ctx.non_closed_buy;

  CascadeDistribution::PerV out;
  out.p_buy = Rational(0);
  out.p_wait = Rational(0);
  out.p_exhaustion = Rational(0);
  Rational total_w(0), cascade_w(0);
  for (int c = 0; c < 3; ++c) {
    out.onset_w[c] = root.hist[c];
    for (int w = 0; w <= n; ++w) {
      const Rational& pr = root.hist[c][static_cast<std::size_t>(w)];
      if (pr.is_zero()) continue;
      Rational mass = pr;
      if (c == static_cast<int>(CascadeClass::Buy)) out.p_buy += mass;
      if (c == static_cast<int>(CascadeClass::Wait)) out.p_wait += mass;
      if (c == static_cast<int>(CascadeClass::Exhaustion)) out.p_exhaustion += mass;
      total_w += Rational(w) * mass;
      if (c != static_cast<int>(CascadeClass::Exhaustion)) cascade_w += Rational(w) * mass;
    }
  }
  out.expected_revelations = total_w;
  Rational pc = out.p_buy + out.p_wait;
  out.expected_revelations_given_cascade = pc.is_zero() ? Rational(0) : cascade_w / pc;
  return out;
}

}  // namespace

CascadeDistribution exact_cascade_dp(const StrategyProfile& profile, const GameParams& params) {
  if (!profile.total_on_feasible())
    throw std::invalid_argument("exact_cascade_dp: profile not total on feasible states");
  CascadeDistribution dist;
  dist.non_closed_buy = false;
  dist.minus = run_dp(profile, params, -1, dist.non_closed_buy);
  dist.plus = run_dp(profile, params, +1, dist.non_closed_buy);
  return dist;
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

SimulationResult simulate(const StrategyProfile& profile, const GameParams& params,
                          std::uint64_t seed, long n_runs, int max_turns) {
  const int n = params.n_players();
  if (!profile.total_on_feasible())
    throw std::invalid_argument("simulate: profile not total on feasible states");
  if (max_turns <= 0) max_turns = 100 * n;
  const double delta = params.delta().to_double();
  const double p = params.p().to_double();

  SimulationResult result;
  result.n_runs = n_runs;
  result.max_turns = max_turns;

  // Buy-closure of free rows, precomputed once.
  auto classify = [&](int y, int w) -> CascadeClass {
    if (w >= n) return CascadeClass::Exhaustion;
    Gamma g = profile.at(0, y, w);
    if (g == Gamma::Wait) return CascadeClass::Wait;
    if (g == Gamma::Buy) {
      for (int ww = w; ww <= n - 1; ++ww)
        if (is_feasible_acting(0, y, ww, n) && profile.at(0, y, ww) != Gamma::Buy)
          return CascadeClass::None;  // non-closed: keep playing
      return CascadeClass::Buy;
    }
    return CascadeClass::None;
  };

  double utility_acc = 0.0;
  std::vector<int> xt(n), b(n), signals(n);
  for (long run = 0; run < n_runs; ++run) {
    std::mt19937_64 rng(mix64(seed ^ mix64(static_cast<std::uint64_t>(run) + 0x5bf03635ull)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, n - 1);

    int v = unif(rng) < 0.5 ? -1 : +1;
    for (int i = 0; i < n; ++i) signals[i] = unif(rng) < p ? -v : v;
    std::fill(xt.begin(), xt.end(), 0);
    std::fill(b.begin(), b.end(), 0);
    int y = 0, w = 0, reveals = 0;

    CascadeClass cls = classify(0, 0);
    int onset_w = 0, onset_turns = 0, onset_reveals = 0;
    bool classified = cls != CascadeClass::None;

    double disc = 1.0, run_utility = 0.0;
    for (int t = 0; t < max_turns; ++t, disc *= delta) {
      int actor = pick(rng);
      if (b[actor] == 1) continue;
      Gamma g = profile.at(std::abs(xt[actor]), y, w);
      int action = gamma_action(g, signals[actor]);
      bool state_changed = false;
      if (g == Gamma::Reveal && xt[actor] == 0) {
        xt[actor] = 2 * action - 1;
        y += xt[actor];
        w += 1;
        ++reveals;
        state_changed = true;
      } else if (action == 1 && std::abs(xt[actor]) == 0) {
        w += 1;
        state_changed = true;
      }
      if (action == 1) {
        b[actor] = 1;
        run_utility += disc * v;
      }
      if (!classified && state_changed) {
        CascadeClass c = classify(y, w);
        if (c != CascadeClass::None) {
          classified = true;
          cls = c;
          onset_w = w;
          onset_turns = t + 1;
          onset_reveals = reveals;
        }
      }
    }
    if (!classified) cls = CascadeClass::None;

    SimulationResult::PerV& bucket = result.for_v(v);
    bucket.runs += 1;
    bucket.class_counts[static_cast<int>(cls)] += 1;
    if (cls != CascadeClass::None) {
      bucket.mean_onset_w += onset_w;
      bucket.mean_revelations += onset_reveals;
      bucket.mean_turns_to_onset += onset_turns;
    }
    utility_acc += run_utility;
  }

  for (SimulationResult::PerV* bucket : {&result.minus, &result.plus}) {
    long classified_runs = bucket->class_counts[0] + bucket->class_counts[1] + bucket->class_counts[2];
    if (classified_runs > 0) {
      bucket->mean_onset_w /= classified_runs;
      bucket->mean_revelations /= classified_runs;
      bucket->mean_turns_to_onset /= classified_runs;
    }
  }
  result.mean_total_discounted_utility = n_runs > 0 ? utility_acc / n_runs : 0.0;
  return result;
}

}  // namespace herd
