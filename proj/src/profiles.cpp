#include "herd/profiles.hpp"

#include "herd/verifier.hpp"

#include <array>
#include <stdexcept>

namespace herd {

StrategyProfile myopic_profile(const GameParams& params, Gamma y1_r1_choice) {
  if (y1_r1_choice != Gamma::Buy && y1_r1_choice != Gamma::Reveal)
    throw std::invalid_argument("myopic_profile: the (r=1, y=1) row must be BUY or REVEAL");
  StrategyProfile phi(params.n_players());
  phi.for_each_feasible([&](int r, int y, int w) {
    Gamma g;
    if (y >= 2)
      g = Gamma::Buy;
    else if (y <= -2)
      g = Gamma::Wait;
    else if (r == 1 && y == 1)
      g = y1_r1_choice;
    else
      g = Gamma::Reveal;
    phi.set(r, y, w, g);
  });
  return phi;
}

std::optional<StrategyProfile> certified_myopic_profile(const GameParams& params) {
  const int n = params.n_players();
  for (Gamma choice : {Gamma::Buy, Gamma::Reveal}) {
    StrategyProfile phi = myopic_profile(params, choice);
    if (check_profile(phi, params).passed) return phi;
  }
  // Threshold completions: reveal while enough players can still respond,
  // buy once w is large. k = 2 is the all-buy row again, skip it.
  for (int k = 3; k < n; ++k) {
    StrategyProfile phi = myopic_profile(params, Gamma::Buy);
    for (int w = 0; w <= n; ++w)
      if (phi.defined(1, 1, w)) phi.set(1, 1, w, w <= k ? Gamma::Reveal : Gamma::Buy);
    if (check_profile(phi, params).passed) return phi;
  }
  return std::nullopt;
}

StrategyProfile delta1_profile(const GameParams& params) {
  const int n = params.n_players();
  StrategyProfile phi(n);
  phi.for_each_feasible([&](int r, int y, int w) {
    Gamma g;
    if (y <= -2)
      g = Gamma::Wait;
    else if (w < n)
      g = Gamma::Reveal;
    else  // w = N is reachable only with r = 1
      g = y >= 1 ? Gamma::Buy : Gamma::Reveal;
    phi.set(r, y, w, g);
  });
  return phi;
}

StrategyProfile large_delta_profile(const GameParams& params) {
  const int n = params.n_players();
  StrategyProfile phi(n);
  phi.for_each_feasible([&](int r, int y, int w) {
    Gamma g;
    if (y <= -2) {
      g = Gamma::Wait;
    } else if (y >= 2) {
      g = (y + w >= n) ? Gamma::Buy : Gamma::Reveal;
    } else if (y == 1) {
      if (r == 0)
        g = Gamma::Reveal;  // includes the w = N-1 boundary row
      else
        g = (w >= n - 1) ? Gamma::Buy : Gamma::Reveal;
    } else {  // y in {0, -1}, including (r=1, y=0, w=N)
      g = Gamma::Reveal;
    }
    phi.set(r, y, w, g);
  });
  return phi;
}

namespace {

struct Check {
  StructuralCheckResult result;
  explicit Check(std::string id, std::string description) {
    result.id = std::move(id);
    result.description = std::move(description);
    result.passed = true;
  }
  void fail(int r, int y, int w) {
    result.passed = false;
    result.witnesses.push_back({r, y, w});
  }
};

}  // namespace

std::vector<StructuralCheckResult> structural_check(const StrategyProfile& profile,
                                                    const GameParams& params) {
  const int n = params.n_players();
  Check a("a", "wait for y <= -3 (all r) and for y = -2 with r = 0");
  Check b("b", "no wait at y >= 0 with r = 0");
  Check c("c", "reveal at (r=0, y=0) for all w");
  Check d("d", "for y != -1, r = 0: row over w is constant WAIT or within {REVEAL, BUY}");
  Check e("e", "threshold in w: per (r, y, x) the action switches 0 to 1 at most once");
  Check f("f", "threshold in y for r = 0 at fixed w, per x");

  profile.for_each_feasible([&](int r, int y, int w) {
    if (!profile.defined(r, y, w)) return;
    Gamma g = profile.at(r, y, w);
    if ((y <= -3 || (y == -2 && r == 0)) && g != Gamma::Wait) a.fail(r, y, w);
    if (r == 0 && y >= 0 && g == Gamma::Wait) b.fail(r, y, w);
    if (r == 0 && y == 0 && g != Gamma::Reveal) c.fail(r, y, w);
  });

  for (int r = 0; r <= 1; ++r) {
    for (int y = -n; y <= n; ++y) {
      bool saw_wait = false, saw_other = false;
      for (int w = 0; w <= n; ++w) {
        if (!profile.defined(r, y, w)) continue;
        (profile.at(r, y, w) == Gamma::Wait ? saw_wait : saw_other) = true;
      }
      if (r == 0 && y != -1 && saw_wait && saw_other) {
        for (int w = 0; w <= n; ++w)
          if (profile.defined(r, y, w) && profile.at(r, y, w) == Gamma::Wait) d.fail(r, y, w);
      }
      for (int x : {-1, +1}) {
        int prev = -1;
        for (int w = 0; w <= n; ++w) {
          if (!profile.defined(r, y, w)) continue;
          int act = gamma_action(profile.at(r, y, w), x);
          if (prev == 1 && act == 0) e.fail(r, y, w);
          prev = act;
        }
      }
    }
  }

  for (int w = 0; w <= n; ++w) {
    for (int x : {-1, +1}) {
      int prev = -1;
      for (int y = -n; y <= n; ++y) {
        if (!profile.defined(0, y, w)) continue;
        int act = gamma_action(profile.at(0, y, w), x);
        if (prev == 1 && act == 0) f.fail(0, y, w);
        prev = act;
      }
    }
  }

  return {a.result, b.result, c.result, d.result, e.result, f.result};
}

}  // namespace herd
