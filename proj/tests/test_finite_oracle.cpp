#include <doctest.h>

#include "herd/finite_oracle.hpp"
#include "herd/profiles.hpp"
#include "herd/verifier.hpp"

#include <random>

using namespace herd;

namespace {
GameParams tenth(int n, Rational delta = Rational(1, 2)) {
  return GameParams(n, Rational(1, 10), delta);
}
}  // namespace

TEST_CASE("closed-form belief at the empty history") {
  GameParams g = tenth(3);
  JointBelief pi = closed_form_belief({0, 0, 0}, g);
  CHECK(pi.total() == Rational(1));
  CHECK(pi.marginal_v(1) == Rational(1, 2));
  CHECK(pi.factorization_defect() == Rational(0));
  CHECK(pi == initial_belief(g));
}

TEST_CASE("closed-form belief after one positive revelation") {
  GameParams g = tenth(3);
  JointBelief pi = closed_form_belief({+1, 0, 0}, g);
  CHECK(pi.marginal_v(1) == Rational(9, 10));  // ratio q = 9
  CHECK(pi.conditional_signal(0, +1, 0) == Rational(1));
  CHECK(pi.conditional_signal(0, +1, 1) == Rational(1));
  CHECK(pi.conditional_signal(1, +1, 1) == Rational(9, 10));
  CHECK(pi.factorization_defect() == Rational(0));
}

TEST_CASE("bayes update ignores constant partial functions") {
  GameParams g = tenth(3);
  JointBelief pi = closed_form_belief({0, -1, 0}, g);
  CHECK(bayes_update(pi, Gamma::Buy, 1, 0, g) == pi);
  CHECK(bayes_update(pi, Gamma::Wait, 0, 2, g) == pi);
}

TEST_CASE("bayes update under reveal multiplies the likelihood ratio by q^(2a-1)") {
  GameParams g = tenth(3);
  JointBelief pi = initial_belief(g);
  JointBelief up = bayes_update(pi, Gamma::Reveal, 1, 0, g);
  CHECK(up.marginal_v(1) / up.marginal_v(0) == Rational(9));
  JointBelief down = bayes_update(pi, Gamma::Reveal, 0, 1, g);
  CHECK(down.marginal_v(1) / down.marginal_v(0) == Rational(1, 9));
  // off-equilibrium action against an already revealed signal freezes the belief
  JointBelief frozen = bayes_update(up, Gamma::Reveal, 0, 0, g);
  CHECK(frozen == up);
}

TEST_CASE("folded bayes updates equal the closed form on random histories") {
  GameParams g = tenth(3);
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int run = 0; run < 500; ++run) {
    int v = unif(rng) < 0.5 ? -1 : +1;
    std::array<int, 3> signals{};
    for (int i = 0; i < 3; ++i) signals[i] = unif(rng) < 0.1 ? -v : v;
    std::array<int, 3> xt{}, b{};
    int y = 0, w = 0;
    JointBelief pi = initial_belief(g);
    for (int t = 0; t < 30; ++t) {
      int actor = static_cast<int>(unif(rng) * 3) % 3;
      if (b[actor] == 1) continue;
      Gamma gamma = phi.at(std::abs(xt[actor]), y, w);
      int action = gamma_action(gamma, signals[actor]);
      pi = bayes_update(pi, gamma, action, actor, g);
      if (gamma == Gamma::Reveal && xt[actor] == 0) {
        xt[actor] = 2 * action - 1;
        y += xt[actor];
        w += 1;
      } else if (action == 1 && xt[actor] == 0) {
        w += 1;
      }
      if (action == 1) b[actor] = 1;
      CHECK(pi.factorization_defect() == Rational(0));
    }
    JointBelief closed = closed_form_belief({xt[0], xt[1], xt[2]}, g);
    CHECK(pi == closed);
  }
}

TEST_CASE("private posterior corrects for own revealed information") {
  GameParams g = tenth(3);
  CHECK(private_posterior(+1, 0, 0, g) == Rational(9, 10));
  CHECK(private_posterior(+1, +1, 1, g) == public_belief_v<Rational>(1, g));
  CHECK(private_posterior(+1, -1, -1, g) == Rational(9, 10));
}

TEST_CASE("fpe2 residual vanishes for exactly solved quadratic values") {
  GameParams g = tenth(3);
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  ValueTables<Rational> values = solve_exact_values(phi, g);
  CHECK(fpe2_residual(phi, values, g) == Rational(0));

  GameParams g0 = tenth(2, Rational(0));
  StrategyProfile phi0 = myopic_profile(g0, Gamma::Buy);
  CHECK(fpe2_residual(phi0, solve_exact_values(phi0, g0), g0) == Rational(0));

  GameParams g1 = tenth(3, Rational(1));
  StrategyProfile d1 = delta1_profile(g1);
  CHECK(fpe2_residual(d1, solve_exact_values(d1, g1), g1) == Rational(0));
}

TEST_CASE("fpe2 residual detects a perturbed value table") {
  GameParams g = tenth(3);
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  ValueTables<Rational> values = solve_exact_values(phi, g);
  values.na(+1, 0, 0, 0, 0) += Rational(1, 1000);
  CHECK(fpe2_residual(phi, values, g) > Rational(0));
}

TEST_CASE("no profitable unilateral deviation from the myopic profile") {
  GameParams g = tenth(2, Rational(1, 2));
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  DeviationReport report = deviation_test(phi, g, 42, 30000);
  CHECK(report.horizon == 20);
  CHECK(report.n_deviations == 243);
  CHECK_FALSE(report.significant_improvement);
}

TEST_CASE("a forced wait at y=2 is exploited by a buying deviation") {
  GameParams g = tenth(3, Rational(1, 2));
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  for (int w = 0; w <= 3; ++w) {
    if (phi.defined(0, 2, w)) phi.set(0, 2, w, Gamma::Wait);
    if (phi.defined(1, 2, w)) phi.set(1, 2, w, Gamma::Wait);
  }
  DeviationReport report = deviation_test(phi, g, 42, 30000);
  CHECK(report.significant_improvement);
  CHECK(report.best.mean_improvement > 0.0);
}

TEST_CASE("deviation test at delta zero reduces to the myopic argmax") {
  GameParams g = tenth(2, Rational(0));
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  DeviationReport report = deviation_test(phi, g, 9, 20000);
  CHECK(report.horizon == 1);
  CHECK_FALSE(report.significant_improvement);
}
