#include <doctest.h>

#include "herd/profiles.hpp"
#include "herd/verifier.hpp"

using namespace herd;

namespace {

StrategyProfile all_wait(int n) {
  StrategyProfile phi(n);
  phi.for_each_feasible([&](int r, int y, int w) { phi.set(r, y, w, Gamma::Wait); });
  return phi;
}

// Residual of every value equation at the solved tables, recomputed through
// the continuation path rather than the block assembly.
bool equations_hold_exactly(const StrategyProfile& phi, const GameParams& g,
                            const ValueTables<Rational>& values) {
  bool ok = true;
  phi.for_each_feasible([&](int r, int y, int w) {
    for (int x : {-1, +1}) {
      Gamma gamma = phi.at(r, y, w);
      Rational expected = gamma_action(gamma, x) == 1
                              ? instant_reward<Rational>(likelihood_exponent(y, r, x), g)
                              : exact_continuation(r, y, w, x, gamma, values, g);
      if (values.a(x, r, y, w) != expected) ok = false;
    }
  });
  return ok;
}

}  // namespace

TEST_CASE("all-wait profile has exactly zero values") {
  for (const Rational& delta : {Rational(0), Rational(1, 2), Rational(1)}) {
    GameParams g(4, Rational(1, 10), delta);
    ValueTables<Rational> values = solve_exact_values(all_wait(4), g);
    for (Eigen::Index i = 0; i < values.ua.size(); ++i) CHECK(values.ua[i] == Rational(0));
    for (Eigen::Index i = 0; i < values.una.size(); ++i) CHECK(values.una[i] == Rational(0));
  }
}

TEST_CASE("delta zero kills the recursion") {
  GameParams g(5, Rational(1, 10), Rational(0));
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  ValueTables<Rational> values = solve_exact_values(phi, g);
  phi.for_each_feasible([&](int r, int y, int w) {
    for (int x : {-1, +1}) {
      Rational expected = gamma_action(phi.at(r, y, w), x) == 1
                              ? instant_reward<Rational>(likelihood_exponent(y, r, x), g)
                              : Rational(0);
      CHECK(values.a(x, r, y, w) == expected);
    }
  });
  for (Eigen::Index i = 0; i < values.una.size(); ++i) CHECK(values.una[i] == Rational(0));
}

TEST_CASE("buy-everywhere profile has the instant rewards as terminal values") {
  GameParams g(4, Rational(1, 10), Rational(3, 4));
  StrategyProfile phi(4);
  phi.for_each_feasible([&](int r, int y, int w) { phi.set(r, y, w, Gamma::Buy); });
  ValueTables<Rational> values = solve_exact_values(phi, g);
  phi.for_each_feasible([&](int r, int y, int w) {
    for (int x : {-1, +1})
      CHECK(values.a(x, r, y, w) ==
            instant_reward<Rational>(likelihood_exponent(y, r, x), g));
  });
}

TEST_CASE("myopic profile block value at (y=0, w=0)") {
  GameParams g(3, Rational(1, 10), Rational(1, 2));
  ValueTables<Rational> values = solve_exact_values(myopic_profile(g, Gamma::Buy), g);
  CHECK(values.a(+1, 0, 0, 0) == Rational(4, 5));
}

TEST_CASE("solved values satisfy the value equations identically") {
  GameParams g(5, Rational(1, 10), Rational(1, 2));
  StrategyProfile phi = myopic_profile(g, Gamma::Buy);
  ValueTables<Rational> values = solve_exact_values(phi, g);
  CHECK(equations_hold_exactly(phi, g, values));

  GameParams g1(5, Rational(1, 10), Rational(1));
  StrategyProfile d1 = delta1_profile(g1);
  CHECK(equations_hold_exactly(d1, g1, solve_exact_values(d1, g1)));
}

TEST_CASE("values stay inside the reachable reward bound") {
  GameParams g(5, Rational(2, 5), Rational(999, 1000));
  StrategyProfile phi = large_delta_profile(g);
  ValueTables<Rational> values = solve_exact_values(phi, g);
  Rational bound = instant_reward<Rational>(5 + 2, g);
  phi.for_each_feasible([&](int r, int y, int w) {
    for (int x : {-1, +1}) {
      CHECK(abs(values.a(x, r, y, w)) <= bound);
      CHECK(abs(values.a(x, r, y, w)) < Rational(1));
    }
  });
}

TEST_CASE("myopic profile certifies and a corrupted row fails") {
  GameParams g(5, Rational(1, 10), Rational(1, 2));
  VerificationReport report = check_profile(myopic_profile(g, Gamma::Buy), g);
  CHECK(report.passed);
  CHECK(report.certifiable);
  CHECK(report.violations.empty());

  StrategyProfile bad = myopic_profile(g, Gamma::Buy);
  for (int w = 0; w <= 5; ++w)
    if (bad.defined(0, 2, w)) bad.set(0, 2, w, Gamma::Wait);
  VerificationReport failed = check_profile(bad, g);
  CHECK_FALSE(failed.passed);
  bool found = false;
  for (const auto& v : failed.violations)
    if (v.r == 0 && v.y == 2 && v.x == +1) found = true;
  CHECK(found);
}

TEST_CASE("delta-one profile certifies with the zero-block rule") {
  GameParams g(5, Rational(1, 10), Rational(1));
  VerificationReport report = check_profile(delta1_profile(g), g);
  CHECK(report.passed);
  // the all-wait region is exactly zero
  for (int y = -5; y <= -2; ++y)
    for (int w = std::abs(y); w <= 5; ++w)
      for (int x : {-1, +1})
        for (int r = 0; r <= 1; ++r)
          if (is_feasible_acting(r, y, w, 5)) CHECK(report.values.a(x, r, y, w) == Rational(0));
}

TEST_CASE("the underdetermined myopic row resolves per delta") {
  // at delta = 0 the uniform buy row certifies; close to 1 only a
  // threshold-in-w completion does
  GameParams g0(5, Rational(1, 10), Rational(0));
  auto resolved0 = certified_myopic_profile(g0);
  REQUIRE(resolved0.has_value());
  CHECK(resolved0->at(1, 1, 3) == Gamma::Buy);

  GameParams g1(5, Rational(1, 10), Rational(999, 1000));
  for (Gamma uniform : {Gamma::Buy, Gamma::Reveal})
    CHECK_FALSE(check_profile(myopic_profile(g1, uniform), g1).passed);
  auto resolved1 = certified_myopic_profile(g1);
  REQUIRE(resolved1.has_value());
  CHECK(check_profile(*resolved1, g1).passed);
  CHECK(resolved1->at(1, 1, 3) == Gamma::Reveal);
  CHECK(resolved1->at(1, 1, 5) == Gamma::Buy);
}

TEST_CASE("ties are reported, never counted as violations") {
  GameParams g(3, Rational(1, 10), Rational(0));
  // at delta = 0 the reveal rows sit exactly at indifference for one side
  VerificationReport report = check_profile(myopic_profile(g, Gamma::Buy), g);
  CHECK(report.passed);
  CHECK_FALSE(report.ties.empty());
}
