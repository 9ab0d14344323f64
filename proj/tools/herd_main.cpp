#include "herd/cascade.hpp"
#include "herd/finite_oracle.hpp"
#include "herd/io.hpp"
#include "herd/profiles.hpp"
#include "herd/solver.hpp"
#include "herd/verifier.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitVerifyFail = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 64;
constexpr int kExitSchema = 65;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read profile file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

herd::SolveConfig make_config(const std::string& tie_break, double tol, int max_iters,
                              const std::string& sweep) {
  herd::SolveConfig config;
  config.tol = tol;
  config.max_iters = max_iters;
  if (!tie_break.empty()) {
    std::array<herd::Gamma, 3> order{};
    std::size_t idx = 0;
    std::stringstream ss(tie_break);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (idx >= 3) throw std::invalid_argument("tie-break needs exactly three entries");
      if (token == "reveal") order[idx] = herd::Gamma::Reveal;
      else if (token == "buy") order[idx] = herd::Gamma::Buy;
      else if (token == "wait") order[idx] = herd::Gamma::Wait;
      else throw std::invalid_argument("tie-break entries are reveal|buy|wait");
      ++idx;
    }
    if (idx != 3) throw std::invalid_argument("tie-break needs exactly three entries");
    config.tie_break = order;
  }
  if (sweep == "direct") config.sweep_mode = herd::SweepMode::DirectSolve;
  else if (sweep == "single") config.sweep_mode = herd::SweepMode::SingleUpdate;
  else if (!sweep.empty()) throw std::invalid_argument("sweep is single|direct");
  return config;
}

struct LoadedProfile {
  herd::StrategyProfile profile;
  herd::GameParams params;
};

LoadedProfile load_profile(const std::string& path, const std::string& p_override,
                           const std::string& delta_override) {
  herd::ProfileDocument doc = herd::profile_from_json(read_file(path));
  herd::Rational p = p_override.empty() ? doc.p : herd::parse_rational(p_override);
  herd::Rational delta = delta_override.empty() ? doc.delta : herd::parse_rational(delta_override);
  return {doc.profile, herd::GameParams(doc.n_players, p, delta)};
}

int cmd_solve(int n, const std::string& p_str, const std::string& delta_str,
              const std::string& tie_break, double tol, int max_iters,
              const std::string& sweep, const std::string& format,
              const std::string& out, const std::string& values_out) {
  herd::GameParams params(n, herd::parse_rational(p_str), herd::parse_rational(delta_str));
  herd::SolveConfig config = make_config(tie_break, tol, max_iters, sweep);
  herd::SolveResult result = herd::solve(params, config);

  if (!values_out.empty()) write_output(values_out, herd::values_to_csv(result.values));
  if (format == "ascii") {
    write_output(out, herd::ascii_grids(result.profile) + "\n" +
                          herd::solve_metadata_json(result, params));
  } else if (format == "csv") {
    write_output(out, herd::values_to_csv(result.values));
    std::cerr << herd::solve_metadata_json(result, params);
  } else {
    nlohmann::json doc = nlohmann::json::parse(herd::profile_to_json(result.profile, params));
    doc["solve"] = nlohmann::json::parse(herd::solve_metadata_json(result, params));
    write_output(out, doc.dump(2) + "\n");
  }
  if (!result.converged) {
    std::cerr << "solve did not converge after " << result.iterations << " iterations\n";
    return kExitNotConverged;
  }
  return 0;
}

int cmd_verify(const std::string& file, const std::string& p_override,
               const std::string& delta_override, const std::string& out, bool bisect,
               int grid_bits) {
  LoadedProfile loaded = load_profile(file, p_override, delta_override);
  if (!bisect) {
    herd::VerificationReport report = herd::check_profile(loaded.profile, loaded.params);
    write_output(out, herd::report_to_json(report, loaded.params));
    if (report.passed) {
      std::cerr << "verification PASSED (" << report.ties.size() << " exact ties)\n";
      return 0;
    }
    std::cerr << "verification FAILED: " << report.violations.size() << " violations, "
              << report.singular_cells.size() << " singular blocks\n";
    return kExitVerifyFail;
  }

  // Smallest dyadic delta* in (0,1) at which the profile verifies, assuming
  // the pass region is an interval reaching toward 1.
  auto passes_at = [&](const herd::Rational& delta) {
    herd::GameParams params(loaded.params.n_players(), loaded.params.p(), delta);
    return herd::check_profile(loaded.profile, params).passed;
  };
  std::optional<int> first_pass;
  for (int k = 1; k <= grid_bits; ++k) {
    herd::Rational delta = herd::Rational(1) - herd::Rational::pow(herd::Rational(1, 2), k);
    if (passes_at(delta)) {
      first_pass = k;
      break;
    }
  }
  if (!first_pass) {
    std::cerr << "no passing delta on the dyadic scan up to 1-2^-" << grid_bits << "\n";
    return kExitVerifyFail;
  }
  // refine on the 2^-grid_bits grid between the last failing and first
  // passing scan points
  const long long scale = 1ll << grid_bits;
  long long hi_m = scale - (scale >> *first_pass);
  long long lo_m = *first_pass == 1 ? 0 : scale - (scale >> (*first_pass - 1));
  while (hi_m - lo_m > 1) {
    long long mid = lo_m + (hi_m - lo_m) / 2;
    if (passes_at(herd::Rational(mid, scale)))
      hi_m = mid;
    else
      lo_m = mid;
  }
  herd::Rational delta_star(hi_m, scale);
  nlohmann::json doc;
  doc["delta_star"] = delta_star.str();
  doc["delta_star_approx"] = delta_star.to_double();
  doc["grid"] = "1/2^" + std::to_string(grid_bits);
  write_output(out, doc.dump(2) + "\n");
  std::cerr << "smallest passing grid delta* = " << delta_star.str() << "\n";
  return 0;
}

int cmd_cascade(const std::string& file, const std::string& p_override,
                const std::string& delta_override, const std::string& v_sel,
                const std::string& out, const std::string& hist_out) {
  LoadedProfile loaded = load_profile(file, p_override, delta_override);
  herd::CascadeDistribution dist = herd::exact_cascade_dp(loaded.profile, loaded.params);
  if (dist.non_closed_buy)
    std::cerr << "warning: buy region not closed in w; pathwise onset semantics used\n";
  std::string csv = herd::cascade_to_csv(dist);
  if (v_sel == "-1" || v_sel == "1") {
    std::istringstream in(csv);
    std::ostringstream filtered;
    std::string line;
    std::getline(in, line);
    filtered << line << "\n";
    while (std::getline(in, line))
      if (line.rfind(v_sel + ",", 0) == 0) filtered << line << "\n";
    csv = filtered.str();
  }
  write_output(out, csv);
  if (!hist_out.empty())
    write_output(hist_out, herd::cascade_hist_csv(dist, loaded.params.n_players()));
  return 0;
}

int cmd_simulate(const std::string& file, const std::string& p_override,
                 const std::string& delta_override, std::uint64_t seed, long runs,
                 int max_turns, const std::string& out) {
  LoadedProfile loaded = load_profile(file, p_override, delta_override);
  herd::SimulationResult sim =
      herd::simulate(loaded.profile, loaded.params, seed, runs, max_turns);
  write_output(out, herd::simulation_to_csv(sim));

  herd::CascadeDistribution dist = herd::exact_cascade_dp(loaded.profile, loaded.params);
  std::cerr << "dp-vs-simulation agreement (3-sigma binomial bands):\n";
  bool all_ok = true;
  for (int v : {-1, +1}) {
    const auto& bucket = sim.for_v(v);
    auto row = dist.for_v(v);
    herd::Rational probs[3] = {row.p_buy, row.p_wait, row.p_exhaustion};
    for (int c = 0; c < 3; ++c) {
      double p = probs[c].to_double();
      double freq = bucket.runs > 0 ? double(bucket.class_counts[c]) / bucket.runs : 0.0;
      double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / std::max<long>(bucket.runs, 1));
      bool ok = std::abs(freq - p) <= 3 * sigma + 1e-9;
      all_ok = all_ok && ok;
      std::cerr << "  v=" << v << " " << herd::cascade_class_name(herd::CascadeClass(c))
                << ": dp=" << p << " mc=" << freq << (ok ? "" : "  <-- outside 3 sigma") << "\n";
    }
  }
  std::cerr << (all_ok ? "agreement OK\n" : "agreement problems, see above\n");
  return 0;
}

// Small-N ground-truth checks: the full-history fixed-point residual of the
// exact quadratic solution, and a Monte Carlo unilateral-deviation test.
int cmd_oracle(const std::string& file, const std::string& p_override,
               const std::string& delta_override, std::uint64_t seed, int samples,
               int horizon) {
  LoadedProfile loaded = load_profile(file, p_override, delta_override);
  herd::Rational residual = herd::fpe2_residual(
      loaded.profile, herd::solve_exact_values(loaded.profile, loaded.params), loaded.params);
  std::cout << "finite-model residual: " << residual.str() << "\n";
  herd::DeviationReport report =
      herd::deviation_test(loaded.profile, loaded.params, seed, samples, horizon);
  std::cout << "deviations tried: " << report.n_deviations << " (horizon " << report.horizon
            << ", " << report.n_samples << " samples)\n";
  std::cout << "best deviation: " << report.best.name << " improvement "
            << report.best.mean_improvement << " +- " << report.best.std_error << "\n";
  bool ok = residual.is_zero() && !report.significant_improvement;
  std::cout << (ok ? "no profitable deviation detected\n"
                   : "profile rejected by the oracle\n");
  return ok ? 0 : kExitVerifyFail;
}

int cmd_profile(const std::string& kind, int n, const std::string& p_str,
                const std::string& delta_str, const std::string& y1_r1,
                const std::string& out) {
  herd::GameParams params(n, herd::parse_rational(p_str), herd::parse_rational(delta_str));
  herd::StrategyProfile profile(n);
  if (kind == "myopic") {
    herd::Gamma choice = y1_r1 == "reveal" ? herd::Gamma::Reveal : herd::Gamma::Buy;
    profile = herd::myopic_profile(params, choice);
  } else if (kind == "delta1") {
    profile = herd::delta1_profile(params);
  } else if (kind == "large-delta") {
    profile = herd::large_delta_profile(params);
  } else {
    throw std::invalid_argument("profile kind is myopic|delta1|large-delta");
  }
  write_output(out, herd::profile_to_json(profile, params));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibrium computation and cascade analysis for the repeated buy-or-wait social learning game"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "solve the fixed point by value iteration");
  int n = 11;
  std::string p_str = "1/10", delta_str = "1/2", tie_break, sweep, format = "json";
  std::string out, values_out;
  double tol = 1e-10;
  int max_iters = 200000;
  solve_cmd->add_option("--n", n, "number of players")->required();
  solve_cmd->add_option("--p", p_str, "signal error, rational like 1/10 or 0.1")->required();
  solve_cmd->add_option("--delta", delta_str, "discount factor, rational")->required();
  solve_cmd->add_option("--tie-break", tie_break, "preference order, e.g. reveal,buy,wait");
  solve_cmd->add_option("--tol", tol, "convergence threshold");
  solve_cmd->add_option("--max-iters", max_iters, "iteration cap");
  solve_cmd->add_option("--sweep", sweep, "sweep mode: single|direct");
  solve_cmd->add_option("--format", format, "output format: json|csv|ascii")
      ->check(CLI::IsMember({"json", "csv", "ascii"}));
  solve_cmd->add_option("--out", out, "output file (default stdout)");
  solve_cmd->add_option("--values-out", values_out, "also write value tables as CSV");

  auto* verify_cmd = app.add_subcommand("verify", "exact sequential-rationality certificate");
  std::string profile_file, p_override, delta_override, verify_out;
  bool bisect = false;
  int grid_bits = 30;
  verify_cmd->add_option("profile", profile_file, "profile JSON file")->required();
  verify_cmd->add_option("--p", p_override, "override p");
  verify_cmd->add_option("--delta", delta_override, "override delta");
  verify_cmd->add_option("--out", verify_out, "report file (default stdout)");
  verify_cmd->add_flag("--bisect-delta", bisect,
                       "find the smallest dyadic delta at which the profile verifies");
  verify_cmd->add_option("--grid-bits", grid_bits, "dyadic grid resolution for --bisect-delta");

  auto* cascade_cmd = app.add_subcommand("cascade", "exact cascade-onset distribution");
  std::string cascade_file, cascade_v = "both", cascade_out, hist_out, cp, cdelta;
  cascade_cmd->add_option("profile", cascade_file, "profile JSON file")->required();
  cascade_cmd->add_option("--v", cascade_v, "condition on the product value: -1|1|both")
      ->check(CLI::IsMember({"-1", "1", "both"}));
  cascade_cmd->add_option("--p", cp, "override p");
  cascade_cmd->add_option("--delta", cdelta, "override delta");
  cascade_cmd->add_option("--out", cascade_out, "classes CSV (default stdout)");
  cascade_cmd->add_option("--hist-out", hist_out, "cumulative bad-cascade-by-w CSV");

  auto* sim_cmd = app.add_subcommand("simulate", "forward Monte Carlo with DP agreement check");
  std::string sim_file, sim_out, sp, sdelta;
  std::uint64_t seed = 1;
  long runs = 100000;
  int max_turns = 0;
  sim_cmd->add_option("profile", sim_file, "profile JSON file")->required();
  sim_cmd->add_option("--seed", seed, "master seed");
  sim_cmd->add_option("--runs", runs, "number of runs");
  sim_cmd->add_option("--max-turns", max_turns, "horizon (default 100*N)");
  sim_cmd->add_option("--p", sp, "override p");
  sim_cmd->add_option("--delta", sdelta, "override delta");
  sim_cmd->add_option("--out", sim_out, "empirical CSV (default stdout)");

  auto* oracle_cmd =
      app.add_subcommand("oracle", "full-history ground-truth checks for N <= 4");
  std::string oracle_file, op, odelta;
  std::uint64_t oracle_seed = 1;
  int oracle_samples = 30000, oracle_horizon = 0;
  oracle_cmd->add_option("profile", oracle_file, "profile JSON file")->required();
  oracle_cmd->add_option("--p", op, "override p");
  oracle_cmd->add_option("--delta", odelta, "override delta");
  oracle_cmd->add_option("--seed", oracle_seed, "master seed");
  oracle_cmd->add_option("--samples", oracle_samples, "Monte Carlo sample count");
  oracle_cmd->add_option("--horizon", oracle_horizon, "turn horizon (0 = from delta)");

  auto* profile_cmd = app.add_subcommand("profile", "write a closed-form equilibrium profile");
  std::string kind, y1_r1 = "buy", pp = "1/10", pdelta = "1/2", profile_out;
  int pn = 11;
  profile_cmd->add_option("--kind", kind, "myopic|delta1|large-delta")->required();
  profile_cmd->add_option("--n", pn, "number of players")->required();
  profile_cmd->add_option("--p", pp, "signal error");
  profile_cmd->add_option("--delta", pdelta, "discount factor");
  profile_cmd->add_option("--y1-r1", y1_r1, "myopic (r=1, y=1) row: buy|reveal")
      ->check(CLI::IsMember({"buy", "reveal"}));
  profile_cmd->add_option("--out", profile_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed())
      return cmd_solve(n, p_str, delta_str, tie_break, tol, max_iters, sweep, format, out,
                       values_out);
    if (verify_cmd->parsed())
      return cmd_verify(profile_file, p_override, delta_override, verify_out, bisect, grid_bits);
    if (cascade_cmd->parsed())
      return cmd_cascade(cascade_file, cp, cdelta, cascade_v, cascade_out, hist_out);
    if (sim_cmd->parsed())
      return cmd_simulate(sim_file, sp, sdelta, seed, runs, max_turns, sim_out);
    if (oracle_cmd->parsed())
      return cmd_oracle(oracle_file, op, odelta, oracle_seed, oracle_samples, oracle_horizon);
    if (profile_cmd->parsed())
      return cmd_profile(kind, pn, pp, pdelta, y1_r1, profile_out);
  } catch (const herd::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
