#include "herd/io.hpp"

#include <json.hpp>

#include <sstream>

namespace herd {

namespace {

using nlohmann::json;

json grid_for_r(const StrategyProfile& profile, int r) {
  const int n = profile.n_players();
  json rows = json::array();
  for (int y = n; y >= -n; --y) {
    json row = json::array();
    for (int w = 0; w <= n; ++w) {
      if (is_feasible_acting(r, y, w, n) && profile.defined(r, y, w))
        row.push_back(gamma_code(profile.at(r, y, w)));
      else
        row.push_back("--");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Gamma gamma_from_code(const std::string& code) {
  if (code == "00") return Gamma::Wait;
  if (code == "01") return Gamma::Reveal;
  if (code == "11") return Gamma::Buy;
  throw SchemaError("unknown strategy code '" + code + "'");
}

}  // namespace

std::string profile_to_json(const StrategyProfile& profile, const GameParams& params) {
  json doc;
  doc["n"] = params.n_players();
  doc["p"] = params.p().str();
  doc["delta"] = params.delta().str();
  doc["phi"]["r0"] = grid_for_r(profile, 0);
  doc["phi"]["r1"] = grid_for_r(profile, 1);
  return doc.dump(2) + "\n";
}

ProfileDocument profile_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("profile JSON parse error: ") + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("p") ||
        !doc.contains("delta") || !doc.contains("phi"))
      throw SchemaError("profile document must have n, p, delta, phi");
    int n = doc.at("n").get<int>();
    if (n < 1) throw SchemaError("n must be positive");
    Rational p = parse_rational(doc.at("p").get<std::string>());
    Rational delta = parse_rational(doc.at("delta").get<std::string>());
    GameParams params(n, p, delta);

    StrategyProfile profile(n);
    const json& phi = doc.at("phi");
    for (int r = 0; r <= 1; ++r) {
      std::string key = r == 0 ? "r0" : "r1";
      if (!phi.contains(key)) throw SchemaError("phi must have r0 and r1 grids");
      const json& rows = phi.at(key);
      if (!rows.is_array() || static_cast<int>(rows.size()) != 2 * n + 1)
        throw SchemaError("phi." + key + " must have 2N+1 rows (y = N down to -N)");
      for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        int y = n - i;
        const json& row = rows.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != n + 1)
          throw SchemaError("phi." + key + " rows must have N+1 columns (w = 0..N)");
        for (int w = 0; w <= n; ++w) {
          std::string code = row.at(w).get<std::string>();
          bool feasible = is_feasible_acting(r, y, w, n);
          if (code == "--") {
            if (feasible)
              throw SchemaError("feasible cell (r=" + std::to_string(r) + ",y=" +
                                std::to_string(y) + ",w=" + std::to_string(w) + ") marked --");
            continue;
          }
          if (!feasible)
            throw SchemaError("infeasible cell (r=" + std::to_string(r) + ",y=" +
                              std::to_string(y) + ",w=" + std::to_string(w) + ") carries a strategy");
          profile.set(r, y, w, gamma_from_code(code));
        }
      }
    }
    return ProfileDocument{std::move(profile), n, std::move(p), std::move(delta)};
  } catch (const json::exception& e) {
    throw SchemaError(std::string("profile JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("profile JSON: ") + e.what());
  }
}

std::string ascii_grids(const StrategyProfile& profile) {
  const int n = profile.n_players();
  std::ostringstream out;
  for (int r = 0; r <= 1; ++r) {
    out << "r=" << r << " (rows y=" << n << ".." << -n << ", cols w=0.." << n << ")\n";
    out << "      ";
    for (int w = 0; w <= n; ++w) out << (w < 10 ? " w" : "w") << w << " ";
    out << "\n";
    for (int y = n; y >= -n; --y) {
      out << "y=";
      if (y >= 0) out << " ";
      if (std::abs(y) < 10) out << " ";
      out << y << " ";
      for (int w = 0; w <= n; ++w) {
        bool ok = is_feasible_acting(r, y, w, n) && profile.defined(r, y, w);
        out << " " << (ok ? gamma_code(profile.at(r, y, w)) : "--") << " ";
      }
      out << "\n";
    }
    if (r == 0) out << "\n";
  }
  return out.str();
}

std::string report_to_json(const VerificationReport& report, const GameParams& params) {
  json doc;
  doc["n"] = params.n_players();
  doc["p"] = params.p().str();
  doc["delta"] = params.delta().str();
  doc["passed"] = report.passed;
  doc["certifiable"] = report.certifiable;
  json viols = json::array();
  for (const auto& v : report.violations) {
    viols.push_back({{"r", v.r}, {"y", v.y}, {"w", v.w}, {"x", v.x},
                     {"buy", v.buy_payoff.str()}, {"wait", v.wait_payoff.str()},
                     {"prescribed", gamma_code(v.prescribed)}});
  }
  doc["violations"] = std::move(viols);
  json ties = json::array();
  for (const auto& t : report.ties)
    ties.push_back({{"r", t.r}, {"y", t.y}, {"w", t.w}, {"x", t.x}, {"payoff", t.payoff.str()}});
  doc["ties"] = std::move(ties);
  json cells = json::array();
  for (const auto& c : report.singular_cells) cells.push_back({{"y", c.y}, {"w", c.w}});
  doc["singular_blocks"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string solve_metadata_json(const SolveResult& result, const GameParams& params) {
  json doc;
  doc["n"] = params.n_players();
  doc["p"] = params.p().str();
  doc["delta"] = params.delta().str();
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  doc["residual"] = result.residual;
  doc["flags"] = result.flags;
  return doc.dump(2) + "\n";
}

std::string values_to_csv(const ValueTables<double>& values) {
  std::ostringstream out;
  out.precision(17);
  out << "table,x,r,z,y,w,value\n";
  const int n = values.n;
  for (int x : {-1, +1})
    for (int r = 0; r <= 1; ++r)
      for (int y = -n; y <= n; ++y)
        for (int w = 0; w <= n; ++w)
          if (is_feasible_acting(r, y, w, n))
            out << "u_a," << x << "," << r << ",," << y << "," << w << ","
                << values.a(x, r, y, w) << "\n";
  for (int x : {-1, +1})
    for (int rt = 0; rt <= 1; ++rt)
      for (int z = 0; z <= 1; ++z)
        for (int y = -n; y <= n; ++y)
          for (int w = 0; w <= n; ++w)
            if (is_feasible_nonacting(rt, z, y, w, n))
              out << "u_na," << x << "," << rt << "," << z << "," << y << "," << w << ","
                  << values.na(x, rt, z, y, w) << "\n";
  return out.str();
}

std::string cascade_to_csv(const CascadeDistribution& dist) {
  std::ostringstream out;
  out << "v,class,probability\n";
  for (int v : {-1, +1}) {
    const auto& row = dist.for_v(v);
    out << v << ",buy-cascade," << row.p_buy.str() << "\n";
    out << v << ",wait-cascade," << row.p_wait.str() << "\n";
    out << v << ",exhaustion," << row.p_exhaustion.str() << "\n";
  }
  return out.str();
}

std::string cascade_hist_csv(const CascadeDistribution& dist, int n_players) {
  std::ostringstream out;
  out << "w,bad_buy_cum_v_minus,bad_wait_cum_v_plus\n";
  Rational buy_cum(0), wait_cum(0);
  for (int w = 0; w <= n_players; ++w) {
    buy_cum += dist.minus.onset_w[static_cast<int>(CascadeClass::Buy)][static_cast<std::size_t>(w)];
    wait_cum += dist.plus.onset_w[static_cast<int>(CascadeClass::Wait)][static_cast<std::size_t>(w)];
    out << w << "," << buy_cum.str() << "," << wait_cum.str() << "\n";
  }
  return out.str();
}

std::string simulation_to_csv(const SimulationResult& sim) {
  std::ostringstream out;
  out << "v,class,count,frequency\n";
  for (int v : {-1, +1}) {
    const auto& row = sim.for_v(v);
    for (int c = 0; c < 4; ++c) {
      double freq = row.runs > 0 ? static_cast<double>(row.class_counts[c]) / row.runs : 0.0;
      out << v << "," << cascade_class_name(static_cast<CascadeClass>(c)) << ","
          << row.class_counts[c] << "," << freq << "\n";
    }
  }
  return out.str();
}

}  // namespace herd
