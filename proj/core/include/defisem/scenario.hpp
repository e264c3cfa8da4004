#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "defisem/engine.hpp"
#include "defisem/invariants.hpp"

namespace defisem {

struct TableColumn {
  std::string key;
  std::string name;
};

// One scripted step: a transaction executed through the engine (Single),
// a standing authorization registered without executing (Announce), or an
// atomic group (Group). `report_mode` runs the step's soft premises in
// report mode instead of aborting; `expect` maps cell keys to literals
// compared under the display rule ("=..." compares exactly); keys listed in
// `expect_divergence` are pinned mismatches that must keep mismatching.
struct ScenarioStep {
  enum class Kind : unsigned char { Single, Announce, Group };

  Kind kind = Kind::Single;
  std::vector<Tx> txs;
  Pred pred = Pred::truth();
  bool multi_use = false;
  bool report_mode = false;
  std::map<std::string, std::string> expect;
  std::set<std::string> expect_divergence;
  std::vector<std::pair<std::string, int>> expect_report;
  std::optional<Errc> expect_error;
  std::string label;
};

struct Scenario {
  std::string name;
  LpParams params;
  InterestRates rates;
  Config initial;
  std::vector<ScenarioStep> steps;
  std::vector<TableColumn> columns;
};

Res<Scenario> scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);
Res<Scenario> scenario_load(const std::string& path);

struct CellDivergence {
  std::size_t step = 0;
  std::string key;
  std::string expected;
  std::string actual;
};

struct StepOutcome {
  std::size_t index = 0;
  std::string label;
  bool executed = false;
  bool expected_failure = false;
  std::string error;
  std::vector<Violation> violations;
};

struct ReplayReport {
  bool pass = false;
  std::vector<StepOutcome> steps;
  std::vector<CellDivergence> divergences;
  std::vector<CellDivergence> expected_divergences;
  std::vector<std::string> invariant_failures;
  // states[0] is the initial configuration, states[i] the state after step
  // i (unchanged when the step failed). Empty when capture_states is off.
  std::vector<Config> states;
  std::vector<TableColumn> columns;
  LpParams params;
  Config final_cfg;
  std::string first_divergence;
};

struct ReplayOptions {
  // Enforce every soft premise even on steps marked report_mode.
  bool strict_rules = false;
  bool capture_states = true;
};

// Evaluates one table cell ("balance.A.m(tau0)", "funds.tau0", "loan.B.tau0",
// "price.tau1", "coll.B", "util.tau0", "er.tau0", "minted.tau0",
// "networth.A", "amm.tau0.tau1.r0", "rate.tau0.tau1", "eps", "eps_strong").
Res<ExtRat> eval_cell(const Config& cfg, const LpParams& params,
                      const std::string& key);

// A literal starting with '=' asserts exact equality; a plain literal is
// compared after rounding both sides to its displayed precision (digits
// after the decimal point, half away from zero); "inf" matches an infinite
// collateralization.
bool cell_matches(const ExtRat& actual, const std::string& literal);

ReplayReport replay(const Scenario& sc, const ReplayOptions& opts = {});

// Renders the replay as one row per step under the scenario's columns.
std::string emit_table(const ReplayReport& report, int precision);

}  // namespace defisem
