#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "defisem/attacks.hpp"
#include "defisem/fuzz.hpp"
#include "defisem/scenario.hpp"

namespace {

using namespace defisem;

constexpr int kExitPass = 0;
constexpr int kExitDivergence = 1;
constexpr int kExitParse = 2;

int env_precision() {
  const char* raw = std::getenv("DEFI_SEM_PRECISION");
  if (raw == nullptr) return 2;
  char* end = nullptr;
  long value = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || value < 0 || value > 80) return 2;
  return static_cast<int>(value);
}

std::optional<Rat> parse_rat_arg(const std::string& text, const std::string& flag) {
  auto r = rat_parse(text);
  if (!r) std::cerr << "invalid rational for " << flag << ": " << text << "\n";
  return r;
}

std::optional<Token> parse_token_arg(const std::string& text, const std::string& flag) {
  auto t = Token::parse(text);
  if (!t) std::cerr << "invalid token for " << flag << ": " << text << "\n";
  return t;
}

void print_report(const ReplayReport& report, std::ostream& out) {
  for (const auto& step : report.steps) {
    out << "step " << step.index;
    if (!step.label.empty()) out << " [" << step.label << "]";
    if (step.executed) {
      out << ": ok";
    } else if (step.expected_failure) {
      out << ": failed as expected (" << step.error << ")";
    } else {
      out << ": failed (" << step.error << ")";
    }
    out << "\n";
  }
  for (const auto& d : report.expected_divergences) {
    out << "pinned divergence at step " << d.step << " " << d.key << ": expected "
        << d.expected << ", actual " << d.actual << "\n";
  }
  for (const auto& d : report.divergences) {
    out << "divergence at step " << d.step << " " << d.key << ": expected "
        << d.expected << ", actual " << d.actual << "\n";
  }
  for (const auto& f : report.invariant_failures) out << "invariant: " << f << "\n";
  out << (report.pass ? "PASS" : "FAIL") << "\n";
}

int run_replay(const std::string& path, bool strict_rules, bool as_table, int precision) {
  auto sc = scenario_load(path);
  if (!sc) {
    std::cerr << "error: " << sc.error().str() << "\n";
    return kExitParse;
  }
  ReplayOptions opts;
  opts.strict_rules = strict_rules;
  ReplayReport report = replay(*sc, opts);
  if (as_table) {
    std::cout << emit_table(report, precision);
  } else {
    print_report(report, std::cout);
  }
  return report.pass ? kExitPass : kExitDivergence;
}

int run_fuzz(std::uint64_t seed, int steps, const std::string& profile_name) {
  FuzzProfile profile;
  if (profile_name == "lp" || profile_name == "lp-only") {
    profile = lp_only_profile();
  } else if (profile_name == "lp-amm") {
    profile = lp_amm_profile();
  } else {
    std::cerr << "unknown profile: " << profile_name << " (expected lp or lp-amm)\n";
    return kExitParse;
  }
  FuzzResult result = fuzz_run(seed, steps, profile);
  std::cout << "seed " << result.seed << ": " << result.steps_applied
            << " steps applied\n";
  if (result.ok) {
    std::cout << "PASS\n";
    return kExitPass;
  }
  std::cout << "violation: " << result.violation_category << "\n";
  for (const auto& v : result.violations) std::cout << "  " << v << "\n";
  std::cout << "minimized reproducer (" << result.trace.size() << " steps):\n"
            << result.reproducer << "\n";
  return kExitDivergence;
}

int print_attack(const AttackTrace& trace, const Scenario& base, int precision) {
  Scenario out;
  out.name = std::string(attack_kind_str(trace.kind)) + " attack on " + base.name;
  out.params = base.params;
  out.rates = base.rates;
  out.initial = base.initial;
  for (const auto& tx : trace.steps) {
    ScenarioStep step;
    step.txs = {tx};
    step.label = tx_kind(tx);
    out.steps.push_back(std::move(step));
  }
  std::cout << scenario_to_json(out) << "\n";
  std::cout << "attacker gain: " << rat_display(trace.attacker_gain, precision)
            << " (" << rat_str(trace.attacker_gain) << ")\n";
  std::cout << "victim loss: " << rat_display(trace.victim_loss, precision) << " ("
            << rat_str(trace.victim_loss) << ")\n";
  return kExitPass;
}

struct AttackArgs {
  std::string scenario_path;
  std::string attacker;
  std::string victim;
  std::string accomplice;
  std::string target;
  std::string collateral;
  std::string deposit;
  std::string victim_deposit;
  std::string swap_in;
  std::string swap_out;
  std::string amount;
  std::string probe;
  std::string eps;
  int grid = 1000000;
  int max_accruals = 1000;
};

int run_attack(const std::string& kind_name, const AttackArgs& args, int precision) {
  auto kind = attack_kind_parse(kind_name);
  if (!kind) {
    std::cerr << "unknown attack kind: " << kind_name << "\n";
    return kExitParse;
  }
  auto sc = scenario_load(args.scenario_path);
  if (!sc) {
    std::cerr << "error: " << sc.error().str() << "\n";
    return kExitParse;
  }
  ReplayOptions opts;
  opts.capture_states = false;
  ReplayReport report = replay(*sc, opts);
  if (!report.pass) {
    std::cerr << "scenario replay failed; refusing to attack a diverged state\n";
    print_report(report, std::cerr);
    return kExitDivergence;
  }
  const Config& cfg = report.final_cfg;

  // The generated trace is replayed on top of the scenario's final state, so
  // the emitted reproducer starts there.
  Scenario base = *sc;
  base.initial = cfg;
  base.steps.clear();

  Res<AttackTrace> trace = err(Errc::PreconditionUnmet, "attack", -1, "unreachable");
  switch (*kind) {
    case AttackKind::PriceOracle: {
      Rat eps = Rat(1) / 1000000;
      if (!args.eps.empty()) {
        auto e = parse_rat_arg(args.eps, "--eps");
        if (!e) return kExitParse;
        eps = *e;
      }
      trace = gen_price_oracle_attack(cfg, sc->params, args.attacker, args.victim, eps);
      break;
    }
    case AttackKind::OverUtilization: {
      OverUtilizationArgs a;
      a.attacker = args.attacker;
      a.accomplice = args.accomplice;
      a.target = args.target;
      a.collateral = args.collateral;
      auto dep = parse_rat_arg(args.deposit, "--deposit");
      if (!dep) return kExitParse;
      a.deposit = *dep;
      if (!args.victim.empty()) {
        a.victim = args.victim;
        auto vd = parse_rat_arg(args.victim_deposit, "--victim-deposit");
        if (!vd) return kExitParse;
        a.victim_deposit = *vd;
      }
      trace = gen_over_utilization_attack(cfg, sc->params, a);
      break;
    }
    case AttackKind::Sandwich: {
      auto t_in = parse_token_arg(args.swap_in, "--in");
      auto t_out = parse_token_arg(args.swap_out, "--out");
      auto amount = parse_rat_arg(args.amount, "--amount");
      if (!t_in || !t_out || !amount) return kExitParse;
      Rat probe = balance(cfg, args.attacker, *t_in);
      if (!args.probe.empty()) {
        auto p = parse_rat_arg(args.probe, "--probe");
        if (!p) return kExitParse;
        probe = *p;
      }
      TxAmmSwap victim{args.victim, *t_in, *t_out, *amount};
      trace = gen_sandwich_attack(cfg, sc->params, args.attacker, victim, probe);
      break;
    }
    case AttackKind::Arbitrage:
      trace = gen_arbitrage_attack(cfg, sc->params, args.attacker, Int(args.grid));
      break;
    case AttackKind::RepayCensorship:
      trace = gen_repay_censorship_attack(cfg, sc->params, sc->rates, args.attacker,
                                          args.victim, args.max_accruals);
      break;
  }
  if (!trace) {
    std::cerr << "attack generation failed: " << trace.error().str() << "\n";
    return kExitDivergence;
  }
  return print_attack(*trace, base, precision);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Executable semantics for lending pools and constant-product AMMs"};
  app.require_subcommand(1);

  int precision = env_precision();
  app.add_option("--precision", precision, "Display precision (digits after the point)");

  std::string replay_path;
  bool replay_strict = false;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a scenario file");
  replay_cmd->add_option("file", replay_path, "Scenario file")->required();
  replay_cmd->add_flag("--strict-rules", replay_strict,
                       "Enforce soft premises even on report-mode steps");

  std::string table_path;
  bool table_strict = false;
  auto* table_cmd = app.add_subcommand("table", "Replay and render the trace table");
  table_cmd->add_option("file", table_path, "Scenario file")->required();
  table_cmd->add_flag("--strict-rules", table_strict,
                      "Enforce soft premises even on report-mode steps");

  std::uint64_t seed = 0;
  int steps = 1000;
  std::string profile = "lp";
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run a random trace");
  fuzz_cmd->add_option("--seed", seed, "Random seed");
  fuzz_cmd->add_option("--steps", steps, "Steps to attempt");
  fuzz_cmd->add_option("--profile", profile, "lp or lp-amm");

  std::string attack_kind;
  AttackArgs attack_args;
  auto* attack_cmd = app.add_subcommand("attack", "Synthesize an attack trace");
  attack_cmd->add_option("kind", attack_kind,
                         "price-oracle, over-utilization, sandwich, arbitrage, "
                         "repay-censorship")
      ->required();
  attack_cmd->add_option("--scenario", attack_args.scenario_path, "Scenario file")
      ->required();
  attack_cmd->add_option("--attacker", attack_args.attacker, "Attacking account");
  attack_cmd->add_option("--victim", attack_args.victim, "Victim account");
  attack_cmd->add_option("--accomplice", attack_args.accomplice,
                         "Borrowing account (over-utilization)");
  attack_cmd->add_option("--target", attack_args.target,
                         "Token to over-utilize (over-utilization)");
  attack_cmd->add_option("--collateral", attack_args.collateral,
                         "Collateral token (over-utilization)");
  attack_cmd->add_option("--deposit", attack_args.deposit,
                         "Attacker deposit (over-utilization)");
  attack_cmd->add_option("--victim-deposit", attack_args.victim_deposit,
                         "Victim deposit (over-utilization)");
  attack_cmd->add_option("--in", attack_args.swap_in, "Victim input token (sandwich)");
  attack_cmd->add_option("--out", attack_args.swap_out, "Victim output token (sandwich)");
  attack_cmd->add_option("--amount", attack_args.amount, "Victim input amount (sandwich)");
  attack_cmd->add_option("--probe", attack_args.probe,
                         "Upper bound on the attacker leg (sandwich)");
  attack_cmd->add_option("--eps", attack_args.eps, "Crashed price (price-oracle)");
  attack_cmd->add_option("--grid", attack_args.grid,
                         "Grid denominator for the swap search (arbitrage)");
  attack_cmd->add_option("--max-accruals", attack_args.max_accruals,
                         "Accrual cap before giving up (repay-censorship)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitParse;
  }

  if (replay_cmd->parsed()) return run_replay(replay_path, replay_strict, false, precision);
  if (table_cmd->parsed()) return run_replay(table_path, table_strict, true, precision);
  if (fuzz_cmd->parsed()) return run_fuzz(seed, steps, profile);
  if (attack_cmd->parsed()) return run_attack(attack_kind, attack_args, precision);
  return kExitParse;
}
