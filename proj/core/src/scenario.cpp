#include "defisem/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "defisem/amm.hpp"
#include "defisem/analysis.hpp"

namespace defisem {

namespace {

using nlohmann::json;

struct ParseFail {
  Err error;
};

[[noreturn]] void fail(const std::string& detail) {
  throw ParseFail{err(Errc::ParseError, "scenario", 0, detail)};
}

Rat need_rat(const json& j, const std::string& what) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (!j.is_string()) fail(what + ": expected a rational string");
  auto r = rat_parse(j.get<std::string>());
  if (!r) fail(what + ": bad rational '" + j.get<std::string>() + "'");
  return *r;
}

std::string need_str(const json& j, const std::string& what) {
  if (!j.is_string()) fail(what + ": expected a string");
  return j.get<std::string>();
}

Token need_token(const json& j, const std::string& what) {
  auto t = Token::parse(need_str(j, what));
  if (!t) fail(what + ": bad token '" + j.get<std::string>() + "'");
  return *t;
}

Token need_free(const json& j, const std::string& what) {
  Token t = need_token(j, what);
  if (!t.is_free()) fail(what + ": expected a free token, got " + t.str());
  return t;
}

const json& field(const json& j, const char* name, const std::string& what) {
  auto it = j.find(name);
  if (it == j.end()) fail(what + ": missing field '" + name + "'");
  return *it;
}

std::map<std::string, Rat> rat_map(const json& j, const std::string& what) {
  std::map<std::string, Rat> out;
  if (!j.is_object()) fail(what + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    out[key] = need_rat(value, what + "." + key);
  }
  return out;
}

// ---- predicates ----------------------------------------------------------

Expr expr_from_json(const json& j);

Expr expr_from_array(const json& j) {
  std::string head = need_str(j.at(0), "expr head");
  if (head == "price") return Expr::price(need_str(j.at(1), "price token"));
  if (head == "coll") return Expr::coll_of(need_str(j.at(1), "coll user"));
  if (head == "util") return Expr::util(need_str(j.at(1), "util token"));
  if (head == "rate") {
    return Expr::exch_rate(need_str(j.at(1), "rate base"),
                           need_str(j.at(2), "rate quote"));
  }
  fail("unknown expression '" + head + "'");
}

Expr expr_from_json(const json& j) {
  if (j.is_array()) return expr_from_array(j);
  return Expr::constant(need_rat(j, "expr constant"));
}

std::optional<CmpOp> cmp_parse(const std::string& s) {
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == "=") return CmpOp::Eq;
  if (s == ">=") return CmpOp::Ge;
  if (s == ">") return CmpOp::Gt;
  return std::nullopt;
}

const char* cmp_str(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

Pred pred_from_json(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "true") return Pred::truth();
    if (s == "false") return Pred::falsity();
    fail("unknown predicate '" + s + "'");
  }
  if (!j.is_array() || j.empty()) fail("predicate: expected a prefix array");
  std::string head = need_str(j.at(0), "predicate head");
  if (head == "and") return Pred::conj(pred_from_json(j.at(1)), pred_from_json(j.at(2)));
  if (head == "or") return Pred::disj(pred_from_json(j.at(1)), pred_from_json(j.at(2)));
  if (head == "not") return Pred::negate(pred_from_json(j.at(1)));
  if (auto op = cmp_parse(head)) {
    return Pred::cmp(*op, expr_from_json(j.at(1)), expr_from_json(j.at(2)));
  }
  fail("unknown predicate head '" + head + "'");
}

json expr_to_json(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Const: return json(rat_str(e.value));
    case Expr::Kind::Price: return json::array({"price", e.a});
    case Expr::Kind::CollOf: return json::array({"coll", e.a});
    case Expr::Kind::Util: return json::array({"util", e.a});
    case Expr::Kind::ExchRate: return json::array({"rate", e.a, e.b});
  }
  return json();
}

json pred_to_json(const Pred& p) {
  switch (p.kind) {
    case Pred::Kind::True: return json("true");
    case Pred::Kind::False: return json("false");
    case Pred::Kind::Cmp:
      return json::array({cmp_str(p.op), expr_to_json(p.lhs), expr_to_json(p.rhs)});
    case Pred::Kind::And:
      return json::array({"and", pred_to_json(*p.left), pred_to_json(*p.right)});
    case Pred::Kind::Or:
      return json::array({"or", pred_to_json(*p.left), pred_to_json(*p.right)});
    case Pred::Kind::Not:
      return json::array({"not", pred_to_json(*p.left)});
  }
  return json();
}

// ---- transactions --------------------------------------------------------

Tx tx_from_json(const json& j) {
  std::string kind = need_str(field(j, "kind", "tx"), "tx.kind");
  auto user = [&] { return need_str(field(j, "user", kind), kind + ".user"); };
  auto amount = [&](const char* name = "v") {
    return need_rat(field(j, name, kind), kind + "." + name);
  };
  auto token = [&](const char* name = "token") {
    return need_token(field(j, name, kind), kind + "." + name);
  };
  if (kind == "Trf" || kind == "Mtrf") {
    TxTrf t{need_str(field(j, "from", kind), kind + ".from"),
            need_str(field(j, "to", kind), kind + ".to"), amount(), token()};
    if (kind == "Trf") return t;
    return TxMtrf{t.from, t.to, t.v, t.token};
  }
  if (kind == "Px") {
    return TxPx{rat_map(field(j, "prices", kind), "Px.prices")};
  }
  if (kind == "Dep") return TxDep{user(), amount(), token()};
  if (kind == "Bor") return TxBor{user(), amount(), token()};
  if (kind == "Int") return TxInt{};
  if (kind == "Rep") return TxRep{user(), amount(), token()};
  if (kind == "Rdm") return TxRdm{user(), amount(), token()};
  if (kind == "Liq") {
    TxLiq t{need_str(field(j, "liquidator", kind), "Liq.liquidator"),
            need_str(field(j, "victim", kind), "Liq.victim"),
            amount(),
            need_token(field(j, "repaid", kind), "Liq.repaid"),
            need_token(field(j, "seized", kind), "Liq.seized"),
            std::nullopt};
    if (j.contains("seize_amount")) {
      t.seize_amount = need_rat(j.at("seize_amount"), "Liq.seize_amount");
    }
    return t;
  }
  if (kind == "AmmDep") {
    return TxAmmDep{user(), token("t0"), token("t1"), amount("v0"), amount("v1")};
  }
  if (kind == "AmmSwap") {
    return TxAmmSwap{user(), token("t_in"), token("t_out"), amount("v_in")};
  }
  if (kind == "AmmRdm") return TxAmmRdm{user(), token("share"), amount()};
  if (kind == "fBorrow") return TxFBorrow{user(), amount(), token()};
  if (kind == "fRepay") return TxFRepay{user(), amount(), token()};
  if (kind == "fBorrowM") return TxFMint{user(), amount(), token()};
  if (kind == "fRepayM") {
    return TxFBurn{user(), amount(), token(),
                   need_rat(field(j, "fee_amount", kind), "fRepayM.fee_amount"),
                   need_token(field(j, "fee_token", kind), "fRepayM.fee_token")};
  }
  fail("unknown tx kind '" + kind + "'");
}

json tx_to_json(const Tx& tx) {
  json j;
  j["kind"] = tx_kind(tx);
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, TxTrf> || std::is_same_v<T, TxMtrf>) {
          j["from"] = t.from;
          j["to"] = t.to;
          j["v"] = rat_str(t.v);
          j["token"] = t.token.str();
        } else if constexpr (std::is_same_v<T, TxPx>) {
          json prices = json::object();
          for (const auto& [token, price] : t.quotes) prices[token] = rat_str(price);
          j["prices"] = prices;
        } else if constexpr (std::is_same_v<T, TxInt>) {
        } else if constexpr (std::is_same_v<T, TxLiq>) {
          j["liquidator"] = t.liquidator;
          j["victim"] = t.victim;
          j["v"] = rat_str(t.v);
          j["repaid"] = t.repaid.str();
          j["seized"] = t.seized.str();
          if (t.seize_amount) j["seize_amount"] = rat_str(*t.seize_amount);
        } else if constexpr (std::is_same_v<T, TxAmmDep>) {
          j["user"] = t.user;
          j["t0"] = t.t0.str();
          j["t1"] = t.t1.str();
          j["v0"] = rat_str(t.v0);
          j["v1"] = rat_str(t.v1);
        } else if constexpr (std::is_same_v<T, TxAmmSwap>) {
          j["user"] = t.user;
          j["t_in"] = t.t_in.str();
          j["t_out"] = t.t_out.str();
          j["v_in"] = rat_str(t.v_in);
        } else if constexpr (std::is_same_v<T, TxAmmRdm>) {
          j["user"] = t.user;
          j["share"] = t.share.str();
          j["v"] = rat_str(t.v);
        } else if constexpr (std::is_same_v<T, TxFBurn>) {
          j["user"] = t.user;
          j["v"] = rat_str(t.v);
          j["token"] = t.token.str();
          j["fee_amount"] = rat_str(t.fee_amount);
          j["fee_token"] = t.fee_token.str();
        } else {
          j["user"] = t.user;
          j["v"] = rat_str(t.v);
          j["token"] = t.token.str();
        }
      },
      tx);
  return j;
}

// ---- configuration -------------------------------------------------------

Config config_from_json(const json& j) {
  Config cfg;
  if (j.contains("wallets")) {
    for (const auto& [user, wallet] : j.at("wallets").items()) {
      if (!wallet.is_object()) fail("wallets." + user + ": expected an object");
      for (const auto& [token_text, amount] : wallet.items()) {
        auto token = Token::parse(token_text);
        if (!token) fail("wallets." + user + ": bad token '" + token_text + "'");
        cfg.wallets[user][*token] = need_rat(amount, "wallets." + user + "." + token_text);
      }
    }
  }
  if (j.contains("funds")) cfg.pool.funds = rat_map(j.at("funds"), "funds");
  if (j.contains("minted")) cfg.pool.minted = rat_map(j.at("minted"), "minted");
  if (j.contains("loans")) {
    for (const auto& [user, loans] : j.at("loans").items()) {
      cfg.pool.loans[user] = rat_map(loans, "loans." + user);
    }
  }
  if (j.contains("amm")) {
    for (const auto& [pair_text, state] : j.at("amm").items()) {
      auto colon = pair_text.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == pair_text.size()) {
        fail("amm: pair key '" + pair_text + "' is not 't0:t1'");
      }
      PairState pair;
      pair.r0 = need_rat(field(state, "r0", pair_text), pair_text + ".r0");
      pair.r1 = need_rat(field(state, "r1", pair_text), pair_text + ".r1");
      pair.supply = need_rat(field(state, "supply", pair_text), pair_text + ".supply");
      cfg.amm[{pair_text.substr(0, colon), pair_text.substr(colon + 1)}] = pair;
    }
  }
  if (j.contains("prices")) cfg.prices = rat_map(j.at("prices"), "prices");
  return cfg;
}

json rat_map_to_json(const std::map<std::string, Rat>& m) {
  json j = json::object();
  for (const auto& [key, value] : m) j[key] = rat_str(value);
  return j;
}

json config_to_json(const Config& cfg) {
  json j = json::object();
  json wallets = json::object();
  for (const auto& [user, wallet] : cfg.wallets) {
    json w = json::object();
    for (const auto& [token, amount] : wallet) w[token.str()] = rat_str(amount);
    wallets[user] = w;
  }
  j["wallets"] = wallets;
  j["funds"] = rat_map_to_json(cfg.pool.funds);
  j["minted"] = rat_map_to_json(cfg.pool.minted);
  json loans = json::object();
  for (const auto& [user, owed] : cfg.pool.loans) loans[user] = rat_map_to_json(owed);
  j["loans"] = loans;
  json amm = json::object();
  for (const auto& [key, pair] : cfg.amm) {
    amm[key.first + ":" + key.second] = {{"r0", rat_str(pair.r0)},
                                         {"r1", rat_str(pair.r1)},
                                         {"supply", rat_str(pair.supply)}};
  }
  j["amm"] = amm;
  j["prices"] = rat_map_to_json(cfg.prices);
  return j;
}

// ---- interest model ------------------------------------------------------

InterestRates rates_from_json(const json& j) {
  InterestRates rates;
  std::string kind = need_str(field(j, "kind", "interest"), "interest.kind");
  if (kind == "constant") {
    rates.kind = InterestRates::Kind::Constant;
    rates.constant = rat_map(field(j, "rates", "interest"), "interest.rates");
  } else if (kind == "schedule") {
    rates.kind = InterestRates::Kind::Schedule;
    const json& steps = field(j, "steps", "interest");
    if (!steps.is_array()) fail("interest.steps: expected an array");
    long ordinal = 1;
    for (const json& entry : steps) {
      rates.schedule[ordinal++] = rat_map(entry, "interest.steps");
    }
  } else if (kind == "utilization") {
    rates.kind = InterestRates::Kind::UtilizationLinear;
    rates.base = need_rat(field(j, "base", "interest"), "interest.base");
    rates.slope = need_rat(field(j, "slope", "interest"), "interest.slope");
  } else {
    fail("unknown interest kind '" + kind + "'");
  }
  return rates;
}

json rates_to_json(const InterestRates& rates) {
  json j = json::object();
  switch (rates.kind) {
    case InterestRates::Kind::Constant:
      j["kind"] = "constant";
      j["rates"] = rat_map_to_json(rates.constant);
      break;
    case InterestRates::Kind::Schedule: {
      j["kind"] = "schedule";
      json steps = json::array();
      long next = 1;
      for (const auto& [ordinal, entry] : rates.schedule) {
        while (next++ < ordinal) steps.push_back(json::object());
        steps.push_back(rat_map_to_json(entry));
      }
      j["steps"] = steps;
      break;
    }
    case InterestRates::Kind::UtilizationLinear:
      j["kind"] = "utilization";
      j["base"] = rat_str(rates.base);
      j["slope"] = rat_str(rates.slope);
      break;
  }
  return j;
}

// ---- steps ----------------------------------------------------------------

ScenarioStep step_from_json(const json& j) {
  ScenarioStep step;
  if (j.contains("announce")) {
    step.kind = ScenarioStep::Kind::Announce;
    const json& a = j.at("announce");
    if (a.contains("group")) {
      for (const json& tx : a.at("group")) step.txs.push_back(tx_from_json(tx));
    } else {
      step.txs.push_back(tx_from_json(field(a, "tx", "announce")));
    }
    if (a.contains("pred")) step.pred = pred_from_json(a.at("pred"));
    if (a.contains("multi_use")) step.multi_use = a.at("multi_use").get<bool>();
  } else if (j.contains("group")) {
    step.kind = ScenarioStep::Kind::Group;
    for (const json& tx : j.at("group")) step.txs.push_back(tx_from_json(tx));
    if (j.contains("pred")) step.pred = pred_from_json(j.at("pred"));
  } else if (j.contains("tx")) {
    step.kind = ScenarioStep::Kind::Single;
    step.txs.push_back(tx_from_json(j.at("tx")));
    if (j.contains("pred")) step.pred = pred_from_json(j.at("pred"));
  } else {
    fail("step: expected one of 'tx', 'group', 'announce'");
  }
  if (step.txs.empty()) fail("step: empty transaction list");

  if (j.contains("mode")) {
    std::string mode = need_str(j.at("mode"), "step.mode");
    if (mode == "report") {
      step.report_mode = true;
    } else if (mode != "strict") {
      fail("step.mode: expected 'strict' or 'report', got '" + mode + "'");
    }
  }
  if (j.contains("expect")) {
    for (const auto& [key, value] : j.at("expect").items()) {
      step.expect[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }
  if (j.contains("expect_divergence")) {
    for (const json& key : j.at("expect_divergence")) {
      std::string k = need_str(key, "expect_divergence");
      if (!step.expect.count(k)) {
        fail("expect_divergence key '" + k + "' has no expect entry");
      }
      step.expect_divergence.insert(k);
    }
  }
  if (j.contains("expect_report")) {
    for (const json& entry : j.at("expect_report")) {
      step.expect_report.emplace_back(need_str(entry.at(0), "expect_report rule"),
                                      entry.at(1).get<int>());
    }
  }
  if (j.contains("expect_error")) {
    std::string name = need_str(j.at("expect_error"), "expect_error");
    bool found = false;
    for (int c = 0; c <= static_cast<int>(Errc::ExpectationFailed); ++c) {
      if (name == errc_name(static_cast<Errc>(c))) {
        step.expect_error = static_cast<Errc>(c);
        found = true;
        break;
      }
    }
    if (!found) fail("expect_error: unknown error '" + name + "'");
  }
  if (j.contains("label")) step.label = need_str(j.at("label"), "step.label");
  return step;
}

json step_to_json(const ScenarioStep& step) {
  json j = json::object();
  switch (step.kind) {
    case ScenarioStep::Kind::Single:
      j["tx"] = tx_to_json(step.txs.front());
      break;
    case ScenarioStep::Kind::Group: {
      json txs = json::array();
      for (const Tx& tx : step.txs) txs.push_back(tx_to_json(tx));
      j["group"] = txs;
      break;
    }
    case ScenarioStep::Kind::Announce: {
      json a = json::object();
      if (step.txs.size() == 1) {
        a["tx"] = tx_to_json(step.txs.front());
      } else {
        json txs = json::array();
        for (const Tx& tx : step.txs) txs.push_back(tx_to_json(tx));
        a["group"] = txs;
      }
      a["pred"] = pred_to_json(step.pred);
      if (step.multi_use) a["multi_use"] = true;
      j["announce"] = a;
      return j;
    }
  }
  if (step.pred.kind != Pred::Kind::True) j["pred"] = pred_to_json(step.pred);
  if (step.report_mode) j["mode"] = "report";
  if (!step.expect.empty()) {
    json e = json::object();
    for (const auto& [key, value] : step.expect) e[key] = value;
    j["expect"] = e;
  }
  if (!step.expect_divergence.empty()) {
    j["expect_divergence"] = json(step.expect_divergence);
  }
  if (!step.expect_report.empty()) {
    json reports = json::array();
    for (const auto& [rule, premise] : step.expect_report) {
      reports.push_back(json::array({rule, premise}));
    }
    j["expect_report"] = reports;
  }
  if (step.expect_error) j["expect_error"] = errc_name(*step.expect_error);
  if (!step.label.empty()) j["label"] = step.label;
  return j;
}

}  // namespace

Res<Scenario> scenario_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    Scenario sc;
    const json& meta = field(j, "meta", "scenario");
    sc.name = need_str(field(meta, "name", "meta"), "meta.name");
    if (meta.contains("c_min")) sc.params.c_min = need_rat(meta.at("c_min"), "c_min");
    if (meta.contains("r_liq")) sc.params.r_liq = need_rat(meta.at("r_liq"), "r_liq");
    if (meta.contains("flash_fee")) {
      sc.params.flash_fee = need_rat(meta.at("flash_fee"), "flash_fee");
    }
    if (meta.contains("amm_fee")) {
      sc.params.amm_fee = need_rat(meta.at("amm_fee"), "amm_fee");
    }
    if (meta.contains("interest")) sc.rates = rates_from_json(meta.at("interest"));
    if (meta.contains("oracle_source")) {
      std::string source = need_str(meta.at("oracle_source"), "oracle_source");
      if (source == "external") {
        sc.initial.oracle_source = OracleSource::External;
      } else if (source == "amm-snapshot") {
        sc.initial.oracle_source = OracleSource::AmmSnapshot;
      } else {
        fail("oracle_source: expected 'external' or 'amm-snapshot'");
      }
    }
    if (meta.contains("numeraire")) {
      sc.initial.numeraire = need_str(meta.at("numeraire"), "numeraire");
    }

    OracleSource source = sc.initial.oracle_source;
    std::string numeraire = sc.initial.numeraire;
    sc.initial = config_from_json(field(j, "initial", "scenario"));
    sc.initial.oracle_source = source;
    sc.initial.numeraire = numeraire;

    if (j.contains("steps")) {
      for (const json& step : j.at("steps")) sc.steps.push_back(step_from_json(step));
    }
    if (j.contains("columns")) {
      for (const json& column : j.at("columns")) {
        TableColumn c;
        c.key = need_str(field(column, "key", "column"), "column.key");
        c.name = column.contains("name") ? need_str(column.at("name"), "column.name")
                                         : c.key;
        sc.columns.push_back(std::move(c));
      }
    }
    return sc;
  } catch (const ParseFail& p) {
    return p.error;
  } catch (const std::exception& e) {
    return err(Errc::ParseError, "scenario", 0, e.what());
  }
}

std::string scenario_to_json(const Scenario& sc) {
  json meta = json::object();
  meta["name"] = sc.name;
  meta["c_min"] = rat_str(sc.params.c_min);
  meta["r_liq"] = rat_str(sc.params.r_liq);
  meta["flash_fee"] = rat_str(sc.params.flash_fee);
  meta["amm_fee"] = rat_str(sc.params.amm_fee);
  meta["interest"] = rates_to_json(sc.rates);
  meta["oracle_source"] =
      sc.initial.oracle_source == OracleSource::External ? "external" : "amm-snapshot";
  if (!sc.initial.numeraire.empty()) meta["numeraire"] = sc.initial.numeraire;

  json j = json::object();
  j["meta"] = meta;
  j["initial"] = config_to_json(sc.initial);
  json steps = json::array();
  for (const ScenarioStep& step : sc.steps) steps.push_back(step_to_json(step));
  j["steps"] = steps;
  if (!sc.columns.empty()) {
    json columns = json::array();
    for (const TableColumn& c : sc.columns) {
      columns.push_back({{"key", c.key}, {"name", c.name}});
    }
    j["columns"] = columns;
  }
  return j.dump(2) + "\n";
}

Res<Scenario> scenario_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return err(Errc::ParseError, "scenario", 0, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json(buffer.str());
}

// ---- cells -----------------------------------------------------------------

namespace {

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= key.size()) {
    std::size_t dot = key.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(key.substr(start));
      break;
    }
    parts.push_back(key.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

Err bad_key(const std::string& key) {
  return err(Errc::InvalidScenario, "cell", 0, "bad cell key '" + key + "'");
}

}  // namespace

Res<ExtRat> eval_cell(const Config& cfg, const LpParams& params,
                      const std::string& key) {
  auto parts = split_key(key);
  const std::string& head = parts.front();
  auto want = [&](std::size_t n) { return parts.size() == n; };

  if (head == "balance" && want(3)) {
    auto token = Token::parse(parts[2]);
    if (!token) return bad_key(key);
    return ExtRat::of(balance(cfg, parts[1], *token));
  }
  if (head == "funds" && want(2)) return ExtRat::of(pool_funds(cfg, parts[1]));
  if ((head == "minted" || head == "supply") && want(2)) {
    return ExtRat::of(claim_supply(cfg, parts[1]));
  }
  if (head == "loan" && want(3)) {
    return ExtRat::of(loan_of(cfg, parts[1], parts[2]));
  }
  if (head == "price" && want(2)) {
    auto p = price_of(cfg, parts[1]);
    if (!p) return err(Errc::MissingPrice, "cell", 0, parts[1]);
    return ExtRat::of(*p);
  }
  if (head == "coll" && want(2)) {
    auto c = collateralization(cfg, parts[1]);
    if (!c) return c.error();
    return *c;
  }
  if (head == "util" && want(2)) return ExtRat::of(utilization(cfg, parts[1]));
  if (head == "er" && want(2)) return ExtRat::of(exchange_rate(cfg, parts[1]));
  if (head == "networth" && want(2)) {
    auto w = net_worth(cfg, parts[1]);
    if (!w) return w.error();
    return ExtRat::of(*w);
  }
  if (head == "amm" && want(4)) {
    auto it = cfg.amm.find({parts[1], parts[2]});
    bool reversed = false;
    if (it == cfg.amm.end()) {
      it = cfg.amm.find({parts[2], parts[1]});
      reversed = true;
    }
    if (it == cfg.amm.end()) return err(Errc::UnknownPair, "cell", 0, key);
    const PairState& pair = it->second;
    if (parts[3] == "r0") return ExtRat::of(reversed ? pair.r1 : pair.r0);
    if (parts[3] == "r1") return ExtRat::of(reversed ? pair.r0 : pair.r1);
    if (parts[3] == "supply") return ExtRat::of(pair.supply);
    return bad_key(key);
  }
  if (head == "rate" && want(3)) {
    auto r = amm_exchange_rate(cfg, Token::free(parts[1]), Token::free(parts[2]));
    if (!r) return r.error();
    return ExtRat::of(*r);
  }
  if (head == "eps" && want(1)) {
    auto report = safety_report(cfg, params);
    if (!report) return report.error();
    return ExtRat::of(report->epsilon_ratio);
  }
  if (head == "eps_strong" && want(1)) {
    auto report = safety_report(cfg, params);
    if (!report) return report.error();
    return ExtRat::of(report->strong_epsilon_ratio);
  }
  return bad_key(key);
}

bool cell_matches(const ExtRat& actual, const std::string& literal) {
  std::string text = literal;
  bool exact = !text.empty() && text.front() == '=';
  if (exact) text.erase(text.begin());
  if (text == "inf") return !actual.finite;
  auto expected = rat_parse(text);
  if (!expected) return false;
  if (exact) return actual.finite && actual.value == *expected;
  if (!actual.finite) return false;
  auto dot = text.find('.');
  int precision = dot == std::string::npos ? 0 : static_cast<int>(text.size() - dot - 1);
  return rat_display(actual.value, precision) == rat_display(*expected, precision);
}

// ---- replay ----------------------------------------------------------------

namespace {

std::string default_label(const ScenarioStep& step) {
  if (!step.label.empty()) return step.label;
  switch (step.kind) {
    case ScenarioStep::Kind::Single: return tx_str(step.txs.front());
    case ScenarioStep::Kind::Announce:
      return step.txs.size() == 1 ? "announce " + tx_str(step.txs.front())
                                  : "announce group(" +
                                        std::to_string(step.txs.size()) + ")";
    case ScenarioStep::Kind::Group: {
      std::string out = "group[";
      for (std::size_t i = 0; i < step.txs.size(); ++i) {
        if (i) out += "; ";
        out += tx_str(step.txs[i]);
      }
      return out + "]";
    }
  }
  return {};
}

}  // namespace

ReplayReport replay(const Scenario& sc, const ReplayOptions& opts) {
  ReplayReport report;
  report.columns = sc.columns;
  report.params = sc.params;

  NetworkState ns;
  ns.cfg = sc.initial;
  ns.params = sc.params;
  ns.rates = sc.rates;
  snapshot_refresh(ns.cfg);

  for (const std::string& v : check_state(ns.cfg)) {
    report.invariant_failures.push_back("initial: " + v);
  }
  if (opts.capture_states) report.states.push_back(ns.cfg);

  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    const ScenarioStep& step = sc.steps[i];
    StepOutcome out;
    out.index = i + 1;
    out.label = default_label(step);
    Config pre = ns.cfg;

    Res<void> result;
    switch (step.kind) {
      case ScenarioStep::Kind::Announce: {
        if (step.txs.size() == 1) {
          result = announce(ns, Auth{step.txs.front(), step.pred, step.multi_use});
        } else {
          result = announce_group(ns, GroupAuth{step.txs, step.pred, step.multi_use});
        }
        break;
      }
      case ScenarioStep::Kind::Single: {
        const Tx& tx = step.txs.front();
        if (step.report_mode && !opts.strict_rules) {
          RuleOpts ro{false, &out.violations};
          result = apply_tx(ns.cfg, ns.params, ns.rates, tx, ro);
          if (result) snapshot_refresh(ns.cfg);
        } else {
          result = execute_tx(ns, tx);
          if (!result && result.error().code == Errc::NotAuthorized) {
            if (auto a = announce(ns, Auth{tx, step.pred, true})) {
              result = execute_tx(ns, tx);
            } else {
              result = a.error();
            }
          }
        }
        break;
      }
      case ScenarioStep::Kind::Group: {
        result = execute_group(ns, step.txs);
        if (!result && result.error().code == Errc::NotAuthorized) {
          if (auto a = announce_group(ns, GroupAuth{step.txs, step.pred, true})) {
            result = execute_group(ns, step.txs);
          } else {
            result = a.error();
          }
        }
        break;
      }
    }

    auto diverge = [&](std::string key, std::string expected, std::string actual) {
      CellDivergence d{out.index, std::move(key), std::move(expected),
                       std::move(actual)};
      if (report.first_divergence.empty()) {
        report.first_divergence = "step " + std::to_string(d.step) + " " + d.key +
                                  ": expected " + d.expected + ", got " + d.actual;
      }
      report.divergences.push_back(std::move(d));
    };

    if (step.expect_error) {
      if (result) {
        diverge("error", errc_name(*step.expect_error), "ok");
      } else if (result.error().code != *step.expect_error) {
        diverge("error", errc_name(*step.expect_error), result.error().str());
      } else {
        out.expected_failure = true;
        out.error = result.error().str();
        if (!(pre == ns.cfg)) {
          report.invariant_failures.push_back(
              "step " + std::to_string(out.index) + ": failed step mutated state");
        }
      }
    } else if (!result) {
      out.error = result.error().str();
      diverge("error", "ok", out.error);
    } else {
      out.executed = true;
    }

    if (out.executed) {
      for (const std::string& v : check_state(ns.cfg)) {
        report.invariant_failures.push_back("step " + std::to_string(out.index) +
                                            ": " + v);
      }
      std::vector<std::string> transition;
      switch (step.kind) {
        case ScenarioStep::Kind::Single:
          transition = check_transition(pre, ns.cfg, step.txs.front(), ns.params);
          break;
        case ScenarioStep::Kind::Group:
          transition = check_group_transition(pre, ns.cfg);
          break;
        case ScenarioStep::Kind::Announce:
          if (!(pre == ns.cfg)) transition.push_back("announce mutated state");
          break;
      }
      for (const std::string& v : transition) {
        report.invariant_failures.push_back("step " + std::to_string(out.index) +
                                            ": " + v);
      }
    }

    for (const auto& [rule, premise] : step.expect_report) {
      bool found = std::any_of(out.violations.begin(), out.violations.end(),
                               [&](const Violation& v) {
                                 return v.rule == rule && v.premise == premise;
                               });
      if (!found && !opts.strict_rules) {
        diverge("report." + rule + "." + std::to_string(premise), "reported",
                "absent");
      }
    }
    for (const Violation& v : out.violations) {
      bool listed = std::any_of(step.expect_report.begin(), step.expect_report.end(),
                                [&](const auto& entry) {
                                  return entry.first == v.rule &&
                                         entry.second == v.premise;
                                });
      if (!listed) {
        diverge("report." + v.rule + "." + std::to_string(v.premise), "absent",
                v.detail);
      }
    }

    for (const auto& [key, literal] : step.expect) {
      auto value = eval_cell(ns.cfg, ns.params, key);
      std::string actual =
          value ? ext_str(*value) : std::string("error: ") + value.error().str();
      bool match = value && cell_matches(*value, literal);
      bool pinned = step.expect_divergence.count(key) > 0;
      if (match && pinned) {
        diverge(key, "divergence from " + literal, actual);
      } else if (!match && pinned) {
        report.expected_divergences.push_back({out.index, key, literal, actual});
      } else if (!match) {
        diverge(key, literal, actual);
      }
    }

    report.steps.push_back(std::move(out));
    if (opts.capture_states) report.states.push_back(ns.cfg);
  }

  report.final_cfg = ns.cfg;
  report.pass = report.divergences.empty() && report.invariant_failures.empty();
  return report;
}

std::string emit_table(const ReplayReport& report, int precision) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"step", "action"};
  for (const TableColumn& c : report.columns) header.push_back(c.name);
  rows.push_back(header);

  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    const StepOutcome& step = report.steps[i];
    std::vector<std::string> row{std::to_string(step.index), step.label};
    if (!step.executed) row[1] += step.expected_failure ? " [rejected]" : " [failed]";
    if (i + 1 < report.states.size()) {
      for (const TableColumn& c : report.columns) {
        auto value = eval_cell(report.states[i + 1], report.params, c.key);
        row.push_back(value ? ext_display(*value, precision) : std::string("-"));
      }
    } else {
      row.resize(header.size(), "-");
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += " | ";
      out += row[c];
      out.append(widths[c] - row[c].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

}  // namespace defisem
