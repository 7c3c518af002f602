#include "tgs/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace tgs {

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, Eof };
  Kind kind = Kind::Eof;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= s_.size()) return t;
    char c = s_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::Kind::Ident;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        t.text += advance();
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      t.kind = Token::Kind::Number;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        t.text += advance();
      return t;
    }
    t.kind = Token::Kind::Punct;
    // multi-char punctuation
    if (c == '-' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
      t.text = "->";
      advance();
      advance();
      return t;
    }
    if (c == '=' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
      t.text = "=>";
      advance();
      advance();
      return t;
    }
    if (c == '<' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '=') {
      t.text = "<=";
      advance();
      advance();
      return t;
    }
    t.text = std::string(1, advance());
    return t;
  }

 private:
  char advance() {
    char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

struct ParseError {
  std::string message;
  int line, col;
};

// Raw AST with positions, resolved against declarations afterwards.
struct RawQuant {
  std::string token, var, value;
  int line, col;
};
struct RawTerm {
  TermEndpoint ep;
  std::string token;
  int line, col;
};
struct RawAtom {
  RawTerm lhs, rhs;
  std::uint32_t lower = 0, upper = kInfDuration;
  int line, col;
};
struct RawStatement {
  std::vector<RawQuant> quants;
  std::vector<RawAtom> atoms;
};
struct RawRule {
  RuleKind kind;
  std::string name;
  bool triggerless = false;
  RawQuant trigger{};
  std::vector<RawStatement> statements;
  int line, col;
};

class Parser {
 public:
  Parser(const SpecSource& src) : lex_(src.text) { bump(); }

  ParseResult run() {
    ParseResult res;
    try {
      parse_spec();
    } catch (const ParseError& e) {
      res.diagnostics.push_back(
          {ParseDiagnostic::Severity::Error, e.message, e.line, e.col});
      return res;
    }
    resolve(res);
    if (std::none_of(res.diagnostics.begin(), res.diagnostics.end(),
                     [](const ParseDiagnostic& d) {
                       return d.severity == ParseDiagnostic::Severity::Error;
                     }))
      res.game = std::move(game_);
    return res;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError{msg, tok_.line, tok_.col}; }
  [[noreturn]] void fail_at(const std::string& msg, int line, int col) {
    throw ParseError{msg, line, col};
  }

  void bump() { tok_ = lex_.next(); }

  bool at_ident(const char* kw) const {
    return tok_.kind == Token::Kind::Ident && tok_.text == kw;
  }
  std::string expect_ident(const char* what) {
    if (tok_.kind != Token::Kind::Ident) fail(std::string("expected ") + what);
    std::string t = tok_.text;
    bump();
    return t;
  }
  void expect_punct(const char* p) {
    if (tok_.kind != Token::Kind::Punct || tok_.text != p)
      fail(std::string("expected '") + p + "'");
    bump();
  }
  bool accept_punct(const char* p) {
    if (tok_.kind == Token::Kind::Punct && tok_.text == p) {
      bump();
      return true;
    }
    return false;
  }
  std::uint32_t expect_nat() {
    if (tok_.kind != Token::Kind::Number) fail("expected a natural number");
    unsigned long v = std::stoul(tok_.text);
    bump();
    return static_cast<std::uint32_t>(v);
  }
  std::uint32_t expect_bound() {  // NAT or 'inf'
    if (at_ident("inf")) {
      bump();
      return kInfDuration;
    }
    return expect_nat();
  }

  void parse_spec() {
    while (tok_.kind != Token::Kind::Eof) {
      if (at_ident("controlled") || at_ident("external")) {
        parse_var();
      } else if (at_ident("system") || at_ident("domain")) {
        parse_rule();
      } else if (at_ident("goal")) {
        parse_goal();
      } else {
        fail("expected 'controlled', 'external', 'system', 'domain' or 'goal'");
      }
    }
  }

  struct RawVar {
    bool controlled;
    std::string name;
    std::vector<std::string> values;
    std::vector<std::pair<std::string, std::vector<std::string>>> transitions;
    std::vector<std::pair<std::string, Duration>> durations;
    std::vector<std::string> uncontrollable;
    std::map<std::string, std::pair<int, int>> positions;  // value refs
    int line, col;
  };

  void parse_var() {
    RawVar rv;
    rv.controlled = at_ident("controlled");
    bump();
    if (!at_ident("var")) fail("expected 'var'");
    bump();
    rv.line = tok_.line;
    rv.col = tok_.col;
    rv.name = expect_ident("variable name");
    expect_punct("{");
    while (!accept_punct("}")) {
      if (at_ident("values")) {
        bump();
        do {
          int l = tok_.line, c = tok_.col;
          std::string v = expect_ident("value name");
          rv.positions.emplace(v, std::make_pair(l, c));
          rv.values.push_back(v);
        } while (accept_punct(","));
        expect_punct(";");
      } else if (at_ident("transitions")) {
        bump();
        int l = tok_.line, c = tok_.col;
        std::string from = expect_ident("value name");
        rv.positions.emplace("->" + from, std::make_pair(l, c));
        expect_punct("->");
        std::vector<std::string> tos;
        do {
          int tl = tok_.line, tc = tok_.col;
          std::string to = expect_ident("value name");
          rv.positions.emplace("=>" + to, std::make_pair(tl, tc));
          tos.push_back(to);
        } while (accept_punct(","));
        expect_punct(";");
        rv.transitions.emplace_back(from, std::move(tos));
      } else if (at_ident("duration")) {
        bump();
        int l = tok_.line, c = tok_.col;
        std::string v = expect_ident("value name");
        expect_punct("[");
        Duration d;
        d.dmin = expect_nat();
        expect_punct(",");
        d.dmax = expect_bound();
        expect_punct("]");
        expect_punct(";");
        if (d.dmin < 1)
          fail_at("duration lower bound must be at least 1", l, c);
        if (!d.unbounded() && d.dmin > d.dmax)
          fail_at("duration with dmin > dmax", l, c);
        rv.durations.emplace_back(v, d);
        rv.positions.emplace("#" + v, std::make_pair(l, c));
      } else if (at_ident("uncontrollable")) {
        bump();
        int l = tok_.line, c = tok_.col;
        std::string v = expect_ident("value name");
        expect_punct(";");
        rv.positions.emplace("!" + v, std::make_pair(l, c));
        rv.uncontrollable.push_back(v);
      } else {
        fail("expected 'values', 'transitions', 'duration' or 'uncontrollable'");
      }
    }
    raw_vars_.push_back(std::move(rv));
  }

  RawQuant parse_quant() {
    RawQuant q;
    q.line = tok_.line;
    q.col = tok_.col;
    q.token = expect_ident("token name");
    expect_punct("[");
    q.var = expect_ident("variable name");
    expect_punct("=");
    q.value = expect_ident("value name");
    expect_punct("]");
    return q;
  }

  RawTerm parse_term() {
    RawTerm t;
    t.line = tok_.line;
    t.col = tok_.col;
    if (at_ident("start"))
      t.ep = TermEndpoint::Start;
    else if (at_ident("end"))
      t.ep = TermEndpoint::End;
    else
      fail("expected 'start' or 'end'");
    bump();
    expect_punct("(");
    t.token = expect_ident("token name");
    expect_punct(")");
    return t;
  }

  RawStatement parse_statement() {
    RawStatement st;
    // quantifier prefix: quant+ '.' — presence detected by lookahead on
    // IDENT '[' vs term keywords / 'true'.
    while (tok_.kind == Token::Kind::Ident && !at_ident("start") && !at_ident("end") &&
           !at_ident("true")) {
      st.quants.push_back(parse_quant());
      if (accept_punct(".")) break;
      // allow 'a[x=v] b[y=w] .' without separators
    }
    if (at_ident("true")) {
      bump();
      return st;
    }
    if (tok_.kind == Token::Kind::Ident && (at_ident("start") || at_ident("end"))) {
      do {
        RawAtom a;
        a.line = tok_.line;
        a.col = tok_.col;
        a.lhs = parse_term();
        if (accept_punct("=")) {
          a.lower = 0;
          a.upper = 0;
        } else if (tok_.kind == Token::Kind::Punct && tok_.text == "<=") {
          bump();
          if (accept_punct("[")) {
            a.lower = expect_nat();
            expect_punct(",");
            a.upper = expect_bound();
            expect_punct("]");
            if (a.upper != kInfDuration && a.lower > a.upper)
              fail_at("atom bounds with l > u", a.line, a.col);
          } else {
            a.lower = 0;
            a.upper = kInfDuration;
          }
        } else {
          fail("expected '=' or '<='");
        }
        a.rhs = parse_term();
        st.atoms.push_back(std::move(a));
      } while (accept_punct("&"));
    }
    return st;
  }

  void parse_rule() {
    RawRule r;
    r.kind = at_ident("system") ? RuleKind::System : RuleKind::Domain;
    bump();
    if (!at_ident("rule")) fail("expected 'rule'");
    bump();
    r.line = tok_.line;
    r.col = tok_.col;
    r.name = expect_ident("rule name");
    expect_punct(":");
    r.trigger = parse_quant();
    expect_punct("=>");
    do {
      r.statements.push_back(parse_statement());
    } while (accept_punct("|"));
    expect_punct(";");
    raw_rules_.push_back(std::move(r));
  }

  void parse_goal() {
    RawRule r;
    r.kind = RuleKind::System;
    r.triggerless = true;
    r.line = tok_.line;
    r.col = tok_.col;
    bump();
    expect_punct(":");
    r.name = "goal_" + std::to_string(++goal_count_);
    do {
      r.statements.push_back(parse_statement());
    } while (accept_punct("|"));
    expect_punct(";");
    raw_rules_.push_back(std::move(r));
  }

  // --- resolution against declarations -------------------------------------

  void err(ParseResult& res, const std::string& msg, int line, int col) {
    res.diagnostics.push_back({ParseDiagnostic::Severity::Error, msg, line, col});
  }

  void resolve(ParseResult& res) {
    std::set<std::string> names;
    for (const auto& rv : raw_vars_) {
      if (!names.insert(rv.name).second) {
        err(res, "duplicate variable '" + rv.name + "'", rv.line, rv.col);
        continue;
      }
      StateVariable sv;
      sv.name = rv.name;
      std::set<std::string> vals;
      for (const auto& v : rv.values) {
        if (!vals.insert(v).second) {
          auto p = rv.positions.at(v);
          err(res, "duplicate value '" + v + "' of variable '" + rv.name + "'", p.first,
              p.second);
          continue;
        }
        sv.values.push_back(v);
      }
      sv.transitions.assign(sv.values.size(), {});
      sv.durations.assign(sv.values.size(), Duration{});
      sv.tags.assign(sv.values.size(), Controllability::Controllable);
      for (const auto& [from, tos] : rv.transitions) {
        auto fid = sv.value_id(from);
        if (!fid) {
          auto p = rv.positions.at("->" + from);
          err(res, "undeclared value '" + from + "' of variable '" + rv.name + "'", p.first,
              p.second);
          continue;
        }
        for (const auto& to : tos) {
          auto tid = sv.value_id(to);
          if (!tid) {
            auto p = rv.positions.at("=>" + to);
            err(res, "undeclared value '" + to + "' of variable '" + rv.name + "'", p.first,
                p.second);
            continue;
          }
          sv.transitions[*fid].push_back(*tid);
        }
        std::sort(sv.transitions[*fid].begin(), sv.transitions[*fid].end());
        sv.transitions[*fid].erase(
            std::unique(sv.transitions[*fid].begin(), sv.transitions[*fid].end()),
            sv.transitions[*fid].end());
      }
      for (const auto& [v, d] : rv.durations) {
        auto vid = sv.value_id(v);
        if (!vid) {
          auto p = rv.positions.at("#" + v);
          err(res, "undeclared value '" + v + "' of variable '" + rv.name + "'", p.first,
              p.second);
          continue;
        }
        sv.durations[*vid] = d;
      }
      for (const auto& v : rv.uncontrollable) {
        auto vid = sv.value_id(v);
        if (!vid) {
          auto p = rv.positions.at("!" + v);
          err(res, "undeclared value '" + v + "' of variable '" + rv.name + "'", p.first,
              p.second);
          continue;
        }
        sv.tags[*vid] = Controllability::Uncontrollable;
      }
      game_.variables.push_back(std::move(sv));
      game_.controlled.push_back(rv.controlled);
    }

    for (const auto& rr : raw_rules_) {
      Rule r;
      r.kind = rr.kind;
      r.name = rr.name;
      r.triggerless = rr.triggerless;
      std::set<std::string> quant_names;
      if (!rr.triggerless) {
        if (!resolve_quant(res, rr.trigger, r.trigger_var, r.trigger_value)) continue;
        r.trigger_token = rr.trigger.token;
        quant_names.insert(rr.trigger.token);
      }
      bool rule_ok = true;
      for (const auto& rs : rr.statements) {
        ExistentialStatement st;
        std::set<std::string> local = quant_names;
        for (const auto& rq : rs.quants) {
          Quantifier q;
          q.token = rq.token;
          if (!resolve_quant(res, rq, q.var, q.value)) {
            rule_ok = false;
            continue;
          }
          if (!local.insert(rq.token).second) {
            err(res, "duplicate token name '" + rq.token + "' in one existential statement",
                rq.line, rq.col);
            rule_ok = false;
            continue;
          }
          st.quantifiers.push_back(std::move(q));
        }
        for (const auto& ra : rs.atoms) {
          Atom a;
          a.lower = ra.lower;
          a.upper = ra.upper;
          a.lhs = {ra.lhs.ep, ra.lhs.token};
          a.rhs = {ra.rhs.ep, ra.rhs.token};
          for (const RawTerm* t : {&ra.lhs, &ra.rhs}) {
            if (!local.count(t->token)) {
              err(res,
                  "token name '" + t->token +
                      "' is neither the trigger nor quantified in this statement",
                  t->line, t->col);
              rule_ok = false;
            }
          }
          st.clause.push_back(std::move(a));
        }
        r.statements.push_back(std::move(st));
      }
      if (!rule_ok) continue;
      (r.kind == RuleKind::System ? game_.system_rules : game_.domain_rules)
          .push_back(std::move(r));
    }
  }

  bool resolve_quant(ParseResult& res, const RawQuant& rq, VarId& var, ValId& val) {
    auto vid = game_.var_id(rq.var);
    if (!vid) {
      err(res, "undeclared variable '" + rq.var + "'", rq.line, rq.col);
      return false;
    }
    auto valid = game_.variables[*vid].value_id(rq.value);
    if (!valid) {
      err(res, "undeclared value '" + rq.value + "' of variable '" + rq.var + "'", rq.line,
          rq.col);
      return false;
    }
    var = *vid;
    val = *valid;
    return true;
  }

  Lexer lex_;
  Token tok_;
  Game game_;
  std::vector<RawVar> raw_vars_;
  std::vector<RawRule> raw_rules_;
  int goal_count_ = 0;
};

}  // namespace

ParseResult parse_game(const SpecSource& src) { return Parser(src).run(); }

std::string format_diagnostic(const SpecSource& src, const ParseDiagnostic& d) {
  std::ostringstream os;
  os << src.origin << ":" << d.line << ":" << d.col << ": "
     << (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") << ": "
     << d.message;
  return os.str();
}

namespace {

std::string fresh_name(const Game& g, std::string base) {
  std::string name = base;
  int i = 0;
  while (g.var_id(name)) name = base + std::to_string(++i);
  return name;
}

}  // namespace

Game desugar_goals(const Game& g) {
  if (!g.has_triggerless()) return g;
  Game out = g;
  std::string gvar_name = fresh_name(g, "_goal");
  StateVariable gv;
  gv.name = gvar_name;
  gv.values = {"_g"};
  gv.transitions = {{0}};
  gv.durations = {Duration{1, kInfDuration}};
  gv.tags = {Controllability::Controllable};
  VarId gvar = static_cast<VarId>(out.variables.size());
  out.variables.push_back(std::move(gv));
  out.controlled.push_back(true);

  auto translate = [&](Rule& r) {
    if (!r.triggerless) return;
    std::set<std::string> used;
    for (const auto& st : r.statements)
      for (const auto& q : st.quantifiers) used.insert(q.token);
    std::string tname = "_t";
    int i = 0;
    while (used.count(tname)) tname = "_t" + std::to_string(++i);
    r.triggerless = false;
    r.trigger_token = tname;
    r.trigger_var = gvar;
    r.trigger_value = 0;
  };
  for (auto& r : out.system_rules) translate(r);
  for (auto& r : out.domain_rules) translate(r);
  return out;
}

namespace {

std::string bound_str(std::uint32_t b) {
  return b == kInfDuration ? "inf" : std::to_string(b);
}

void print_rule(std::ostringstream& os, const Game& g, const Rule& r) {
  if (r.triggerless) {
    os << "goal:";
  } else {
    os << (r.kind == RuleKind::System ? "system" : "domain") << " rule " << r.name << ": "
       << r.trigger_token << "[" << g.variables[r.trigger_var].name << " = "
       << g.variables[r.trigger_var].values[r.trigger_value] << "] =>";
  }
  for (std::size_t i = 0; i < r.statements.size(); ++i) {
    const auto& st = r.statements[i];
    os << (i ? " |" : "");
    for (const auto& q : st.quantifiers)
      os << " " << q.token << "[" << g.variables[q.var].name << " = "
         << g.variables[q.var].values[q.value] << "]";
    if (!st.quantifiers.empty()) os << " .";
    if (st.clause.empty()) {
      os << " true";
    } else {
      for (std::size_t a = 0; a < st.clause.size(); ++a) {
        const Atom& at = st.clause[a];
        os << (a ? " & " : " ");
        os << (at.lhs.endpoint == TermEndpoint::Start ? "start(" : "end(") << at.lhs.token
           << ") ";
        if (at.lower == 0 && at.upper == 0)
          os << "=";
        else if (at.lower == 0 && at.upper == kInfDuration)
          os << "<=";
        else
          os << "<= [" << at.lower << ", " << bound_str(at.upper) << "]";
        os << " " << (at.rhs.endpoint == TermEndpoint::Start ? "start(" : "end(")
           << at.rhs.token << ")";
      }
    }
  }
  os << ";\n";
}

}  // namespace

std::string pretty_print(const Game& g) {
  std::ostringstream os;
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    const auto& sv = g.variables[v];
    os << (g.controlled[v] ? "controlled" : "external") << " var " << sv.name << " {\n";
    if (!sv.values.empty()) {
      os << "  values ";
      for (std::size_t i = 0; i < sv.values.size(); ++i)
        os << (i ? ", " : "") << sv.values[i];
      os << ";\n";
    }
    for (std::size_t i = 0; i < sv.values.size(); ++i) {
      if (!sv.transitions[i].empty()) {
        os << "  transitions " << sv.values[i] << " -> ";
        for (std::size_t k = 0; k < sv.transitions[i].size(); ++k)
          os << (k ? ", " : "") << sv.values[sv.transitions[i][k]];
        os << ";\n";
      }
    }
    for (std::size_t i = 0; i < sv.values.size(); ++i)
      os << "  duration " << sv.values[i] << " [" << sv.durations[i].dmin << ", "
         << bound_str(sv.durations[i].dmax) << "];\n";
    for (std::size_t i = 0; i < sv.values.size(); ++i)
      if (sv.tags[i] == Controllability::Uncontrollable)
        os << "  uncontrollable " << sv.values[i] << ";\n";
    os << "}\n";
  }
  for (const auto& r : g.system_rules) print_rule(os, g, r);
  for (const auto& r : g.domain_rules) print_rule(os, g, r);
  return os.str();
}

std::vector<std::string> validate_game(const Game& g) {
  std::vector<std::string> out;
  std::set<std::string> names;
  for (std::size_t v = 0; v < g.variables.size(); ++v) {
    const auto& sv = g.variables[v];
    if (!names.insert(sv.name).second) out.push_back("duplicate variable " + sv.name);
    if (sv.transitions.size() != sv.values.size() || sv.durations.size() != sv.values.size() ||
        sv.tags.size() != sv.values.size())
      out.push_back("variable " + sv.name + ": maps not total on values");
    for (std::size_t i = 0; i < sv.durations.size(); ++i) {
      const Duration& d = sv.durations[i];
      if (d.dmin < 1) out.push_back("variable " + sv.name + ": dmin < 1");
      if (!d.unbounded() && d.dmin > d.dmax)
        out.push_back("variable " + sv.name + ": dmin > dmax");
    }
    for (const auto& ts : sv.transitions)
      for (ValId t : ts)
        if (t < 0 || static_cast<std::size_t>(t) >= sv.values.size())
          out.push_back("variable " + sv.name + ": transition to unknown value");
  }
  if (g.controlled.size() != g.variables.size())
    out.push_back("controlled tags not total on variables");
  auto check_rule = [&](const Rule& r) {
    std::set<std::string> tokens;
    if (!r.triggerless) {
      if (r.trigger_var < 0 || static_cast<std::size_t>(r.trigger_var) >= g.variables.size()) {
        out.push_back("rule " + r.name + ": bad trigger variable");
        return;
      }
      if (r.trigger_value < 0 ||
          static_cast<std::size_t>(r.trigger_value) >= g.variables[r.trigger_var].values.size())
        out.push_back("rule " + r.name + ": bad trigger value");
      tokens.insert(r.trigger_token);
    }
    for (const auto& st : r.statements) {
      std::set<std::string> local = tokens;
      for (const auto& q : st.quantifiers) {
        if (q.var < 0 || static_cast<std::size_t>(q.var) >= g.variables.size() || q.value < 0 ||
            static_cast<std::size_t>(q.value) >= g.variables[q.var].values.size())
          out.push_back("rule " + r.name + ": bad quantifier " + q.token);
        if (!local.insert(q.token).second)
          out.push_back("rule " + r.name + ": duplicate token " + q.token);
      }
      for (const auto& a : st.clause) {
        if (!local.count(a.lhs.token) || !local.count(a.rhs.token))
          out.push_back("rule " + r.name + ": atom over unquantified token");
        if (a.upper != kInfDuration && a.lower > a.upper)
          out.push_back("rule " + r.name + ": atom with l > u");
      }
    }
  };
  for (const auto& r : g.system_rules) check_rule(r);
  for (const auto& r : g.domain_rules) check_rule(r);
  return out;
}

}  // namespace tgs
