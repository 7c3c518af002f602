#pragma once

// Seeded random problems and games for the equivalence sweeps.

#include <random>
#include <string>
#include <vector>

#include "tgs/model.hpp"

namespace tgs::test {

struct GenConfig {
  int max_vars = 2;
  int max_values = 2;
  int max_rules = 2;
  int max_statements = 2;
  int max_quantifiers = 2;
  int max_atoms = 2;
  std::uint32_t max_constant = 3;
  bool with_domain_rules = false;   // games: mark some rules domain
  bool force_external = false;      // games: at least one external variable
};

inline Game random_game(std::mt19937_64& rng, const GenConfig& cfg) {
  auto pick = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  Game g;
  int n_vars = pick(1, cfg.max_vars);
  for (int v = 0; v < n_vars; ++v) {
    StateVariable sv;
    sv.name = "v" + std::to_string(v);
    int n_vals = pick(1, cfg.max_values);
    for (int k = 0; k < n_vals; ++k) sv.values.push_back("a" + std::to_string(k));
    sv.transitions.resize(n_vals);
    for (int k = 0; k < n_vals; ++k)
      for (int t = 0; t < n_vals; ++t)
        if (pick(0, 2) > 0) sv.transitions[k].push_back(t);
    sv.durations.resize(n_vals);
    for (int k = 0; k < n_vals; ++k) {
      std::uint32_t dmin = static_cast<std::uint32_t>(pick(1, 2));
      bool unbounded = pick(0, 2) == 0;
      sv.durations[k] = {dmin, unbounded ? kInfDuration
                                         : static_cast<std::uint32_t>(pick(
                                               static_cast<int>(dmin),
                                               static_cast<int>(cfg.max_constant)))};
    }
    sv.tags.resize(n_vals);
    for (int k = 0; k < n_vals; ++k)
      sv.tags[k] = pick(0, 1) ? Controllability::Controllable
                              : Controllability::Uncontrollable;
    g.variables.push_back(std::move(sv));
    g.controlled.push_back(true);
  }
  if (cfg.force_external && n_vars > 1) g.controlled.back() = false;
  else if (cfg.force_external) {
    // duplicate a variable so there is an external one
    StateVariable sv = g.variables[0];
    sv.name = "v" + std::to_string(n_vars);
    g.variables.push_back(sv);
    g.controlled.push_back(false);
    ++n_vars;
  }

  auto random_term = [&](const std::vector<std::string>& names) {
    Term t;
    t.endpoint = pick(0, 1) ? TermEndpoint::Start : TermEndpoint::End;
    t.token = names[static_cast<std::size_t>(pick(0, static_cast<int>(names.size()) - 1))];
    return t;
  };

  int n_rules = pick(0, cfg.max_rules);
  for (int r = 0; r < n_rules; ++r) {
    Rule rule;
    rule.kind = cfg.with_domain_rules && pick(0, 1) ? RuleKind::Domain : RuleKind::System;
    rule.name = "r" + std::to_string(r);
    rule.trigger_token = "t";
    rule.trigger_var = pick(0, n_vars - 1);
    rule.trigger_value =
        pick(0, static_cast<int>(g.variables[rule.trigger_var].values.size()) - 1);
    int n_st = pick(1, cfg.max_statements);
    for (int s = 0; s < n_st; ++s) {
      ExistentialStatement st;
      std::vector<std::string> names{"t"};
      int n_q = pick(0, cfg.max_quantifiers);
      for (int q = 0; q < n_q; ++q) {
        Quantifier qu;
        qu.token = "q" + std::to_string(q);
        qu.var = pick(0, n_vars - 1);
        qu.value = pick(0, static_cast<int>(g.variables[qu.var].values.size()) - 1);
        names.push_back(qu.token);
        st.quantifiers.push_back(qu);
      }
      int n_atoms = pick(0, cfg.max_atoms);
      for (int a = 0; a < n_atoms; ++a) {
        Atom at;
        at.lhs = random_term(names);
        at.rhs = random_term(names);
        at.lower = static_cast<std::uint32_t>(pick(0, static_cast<int>(cfg.max_constant)));
        bool unbounded = pick(0, 2) == 0;
        at.upper = unbounded ? kInfDuration
                             : static_cast<std::uint32_t>(pick(
                                   static_cast<int>(at.lower), static_cast<int>(cfg.max_constant)));
        st.clause.push_back(at);
      }
      rule.statements.push_back(std::move(st));
    }
    (rule.kind == RuleKind::System ? g.system_rules : g.domain_rules)
        .push_back(std::move(rule));
  }
  return g;
}

}  // namespace tgs::test
