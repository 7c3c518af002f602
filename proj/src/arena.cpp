#include "tgs/arena.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <deque>
#include <sstream>

namespace tgs {

std::string ArenaNode::encode() const {
  std::string s;
  s.push_back(static_cast<char>(phase));
  for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((base >> (8 * i)) & 0xff));
  for (int i = 3; i >= 0; --i) s.push_back(static_cast<char>((delta >> (8 * i)) & 0xff));
  s += "e";
  for (const auto& a : acc_ends) {
    s.push_back(static_cast<char>(a.kind));
    s.push_back(static_cast<char>(a.var));
    s.push_back(static_cast<char>(a.value));
  }
  s += "s";
  for (const auto& a : acc_starts) {
    s.push_back(static_cast<char>(a.kind));
    s.push_back(static_cast<char>(a.var));
    s.push_back(static_cast<char>(a.value));
  }
  return s;
}

MoveSplit split_event(const Game& g, const Symbol& sym) {
  MoveSplit ms;
  for (const Action& a : sym.actions) {
    bool c = charlie_action(g, a);
    if (a.kind == ActionKind::End)
      (c ? ms.charlie_ends : ms.eve_ends).push_back(a);
    else
      (c ? ms.charlie_starts : ms.eve_starts).push_back(a);
  }
  return ms;
}

Player Arena::owner(NodeId id) const {
  switch (nodes_[id].phase) {
    case ArenaPhase::Base:
    case ArenaPhase::AfterEEnd:
    case ArenaPhase::AfterETimedEnd:
      return Player::Charlie;
    default:
      return Player::Eve;
  }
}

namespace {

std::uint64_t fnv64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::optional<Arena::BuildError> Arena::build(std::shared_ptr<GameAutomaton> aut,
                                              Limits limits, std::unique_ptr<Arena>& out) {
  std::unique_ptr<Arena> ar(new Arena());
  ar->aut_ = std::move(aut);
  GameAutomaton& A = *ar->aut_;
  const Game& g = A.game();

  std::map<std::string, NodeId> index;
  auto intern = [&](const ArenaNode& n, std::uint64_t key) -> NodeId {
    std::string enc = n.encode();
    auto it = index.find(enc);
    if (it != index.end()) return it->second;
    NodeId id = static_cast<NodeId>(ar->nodes_.size());
    ar->nodes_.push_back(n);
    ar->edges_.emplace_back();
    ar->accepting_.push_back(n.phase == ArenaPhase::Base && A.accepting(n.base));
    ar->keys_.push_back(key);
    ar->by_key_.emplace(key, id);
    index.emplace(std::move(enc), id);
    return id;
  };

  auto state_bytes = [&](GameAutomaton::State s) {
    return A.tv(s).encode() + "#" + A.rules_s(s).encode() + "#" + A.rules_d(s).encode();
  };
  auto node_key = [&](const ArenaNode& n) {
    std::string k = state_bytes(n.base);
    k.push_back(static_cast<char>(n.phase));
    k += "d" + std::to_string(n.delta) + "e";
    for (const auto& a : n.acc_ends)
      k += std::to_string(static_cast<int>(a.kind)) + ":" + std::to_string(a.var) + ":" +
           std::to_string(a.value) + ",";
    k += "s";
    for (const auto& a : n.acc_starts)
      k += std::to_string(static_cast<int>(a.kind)) + ":" + std::to_string(a.var) + ":" +
           std::to_string(a.value) + ",";
    return fnv64(k);
  };

  auto make_base = [&](GameAutomaton::State s) {
    ArenaNode n;
    n.phase = ArenaPhase::Base;
    n.base = s;
    NodeId id = intern(n, node_key(n));
    ar->base_of_.emplace(s, id);
    return id;
  };

  auto add_edge = [&](NodeId from, const Move& m, NodeId to) -> bool {
    auto& es = ar->edges_[from];
    std::string enc = move_encoding(m);
    auto it = std::lower_bound(es.begin(), es.end(), enc,
                               [](const std::pair<Move, NodeId>& e, const std::string& k) {
                                 return move_encoding(e.first) < k;
                               });
    if (it != es.end() && move_encoding(it->first) == enc) {
      assert(it->second == to);  // determinism: one successor per move label
      return true;
    }
    es.insert(it, {m, to});
    ++ar->edge_count_;
    return ar->edge_count_ <= limits.max_edges;
  };

  std::deque<GameAutomaton::State> frontier;
  std::set<GameAutomaton::State> seen_base;
  GameAutomaton::State q0 = A.initial();
  ar->initial_ = make_base(q0);
  frontier.push_back(q0);
  seen_base.insert(q0);

  const auto t0 = std::chrono::steady_clock::now();
  std::size_t expansions = 0;

  while (!frontier.empty()) {
    GameAutomaton::State s = frontier.front();
    frontier.pop_front();
    if (limits.max_seconds > 0 && (++expansions & 0x3f) == 0) {
      std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (dt.count() > limits.max_seconds)
        return BuildError{"arena exploration time budget exceeded"};
    }
    NodeId base_id = index.at(ArenaNode{ArenaPhase::Base, s, 0, {}, {}}.encode());
    assert(!A.tv(s).sink);

    std::vector<Symbol> events = A.legal_events(s, true);
    std::uint32_t min_wait = 0;
    bool have_timed = false;
    for (const Symbol& ev : events) {
      if (ev.delta > 1) {
        have_timed = true;
        min_wait = min_wait == 0 ? ev.delta : std::min(min_wait, ev.delta);
      }
    }

    auto ensure_target = [&](GameAutomaton::State t) {
      NodeId id = make_base(t);
      if (seen_base.insert(t).second) frontier.push_back(t);
      return id;
    };

    bool ok = true;
    for (const Symbol& ev : events) {
      auto nx = A.next_pruned(s, ev);
      assert(nx.has_value());
      NodeId target = ensure_target(*nx);
      MoveSplit sp = split_event(g, ev);
      if (ev.delta == 1) {
        ArenaNode n1{ArenaPhase::AfterCEnd, s, 1, sp.charlie_ends, {}};
        NodeId id1 = intern(n1, node_key(n1));
        std::vector<Action> ends = sp.charlie_ends;
        ends.insert(ends.end(), sp.eve_ends.begin(), sp.eve_ends.end());
        std::sort(ends.begin(), ends.end());
        ArenaNode n2{ArenaPhase::AfterEEnd, s, 1, ends, {}};
        NodeId id2 = intern(n2, node_key(n2));
        ArenaNode n3{ArenaPhase::AfterCStart, s, 1, ends, sp.charlie_starts};
        NodeId id3 = intern(n3, node_key(n3));
        ok = ok && add_edge(base_id, make_play(sp.charlie_ends), id1);
        ok = ok && add_edge(id1, make_play(sp.eve_ends), id2);
        ok = ok && add_edge(id2, make_play(sp.charlie_starts), id3);
        ok = ok && add_edge(id3, make_play(sp.eve_starts), target);
      } else {
        assert(sp.charlie_ends.empty());  // pruned in A_G'
        ArenaNode nt{ArenaPhase::AfterETimedEnd, s, ev.delta, sp.eve_ends, {}};
        NodeId idt = intern(nt, node_key(nt));
        for (std::uint32_t dc = ev.delta; dc <= A.d(); ++dc) {
          ArenaNode nw{ArenaPhase::AfterWait, s, dc, {}, {}};
          NodeId idw = intern(nw, node_key(nw));
          ok = ok && add_edge(base_id, make_wait(dc), idw);
          ok = ok && add_edge(idw, make_play_timed(ev.delta, sp.eve_ends), idt);
        }
        ArenaNode nc{ArenaPhase::AfterCStartInWait, s, ev.delta, sp.eve_ends,
                     sp.charlie_starts};
        NodeId idc = intern(nc, node_key(nc));
        ok = ok && add_edge(idt, make_play(sp.charlie_starts), idc);
        ok = ok && add_edge(idc, make_play(sp.eve_starts), target);
      }
      if (!ok || ar->nodes_.size() > limits.max_states) {
        return BuildError{"arena exploration budget exceeded (" +
                          std::to_string(ar->nodes_.size()) + " states, " +
                          std::to_string(ar->edge_count_) + " edges)"};
      }
    }
    (void)have_timed;
    (void)min_wait;
  }

  // Every Eve-owned node must have a successor (chains are generated from
  // complete events).
  for (NodeId i = 0; i < ar->nodes_.size(); ++i)
    if (ar->owner(i) == Player::Eve) assert(!ar->edges_[i].empty());

  ar->compute_d_recoverability();
  out = std::move(ar);
  return std::nullopt;
}

void Arena::compute_d_recoverability() {
  std::vector<std::vector<NodeId>> rev(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i)
    for (const auto& [m, t] : edges_[i]) rev[t].push_back(i);
  d_recoverable_.assign(nodes_.size(), false);
  std::deque<NodeId> q;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].phase == ArenaPhase::Base && aut_->acc_d(nodes_[i].base)) {
      d_recoverable_[i] = true;
      q.push_back(i);
    }
  }
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop_front();
    for (NodeId p : rev[n])
      if (!d_recoverable_[p]) {
        d_recoverable_[p] = true;
        q.push_back(p);
      }
  }
}

std::optional<Arena::NodeId> Arena::read_play(const std::vector<Move>& moves,
                                              std::size_t* failed_index) const {
  NodeId cur = initial_;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const auto& es = edges_[cur];
    std::string enc = move_encoding(moves[i]);
    auto it = std::lower_bound(es.begin(), es.end(), enc,
                               [](const std::pair<Move, NodeId>& e, const std::string& k) {
                                 return move_encoding(e.first) < k;
                               });
    if (it == es.end() || move_encoding(it->first) != enc) {
      if (failed_index) *failed_index = i;
      return std::nullopt;
    }
    cur = it->second;
  }
  return cur;
}

std::optional<Arena::NodeId> Arena::read_events(const EventSequence& seq) const {
  GameAutomaton::State s = aut_->initial();
  for (const Symbol& sym : encode_sequence(seq)) {
    auto nx = aut_->next_pruned(s, sym);
    if (!nx) return std::nullopt;
    s = *nx;
  }
  auto it = base_of_.find(s);
  if (it == base_of_.end()) return std::nullopt;
  return it->second;
}

std::optional<Arena::NodeId> Arena::node_by_key(std::uint64_t key) const {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::string Arena::dot() const {
  std::ostringstream os;
  os << "digraph arena {\n  rankdir=LR;\n";
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    os << "  n" << i << " [shape=" << (owner(i) == Player::Charlie ? "box" : "diamond");
    if (accepting_[i]) os << ", peripheries=2";
    if (nodes_[i].phase == ArenaPhase::Base) os << ", style=bold";
    os << ", label=\"" << i << "\"];\n";
  }
  for (NodeId i = 0; i < nodes_.size(); ++i)
    for (const auto& [m, t] : edges_[i])
      os << "  n" << i << " -> n" << t << " [label=\"" << move_to_string(aut_->game(), m)
         << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace tgs
