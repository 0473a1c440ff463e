#include "dplan/static_planners.hpp"

#include <array>
#include <chrono>

namespace dplan {

namespace {

using Clock = std::chrono::steady_clock;
using Record = NodeRecord<GridCost>;

constexpr std::array<std::pair<const char*, PlannerKind>, 8> kNames{{
    {"dijkstra", PlannerKind::kDijkstra},
    {"astar", PlannerKind::kAStarForward},
    {"astar-back", PlannerKind::kAStarBackward},
    {"dstar-lite", PlannerKind::kDStarLite},
    {"dstar-lite-opt", PlannerKind::kDStarLiteOptimized},
    {"arastar", PlannerKind::kARAStar},
    {"adstar", PlannerKind::kADStar},
    {"adstar-opt", PlannerKind::kADStarOptimized},
}};

GridCost min_cost(const GridCost& a, const GridCost& b) { return b < a ? b : a; }

// Calls f(neighbour index, step length) for the in-bounds 8-neighbourhood,
// same order as neighbors8.
template <typename F>
void for_adjacent(const GridWorld& w, int idx, F&& f) {
  const int x = idx % w.width();
  const int y = idx / w.width();
  for (int dy = -1; dy <= 1; ++dy) {
    const int ny = y + dy;
    if (ny < 0 || ny >= w.height()) continue;
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const int nx = x + dx;
      if (nx < 0 || nx >= w.width()) continue;
      f(ny * w.width() + nx, (dx != 0 && dy != 0) ? GridCost(0, 1) : GridCost(1, 0));
    }
  }
}

GridCost edge(const GridWorld& w, int a, int b, const GridCost& len) {
  if (w.obstacles()[a] != 0 || w.obstacles()[b] != 0) return GridCost::infinity();
  return len;
}

bool is_goal_idx(const GridWorld& w, int idx) { return w.is_goal(w.cell_at(idx)); }

GridCost h_to(const GridWorld& w, const Cell& a, int idx) { return h_diagonal_cost(a, w.cell_at(idx)); }

// Uninflated keys are summed in exact counts so equal costs give equal keys.
double inflated(const GridCost& g, double eps, const GridCost& h) {
  if (eps == 1.0) return (g + h).value();
  return g.value() + eps * h.value();
}

void check_prior(const PlanSession* prior, PlannerKind kind) {
  if (prior != nullptr && prior->kind != kind) {
    throw ValidationError(std::string("prior session was produced by ") + std::string(to_string(prior->kind)) +
                          ", not " + std::string(to_string(kind)));
  }
}

// Same dimensions and goal set: the records of the prior can be repaired.
bool reusable(const PlanSession& prior, const GridWorld& world) {
  const GridWorld& old = prior.world_snapshot;
  if (!old.same_layout(world)) return false;
  auto a = old.goals();
  auto b = world.goals();
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<int> changed_indices(const GridWorld& old, const GridWorld& now) {
  std::vector<int> out;
  for (int i = 0; i < now.cell_count(); ++i) {
    if ((old.obstacles()[i] != 0) != (now.obstacles()[i] != 0)) out.push_back(i);
  }
  return out;
}

void begin_call(PlanSession& s) {
  s.metrics.cycle_expansions.clear();
  s.metrics.expansions = 0;
  s.metrics.rhs_recomputations = 0;
  s.metrics.changed_cells = 0;
  s.metrics.from_scratch = false;
  s.metrics.aborted = false;
  s.cycle_expanded.clear();
}

void reset_search(PlanSession& s) {
  s.records.assign(static_cast<std::size_t>(s.world_snapshot.cell_count()), Record{});
  s.open.clear();
  s.incons.clear();
  s.km = GridCost::zero();
  s.metrics.from_scratch = true;
}

void finish(PlanSession& s, Clock::time_point t0) {
  s.metrics.expansions = 0;
  for (long e : s.metrics.cycle_expansions) s.metrics.expansions += e;
  s.metrics.cumulative_expansions += s.metrics.expansions;
  s.metrics.cumulative_rhs_recomputations += s.metrics.rhs_recomputations;
  ++s.metrics.calls;
  if (s.success) {
    s.path = trace_path(s);
    s.cost = path_cost(s.world_snapshot, s.path);
    s.terminal = s.path.back();
    s.metrics.path_length = static_cast<int>(s.path.size()) - 1;
    s.metrics.path_cost = s.cost.value();
  } else {
    s.path.clear();
    s.cost = GridCost::infinity();
    s.metrics.path_length = 0;
    s.metrics.path_cost = kInfinity;
  }
  s.metrics.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  s.metrics.cumulative_wall_time += s.metrics.wall_time;
}

// ---------------------------------------------------------------------------
// Dijkstra / A*

PlanSession best_first(const GridWorld& world, PlannerKind kind) {
  const auto t0 = Clock::now();
  PlanSession s(kind, world);
  begin_call(s);
  reset_search(s);
  s.agent_start = world.start();
  const bool backward = kind == PlannerKind::kAStarBackward;
  const bool exhaustive = kind == PlannerKind::kDijkstra;
  const int start = world.index(world.start());

  auto h = [&](int idx) -> GridCost {
    if (exhaustive) return GridCost::zero();
    const Cell c = world.cell_at(idx);
    if (backward) return h_diagonal_cost(world.start(), c);
    GridCost best = GridCost::infinity();
    for (const Cell& g : world.goals()) best = min_cost(best, h_diagonal_cost(c, g));
    return best;
  };
  auto& rec = s.records;
  auto push = [&](int idx) { s.open.insert_or_update(idx, SearchKey::one((rec[idx].g + h(idx)).value())); };

  if (backward) {
    for (const Cell& g : world.goals()) {
      rec[world.index(g)].g = GridCost::zero();
      push(world.index(g));
    }
  } else {
    rec[start].g = GridCost::zero();
    push(start);
  }

  long expansions = 0;
  std::optional<int> reached;
  while (!s.open.empty()) {
    const int u = s.open.pop_min().id;
    rec[u].in_open = false;
    rec[u].in_closed = true;
    ++expansions;
    if (!exhaustive) {
      if (backward ? u == start : is_goal_idx(world, u)) {
        reached = u;
        break;
      }
    }
    for_adjacent(world, u, [&](int v, const GridCost& len) {
      if (rec[v].in_closed) return;
      const GridCost cand = rec[u].g + edge(world, u, v, len);
      if (cand < rec[v].g) {
        rec[v].g = cand;
        rec[v].pred = u;
        push(v);
      }
    });
  }
  s.metrics.cycle_expansions.push_back(expansions);

  if (exhaustive) {
    GridCost best = GridCost::infinity();
    for (const Cell& g : world.goals()) {
      const GridCost gc = rec[world.index(g)].g;
      if (gc < best) {
        best = gc;
        reached = world.index(g);
      }
    }
  }
  s.success = reached.has_value();
  if (s.success) {
    s.terminal = backward ? world.start() : world.cell_at(*reached);
    s.plan_start = backward ? world.cell_at(*reached) : world.start();
  } else {
    s.plan_start = world.start();
    s.terminal = world.start();
  }
  finish(s, t0);
  if (s.success && backward) s.plan_start = s.path.back();
  return s;
}

// ---------------------------------------------------------------------------
// D* Lite and AD*: backward searches with one-step lookahead values.

class Lookahead {
 public:
  Lookahead(PlanSession& s, bool optimized, bool anytime)
      : s_(s), w_(s.world_snapshot), rec_(s.records), optimized_(optimized), anytime_(anytime) {}

  int start() const { return w_.index(s_.agent_start); }

  SearchKey key(int u) const {
    const Record& r = rec_[u];
    const GridCost h = h_to(w_, s_.agent_start, u);
    if (anytime_) {
      if (r.g > r.rhs) return SearchKey::two(inflated(r.rhs, s_.eps.current(), h), r.rhs.value());
      return SearchKey::two((r.g + h).value(), r.g.value());
    }
    const GridCost m = min_cost(r.g, r.rhs);
    return SearchKey::two((m + h + s_.km).value(), m.value());
  }

  // Also points u's back-pointer at the minimizing successor.
  GridCost min_succ(int u) {
    ++s_.metrics.rhs_recomputations;
    GridCost best = GridCost::infinity();
    int arg = -1;
    for_adjacent(w_, u, [&](int v, const GridCost& len) {
      const GridCost c = edge(w_, u, v, len) + rec_[v].g;
      if (c < best) {
        best = c;
        arg = v;
      }
    });
    rec_[u].pred = arg;
    return best;
  }

  void lower_rhs(int u, const GridCost& via_cost, int via) {
    if (via_cost < rec_[u].rhs) {
      rec_[u].rhs = via_cost;
      rec_[u].pred = via;
    }
  }

  void seed_goals() {
    for (const Cell& g : w_.goals()) {
      const int i = w_.index(g);
      rec_[i].rhs = GridCost::zero();
      requeue(i);
    }
  }

  // Queues or files the node according to its consistency.
  void requeue(int u) {
    Record& r = rec_[u];
    if (r.g != r.rhs) {
      if (anytime_ && r.in_closed) {
        if (s_.open.erase(u)) r.in_open = false;
        if (!r.in_incons) {
          r.in_incons = true;
          s_.incons.push_back(u);
        }
      } else {
        s_.open.insert_or_update(u, key(u));
        r.in_open = true;
      }
    } else if (r.in_open) {
      s_.open.erase(u);
      r.in_open = false;
    }
  }

  void update_vertex(int u) {
    if (!is_goal_idx(w_, u)) rec_[u].rhs = min_succ(u);
    requeue(u);
  }

  // Edge a->b changed cost from c_old to c_new.
  void edge_changed(int a, int b, const GridCost& c_old, const GridCost& c_new) {
    if (c_old == c_new || is_goal_idx(w_, a)) return;
    Record& r = rec_[a];
    if (c_old > c_new) {
      lower_rhs(a, c_new + rec_[b].g, b);
    } else if (c_old.is_finite() && r.rhs == c_old + rec_[b].g) {
      r.rhs = min_succ(a);
    }
    requeue(a);
  }

  void apply_changes(const GridWorld& old, const std::vector<int>& changed) {
    if (optimized_) {
      for (int v : changed) {
        for_adjacent(w_, v, [&](int n, const GridCost& len) {
          edge_changed(n, v, edge(old, n, v, len), edge(w_, n, v, len));
          edge_changed(v, n, edge(old, v, n, len), edge(w_, v, n, len));
        });
      }
      return;
    }
    std::vector<char> mark(static_cast<std::size_t>(w_.cell_count()), 0);
    std::vector<int> touched;
    auto touch = [&](int i) {
      if (!mark[i]) {
        mark[i] = 1;
        touched.push_back(i);
      }
    };
    for (int v : changed) {
      touch(v);
      for_adjacent(w_, v, [&](int n, const GridCost&) { touch(n); });
    }
    for (int i : touched) update_vertex(i);
  }

  bool keep_going() {
    const auto top = s_.open.top_key();
    if (!top) return false;
    const Record& rs = rec_[start()];
    if (*top < key(start())) return true;
    // Optimized D* Lite may stop with an overconsistent start; AD* must not,
    // since the greedy trace needs a consistent start under inflated keys.
    if (optimized_ && !anytime_) return rs.rhs > rs.g;
    return rs.rhs != rs.g;
  }

  // Returns false when the expansion budget ran out.
  bool compute(long budget, std::vector<int>* expanded_log) {
    long expansions = 0;
    while (keep_going()) {
      if (budget > 0 && expansions >= budget) {
        s_.metrics.cycle_expansions.push_back(expansions);
        return false;
      }
      const int u = *s_.open.top_id();
      const SearchKey k_old = *s_.open.top_key();
      if (!anytime_) {
        const SearchKey k_new = key(u);
        if (k_old < k_new) {
          s_.open.insert_or_update(u, k_new);
          continue;
        }
      }
      s_.open.pop_min();
      Record& r = rec_[u];
      r.in_open = false;
      ++expansions;
      if (r.g > r.rhs) {
        if (expanded_log) expanded_log->push_back(u);
        r.g = r.rhs;
        if (anytime_) r.in_closed = true;
        for_adjacent(w_, u, [&](int p, const GridCost& len) {
          if (optimized_) {
            if (!is_goal_idx(w_, p)) lower_rhs(p, edge(w_, p, u, len) + r.g, u);
            requeue(p);
          } else {
            update_vertex(p);
          }
        });
      } else {
        const GridCost g_old = r.g;
        r.g = GridCost::infinity();
        if (optimized_) {
          requeue(u);
          for_adjacent(w_, u, [&](int p, const GridCost& len) {
            const GridCost c = edge(w_, p, u, len);
            if (c.is_finite() && !is_goal_idx(w_, p) && rec_[p].rhs == c + g_old) rec_[p].rhs = min_succ(p);
            requeue(p);
          });
        } else {
          update_vertex(u);
          for_adjacent(w_, u, [&](int p, const GridCost&) { update_vertex(p); });
        }
      }
    }
    s_.metrics.cycle_expansions.push_back(expansions);
    return true;
  }

  // Anytime cycle start: Incons back into Open, new keys, empty Closed.
  void open_new_cycle() {
    for (int i : s_.incons) {
      Record& r = rec_[i];
      r.in_incons = false;
      if (r.g != r.rhs) {
        s_.open.insert_or_update(i, key(i));
        r.in_open = true;
      }
    }
    s_.incons.clear();
    for (auto& r : rec_) r.in_closed = false;
    s_.open.rekey([&](int id) { return key(id); });
  }

 private:
  PlanSession& s_;
  const GridWorld& w_;
  std::vector<Record>& rec_;
  bool optimized_;
  bool anytime_;
};

PlanSession lookahead_plan(PlannerKind kind, const GridWorld& world, const PlanSession* prior,
                           const InflationSchedule& schedule, const PlannerOptions& options) {
  const auto t0 = Clock::now();
  check_prior(prior, kind);
  const bool anytime = kind == PlannerKind::kADStar || kind == PlannerKind::kADStarOptimized;
  const bool optimized = kind == PlannerKind::kDStarLiteOptimized || kind == PlannerKind::kADStarOptimized;

  const bool repair = prior != nullptr && reusable(*prior, world);
  PlanSession s = repair ? *prior : PlanSession(kind, world);
  begin_call(s);
  std::vector<int> changed;
  const Cell last_start = s.agent_start;
  if (repair) {
    changed = changed_indices(prior->world_snapshot, world);
    s.world_snapshot = world;
  } else {
    s.options = options;
    s.eps = anytime ? schedule : InflationSchedule();
  }
  s.agent_start = world.start();
  s.plan_start = world.start();

  auto run = [&](bool fresh) -> bool {
    Lookahead la(s, optimized, anytime);
    std::vector<int>* log = nullptr;
    if (s.options.record_expansions) log = &s.cycle_expanded.emplace_back();
    if (fresh) {
      reset_search(s);
      if (anytime) s.eps.reset();
      la.seed_goals();
      return la.compute(0, log);
    }
    if (!anytime) s.km = s.km + h_diagonal_cost(last_start, s.agent_start);
    la.apply_changes(prior->world_snapshot, changed);
    if (anytime) {
      if (!changed.empty() && s.options.reset_eps_on_change) {
        s.eps.reset();
      } else {
        s.eps.decrease();
      }
      la.open_new_cycle();
    }
    return la.compute(s.options.abort_budget, log);
  };

  s.metrics.changed_cells = static_cast<int>(changed.size());
  if (!run(!repair)) {
    s.metrics.aborted = true;
    run(true);
  }

  const Record& rs = s.records[world.index(world.start())];
  s.success = min_cost(rs.g, rs.rhs).is_finite();
  s.metrics.eps = s.eps.current();
  finish(s, t0);
  if (s.success) s.plan_start = s.path.back();
  return s;
}

// ---------------------------------------------------------------------------
// ARA* (backward)

PlanSession arastar_plan(const GridWorld& world, const PlanSession* prior, const InflationSchedule& schedule,
                         const PlannerOptions& options) {
  const auto t0 = Clock::now();
  check_prior(prior, PlannerKind::kARAStar);
  const bool fresh =
      prior == nullptr || !reusable(*prior, world) || !changed_indices(prior->world_snapshot, world).empty();
  PlanSession s = fresh ? PlanSession(PlannerKind::kARAStar, world) : *prior;
  if (prior != nullptr && fresh) s.metrics = prior->metrics;
  begin_call(s);
  if (prior != nullptr && fresh && reusable(*prior, world)) {
    s.metrics.changed_cells = static_cast<int>(changed_indices(prior->world_snapshot, world).size());
  }
  s.world_snapshot = world;
  s.agent_start = world.start();
  s.plan_start = world.start();
  if (fresh) {
    s.options = prior != nullptr ? prior->options : options;
    s.eps = prior != nullptr ? prior->eps : schedule;
    s.eps.reset();
  }
  auto& rec = s.records;
  const int start = world.index(world.start());
  auto key = [&](int u) {
    return SearchKey::one(inflated(rec[u].g, s.eps.current(), h_to(world, world.start(), u)));
  };

  if (fresh) {
    reset_search(s);
    for (const Cell& g : world.goals()) {
      const int i = world.index(g);
      rec[i].g = GridCost::zero();
      s.open.insert_or_update(i, key(i));
      rec[i].in_open = true;
    }
  } else {
    s.eps.decrease();
    for (int i : s.incons) {
      rec[i].in_incons = false;
      s.open.insert_or_update(i, key(i));
      rec[i].in_open = true;
    }
    s.incons.clear();
    for (auto& r : rec) r.in_closed = false;
    s.open.rekey(key);
  }

  std::vector<int>* log = s.options.record_expansions ? &s.cycle_expanded.emplace_back() : nullptr;
  long expansions = 0;
  while (true) {
    const auto top = s.open.top_key();
    if (!top || !(rec[start].g.value() > top->k1())) break;
    const int u = s.open.pop_min().id;
    rec[u].in_open = false;
    rec[u].in_closed = true;
    ++expansions;
    if (log) log->push_back(u);
    for_adjacent(world, u, [&](int p, const GridCost& len) {
      const GridCost cand = rec[u].g + edge(world, p, u, len);
      if (!(cand < rec[p].g)) return;
      rec[p].g = cand;
      rec[p].pred = u;
      if (!rec[p].in_closed) {
        s.open.insert_or_update(p, key(p));
        rec[p].in_open = true;
      } else if (!rec[p].in_incons) {
        rec[p].in_incons = true;
        s.incons.push_back(p);
      }
    });
  }
  s.metrics.cycle_expansions.push_back(expansions);
  s.success = rec[start].g.is_finite();
  s.metrics.eps = s.eps.current();
  finish(s, t0);
  if (s.success) s.plan_start = s.path.back();
  return s;
}

}  // namespace

std::string_view to_string(PlannerKind kind) {
  for (const auto& [name, k] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<PlannerKind> parse_planner_kind(std::string_view name) {
  for (const auto& [n, k] : kNames) {
    if (name == n) return k;
  }
  return std::nullopt;
}

std::vector<PlannerKind> all_planner_kinds() {
  std::vector<PlannerKind> out;
  for (const auto& entry : kNames) out.push_back(entry.second);
  return out;
}

bool is_anytime(PlannerKind kind) {
  return kind == PlannerKind::kARAStar || kind == PlannerKind::kADStar || kind == PlannerKind::kADStarOptimized;
}

bool is_incremental(PlannerKind kind) {
  return kind == PlannerKind::kDStarLite || kind == PlannerKind::kDStarLiteOptimized || is_anytime(kind);
}

PlanSession plan_dijkstra(const GridWorld& world) { return best_first(world, PlannerKind::kDijkstra); }

PlanSession plan_astar(const GridWorld& world, SearchDirection direction) {
  return best_first(world,
                    direction == SearchDirection::kForward ? PlannerKind::kAStarForward : PlannerKind::kAStarBackward);
}

PlanSession plan_dstar_lite(const GridWorld& world, const PlanSession* prior, bool optimized,
                            const PlannerOptions& options) {
  return lookahead_plan(optimized ? PlannerKind::kDStarLiteOptimized : PlannerKind::kDStarLite, world, prior,
                        InflationSchedule(), options);
}

PlanSession plan_arastar(const GridWorld& world, const PlanSession* prior, const InflationSchedule& schedule,
                         const PlannerOptions& options) {
  return arastar_plan(world, prior, schedule, options);
}

PlanSession plan_adstar(const GridWorld& world, const PlanSession* prior, const InflationSchedule& schedule,
                        bool optimized, const PlannerOptions& options) {
  return lookahead_plan(optimized ? PlannerKind::kADStarOptimized : PlannerKind::kADStar, world, prior, schedule,
                        options);
}

PlanSession plan(PlannerKind kind, const GridWorld& world, const PlanSession* prior, const PlannerOptions& options) {
  switch (kind) {
    case PlannerKind::kDijkstra:
      return plan_dijkstra(world);
    case PlannerKind::kAStarForward:
      return plan_astar(world, SearchDirection::kForward);
    case PlannerKind::kAStarBackward:
      return plan_astar(world, SearchDirection::kBackward);
    case PlannerKind::kDStarLite:
      return plan_dstar_lite(world, prior, false, options);
    case PlannerKind::kDStarLiteOptimized:
      return plan_dstar_lite(world, prior, true, options);
    case PlannerKind::kARAStar:
      return plan_arastar(world, prior, InflationSchedule(options.eps0, options.eps_step), options);
    case PlannerKind::kADStar:
      return plan_adstar(world, prior, InflationSchedule(options.eps0, options.eps_step), false, options);
    case PlannerKind::kADStarOptimized:
      return plan_adstar(world, prior, InflationSchedule(options.eps0, options.eps_step), true, options);
  }
  throw ValidationError("unknown planner kind");
}

std::vector<Cell> trace_path(const PlanSession& session) {
  if (!session.success) throw PlanningError("no path: the planning session did not succeed");
  const GridWorld& w = session.world_snapshot;
  const auto& rec = session.records;
  const int limit = w.cell_count();
  std::vector<Cell> path;

  switch (session.kind) {
    case PlannerKind::kDijkstra:
    case PlannerKind::kAStarForward: {
      int u = w.index(session.terminal);
      while (u >= 0) {
        path.push_back(w.cell_at(u));
        if (static_cast<int>(path.size()) > limit) throw PlanningError("predecessor chain does not terminate");
        u = rec[u].pred;
      }
      std::reverse(path.begin(), path.end());
      break;
    }
    case PlannerKind::kAStarBackward:
    case PlannerKind::kARAStar:
    case PlannerKind::kADStar:
    case PlannerKind::kADStarOptimized: {
      int u = w.index(session.agent_start);
      while (true) {
        path.push_back(w.cell_at(u));
        if (static_cast<int>(path.size()) > limit) throw PlanningError("predecessor chain does not terminate");
        if (w.is_goal(path.back())) break;
        u = rec[u].pred;
        if (u < 0) throw PlanningError("predecessor chain breaks before a goal");
      }
      break;
    }
    default: {
      // Greedy descent on c + g from the agent.
      int u = w.index(session.agent_start);
      path.push_back(w.cell_at(u));
      while (!w.is_goal(path.back())) {
        int best = -1;
        GridCost best_cost = GridCost::infinity();
        for_adjacent(w, u, [&](int v, const GridCost& len) {
          const GridCost c = edge(w, u, v, len) + rec[v].g;
          if (c < best_cost) {
            best_cost = c;
            best = v;
          }
        });
        if (best < 0) throw PlanningError("greedy path trace reached a dead end");
        u = best;
        path.push_back(w.cell_at(u));
        if (static_cast<int>(path.size()) > limit) throw PlanningError("greedy path trace loops");
      }
      break;
    }
  }
  return path;
}

GridCost path_cost(const GridWorld& world, const std::vector<Cell>& path) {
  GridCost total = GridCost::zero();
  for (std::size_t i = 1; i < path.size(); ++i) total = total + grid_cost8(world, path[i - 1], path[i]);
  return total;
}

}  // namespace dplan
