#include "satorder/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "satorder/rng.hpp"

namespace satorder {

VariableOrder::VariableOrder(std::vector<Var> permutation) : permutation_(std::move(permutation)) {
  const std::size_t n = permutation_.size();
  rank_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    Var v = permutation_[i];
    if (v < 1 || v > n) {
      throw std::invalid_argument("order entry " + std::to_string(v) + " outside 1.." + std::to_string(n));
    }
    if (rank_[v - 1] != 0) throw std::invalid_argument("order repeats variable " + std::to_string(v));
    rank_[v - 1] = i + 1;
  }
}

VariableOrder VariableOrder::identity(std::size_t num_vars) {
  std::vector<Var> p(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i) p[i] = static_cast<Var>(i + 1);
  return VariableOrder(std::move(p));
}

}  // namespace satorder

namespace satorder::solver {

std::string_view to_string(Heuristic h) { return h == Heuristic::Vsids ? "vsids" : "vmtf"; }

std::string_view to_string(Result r) {
  switch (r) {
    case Result::Sat: return "SAT";
    case Result::Unsat: return "UNSAT";
    case Result::BudgetExceeded: return "BUDGET_EXCEEDED";
  }
  return "?";
}

Heuristic parse_heuristic(std::string_view s) {
  if (s == "vsids") return Heuristic::Vsids;
  if (s == "vmtf") return Heuristic::Vmtf;
  throw std::invalid_argument("unknown heuristic '" + std::string(s) + "'");
}

void SolverConfig::validate() const {
  if (!(var_decay > 0.0 && var_decay < 1.0)) throw std::invalid_argument("var_decay must be in (0,1)");
  if (!(remind_decay > 0.0 && remind_decay < 1.0)) throw std::invalid_argument("remind_decay must be in (0,1)");
  if (!(remind_factor >= 0.0)) throw std::invalid_argument("remind_factor must be >= 0");
  if (!(random_decision_freq >= 0.0 && random_decision_freq <= 1.0)) {
    throw std::invalid_argument("random_decision_freq must be in [0,1]");
  }
  if (restart_base == 0) throw std::invalid_argument("restart_base must be >= 1");
  if (remind_factor > 0.0 && !injected_order) {
    throw std::invalid_argument("reminding needs an injected order to remind of");
  }
}

std::uint64_t luby(std::uint64_t i) {
  // Find the finite subsequence containing index i and its size.
  std::uint64_t size = 1;
  std::uint64_t seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  std::uint64_t x = i;
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::uint64_t{1} << seq;
}

bool verify_model(const cnf::Formula& formula, const std::vector<bool>& model) {
  if (model.size() < formula.num_vars) {
    throw std::invalid_argument("model assigns " + std::to_string(model.size()) + " of " +
                                std::to_string(formula.num_vars) + " variables");
  }
  for (const cnf::Clause& c : formula.clauses) {
    bool sat = std::any_of(c.begin(), c.end(),
                           [&](const cnf::Literal& l) { return model[l.var - 1] == l.positive; });
    if (!sat) return false;
  }
  return true;
}

namespace {

// Internal literal: 2 * (var - 1) + negated.
using Lit = std::uint32_t;
constexpr Lit kNoLit = std::numeric_limits<Lit>::max();
using ClauseRef = std::uint32_t;
constexpr ClauseRef kNoReason = std::numeric_limits<ClauseRef>::max();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

inline Lit make_lit(std::uint32_t var0, bool negated) { return 2 * var0 + (negated ? 1 : 0); }
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool is_neg(Lit l) { return (l & 1) != 0; }
inline Lit negate(Lit l) { return l ^ 1; }

constexpr double kRescaleAbove = 1e100;
constexpr double kRescaleBy = 1e-100;

struct ClauseData {
  std::vector<Lit> lits;
  bool learnt = false;
  bool deleted = false;
};

struct Watch {
  ClauseRef cref;
  Lit blocker;
};

}  // namespace

struct Solver::Impl {
  SolverConfig config;
  std::uint32_t n = 0;

  std::vector<ClauseData> clauses;
  std::vector<std::vector<Watch>> watches;  // indexed by the watched literal
  std::vector<Lit> pending_units;
  bool empty_clause = false;

  // +1 true, -1 false, 0 unassigned
  std::vector<std::int8_t> assigns;
  std::vector<int> level;
  std::vector<ClauseRef> reason;
  std::vector<Lit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;
  std::vector<bool> saved_phase;

  // VSIDS
  std::vector<double> activity;
  double var_inc = 1.0;
  std::vector<std::uint32_t> heap;
  std::vector<std::uint32_t> heap_pos;

  // VMTF: doubly linked queue, head = next candidate
  std::vector<std::uint32_t> prev, next;
  std::vector<std::uint64_t> stamp;
  std::uint32_t q_head = kNone, q_tail = kNone, q_search = kNone;
  std::uint64_t stamp_counter = 0;

  // conflict analysis
  std::vector<char> seen;
  std::vector<std::uint64_t> touched_in;
  std::vector<std::uint32_t> analyzed;

  SolveStats stats;
  Rng rng;
  bool started = false;

  Impl(const cnf::Formula& formula, SolverConfig cfg) : config(std::move(cfg)), rng(config.seed) {
    config.validate();
    formula.validate();
    n = static_cast<std::uint32_t>(formula.num_vars);
    watches.resize(2 * static_cast<std::size_t>(n));
    assigns.assign(n, 0);
    level.assign(n, 0);
    reason.assign(n, kNoReason);
    saved_phase.assign(n, config.phase == Phase::True);
    activity.assign(n, 0.0);
    heap_pos.assign(n, kNone);
    prev.assign(n, kNone);
    next.assign(n, kNone);
    stamp.assign(n, 0);
    seen.assign(n, 0);
    touched_in.assign(n, 0);
    stats.per_var_conflicts.assign(n, 0);

    for (const cnf::Clause& c : formula.clauses) add_input_clause(c);

    // The default order is the identity permutation, injected like any other.
    inject(config.injected_order ? *config.injected_order : VariableOrder::identity(n));
  }

  void add_input_clause(const cnf::Clause& c) {
    std::vector<Lit> lits;
    lits.reserve(c.size());
    for (const cnf::Literal& l : c) {
      Lit lit = make_lit(l.var - 1, !l.positive);
      if (std::find(lits.begin(), lits.end(), negate(lit)) != lits.end()) return;  // tautology
      if (std::find(lits.begin(), lits.end(), lit) == lits.end()) lits.push_back(lit);
    }
    if (lits.empty()) {
      empty_clause = true;
      return;
    }
    if (lits.size() == 1) {
      pending_units.push_back(lits[0]);
      return;
    }
    attach(static_cast<ClauseRef>(clauses.size()), lits);
    clauses.push_back(ClauseData{std::move(lits), false, false});
  }

  void attach(ClauseRef cref, const std::vector<Lit>& lits) {
    watches[lits[0]].push_back(Watch{cref, lits[1]});
    watches[lits[1]].push_back(Watch{cref, lits[0]});
  }

  // --- assignment -----------------------------------------------------------

  int value(Lit l) const {
    int a = assigns[var_of(l)];
    return is_neg(l) ? -a : a;
  }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  void enqueue(Lit l, ClauseRef from) {
    std::uint32_t v = var_of(l);
    assigns[v] = is_neg(l) ? -1 : 1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  void imply(Lit l, ClauseRef from) {
    enqueue(l, from);
    ++stats.propagations;
  }

  ClauseRef propagate() {
    ClauseRef conflict = kNoReason;
    while (qhead < trail.size()) {
      Lit false_lit = negate(trail[qhead++]);
      std::vector<Watch>& ws = watches[false_lit];
      std::size_t i = 0, j = 0;
      const std::size_t end = ws.size();
      while (i < end) {
        Watch w = ws[i++];
        if (value(w.blocker) > 0) {
          ws[j++] = w;
          continue;
        }
        std::vector<Lit>& c = clauses[w.cref].lits;
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        Lit first = c[0];
        if (first != w.blocker && value(first) > 0) {
          ws[j++] = Watch{w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (value(c[k]) >= 0) {
            std::swap(c[1], c[k]);
            watches[c[1]].push_back(Watch{w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = Watch{w.cref, first};
        if (value(first) < 0) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < end) ws[j++] = ws[i++];
        } else {
          imply(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict != kNoReason) break;
    }
    return conflict;
  }

  void backtrack(int target) {
    if (decision_level() <= target) return;
    const std::size_t lim = trail_lim[target];
    for (std::size_t i = trail.size(); i-- > lim;) {
      std::uint32_t v = var_of(trail[i]);
      if (config.phase == Phase::Saved) saved_phase[v] = assigns[v] > 0;
      assigns[v] = 0;
      reason[v] = kNoReason;
      if (heap_pos[v] == kNone) heap_insert(v);
      if (q_search == kNone || stamp[v] > stamp[q_search]) q_search = v;
    }
    trail.resize(lim);
    trail_lim.resize(target);
    qhead = trail.size();
  }

  // --- VSIDS heap -----------------------------------------------------------

  bool heap_before(std::uint32_t a, std::uint32_t b) const {
    return activity[a] > activity[b] || (activity[a] == activity[b] && a < b);
  }

  void heap_up(std::size_t i) {
    std::uint32_t v = heap[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!heap_before(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_pos[heap[i]] = static_cast<std::uint32_t>(i);
      i = parent;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<std::uint32_t>(i);
  }

  void heap_down(std::size_t i) {
    std::uint32_t v = heap[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap.size()) break;
      if (child + 1 < heap.size() && heap_before(heap[child + 1], heap[child])) ++child;
      if (!heap_before(heap[child], v)) break;
      heap[i] = heap[child];
      heap_pos[heap[i]] = static_cast<std::uint32_t>(i);
      i = child;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<std::uint32_t>(i);
  }

  void heap_insert(std::uint32_t v) {
    heap_pos[v] = static_cast<std::uint32_t>(heap.size());
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }

  std::uint32_t heap_pop() {
    std::uint32_t top = heap[0];
    heap_pos[top] = kNone;
    std::uint32_t last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return top;
  }

  void rebuild_heap() {
    heap.clear();
    std::fill(heap_pos.begin(), heap_pos.end(), kNone);
    for (std::uint32_t v = 0; v < n; ++v) {
      if (assigns[v] == 0) {
        heap_pos[v] = static_cast<std::uint32_t>(heap.size());
        heap.push_back(v);
      }
    }
    for (std::size_t i = heap.size() / 2; i-- > 0;) heap_down(i);
  }

  void rescale_if_needed() {
    double top = 0.0;
    for (double a : activity) top = std::max(top, a);
    if (top > kRescaleAbove) {
      for (double& a : activity) a *= kRescaleBy;
      var_inc *= kRescaleBy;
    }
  }

  void bump_activity(std::uint32_t v) {
    activity[v] += var_inc;
    if (activity[v] > kRescaleAbove) {
      for (double& a : activity) a *= kRescaleBy;
      var_inc *= kRescaleBy;
    }
    if (heap_pos[v] != kNone) heap_up(heap_pos[v]);
  }

  // --- VMTF queue -----------------------------------------------------------

  void lay_queue(std::span<const Var> order) {
    q_head = q_tail = kNone;
    std::uint32_t before = kNone;
    const std::uint64_t base = stamp_counter;
    for (std::size_t i = 0; i < order.size(); ++i) {
      std::uint32_t v = order[i] - 1;
      prev[v] = before;
      next[v] = kNone;
      if (before == kNone) q_head = v;
      else next[before] = v;
      before = v;
      stamp[v] = base + order.size() - i;
    }
    q_tail = before;
    stamp_counter = base + order.size();
    q_search = q_head;
  }

  void move_to_front(std::uint32_t v) {
    stamp[v] = ++stamp_counter;
    if (q_head != v) {
      // unlink
      if (prev[v] != kNone) next[prev[v]] = next[v];
      if (next[v] != kNone) prev[next[v]] = prev[v];
      if (q_tail == v) q_tail = prev[v];
      prev[v] = kNone;
      next[v] = q_head;
      if (q_head != kNone) prev[q_head] = v;
      q_head = v;
    }
    if (assigns[v] == 0) q_search = v;
  }

  // --- heuristic ------------------------------------------------------------

  void inject(const VariableOrder& order) {
    if (order.size() != n) {
      throw std::invalid_argument("injected order covers " + std::to_string(order.size()) + " variables, formula has " +
                                  std::to_string(n));
    }
    if (started) throw std::logic_error("inject_order must be called before solve()");
    if (config.heuristic == Heuristic::Vsids) {
      for (std::uint32_t v = 0; v < n; ++v) {
        activity[v] = std::pow(config.var_decay, static_cast<double>(order.rank(v + 1) - 1));
      }
      rebuild_heap();
    } else {
      lay_queue(order.permutation());
    }
  }

  void remind(const VariableOrder& order, double factor, double decay, RemindMode mode) {
    if (!(factor >= 0.0)) throw std::invalid_argument("remind_factor must be >= 0");
    if (!(decay > 0.0 && decay < 1.0)) throw std::invalid_argument("remind_decay must be in (0,1)");
    if (order.size() != n) throw std::invalid_argument("remind order size mismatch");
    if (factor == 0.0) return;
    if (config.heuristic == Heuristic::Vmtf) {
      // No activities to blend into; re-seat the queue on the suggested order.
      lay_queue(order.permutation());
      return;
    }
    const double top = n == 0 ? 0.0 : *std::max_element(activity.begin(), activity.end());
    for (std::uint32_t v = 0; v < n; ++v) {
      const auto r = static_cast<double>(order.rank(v + 1));
      if (mode == RemindMode::Additive) activity[v] += factor * top * std::pow(decay, r - 1.0);
      else activity[v] = factor * top * std::pow(decay, -r);
    }
    rescale_if_needed();
    rebuild_heap();
  }

  std::uint32_t pick_branch_var() {
    if (config.random_decision_freq > 0.0 && n > 0 && rng.uniform01() < config.random_decision_freq) {
      auto v = static_cast<std::uint32_t>(rng.below(n));
      if (assigns[v] == 0) return v;
    }
    if (config.heuristic == Heuristic::Vsids) {
      while (!heap.empty()) {
        std::uint32_t v = heap_pop();
        if (assigns[v] == 0) return v;
      }
      return kNone;
    }
    std::uint32_t v = q_search;
    while (v != kNone && assigns[v] != 0) v = next[v];
    q_search = v;
    return v;
  }

  bool decision_polarity(std::uint32_t v) const {
    switch (config.phase) {
      case Phase::False: return false;
      case Phase::True: return true;
      case Phase::Saved: return saved_phase[v];
    }
    return false;
  }

  // --- conflict analysis ----------------------------------------------------

  void touch(std::uint32_t v) {
    if (touched_in[v] != stats.conflicts) {
      touched_in[v] = stats.conflicts;
      ++stats.per_var_conflicts[v];
    }
  }

  // Requires stats.conflicts to already count this conflict.
  void record_level0_conflict(ClauseRef conflict) {
    for (Lit l : clauses[conflict].lits) touch(var_of(l));
  }

  std::vector<Lit> analyze(ClauseRef conflict, int& backjump_level) {
    std::vector<Lit> learnt{kNoLit};
    analyzed.clear();
    int path = 0;
    Lit p = kNoLit;
    std::size_t index = trail.size();
    const int current = decision_level();

    do {
      const std::vector<Lit>& c = clauses[conflict].lits;
      for (std::size_t j = (p == kNoLit ? 0 : 1); j < c.size(); ++j) {
        Lit q = c[j];
        std::uint32_t v = var_of(q);
        touch(v);
        if (!seen[v] && level[v] > 0) {
          seen[v] = 1;
          analyzed.push_back(v);
          if (level[v] >= current) ++path;
          else learnt.push_back(q);
        }
      }
      while (!seen[var_of(trail[--index])]) {
      }
      p = trail[index];
      conflict = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = negate(p);

    for (std::uint32_t v : analyzed) seen[v] = 0;

    if (learnt.size() == 1) {
      backjump_level = 0;
    } else {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < learnt.size(); ++i) {
        if (level[var_of(learnt[i])] > level[var_of(learnt[max_i])]) max_i = i;
      }
      std::swap(learnt[1], learnt[max_i]);
      backjump_level = level[var_of(learnt[1])];
    }
    return learnt;
  }

  void bump_analyzed() {
    if (config.heuristic == Heuristic::Vsids) {
      for (std::uint32_t v : analyzed) bump_activity(v);
      var_inc /= config.var_decay;
      if (var_inc > kRescaleAbove) {
        for (double& a : activity) a *= kRescaleBy;
        var_inc *= kRescaleBy;
      }
    } else {
      std::sort(analyzed.begin(), analyzed.end(), [&](auto a, auto b) { return stamp[a] < stamp[b]; });
      for (std::uint32_t v : analyzed) move_to_front(v);
    }
  }

  void learn(std::vector<Lit> learnt) {
    ++stats.learned_clauses;
    if (learnt.size() == 1) {
      imply(learnt[0], kNoReason);
      return;
    }
    auto cref = static_cast<ClauseRef>(clauses.size());
    attach(cref, learnt);
    Lit asserting = learnt[0];
    clauses.push_back(ClauseData{std::move(learnt), true, false});
    imply(asserting, cref);
  }

  void reduce_learnts() {
    if (!config.max_learnt_clauses) return;
    std::vector<ClauseRef> learnts;
    for (ClauseRef c = 0; c < clauses.size(); ++c) {
      if (clauses[c].learnt && !clauses[c].deleted) learnts.push_back(c);
    }
    if (learnts.size() <= *config.max_learnt_clauses) return;
    std::stable_sort(learnts.begin(), learnts.end(),
                     [&](ClauseRef a, ClauseRef b) { return clauses[a].lits.size() > clauses[b].lits.size(); });
    std::size_t to_remove = learnts.size() / 2;
    for (ClauseRef c : learnts) {
      if (to_remove == 0) break;
      std::uint32_t v0 = var_of(clauses[c].lits[0]);
      if (assigns[v0] != 0 && reason[v0] == c) continue;  // locked
      clauses[c].deleted = true;
      clauses[c].lits.clear();
      clauses[c].lits.shrink_to_fit();
      --to_remove;
    }
    for (auto& ws : watches) {
      std::erase_if(ws, [&](const Watch& w) { return clauses[w.cref].deleted; });
    }
  }

  // --- search ---------------------------------------------------------------

  SolveStats run() {
    if (started) throw std::logic_error("solve() may only be called once per Solver");
    started = true;
    const auto t0 = std::chrono::steady_clock::now();
    stats.result = search();
    if (stats.result == Result::Sat) {
      std::vector<bool> model(n);
      for (std::uint32_t v = 0; v < n; ++v) model[v] = assigns[v] > 0;
      stats.model = std::move(model);
    }
    stats.wall_time = std::chrono::steady_clock::now() - t0;
    return stats;
  }

  bool over_budget() const {
    return (config.propagation_limit && stats.propagations > *config.propagation_limit) ||
           (config.conflict_limit && stats.conflicts > *config.conflict_limit);
  }

  Result search() {
    if (empty_clause) return Result::Unsat;
    for (Lit u : pending_units) {
      int val = value(u);
      if (val == 0) {
        imply(u, kNoReason);
      } else if (val < 0) {
        ++stats.conflicts;
        touch(var_of(u));
        return Result::Unsat;
      }
    }

    std::uint64_t restart_index = 0;
    std::uint64_t conflicts_this_restart = 0;
    std::uint64_t restart_limit = luby(restart_index) * config.restart_base;

    for (;;) {
      ClauseRef conflict = propagate();
      if (conflict != kNoReason) {
        ++stats.conflicts;
        ++conflicts_this_restart;
        if (decision_level() == 0) {
          record_level0_conflict(conflict);
          return Result::Unsat;
        }
        int backjump = 0;
        std::vector<Lit> learnt = analyze(conflict, backjump);
        bump_analyzed();
        backtrack(backjump);
        learn(std::move(learnt));
        if (over_budget()) return Result::BudgetExceeded;
        continue;
      }
      if (over_budget()) return Result::BudgetExceeded;

      if (conflicts_this_restart >= restart_limit) {
        backtrack(0);
        ++stats.restarts;
        conflicts_this_restart = 0;
        restart_limit = luby(++restart_index) * config.restart_base;
        reduce_learnts();
        if (config.remind_factor > 0.0) {
          remind(*config.injected_order, config.remind_factor, config.remind_decay, config.remind_mode);
        }
        continue;
      }

      std::uint32_t v = pick_branch_var();
      if (v == kNone) return Result::Sat;
      ++stats.decisions;
      if (!stats.first_decision) stats.first_decision = v + 1;
      trail_lim.push_back(trail.size());
      enqueue(make_lit(v, !decision_polarity(v)), kNoReason);
    }
  }
};

Solver::Solver(const cnf::Formula& formula, SolverConfig config)
    : impl_(std::make_unique<Impl>(formula, std::move(config))) {}
Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

void Solver::inject_order(const VariableOrder& order) { impl_->inject(order); }

void Solver::remind(const VariableOrder& order, double factor, double decay, RemindMode mode) {
  impl_->remind(order, factor, decay, mode);
}

SolveStats Solver::solve() { return impl_->run(); }

double Solver::activity(Var v) const { return impl_->activity.at(v - 1); }

void Solver::set_activity(Var v, double value) {
  if (impl_->started) throw std::logic_error("set_activity must be called before solve()");
  if (!(value >= 0.0)) throw std::invalid_argument("activity must be non-negative");
  impl_->activity.at(v - 1) = value;
  impl_->rebuild_heap();
}

std::vector<Var> Solver::queue_order() const {
  std::vector<Var> out;
  for (std::uint32_t v = impl_->q_head; v != kNone; v = impl_->next[v]) out.push_back(v + 1);
  return out;
}

SolveStats solve(const cnf::Formula& formula, const SolverConfig& config) {
  Solver s(formula, config);
  SolveStats stats = s.solve();
  if (stats.model && !verify_model(formula, *stats.model)) {
    throw std::logic_error("solver produced a model that falsifies a clause");
  }
  return stats;
}

}  // namespace satorder::solver
