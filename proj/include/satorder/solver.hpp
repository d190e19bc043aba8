#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satorder/cnf.hpp"

namespace satorder {

/// A permutation of 1..n with O(1) rank lookup. Rank 1 is branched on first.
class VariableOrder {
 public:
  VariableOrder() = default;
  /// Throws std::invalid_argument unless the input is a bijection on 1..n.
  explicit VariableOrder(std::vector<Var> permutation);

  static VariableOrder identity(std::size_t num_vars);

  std::size_t size() const { return permutation_.size(); }
  bool empty() const { return permutation_.empty(); }
  std::span<const Var> permutation() const { return permutation_; }
  Var at(std::size_t position) const { return permutation_.at(position); }
  /// 1-based rank of v.
  std::size_t rank(Var v) const { return rank_.at(v - 1); }

  friend bool operator==(const VariableOrder& a, const VariableOrder& b) {
    return a.permutation_ == b.permutation_;
  }

 private:
  std::vector<Var> permutation_;
  std::vector<std::size_t> rank_;
};

}  // namespace satorder

namespace satorder::solver {

enum class Heuristic { Vsids, Vmtf };
enum class Phase { False, True, Saved };
enum class Result { Sat, Unsat, BudgetExceeded };

/// How restart-time reminding combines the suggested order with activities.
///   Additive: a(i) += factor * max(a) * decay^(rank(i) - 1)
///   Literal:  a(i)  = factor * max(a) * decay^(-rank(i))
enum class RemindMode { Additive, Literal };

std::string_view to_string(Heuristic h);
std::string_view to_string(Result r);
Heuristic parse_heuristic(std::string_view s);

struct SolverConfig {
  Heuristic heuristic = Heuristic::Vsids;
  double var_decay = 0.95;
  /// Luby restart unit, in conflicts.
  std::uint64_t restart_base = 100;
  std::optional<VariableOrder> injected_order;
  double remind_factor = 0.0;
  double remind_decay = 0.95;
  RemindMode remind_mode = RemindMode::Additive;
  std::uint64_t seed = 0;
  /// Probability of a uniformly random decision variable (0 disables).
  double random_decision_freq = 0.0;
  Phase phase = Phase::Saved;
  std::optional<std::uint64_t> conflict_limit;
  std::optional<std::uint64_t> propagation_limit;
  /// When set, learned clauses beyond this count are halved at restarts.
  std::optional<std::size_t> max_learnt_clauses;

  void validate() const;
};

struct SolveStats {
  Result result = Result::BudgetExceeded;
  /// model[v - 1] is the value of v; present iff result == Sat.
  std::optional<std::vector<bool>> model;
  /// Assignments not made by a decision: input units, BCP implications and
  /// asserting literals of learned clauses.
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned_clauses = 0;
  /// per_var_conflicts[v - 1]: conflicts whose analysis touched v.
  std::vector<std::uint64_t> per_var_conflicts;
  std::optional<Var> first_decision;
  std::chrono::duration<double> wall_time{0};

  double conflicts_per_restart() const {
    return restarts == 0 ? static_cast<double>(conflicts)
                         : static_cast<double>(conflicts) / static_cast<double>(restarts);
  }
};

/// Luby sequence value (1, 1, 2, 1, 1, 2, 4, ...) for 0-based index i.
std::uint64_t luby(std::uint64_t i);

/// CDCL solver over a single formula. Two-watched-literal propagation,
/// first-UIP learning with non-chronological backjumping, Luby restarts,
/// VSIDS or VMTF decisions and phase saving.
///
/// Not thread-safe; use one instance per thread.
class Solver {
 public:
  Solver(const cnf::Formula& formula, SolverConfig config);
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;

  /// Seeds the decision heuristic with `order`; without one the solver
  /// starts from the identity order. VSIDS: activity(v) =
  /// var_decay^(rank(v) - 1). VMTF: the queue becomes `order`, rank 1 at
  /// the head. Must be called before solve().
  void inject_order(const VariableOrder& order);

  /// Folds `order` into the activities (see RemindMode). Called by the
  /// search at every restart when remind_factor > 0; public for testing.
  void remind(const VariableOrder& order, double factor, double decay, RemindMode mode);

  SolveStats solve();

  double activity(Var v) const;
  /// Overwrites one VSIDS activity (before solve()).
  void set_activity(Var v, double value);
  /// Current VMTF queue from head to tail.
  std::vector<Var> queue_order() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveStats solve(const cnf::Formula& formula, const SolverConfig& config);

/// True iff every clause has a satisfied literal. model[v - 1] is v's value.
/// Throws std::invalid_argument if the model does not cover every variable.
bool verify_model(const cnf::Formula& formula, const std::vector<bool>& model);

}  // namespace satorder::solver
