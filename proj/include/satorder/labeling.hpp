#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "satorder/cnf.hpp"
#include "satorder/rng.hpp"
#include "satorder/solver.hpp"

namespace satorder::labeling {

enum class Method { Conflict, FirstVariable, Genetic };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

enum class SortDirection { Ascending, Descending };

/// Sort direction each method uses to turn scores into an order.
SortDirection direction_of(Method m);

/// Variables sorted by score in `direction`, ties by ascending index.
/// scores[v - 1] belongs to variable v.
VariableOrder order_from_scores(std::span<const double> scores, SortDirection direction);

struct LabelRecord {
  std::string instance_id;
  Method method = Method::Conflict;
  std::uint64_t seed = 0;
  /// scores[v - 1] belongs to variable v.
  std::vector<double> scores;
  VariableOrder order;
  std::uint64_t trials_used = 0;
  std::uint64_t total_propagations_spent = 0;
  /// Some solve hit its budget; censored trials scored at the budget.
  bool partial = false;
  std::uint64_t censored_trials = 0;
  /// Genetic only: incumbent propagations after sampling, then per generation.
  std::vector<std::uint64_t> best_trace;

  friend bool operator==(const LabelRecord&, const LabelRecord&) = default;
};

void to_json(nlohmann::json& j, const LabelRecord& r);
void from_json(const nlohmann::json& j, LabelRecord& r);

/// One compact JSON object per line.
void write_labels(const std::filesystem::path& path, std::span<const LabelRecord> records, bool append = false);
std::vector<LabelRecord> read_labels(const std::filesystem::path& path);

/// Scoring hook. Labeling calls it concurrently when workers > 1.
using SolveFn = std::function<solver::SolveStats(const cnf::Formula&, const solver::SolverConfig&)>;

SolveFn default_solve();

/// Ranks variables by how many conflicts they took part in during a single
/// default-order solve, most conflict-prone first.
LabelRecord conflict_label(const cnf::Formula& formula, const solver::SolverConfig& config,
                           const SolveFn& solve = default_solve());

struct FirstVariableConfig {
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Scores each variable by the mean propagations over `trials` solves that
/// branch on it first, the rest in a fresh random order. Fewest first.
LabelRecord first_variable_label(const cnf::Formula& formula, const FirstVariableConfig& fv,
                                 const solver::SolverConfig& config, const SolveFn& solve = default_solve());

struct GeneticConfig {
  std::size_t population = 8;
  std::size_t generations = 6;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  void validate() const;
};

/// Maximum swap distance used in generation g (1-based): floor(n / 2^g), at least 1.
std::size_t swap_length(std::size_t num_vars, std::size_t generation);

/// Swaps a uniform position i with a uniform j != i, |i - j| <= max_length.
/// Returns the swapped positions; a no-op on fewer than two elements.
std::pair<std::size_t, std::size_t> random_swap(std::vector<Var>& permutation, std::size_t max_length, Rng& rng);

/// Applies permutation.size() random swaps, each between two positions at
/// most `max_length` apart, measured on the current sequence.
void random_swaps(std::vector<Var>& permutation, std::size_t max_length, Rng& rng);

/// Hill-climbing permutation search minimizing propagations.
LabelRecord genetic_label(const cnf::Formula& formula, const GeneticConfig& gen, const solver::SolverConfig& config,
                          const SolveFn& solve = default_solve());

}  // namespace satorder::labeling
