#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "satorder/cnf.hpp"
#include "satorder/labeling.hpp"
#include "satorder/ranking.hpp"
#include "satorder/solver.hpp"

namespace satorder::harness {

/// FNV-1a; keys per-instance seeds to ids rather than list positions.
std::uint64_t hash_id(std::string_view id);

// --- instances ---------------------------------------------------------------

struct GenerateConfig {
  std::size_t count = 10;
  std::size_t min_vars = 20;
  std::size_t max_vars = 20;
  double clause_ratio = 4.3;
  std::uint64_t seed = 0;
  bool forbid_duplicate_clauses = false;
  /// Keep drawing until SAT and UNSAT each fill half of `count`.
  bool balanced = false;
  /// Propagation budget for the SAT/UNSAT check when balancing.
  std::optional<std::uint64_t> budget;
  std::string prefix = "rand3";

  void validate() const;
};

/// Ids are "<prefix>_<index>", zero-padded to 5 digits.
std::vector<cnf::Formula> generate_instances(const GenerateConfig& config);

void write_instances(const std::filesystem::path& dir, std::span<const cnf::Formula> formulas);
/// All *.cnf files in `dir`, sorted by file name; ids are file stems.
std::vector<cnf::Formula> load_instances(const std::filesystem::path& dir);

// --- labeling campaigns ------------------------------------------------------

struct LabelingConfig {
  labeling::Method method = labeling::Method::Conflict;
  std::size_t trials = 10;
  std::size_t population = 8;
  std::size_t generations = 6;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> budget;
  solver::Heuristic heuristic = solver::Heuristic::Vsids;
};

solver::SolverConfig base_solver_config(solver::Heuristic heuristic, std::optional<std::uint64_t> budget);

labeling::LabelRecord label_instance(const cnf::Formula& formula, const LabelingConfig& config,
                                     const labeling::SolveFn& solve = labeling::default_solve());

/// Instances run in parallel; output is in input order.
std::vector<labeling::LabelRecord> label_instances(std::span<const cnf::Formula> formulas,
                                                   const LabelingConfig& config, unsigned workers,
                                                   const labeling::SolveFn& solve = labeling::default_solve());

// --- dataset -----------------------------------------------------------------

struct DatasetConfig {
  std::optional<std::string> instance_dir;
  std::optional<GenerateConfig> generator;
  /// Where generated instances are written (optional).
  std::optional<std::string> instances_out;
  LabelingConfig labeling;
  std::string labels_path = "labels.jsonl";
  std::string graphs_path = "graphs.jsonl";
  unsigned workers = 1;
};

struct DatasetReport {
  std::size_t instances = 0;
  std::size_t labeled = 0;
  std::size_t graphed = 0;
  std::size_t partial = 0;
};

/// Labels and converts every instance whose id is not yet present in the
/// output files. A complete dataset is left untouched.
DatasetReport build_dataset(const DatasetConfig& config);

// --- branching impact --------------------------------------------------------

struct BranchingConfig {
  std::optional<std::string> instance_dir;
  std::optional<GenerateConfig> generator;
  std::size_t sampled_variables = 50;
  std::size_t runs_per_variable = 1000;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> budget;
  solver::Heuristic heuristic = solver::Heuristic::Vsids;
  unsigned workers = 1;
};

struct VariableImpact {
  std::string instance_id;
  Var var = 0;
  std::size_t runs = 0;
  ranking::MeanCI propagations;
  /// Auxiliary; excluded from the deterministic report.
  double mean_time_ms = 0.0;
};

struct InstanceImpact {
  std::string instance_id;
  std::size_t num_vars = 0;
  std::size_t sampled = 0;
  bool skipped = false;
  double median = 0.0;
  double best = 0.0;
  double top10 = 0.0;
  double worst = 0.0;
  double best_speedup_pct = 0.0;
  double top10_speedup_pct = 0.0;
  double max_min_ratio = 0.0;
};

struct BranchingReport {
  std::vector<VariableImpact> variables;
  std::vector<InstanceImpact> instances;
};

/// Median, best, 10th-percentile (nearest rank) and worst of the
/// per-variable mean propagations, plus speedups relative to the median.
InstanceImpact summarize_impact(std::string instance_id, std::size_t num_vars, std::span<const double> means);

BranchingReport run_branching_impact(const BranchingConfig& config, std::span<const cnf::Formula> formulas);

/// Writes <prefix>.variables.csv, <prefix>.summary.csv and <prefix>.timing.csv.
void write_branching_report(const std::string& prefix, const BranchingReport& report);
std::vector<VariableImpact> read_variable_impacts(const std::filesystem::path& path);
std::vector<InstanceImpact> read_instance_impacts(const std::filesystem::path& path);

// --- orders & evaluation -----------------------------------------------------

struct OrderEntry {
  std::string instance_id;
  VariableOrder order;
  std::optional<std::vector<double>> scores;
  std::optional<double> inference_time_ms;
};

/// Orders file: JSONL {instance_id, order, scores?, inference_time_ms?}.
/// Label files are accepted too; extra fields are ignored.
std::map<std::string, OrderEntry> read_orders(const std::filesystem::path& path);
void write_orders(const std::filesystem::path& path, std::span<const OrderEntry> entries);

struct EvaluateConfig {
  solver::Heuristic heuristic = solver::Heuristic::Vsids;
  std::optional<std::uint64_t> budget;
  bool random_baseline = false;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Solves every instance under the default order, its provided order and
/// optionally a seeded random order. `reference` supplies label orders for
/// the Spearman column. `solve_time_ms`, when given, receives the tested
/// solve's wall time per row.
std::vector<ranking::EvalRow> evaluate_orders(std::span<const cnf::Formula> formulas,
                                              const std::map<std::string, OrderEntry>& orders,
                                              const std::map<std::string, OrderEntry>* reference,
                                              const EvaluateConfig& config,
                                              std::vector<double>* solve_time_ms = nullptr);

// --- persisted jobs ----------------------------------------------------------

void to_json(nlohmann::json& j, const GenerateConfig& c);
void from_json(const nlohmann::json& j, GenerateConfig& c);
void to_json(nlohmann::json& j, const LabelingConfig& c);
void from_json(const nlohmann::json& j, LabelingConfig& c);
void to_json(nlohmann::json& j, const DatasetConfig& c);
void from_json(const nlohmann::json& j, DatasetConfig& c);
void to_json(nlohmann::json& j, const BranchingConfig& c);
void from_json(const nlohmann::json& j, BranchingConfig& c);
void to_json(nlohmann::json& j, const EvaluateConfig& c);
void from_json(const nlohmann::json& j, EvaluateConfig& c);

/// Writes {"command", "rng", "config"} so the run can be replayed.
void write_job(const std::filesystem::path& path, std::string_view command, const nlohmann::json& config);

}  // namespace satorder::harness
