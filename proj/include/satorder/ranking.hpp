#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satorder/solver.hpp"

namespace satorder::ranking {

/// Ranking gain of a 1-based rank: 1 / log2(rank + 1).
double relevance(std::size_t rank);

/// Spearman correlation of two permutations over the same variables.
double spearman(const VariableOrder& a, const VariableOrder& b);

/// (default - tested) / default; nullopt when default is 0.
std::optional<double> reduction(std::uint64_t propagations_default, std::uint64_t propagations_tested);

struct EvalRow {
  std::string instance_id;
  std::size_t num_vars = 0;
  std::uint64_t propagations_default = 0;
  std::optional<std::uint64_t> propagations_tested;
  std::optional<double> reduction;
  std::optional<std::uint64_t> propagations_random;
  std::optional<double> reduction_random;
  std::optional<double> spearman;
  std::optional<double> inference_time_ms;

  friend bool operator==(const EvalRow&, const EvalRow&) = default;
};

struct MeanCI {
  std::size_t n = 0;
  double mean = 0.0;
  /// 1.96 * sd / sqrt(n); absent when n < 2.
  std::optional<double> half_width;

  std::optional<double> low() const { return half_width ? std::optional(mean - *half_width) : std::nullopt; }
  std::optional<double> high() const { return half_width ? std::optional(mean + *half_width) : std::nullopt; }
  bool excludes_zero() const { return half_width && (mean - *half_width > 0.0 || mean + *half_width < 0.0); }
};

/// Normal-approximation 95% CI of the mean (sample standard deviation).
/// Throws std::invalid_argument on an empty sample.
MeanCI mean_ci(std::span<const double> values);

struct GroupSummary {
  std::string key;
  std::size_t rows = 0;
  MeanCI reduction;
  std::optional<MeanCI> reduction_random;
  std::optional<MeanCI> spearman;
};

using GroupKey = std::function<std::string(const EvalRow&)>;

/// One summary per distinct key, sorted by key. Rows without a reduction
/// are counted but excluded from the means; a group with no usable rows is
/// an error.
std::vector<GroupSummary> aggregate(std::span<const EvalRow> rows, const GroupKey& key);

/// Shortest decimal that round-trips.
std::string format_double(double x);

void write_results_csv(const std::filesystem::path& path, std::span<const EvalRow> rows);
std::vector<EvalRow> read_results_csv(const std::filesystem::path& path);
void write_summary_csv(const std::filesystem::path& path, std::span<const GroupSummary> groups);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace satorder::ranking
