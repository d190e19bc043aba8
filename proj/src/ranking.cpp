#include "satorder/ranking.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

namespace satorder::ranking {

double relevance(std::size_t rank) {
  if (rank < 1) throw std::invalid_argument("rank must be >= 1");
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

double spearman(const VariableOrder& a, const VariableOrder& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: orders cover different variable sets");
  const std::size_t n = a.size();
  if (n < 2) throw std::invalid_argument("spearman: need at least two variables");
  long double sum_d2 = 0;
  for (Var v = 1; v <= n; ++v) {
    const auto d = static_cast<long double>(a.rank(v)) - static_cast<long double>(b.rank(v));
    sum_d2 += d * d;
  }
  const auto nn = static_cast<long double>(n);
  return static_cast<double>(1.0L - 6.0L * sum_d2 / (nn * (nn * nn - 1.0L)));
}

std::optional<double> reduction(std::uint64_t propagations_default, std::uint64_t propagations_tested) {
  if (propagations_default == 0) return std::nullopt;
  return (static_cast<double>(propagations_default) - static_cast<double>(propagations_tested)) /
         static_cast<double>(propagations_default);
}

MeanCI mean_ci(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_ci: empty sample");
  MeanCI ci;
  ci.n = values.size();
  ci.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(ci.n);
  if (ci.n >= 2) {
    double ss = 0.0;
    for (double x : values) ss += (x - ci.mean) * (x - ci.mean);
    const double sd = std::sqrt(ss / static_cast<double>(ci.n - 1));
    ci.half_width = 1.96 * sd / std::sqrt(static_cast<double>(ci.n));
  }
  return ci;
}

std::vector<GroupSummary> aggregate(std::span<const EvalRow> rows, const GroupKey& key) {
  if (rows.empty()) throw std::invalid_argument("aggregate: no rows");
  struct Acc {
    std::size_t rows = 0;
    std::vector<double> reduction, reduction_random, spearman;
  };
  std::map<std::string, Acc> groups;
  for (const EvalRow& r : rows) {
    Acc& acc = groups[key(r)];
    ++acc.rows;
    if (r.reduction) acc.reduction.push_back(*r.reduction);
    if (r.reduction_random) acc.reduction_random.push_back(*r.reduction_random);
    if (r.spearman) acc.spearman.push_back(*r.spearman);
  }
  std::vector<GroupSummary> out;
  for (auto& [k, acc] : groups) {
    if (acc.reduction.empty()) throw std::invalid_argument("aggregate: group '" + k + "' has no evaluable rows");
    GroupSummary s;
    s.key = k;
    s.rows = acc.rows;
    s.reduction = mean_ci(acc.reduction);
    if (!acc.reduction_random.empty()) s.reduction_random = mean_ci(acc.reduction_random);
    if (!acc.spearman.empty()) s.spearman = mean_ci(acc.spearman);
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

namespace {

template <typename T>
std::string cell(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) return format_double(*v);
  else return std::to_string(*v);
}

template <typename T>
std::optional<T> parse_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::invalid_argument("bad CSV cell '" + s + "'");
  return v;
}

constexpr const char* kResultsHeader =
    "instance_id,num_vars,propagations_default,propagations_tested,reduction,propagations_random,"
    "reduction_random,spearman,inference_time_ms";

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

void write_results_csv(const std::filesystem::path& path, std::span<const EvalRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kResultsHeader << '\n';
  for (const EvalRow& r : rows) {
    out << r.instance_id << ',' << r.num_vars << ',' << r.propagations_default << ',' << cell(r.propagations_tested)
        << ',' << cell(r.reduction) << ',' << cell(r.propagations_random) << ',' << cell(r.reduction_random) << ','
        << cell(r.spearman) << ',' << cell(r.inference_time_ms) << '\n';
  }
}

std::vector<EvalRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw std::invalid_argument(path.string() + ": unexpected results header");
  }
  std::vector<EvalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto c = split_csv_line(line);
    if (c.size() != 9) throw std::invalid_argument(path.string() + ": expected 9 columns");
    EvalRow r;
    r.instance_id = c[0];
    r.num_vars = parse_cell<std::size_t>(c[1]).value_or(0);
    r.propagations_default = parse_cell<std::uint64_t>(c[2]).value_or(0);
    r.propagations_tested = parse_cell<std::uint64_t>(c[3]);
    r.reduction = parse_cell<double>(c[4]);
    r.propagations_random = parse_cell<std::uint64_t>(c[5]);
    r.reduction_random = parse_cell<double>(c[6]);
    r.spearman = parse_cell<double>(c[7]);
    r.inference_time_ms = parse_cell<double>(c[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(const std::filesystem::path& path, std::span<const GroupSummary> groups) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "group,rows,n,mean_reduction,ci_low,ci_high,mean_reduction_random,random_ci_low,random_ci_high,"
         "mean_spearman,spearman_ci_low,spearman_ci_high\n";
  auto block = [&](const std::optional<MeanCI>& ci) {
    if (!ci) return std::string(",,");
    return format_double(ci->mean) + ',' + cell(ci->low()) + ',' + cell(ci->high());
  };
  for (const GroupSummary& g : groups) {
    out << g.key << ',' << g.rows << ',' << g.reduction.n << ',' << block(g.reduction) << ','
        << block(g.reduction_random) << ',' << block(g.spearman) << '\n';
  }
}

}  // namespace satorder::ranking
