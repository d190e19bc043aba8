#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace satorder {

/// 1-based variable index (DIMACS convention).
using Var = std::uint32_t;

}  // namespace satorder

namespace satorder::cnf {

struct Literal {
  Var var = 1;
  bool positive = true;

  static Literal from_dimacs(long long value);
  long long dimacs() const { return positive ? static_cast<long long>(var) : -static_cast<long long>(var); }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Clause = std::vector<Literal>;

/// An immutable-by-convention CNF instance. Clause and literal order are
/// kept exactly as parsed; downstream counters and graph export rely on it.
struct Formula {
  std::size_t num_vars = 0;
  std::vector<Clause> clauses;
  std::string source_name;

  std::size_t num_clauses() const { return clauses.size(); }
  std::size_t num_literals() const;

  /// Throws std::invalid_argument if a literal is out of range.
  void validate() const;

  /// Structural equality: variables and clauses. source_name is metadata.
  friend bool operator==(const Formula& a, const Formula& b) {
    return a.num_vars == b.num_vars && a.clauses == b.clauses;
  }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

Formula parse_dimacs(std::string_view text, std::string source_name = {});
Formula read_dimacs(const std::filesystem::path& path);

std::string emit_dimacs(const Formula& formula);
void write_dimacs(const Formula& formula, const std::filesystem::path& path);

struct GeneratorConfig {
  std::size_t num_vars = 100;
  double clause_ratio = 4.3;
  std::uint64_t seed = 0;
  bool forbid_duplicate_literals = true;
  bool forbid_duplicate_clauses = false;

  void validate() const;
  std::size_t num_clauses() const;
};

/// Uniform random 3-CNF: each clause draws three variables (distinct unless
/// forbid_duplicate_literals is off) and a fair polarity for each.
Formula generate_3cnf(const GeneratorConfig& config);

}  // namespace satorder::cnf
