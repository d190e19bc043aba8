#include "satorder/cnf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "satorder/rng.hpp"

namespace satorder::cnf {

Literal Literal::from_dimacs(long long value) {
  if (value == 0) throw std::invalid_argument("literal 0 is a clause terminator");
  return Literal{static_cast<Var>(value < 0 ? -value : value), value > 0};
}

std::size_t Formula::num_literals() const {
  std::size_t n = 0;
  for (const auto& c : clauses) n += c.size();
  return n;
}

void Formula::validate() const {
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    for (const Literal& lit : clauses[i]) {
      if (lit.var < 1 || lit.var > num_vars) {
        throw std::invalid_argument("clause " + std::to_string(i) + " references variable " +
                                    std::to_string(lit.var) + " outside 1.." + std::to_string(num_vars));
      }
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view tok, long long& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

}  // namespace

Formula parse_dimacs(std::string_view text, std::string source_name) {
  Formula f;
  f.source_name = std::move(source_name);
  bool have_header = false;
  std::size_t declared_clauses = 0;
  Clause current;
  std::size_t line_no = 0;
  std::size_t last_line = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == 'c') continue;
    // SATLIB files end with a "%" line followed by a stray "0".
    if (line.front() == '%') break;
    if (line.front() == 'p') {
      if (have_header) throw ParseError(line_no, "duplicate problem header");
      auto toks = split_ws(line);
      long long nv = 0, nc = 0;
      if (toks.size() != 4 || toks[0] != "p" || toks[1] != "cnf" || !parse_int(toks[2], nv) ||
          !parse_int(toks[3], nc) || nv < 0 || nc < 0) {
        throw ParseError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
      }
      f.num_vars = static_cast<std::size_t>(nv);
      declared_clauses = static_cast<std::size_t>(nc);
      f.clauses.reserve(declared_clauses);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError(line_no, "clause data before 'p cnf' header");
    for (std::string_view tok : split_ws(line)) {
      long long v = 0;
      if (!parse_int(tok, v)) throw ParseError(line_no, "non-integer token '" + std::string(tok) + "'");
      if (v == 0) {
        if (f.clauses.size() == declared_clauses) {
          throw ParseError(line_no, "more clauses than the " + std::to_string(declared_clauses) + " declared");
        }
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      auto var = static_cast<unsigned long long>(v < 0 ? -v : v);
      if (var > f.num_vars) {
        throw ParseError(line_no, "variable " + std::to_string(var) + " exceeds declared " +
                                      std::to_string(f.num_vars));
      }
      current.push_back(Literal::from_dimacs(v));
      last_line = line_no;
    }
  }
  if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
  if (!current.empty()) {
    // Tolerate a missing terminator on the final clause.
    if (f.clauses.size() == declared_clauses) {
      throw ParseError(last_line, "more clauses than the " + std::to_string(declared_clauses) + " declared");
    }
    f.clauses.push_back(std::move(current));
  }
  if (f.clauses.size() != declared_clauses) {
    throw ParseError(line_no, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                  std::to_string(f.clauses.size()));
  }
  return f;
}

Formula read_dimacs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dimacs(buf.str(), path.stem().string());
}

std::string emit_dimacs(const Formula& formula) {
  std::string out = "p cnf " + std::to_string(formula.num_vars) + " " + std::to_string(formula.clauses.size()) + "\n";
  for (const Clause& c : formula.clauses) {
    for (const Literal& lit : c) {
      out += std::to_string(lit.dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

void write_dimacs(const Formula& formula, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << emit_dimacs(formula);
}

void GeneratorConfig::validate() const {
  if (num_vars < 3) throw std::invalid_argument("3-CNF generation needs at least 3 variables");
  if (!(clause_ratio > 0.0)) throw std::invalid_argument("clause_ratio must be positive");
}

std::size_t GeneratorConfig::num_clauses() const {
  return static_cast<std::size_t>(std::llround(clause_ratio * static_cast<double>(num_vars)));
}

Formula generate_3cnf(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Formula f;
  f.num_vars = config.num_vars;
  const std::size_t m = config.num_clauses();
  f.clauses.reserve(m);
  std::set<Clause> seen;
  if (config.forbid_duplicate_clauses && config.forbid_duplicate_literals) {
    const double n = static_cast<double>(config.num_vars);
    if (static_cast<double>(m) > 8.0 * n * (n - 1) * (n - 2) / 6.0) {
      throw std::invalid_argument("more distinct 3-clauses requested than exist");
    }
  }

  while (f.clauses.size() < m) {
    Clause c;
    c.reserve(3);
    while (c.size() < 3) {
      auto var = static_cast<Var>(rng.below(config.num_vars) + 1);
      if (config.forbid_duplicate_literals &&
          std::any_of(c.begin(), c.end(), [var](const Literal& l) { return l.var == var; })) {
        continue;
      }
      c.push_back(Literal{var, rng.coin()});
    }
    if (config.forbid_duplicate_clauses) {
      Clause key = c;
      std::sort(key.begin(), key.end());
      if (!seen.insert(std::move(key)).second) continue;
    }
    f.clauses.push_back(std::move(c));
  }
  return f;
}

}  // namespace satorder::cnf
