#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>

#include "doctest.h"
#include "satorder/labeling.hpp"
#include "satorder/rng.hpp"

using namespace satorder;
using labeling::LabelRecord;
using labeling::Method;

namespace {

cnf::Formula random_formula(std::size_t n, double ratio, std::uint64_t seed, std::string id = "inst") {
  cnf::GeneratorConfig g;
  g.num_vars = n;
  g.clause_ratio = ratio;
  g.seed = seed;
  auto f = cnf::generate_3cnf(g);
  f.source_name = std::move(id);
  return f;
}

struct CountingSolve {
  std::shared_ptr<std::atomic<std::uint64_t>> calls = std::make_shared<std::atomic<std::uint64_t>>(0);
  labeling::SolveFn fn() const {
    auto c = calls;
    return [c](const cnf::Formula& f, const solver::SolverConfig& cfg) {
      ++*c;
      return solver::solve(f, cfg);
    };
  }
};

void check_order_consistent(const LabelRecord& r) {
  REQUIRE(r.scores.size() == r.order.size());
  CHECK(labeling::order_from_scores(r.scores, labeling::direction_of(r.method)) == r.order);
}

}  // namespace

TEST_CASE("order_from_scores breaks ties by index") {
  const std::vector<double> s{3.0, 1.0, 3.0, 0.0};
  CHECK(labeling::order_from_scores(s, labeling::SortDirection::Descending) == VariableOrder({1, 3, 2, 4}));
  CHECK(labeling::order_from_scores(s, labeling::SortDirection::Ascending) == VariableOrder({4, 2, 1, 3}));
  const std::vector<double> zeros(5, 0.0);
  CHECK(labeling::order_from_scores(zeros, labeling::SortDirection::Descending) == VariableOrder::identity(5));
}

TEST_CASE("conflict label: conflict-free solve gives identity") {
  const auto f = cnf::parse_dimacs("p cnf 4 2\n1 2 0\n3 -4 0\n", "easy");
  const auto r = labeling::conflict_label(f, {});
  CHECK(r.scores == std::vector<double>(4, 0.0));
  CHECK(r.order == VariableOrder::identity(4));
  CHECK(r.trials_used == 1);
  CHECK(r.instance_id == "easy");
}

TEST_CASE("conflict label mirrors solver counters with one solve") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto f = random_formula(40, 4.3, 70 + i);
    CountingSolve counter;
    const auto r = labeling::conflict_label(f, {}, counter.fn());
    CHECK(*counter.calls == 1);
    const auto st = solver::solve(f, {});
    std::vector<double> expected(st.per_var_conflicts.begin(), st.per_var_conflicts.end());
    auto got = r.scores;
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    CHECK(got == expected);
    check_order_consistent(r);
    // Most conflict-prone first; zero-conflict variables trail in index order.
    for (std::size_t k = 1; k < r.order.size(); ++k) {
      CHECK(r.scores[r.order.at(k - 1) - 1] >= r.scores[r.order.at(k) - 1]);
    }
  }
}

TEST_CASE("first-variable label: single variable") {
  const auto f = cnf::parse_dimacs("p cnf 1 1\n1 0\n");
  for (std::size_t k : {1, 3, 7}) {
    const auto r = labeling::first_variable_label(f, {k, 1, 1}, {});
    CHECK(r.order == VariableOrder({1}));
    CHECK(r.trials_used == k);
  }
  CHECK_THROWS_AS(labeling::first_variable_label(f, {0, 1, 1}, {}), std::invalid_argument);
}

TEST_CASE("first-variable label: scores are per-variable trial means") {
  const auto f = random_formula(12, 4.3, 5);
  std::mutex m;
  std::map<Var, std::vector<std::uint64_t>> seen;
  std::uint64_t calls = 0;
  labeling::SolveFn recorder = [&](const cnf::Formula& formula, const solver::SolverConfig& cfg) {
    auto st = solver::solve(formula, cfg);
    std::lock_guard lock(m);
    ++calls;
    seen[cfg.injected_order->at(0)].push_back(st.propagations);
    return st;
  };
  const std::size_t k = 4;
  const auto r = labeling::first_variable_label(f, {k, 99, 1}, {}, recorder);
  CHECK(calls == k * 12);
  CHECK(r.trials_used == k * 12);
  for (Var v = 1; v <= 12; ++v) {
    REQUIRE(seen[v].size() == k);
    double sum = 0;
    for (auto p : seen[v]) sum += static_cast<double>(p);
    CHECK(r.scores[v - 1] == doctest::Approx(sum / k));
  }
  check_order_consistent(r);
}

TEST_CASE("first-variable label: more trials reduce score spread on a chain formula") {
  // x1 is fixed at level 0 and implies x2, x3; x4..x10 carry a random 3-CNF.
  cnf::Formula f;
  f.num_vars = 10;
  f.clauses = {{{1, true}}, {{1, false}, {2, true}}, {{2, false}, {3, true}}};
  Rng rng(2024);
  for (int c = 0; c < 30; ++c) {
    cnf::Clause cl;
    while (cl.size() < 3) {
      auto v = static_cast<Var>(4 + rng.below(7));
      if (std::none_of(cl.begin(), cl.end(), [v](auto l) { return l.var == v; })) cl.push_back({v, rng.coin()});
    }
    f.clauses.push_back(cl);
  }
  auto spread = [&](std::size_t k) {
    const auto r = labeling::first_variable_label(f, {k, 3, 1}, {});
    const auto [lo, hi] = std::minmax_element(r.scores.begin(), r.scores.end());
    double mean = 0;
    for (double s : r.scores) mean += s / static_cast<double>(r.scores.size());
    return (*hi - *lo) / mean;
  };
  CHECK(spread(200) < spread(5));
}

TEST_CASE("first-variable label: workers do not change the result") {
  const auto f = random_formula(15, 4.3, 8);
  const auto a = labeling::first_variable_label(f, {3, 5, 1}, {});
  const auto b = labeling::first_variable_label(f, {3, 5, 4}, {});
  CHECK(a == b);
}

TEST_CASE("budget-censored trials score at the budget") {
  const auto f = random_formula(60, 4.3, 9);
  solver::SolverConfig cfg;
  cfg.propagation_limit = 5;
  const auto r = labeling::first_variable_label(f, {2, 1, 1}, cfg);
  CHECK(r.partial);
  CHECK(r.censored_trials == 120);
  for (double s : r.scores) CHECK(s == 5.0);
  const auto c = labeling::conflict_label(f, cfg);
  CHECK(c.partial);
}

TEST_CASE("swap length schedule") {
  const std::size_t expected[] = {8, 4, 2, 1, 1, 1};
  for (std::size_t g = 1; g <= 6; ++g) CHECK(labeling::swap_length(16, g) == expected[g - 1]);
  CHECK(labeling::swap_length(1, 1) == 1);
  CHECK(labeling::swap_length(50, 1) == 25);
  CHECK(labeling::swap_length(50, 3) == 6);
}

TEST_CASE("random swaps respect the maximum distance") {
  Rng rng(5);
  for (std::size_t l : {1, 2, 5, 40}) {
    std::vector<Var> p(30);
    std::iota(p.begin(), p.end(), Var{1});
    for (int t = 0; t < 2000; ++t) {
      auto [i, j] = labeling::random_swap(p, l, rng);
      CHECK(i != j);
      CHECK((i > j ? i - j : j - i) <= l);
    }
    CHECK_NOTHROW(VariableOrder(p));
  }
  std::vector<Var> single{1};
  labeling::random_swaps(single, 3, rng);
  CHECK(single == std::vector<Var>{1});
}

TEST_CASE("genetic label: degenerate k = 1, m = 0") {
  const auto f = random_formula(20, 4.3, 10);
  CountingSolve counter;
  const auto r = labeling::genetic_label(f, {1, 0, 3, 1}, {}, counter.fn());
  CHECK(*counter.calls == 1);
  REQUIRE(r.best_trace.size() == 1);
  solver::SolverConfig cfg;
  cfg.injected_order = r.order;
  CHECK(solver::solve(f, cfg).propagations == r.best_trace[0]);
  CHECK(r.total_propagations_spent == r.best_trace[0]);
  check_order_consistent(r);
}

TEST_CASE("genetic label: monotone incumbent and call count") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto f = random_formula(25, 4.3, 300 + i);
    CountingSolve counter;
    const labeling::GeneticConfig gen{4, 3, i, 1};
    const auto r = labeling::genetic_label(f, gen, {}, counter.fn());
    CHECK(*counter.calls == 4 * (3 + 1));
    CHECK(r.trials_used == 16);
    REQUIRE(r.best_trace.size() == 4);
    for (std::size_t g = 1; g < r.best_trace.size(); ++g) CHECK(r.best_trace[g] <= r.best_trace[g - 1]);
    solver::SolverConfig cfg;
    cfg.injected_order = r.order;
    CHECK(solver::solve(f, cfg).propagations == r.best_trace.back());
    check_order_consistent(r);
  }
}

TEST_CASE("genetic label: deterministic across workers") {
  const auto f = random_formula(30, 4.3, 1);
  const auto a = labeling::genetic_label(f, {6, 4, 17, 1}, {});
  const auto b = labeling::genetic_label(f, {6, 4, 17, 3}, {});
  CHECK(a == b);
  const auto c = labeling::genetic_label(f, {6, 4, 18, 1}, {});
  CHECK(c.seed == 18);
}

TEST_CASE("label records round-trip through JSONL") {
  const auto f = random_formula(12, 4.3, 2, "rt");
  std::vector<LabelRecord> recs{labeling::conflict_label(f, {}), labeling::first_variable_label(f, {2, 3, 1}, {}),
                                labeling::genetic_label(f, {2, 2, 4, 1}, {})};
  const auto path = std::filesystem::temp_directory_path() / "satorder_labels_rt.jsonl";
  labeling::write_labels(path, recs);
  const auto back = labeling::read_labels(path);
  CHECK(back == recs);
  std::filesystem::remove(path);

  const auto j = nlohmann::json(recs[1]);
  CHECK(j.at("method") == "first");
  CHECK(j.at("order").size() == 12);
  CHECK(j.at("scores").size() == 12);
  CHECK(labeling::parse_method("genetic") == Method::Genetic);
  CHECK_THROWS_AS(labeling::parse_method("nope"), std::invalid_argument);
}
