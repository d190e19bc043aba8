// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Oracles live in oracle.hpp and share no code with the solver.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "oracle.hpp"
#include "satorder/graphx.hpp"
#include "satorder/harness.hpp"
#include "satorder/rng.hpp"

using namespace satorder;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

cnf::Formula random_3cnf(std::size_t n, double ratio, std::uint64_t seed, std::string id = "inst") {
  cnf::GeneratorConfig g;
  g.num_vars = n;
  g.clause_ratio = ratio;
  g.seed = seed;
  auto f = cnf::generate_3cnf(g);
  f.source_name = std::move(id);
  return f;
}

harness::GenerateConfig gen(std::size_t count, std::size_t n, std::uint64_t seed) {
  harness::GenerateConfig g;
  g.count = count;
  g.min_vars = g.max_vars = n;
  g.seed = seed;
  return g;
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

void solver_vs_oracle() {
  const auto t0 = Clock::now();
  std::size_t disagreements = 0, bad_models = 0, sat = 0, total = 0;
  const double ratios[] = {3.0, 4.3, 5.5};
  for (std::size_t i = 0; i < 500; ++i) {
    const auto f = random_3cnf(12, ratios[i % 3], 10'000 + i);
    const auto expected = testing::brute_force_sat(f);
    const auto st = solver::Solver(f, {}).solve();
    ++total;
    const bool got_sat = st.result == solver::Result::Sat;
    if (st.result == solver::Result::BudgetExceeded || got_sat != expected.has_value()) ++disagreements;
    if (got_sat) {
      ++sat;
      if (!st.model || !solver::verify_model(f, *st.model)) ++bad_models;
    }
  }
  const double secs = seconds_since(t0);
  report(disagreements == 0 && bad_models == 0 && secs < 60.0, "solver matches truth-table oracle",
         fmt("%zu instances (%zu SAT), %zu disagreements, %zu bad models, %.2f s (limit 60 s)", total, sat,
             disagreements, bad_models, secs));
}

void injection_contract() {
  Rng rng(77);
  std::size_t checked = 0, violations = 0;
  std::uint64_t seed = 0;
  while (checked < 200) {
    const std::size_t n = 5 + rng.below(36);
    auto f = random_3cnf(n, 2.0 + 2.0 * rng.uniform01(), 50'000 + seed++);
    // A few unit clauses so that level-0 propagation fixes something.
    const auto units = rng.below(4);
    for (std::size_t u = 0; u < units; ++u) f.clauses.push_back({{static_cast<Var>(1 + rng.below(n)), rng.coin()}});
    const auto fixed = testing::level0_fixpoint(f);
    if (!fixed || std::all_of(fixed->begin(), fixed->end(), [](int v) { return v != 0; })) continue;

    std::vector<Var> perm(n);
    std::iota(perm.begin(), perm.end(), Var{1});
    rng.shuffle(std::span<Var>(perm));
    const VariableOrder order(perm);
    Var expected = 0;
    for (Var v : perm) {
      if ((*fixed)[v - 1] == 0) {
        expected = v;
        break;
      }
    }
    for (auto h : {solver::Heuristic::Vsids, solver::Heuristic::Vmtf}) {
      solver::SolverConfig cfg;
      cfg.heuristic = h;
      cfg.injected_order = order;
      const auto st = solver::Solver(f, cfg).solve();
      if (!st.first_decision || *st.first_decision != expected) ++violations;
    }
    ++checked;
  }
  report(violations == 0, "injected order picks the first decision",
         fmt("%zu pairs x {vsids, vmtf}, %zu violations", checked, violations));
}

void branching_impact(const fs::path& dir) {
  const auto t0 = Clock::now();
  harness::BranchingConfig cfg;
  cfg.generator = gen(10, 100, 2024);
  cfg.sampled_variables = 20;
  cfg.runs_per_variable = 100;
  cfg.seed = 1;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  const auto formulas = harness::generate_instances(*cfg.generator);
  const auto rep = harness::run_branching_impact(cfg, formulas);
  harness::write_branching_report((dir / "impact").string(), rep);
  std::size_t spread = 0;
  std::string ratios;
  for (const auto& s : rep.instances) {
    if (!s.skipped && s.max_min_ratio >= 1.5) ++spread;
    ratios += fmt("%s%.2f", ratios.empty() ? "" : " ", s.max_min_ratio);
  }
  const double secs = seconds_since(t0);
  report(spread >= 5 && secs <= 1800.0, "first-variable choice changes propagations",
         fmt("%zu/10 instances with max/min >= 1.5 [%s], %.1f s (limit 1800 s)", spread, ratios.c_str(), secs));
}

// Shared by the genetic and evaluation criteria.
std::vector<cnf::Formula> genetic_instances;
std::vector<labeling::LabelRecord> genetic_labels;

void genetic_improves() {
  const auto t0 = Clock::now();
  genetic_instances = harness::generate_instances(gen(50, 50, 4242));
  harness::LabelingConfig cfg;
  cfg.method = labeling::Method::Genetic;
  cfg.population = 8;
  cfg.generations = 6;
  cfg.seed = 9;
  genetic_labels = harness::label_instances(genetic_instances, cfg, std::max(1u, std::thread::hardware_concurrency()));
  std::size_t not_worse = 0, strictly = 0;
  for (const auto& r : genetic_labels) {
    const auto initial = r.best_trace.front(), final = r.best_trace.back();
    if (final <= initial) ++not_worse;
    if (final < initial) ++strictly;
  }
  const double secs = seconds_since(t0);
  const double frac = static_cast<double>(strictly) / static_cast<double>(genetic_labels.size());
  report(not_worse == genetic_labels.size() && frac >= 0.6 && secs <= 900.0, "genetic labeling improves",
         fmt("final <= initial in %zu/50, strictly lower in %zu/50 (%.0f%%, need 60%%), %.1f s (limit 900 s)",
             not_worse, strictly, 100.0 * frac, secs));
}

void oracle_order_evaluation() {
  std::map<std::string, harness::OrderEntry> orders;
  for (const auto& r : genetic_labels) orders.emplace(r.instance_id, harness::OrderEntry{r.instance_id, r.order, {}, {}});
  harness::EvaluateConfig cfg;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  const auto rows = harness::evaluate_orders(genetic_instances, orders, nullptr, cfg);
  const auto all = ranking::aggregate(rows, [](const ranking::EvalRow&) { return std::string("all"); });
  const auto& ci = all.front().reduction;
  report(ci.mean > 0.0 && ci.excludes_zero(), "genetic labels reduce propagations",
         fmt("n = %zu, mean reduction %.4f, 95%% CI [%.4f, %.4f]", ci.n, ci.mean, ci.low().value_or(NAN), ci.high().value_or(NAN)));
}

void call_counts() {
  const auto f = random_3cnf(30, 4.3, 123);
  const std::size_t n = f.num_vars, k = 5, m = 4;
  CountingSolve a, b, c;
  labeling::conflict_label(f, {}, a.fn());
  labeling::first_variable_label(f, {k, 1, 3}, {}, b.fn());
  labeling::genetic_label(f, {k, m, 1, 3}, {}, c.fn());
  const bool ok = *a.calls == 1 && *b.calls == k * n && *c.calls == k * (m + 1);
  report(ok, "labeling solve-call counts",
         fmt("conflict %llu (want 1), first-variable %llu (want %zu), genetic %llu (want %zu)",
             static_cast<unsigned long long>(*a.calls), static_cast<unsigned long long>(*b.calls), k * n,
             static_cast<unsigned long long>(*c.calls), k * (m + 1)));
}

void metrics() {
  const auto id = VariableOrder::identity(10);
  const VariableOrder rev({10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
  const double s_id = ranking::spearman(id, id), s_rev = ranking::spearman(id, rev);
  const double s4 = ranking::spearman(VariableOrder({1, 2, 3, 4}), VariableOrder({2, 1, 4, 3}));
  const double r1 = ranking::relevance(1), r3 = ranking::relevance(3);
  const bool ok = s_id == 1.0 && s_rev == -1.0 && std::abs(s4 - 0.6) <= 1e-12 && r1 == 1.0 && r3 == 0.5;
  report(ok, "ranking metrics",
         fmt("spearman identity %.17g, reverse %.17g, n=4 case %.17g; relevance(1) %.17g, relevance(3) %.17g", s_id,
             s_rev, s4, r1, r3));
}

void graph_export(const fs::path& dir) {
  using graphx::Edge;
  using graphx::NodeKind;
  const auto f = cnf::parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0\n", "two_clause");
  const auto g = graphx::to_graph(f);
  std::vector<NodeKind> kinds;
  for (const auto& node : g.nodes) kinds.push_back(node.kind);
  const std::vector<NodeKind> want_kinds{NodeKind::Variable, NodeKind::Variable, NodeKind::Variable,
                                         NodeKind::Clause,   NodeKind::Clause,   NodeKind::Meta};
  // x1..x3 = 0..2, c1 = 3, c2 = 4, meta = 5.
  std::vector<Edge> want{{0, 3, 1}, {1, 3, -1}, {1, 4, 1}, {2, 4, 1}, {5, 3, 0}, {5, 4, 0}};
  auto got = g.edges;
  auto key = [](const Edge& e) { return std::tuple(e.src, e.dst, e.weight); };
  auto by_key = [&](const Edge& x, const Edge& y) { return key(x) < key(y); };
  std::sort(got.begin(), got.end(), by_key);
  std::sort(want.begin(), want.end(), by_key);
  const bool shape = kinds == want_kinds && got == want;

  std::vector<graphx::GraphInstance> graphs{g};
  for (std::uint64_t i = 0; i < 20; ++i) graphs.push_back(graphx::to_graph(random_3cnf(30, 4.3, i, fmt("r%02llu", (unsigned long long)i))));
  const auto path = dir / "graphs.jsonl";
  graphx::export_graphs(path, graphs);
  const auto back = graphx::read_graphs(path);
  bool same = back.size() == graphs.size();
  for (std::size_t i = 0; same && i < graphs.size(); ++i) same = back[i].graph == graphs[i];
  const auto path2 = dir / "graphs2.jsonl";
  std::vector<graphx::GraphInstance> reloaded;
  for (const auto& r : back) reloaded.push_back(r.graph);
  graphx::export_graphs(path2, reloaded);
  same = same && slurp(path) == slurp(path2);
  report(shape && same, "graph export",
         fmt("two-clause graph: %zu nodes, %zu edges, multiset %s; round trip of %zu graphs %s", g.nodes.size(),
             g.edges.size(), shape ? "exact" : "WRONG", graphs.size(), same ? "identical" : "DIFFERS"));
}

void determinism(const fs::path& dir) {
  const unsigned many = std::max(4u, std::thread::hardware_concurrency());
  std::vector<std::string> diffs;
  auto compare = [&](const std::string& name, const std::function<void(unsigned, const fs::path&)>& run,
                     std::vector<std::string> files) {
    const auto a = dir / (name + "_w1"), b = dir / (name + "_wN"), c = dir / (name + "_w1_again");
    for (const auto& d : {a, b, c}) fs::create_directories(d);
    run(1, a);
    run(many, b);
    run(1, c);
    for (const auto& file : files) {
      const auto x = slurp(a / file);
      if (x.empty() || x != slurp(b / file) || x != slurp(c / file)) diffs.push_back(name + "/" + file);
    }
  };
  const auto formulas = harness::generate_instances(gen(8, 40, 31));

  for (auto method : {labeling::Method::Conflict, labeling::Method::FirstVariable, labeling::Method::Genetic}) {
    compare("label_" + std::string(labeling::to_string(method)), [&](unsigned w, const fs::path& d) {
      harness::LabelingConfig cfg;
      cfg.method = method;
      cfg.trials = 2;
      cfg.population = 4;
      cfg.generations = 2;
      cfg.seed = 5;
      labeling::write_labels(d / "labels.jsonl", harness::label_instances(formulas, cfg, w));
    }, {"labels.jsonl"});
  }
  compare("dataset", [&](unsigned w, const fs::path& d) {
    harness::DatasetConfig cfg;
    cfg.generator = gen(8, 30, 12);
    cfg.labeling.method = labeling::Method::FirstVariable;
    cfg.labeling.trials = 2;
    cfg.labels_path = (d / "labels.jsonl").string();
    cfg.graphs_path = (d / "graphs.jsonl").string();
    cfg.workers = w;
    harness::build_dataset(cfg);
  }, {"labels.jsonl", "graphs.jsonl"});
  compare("branching", [&](unsigned w, const fs::path& d) {
    harness::BranchingConfig cfg;
    cfg.sampled_variables = 6;
    cfg.runs_per_variable = 5;
    cfg.seed = 8;
    cfg.workers = w;
    harness::write_branching_report((d / "impact").string(), harness::run_branching_impact(cfg, formulas));
  }, {"impact.variables.csv", "impact.summary.csv"});
  compare("evaluate", [&](unsigned w, const fs::path& d) {
    harness::LabelingConfig lc;
    lc.method = labeling::Method::Genetic;
    lc.population = 3;
    lc.generations = 2;
    std::map<std::string, harness::OrderEntry> orders;
    for (const auto& r : harness::label_instances(formulas, lc, w)) {
      orders.emplace(r.instance_id, harness::OrderEntry{r.instance_id, r.order, {}, {}});
    }
    harness::EvaluateConfig cfg;
    cfg.random_baseline = true;
    cfg.seed = 4;
    cfg.workers = w;
    ranking::write_results_csv(d / "results.csv", harness::evaluate_orders(formulas, orders, &orders, cfg));
  }, {"results.csv"});

  std::string detail = fmt("label x3, dataset, branching, evaluate at 1 vs %u workers and a rerun: ", many);
  if (diffs.empty()) {
    detail += "all byte-identical";
  } else {
    detail += "differ:";
    for (const auto& d : diffs) detail += " " + d;
  }
  report(diffs.empty(), "deterministic result files", detail);
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "satorder_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto t0 = Clock::now();

  const std::vector<std::pair<const char*, std::function<void()>>> criteria{
      {"solver matches truth-table oracle", solver_vs_oracle},
      {"injected order picks the first decision", injection_contract},
      {"first-variable choice changes propagations", [&] { branching_impact(dir); }},
      {"genetic labeling improves", genetic_improves},
      {"genetic labels reduce propagations", oracle_order_evaluation},
      {"labeling solve-call counts", call_counts},
      {"ranking metrics", metrics},
      {"graph export", [&] { graph_export(dir); }},
      {"deterministic result files", [&] { determinism(dir); }},
  };
  for (const auto& [name, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      report(false, name, std::string("exception: ") + e.what());
    }
  }

  fs::remove_all(dir);
  std::printf("%d of %zu criteria failed (%.1f s)\n", failures, criteria.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
