// satorder: command-line front end for solving, labeling, graph export and
// the branching-order experiments. Every experiment writes a <out>.job.json
// next to its output; `satorder replay <job.json>` reruns it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "satorder/cnf.hpp"
#include "satorder/graphx.hpp"
#include "satorder/harness.hpp"
#include "satorder/labeling.hpp"
#include "satorder/ranking.hpp"
#include "satorder/solver.hpp"

using namespace satorder;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

// --- jobs --------------------------------------------------------------------

int run_generate(const json& job) {
  const auto gen = job.at("generator").get<harness::GenerateConfig>();
  const fs::path out = job.at("out").get<std::string>();
  const auto formulas = harness::generate_instances(gen);
  harness::write_instances(out, formulas);
  harness::write_job(out / "generate.job.json", "generate", job);
  std::cout << "wrote " << formulas.size() << " instances to " << out.string() << '\n';
  return 0;
}

int run_label(const json& job) {
  const auto cfg = job.at("labeling").get<harness::LabelingConfig>();
  const std::string out = job.at("out");
  const auto formulas = harness::load_instances(job.at("instance_dir").get<std::string>());
  const auto labels = harness::label_instances(formulas, cfg, job.value("workers", 1u));
  labeling::write_labels(out, labels);
  harness::write_job(out + ".job.json", "label", job);
  std::size_t partial = 0;
  for (const auto& r : labels) partial += r.partial ? 1 : 0;
  std::cout << "labeled " << labels.size() << " instances (" << partial << " partial) -> " << out << '\n';
  return 0;
}

int run_graph(const json& job) {
  const std::string out = job.at("out");
  const auto formulas = harness::load_instances(job.at("instance_dir").get<std::string>());
  std::vector<graphx::GraphInstance> graphs;
  for (const auto& f : formulas) graphs.push_back(graphx::to_graph(f));
  std::vector<labeling::LabelRecord> aligned;
  if (auto labels_path = opt<std::string>(job, "labels")) {
    std::map<std::string, labeling::LabelRecord> by_id;
    for (auto& r : labeling::read_labels(*labels_path)) by_id.emplace(r.instance_id, std::move(r));
    for (const auto& g : graphs) {
      auto it = by_id.find(g.instance_id);
      if (it == by_id.end()) throw std::runtime_error("no label for instance " + g.instance_id);
      aligned.push_back(it->second);
    }
  }
  graphx::export_graphs(out, graphs, aligned);
  harness::write_job(out + ".job.json", "graph", job);
  std::cout << "wrote " << graphs.size() << " graphs -> " << out << '\n';
  return 0;
}

int run_dataset(const json& job) {
  const auto cfg = job.get<harness::DatasetConfig>();
  const auto report = harness::build_dataset(cfg);
  harness::write_job(cfg.labels_path + ".job.json", "dataset", job);
  std::cout << "instances " << report.instances << ", newly labeled " << report.labeled << ", newly graphed "
            << report.graphed << ", partial " << report.partial << '\n';
  return 0;
}

int run_branching(const json& job) {
  const auto cfg = job.at("branching").get<harness::BranchingConfig>();
  const std::string out = job.at("out");
  std::vector<cnf::Formula> formulas;
  if (cfg.instance_dir) formulas = harness::load_instances(*cfg.instance_dir);
  else if (cfg.generator) formulas = harness::generate_instances(*cfg.generator);
  else throw std::runtime_error("branching-impact needs an instance directory or generator settings");
  const auto report = harness::run_branching_impact(cfg, formulas);
  harness::write_branching_report(out, report);
  harness::write_job(out + ".job.json", "branching-impact", job);

  std::printf("%-16s %6s %12s %12s %12s %10s %10s %8s\n", "instance", "vars", "median", "best", "top10%",
              "best_sp%", "top10_sp%", "max/min");
  for (const auto& s : report.instances) {
    if (s.skipped) {
      std::printf("%-16s %6zu  skipped\n", s.instance_id.c_str(), s.num_vars);
      continue;
    }
    std::printf("%-16s %6zu %12.1f %12.1f %12.1f %10.1f %10.1f %8.2f\n", s.instance_id.c_str(), s.num_vars, s.median,
                s.best, s.top10, s.best_speedup_pct, s.top10_speedup_pct, s.max_min_ratio);
  }
  return 0;
}

int run_evaluate(const json& job) {
  const auto cfg = job.at("evaluate").get<harness::EvaluateConfig>();
  const std::string out = job.at("out");
  const auto formulas = harness::load_instances(job.at("instance_dir").get<std::string>());
  const auto orders = harness::read_orders(job.at("orders").get<std::string>());
  std::optional<std::map<std::string, harness::OrderEntry>> reference;
  if (auto ref = opt<std::string>(job, "reference")) reference = harness::read_orders(*ref);

  std::vector<double> solve_ms;
  const auto rows = harness::evaluate_orders(formulas, orders, reference ? &*reference : nullptr, cfg, &solve_ms);
  ranking::write_results_csv(out, rows);
  {
    std::ofstream timing(out + ".timing.csv", std::ios::binary);
    timing << "instance_id,solve_time_ms,inference_time_ms\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      timing << rows[i].instance_id << ',' << ranking::format_double(solve_ms[i]) << ','
             << (rows[i].inference_time_ms ? ranking::format_double(*rows[i].inference_time_ms) : "") << '\n';
    }
  }
  const auto groups = ranking::aggregate(rows, [](const ranking::EvalRow&) { return std::string("all"); });
  auto by_size = ranking::aggregate(rows, [](const ranking::EvalRow& r) { return "n=" + std::to_string(r.num_vars); });
  std::vector<ranking::GroupSummary> all = groups;
  all.insert(all.end(), by_size.begin(), by_size.end());
  ranking::write_summary_csv(out + ".summary.csv", all);
  harness::write_job(out + ".job.json", "evaluate", job);

  for (const auto& g : all) {
    std::printf("%-10s rows %4zu  mean reduction %+.4f", g.key.c_str(), g.rows, g.reduction.mean);
    if (g.reduction.half_width) std::printf(" +/- %.4f", *g.reduction.half_width);
    if (g.spearman) std::printf("  mean spearman %+.4f", g.spearman->mean);
    std::printf("\n");
  }
  return 0;
}

int run_job(const json& job) {
  const std::string command = job.at("command");
  const json& config = job.at("config");
  if (command == "generate") return run_generate(config);
  if (command == "label") return run_label(config);
  if (command == "graph") return run_graph(config);
  if (command == "dataset") return run_dataset(config);
  if (command == "branching-impact") return run_branching(config);
  if (command == "evaluate") return run_evaluate(config);
  throw std::runtime_error("cannot replay command '" + command + "'");
}

// --- solve -------------------------------------------------------------------

VariableOrder read_order_file(const fs::path& path, const cnf::Formula& formula) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto orders = harness::read_orders(path);
    auto it = orders.find(formula.source_name);
    if (it != orders.end()) return it->second.order;
    if (orders.size() == 1) return orders.begin()->second.order;
    throw std::runtime_error("no order for instance '" + formula.source_name + "' in " + path.string());
  }
  std::istringstream in(text);
  std::vector<Var> perm;
  long long v = 0;
  while (in >> v) {
    if (v == 0) break;
    if (v < 0) throw std::runtime_error("negative variable in order file");
    perm.push_back(static_cast<Var>(v));
  }
  return VariableOrder(std::move(perm));
}

struct SolveArgs {
  std::string file;
  std::string order;
  std::string heuristic = "vsids";
  double remind_factor = 0.0;
  bool remind_literal = false;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> prop_limit;
  std::optional<std::uint64_t> conflict_limit;
  bool print_model = false;
};

int run_solve(const SolveArgs& a) {
  const cnf::Formula f = cnf::read_dimacs(a.file);
  solver::SolverConfig cfg;
  cfg.heuristic = solver::parse_heuristic(a.heuristic);
  cfg.seed = a.seed;
  cfg.remind_factor = a.remind_factor;
  cfg.remind_mode = a.remind_literal ? solver::RemindMode::Literal : solver::RemindMode::Additive;
  cfg.propagation_limit = a.prop_limit;
  cfg.conflict_limit = a.conflict_limit;
  if (!a.order.empty()) cfg.injected_order = read_order_file(a.order, f);
  const auto st = solver::solve(f, cfg);

  switch (st.result) {
    case solver::Result::Sat: std::cout << "s SATISFIABLE\n"; break;
    case solver::Result::Unsat: std::cout << "s UNSATISFIABLE\n"; break;
    case solver::Result::BudgetExceeded: std::cout << "s UNKNOWN\n"; break;
  }
  std::cout << "c propagations: " << st.propagations << '\n'
            << "c conflicts:    " << st.conflicts << '\n'
            << "c decisions:    " << st.decisions << '\n'
            << "c restarts:     " << st.restarts << '\n'
            << "c wall_time:    " << st.wall_time.count() << " s\n";
  json stats{{"result", solver::to_string(st.result)},
             {"propagations", st.propagations},
             {"conflicts", st.conflicts},
             {"decisions", st.decisions},
             {"restarts", st.restarts},
             {"wall_time", st.wall_time.count()}};
  std::cout << "stats " << stats.dump() << '\n';
  if (a.print_model && st.model) {
    std::cout << 'v';
    for (std::size_t v = 0; v < st.model->size(); ++v) {
      std::cout << ' ' << ((*st.model)[v] ? "" : "-") << v + 1;
    }
    std::cout << " 0\n";
  }
  switch (st.result) {
    case solver::Result::Sat: return 10;
    case solver::Result::Unsat: return 20;
    default: return 0;
  }
}

// --- option helpers ----------------------------------------------------------

void add_generator_options(CLI::App* cmd, harness::GenerateConfig& g) {
  cmd->add_option("--count", g.count, "Number of instances to generate");
  cmd->add_option("--min-vars", g.min_vars, "Smallest variable count");
  cmd->add_option("--max-vars", g.max_vars, "Largest variable count");
  cmd->add_option("--ratio", g.clause_ratio, "Clauses per variable");
  cmd->add_option("--gen-seed", g.seed, "Generator seed");
  cmd->add_flag("--balanced", g.balanced, "Equal numbers of SAT and UNSAT instances");
  cmd->add_flag("--no-duplicate-clauses", g.forbid_duplicate_clauses, "Reject repeated clauses");
  cmd->add_option("--prefix", g.prefix, "Instance id prefix");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branching-order experiments on a CDCL SAT solver"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve a DIMACS CNF file");
  solve->add_option("file", solve_args.file, "CNF file")->required();
  solve->add_option("--order", solve_args.order, "Initial order: whitespace-separated variables or orders JSONL");
  solve->add_option("--heuristic", solve_args.heuristic, "vsids|vmtf")->check(CLI::IsMember({"vsids", "vmtf"}));
  solve->add_option("--remind-factor", solve_args.remind_factor, "Restart-time reminding factor (0 = off)");
  solve->add_flag("--remind-literal", solve_args.remind_literal, "Use the assignment form with decay^(-rank)");
  solve->add_option("--seed", solve_args.seed, "Solver seed");
  solve->add_option("--prop-limit", solve_args.prop_limit, "Propagation budget");
  solve->add_option("--conflict-limit", solve_args.conflict_limit, "Conflict budget");
  solve->add_flag("--model", solve_args.print_model, "Print the model as a 'v' line");

  harness::GenerateConfig gen_cfg;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Generate random 3-CNF instances");
  add_generator_options(generate, gen_cfg);
  generate->add_option("--budget", gen_cfg.budget, "Propagation budget for the SAT/UNSAT check");
  generate->add_option("--out", gen_out, "Output directory")->required();

  harness::LabelingConfig label_cfg;
  std::string label_dir, label_out, method = "conflict";
  unsigned label_workers = 1;
  std::optional<std::size_t> k_opt;
  auto* label = app.add_subcommand("label", "Label every instance in a directory");
  label->add_option("dir", label_dir, "Instance directory")->required();
  label->add_option("--method", method, "conflict|first|genetic")
      ->check(CLI::IsMember({"conflict", "first", "genetic"}));
  label->add_option("--k", k_opt, "Trials per variable (first) or population (genetic)");
  label->add_option("--m", label_cfg.generations, "Generations (genetic)");
  label->add_option("--budget", label_cfg.budget, "Propagation budget per solve");
  label->add_option("--seed", label_cfg.seed, "Labeling seed");
  std::string label_heuristic = "vsids";
  label->add_option("--heuristic", label_heuristic, "vsids|vmtf")->check(CLI::IsMember({"vsids", "vmtf"}));
  label->add_option("--workers", label_workers, "Worker threads");
  label->add_option("--out", label_out, "Labels JSONL")->required();

  std::string graph_dir, graph_labels, graph_out;
  auto* graph = app.add_subcommand("graph", "Export instances as tripartite graphs");
  graph->add_option("dir", graph_dir, "Instance directory")->required();
  graph->add_option("--labels", graph_labels, "Labels JSONL to embed");
  graph->add_option("--out", graph_out, "Graphs JSONL")->required();

  harness::DatasetConfig ds_cfg;
  harness::GenerateConfig ds_gen;
  std::string ds_dir, ds_method = "conflict", ds_instances_out;
  std::optional<std::size_t> ds_k;
  auto* dataset = app.add_subcommand("dataset", "Generate or load, label and convert a dataset (resumable)");
  dataset->add_option("--instances", ds_dir, "Instance directory (otherwise generate)");
  add_generator_options(dataset, ds_gen);
  dataset->add_option("--instances-out", ds_instances_out, "Write generated instances here");
  dataset->add_option("--method", ds_method, "conflict|first|genetic")
      ->check(CLI::IsMember({"conflict", "first", "genetic"}));
  dataset->add_option("--k", ds_k, "Trials per variable (first) or population (genetic)");
  dataset->add_option("--m", ds_cfg.labeling.generations, "Generations (genetic)");
  dataset->add_option("--budget", ds_cfg.labeling.budget, "Propagation budget per solve");
  dataset->add_option("--seed", ds_cfg.labeling.seed, "Labeling seed");
  dataset->add_option("--labels", ds_cfg.labels_path, "Labels JSONL");
  dataset->add_option("--graphs", ds_cfg.graphs_path, "Graphs JSONL");
  dataset->add_option("--workers", ds_cfg.workers, "Worker threads");

  harness::BranchingConfig bi_cfg;
  harness::GenerateConfig bi_gen;
  bi_gen.min_vars = bi_gen.max_vars = 100;
  std::string bi_dir, bi_out;
  auto* branching = app.add_subcommand("branching-impact", "Force sampled variables first and measure the spread");
  branching->add_option("--instances", bi_dir, "Instance directory (otherwise generate)");
  add_generator_options(branching, bi_gen);
  branching->add_option("--sampled", bi_cfg.sampled_variables, "Variables sampled per instance");
  branching->add_option("--runs", bi_cfg.runs_per_variable, "Runs per sampled variable");
  branching->add_option("--seed", bi_cfg.seed, "Experiment seed");
  branching->add_option("--budget", bi_cfg.budget, "Propagation budget per solve");
  branching->add_option("--workers", bi_cfg.workers, "Worker threads");
  branching->add_option("--out", bi_out, "Output prefix")->required();

  harness::EvaluateConfig ev_cfg;
  std::string ev_dir, ev_orders, ev_reference, ev_out;
  auto* evaluate = app.add_subcommand("evaluate", "Compare provided orders against the default order");
  evaluate->add_option("dir", ev_dir, "Instance directory")->required();
  evaluate->add_option("--orders", ev_orders, "Orders JSONL (or a labels file)")->required();
  evaluate->add_option("--reference", ev_reference, "Reference orders for the Spearman column");
  evaluate->add_flag("--random-baseline", ev_cfg.random_baseline, "Also solve under a seeded random order");
  evaluate->add_option("--seed", ev_cfg.seed, "Random-baseline seed");
  evaluate->add_option("--budget", ev_cfg.budget, "Propagation budget per solve");
  evaluate->add_option("--workers", ev_cfg.workers, "Worker threads");
  evaluate->add_option("--out", ev_out, "Results CSV")->required();

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Rerun an experiment from its job file");
  replay->add_option("job", replay_path, "*.job.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(solve_args);
    if (*generate) return run_generate({{"generator", gen_cfg}, {"out", gen_out}});
    if (*label) {
      label_cfg.method = labeling::parse_method(method);
      label_cfg.heuristic = solver::parse_heuristic(label_heuristic);
      if (k_opt) (label_cfg.method == labeling::Method::Genetic ? label_cfg.population : label_cfg.trials) = *k_opt;
      return run_label({{"instance_dir", label_dir}, {"labeling", label_cfg}, {"out", label_out},
                        {"workers", label_workers}});
    }
    if (*graph) {
      json job{{"instance_dir", graph_dir}, {"out", graph_out}};
      if (!graph_labels.empty()) job["labels"] = graph_labels;
      return run_graph(job);
    }
    if (*dataset) {
      ds_cfg.labeling.method = labeling::parse_method(ds_method);
      if (ds_k) (ds_cfg.labeling.method == labeling::Method::Genetic ? ds_cfg.labeling.population
                                                                     : ds_cfg.labeling.trials) = *ds_k;
      if (!ds_dir.empty()) ds_cfg.instance_dir = ds_dir;
      else ds_cfg.generator = ds_gen;
      if (!ds_instances_out.empty()) ds_cfg.instances_out = ds_instances_out;
      return run_dataset(json(ds_cfg));
    }
    if (*branching) {
      if (!bi_dir.empty()) bi_cfg.instance_dir = bi_dir;
      else bi_cfg.generator = bi_gen;
      return run_branching({{"branching", bi_cfg}, {"out", bi_out}});
    }
    if (*evaluate) {
      json job{{"instance_dir", ev_dir}, {"orders", ev_orders}, {"evaluate", ev_cfg}, {"out", ev_out}};
      if (!ev_reference.empty()) job["reference"] = ev_reference;
      return run_evaluate(job);
    }
    if (*replay) return run_job(json::parse(slurp(replay_path)));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
