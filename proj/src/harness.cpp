#include "satorder/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include "satorder/graphx.hpp"
#include "satorder/parallel.hpp"
#include "satorder/rng.hpp"

namespace satorder::harness {

namespace fs = std::filesystem;

std::uint64_t hash_id(std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// --- instances ---------------------------------------------------------------

void GenerateConfig::validate() const {
  if (min_vars < 3 || max_vars < min_vars) throw std::invalid_argument("need 3 <= min_vars <= max_vars");
  if (!(clause_ratio > 0.0)) throw std::invalid_argument("clause_ratio must be positive");
  if (balanced && count % 2 != 0) throw std::invalid_argument("a balanced set needs an even count");
}

namespace {

std::string instance_name(const std::string& prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu", index);
  return prefix + "_" + buf;
}

cnf::Formula draw(const GenerateConfig& config, std::uint64_t draw_index) {
  Rng size_rng(derive_seed(config.seed, {draw_index, 1}));
  cnf::GeneratorConfig g;
  g.num_vars = config.min_vars + size_rng.below(config.max_vars - config.min_vars + 1);
  g.clause_ratio = config.clause_ratio;
  g.seed = derive_seed(config.seed, {draw_index, 0});
  g.forbid_duplicate_clauses = config.forbid_duplicate_clauses;
  return cnf::generate_3cnf(g);
}

}  // namespace

std::vector<cnf::Formula> generate_instances(const GenerateConfig& config) {
  config.validate();
  std::vector<cnf::Formula> out;
  out.reserve(config.count);
  if (!config.balanced) {
    for (std::size_t i = 0; i < config.count; ++i) {
      cnf::Formula f = draw(config, i);
      f.source_name = instance_name(config.prefix, i);
      out.push_back(std::move(f));
    }
    return out;
  }
  const std::size_t half = config.count / 2;
  std::size_t sat = 0, unsat = 0;
  const auto solver_cfg = base_solver_config(solver::Heuristic::Vsids, config.budget);
  for (std::uint64_t attempt = 0; out.size() < config.count; ++attempt) {
    if (attempt > 1000 * (config.count + 1)) throw std::runtime_error("could not balance SAT/UNSAT instances");
    cnf::Formula f = draw(config, attempt);
    const auto st = solver::solve(f, solver_cfg);
    if (st.result == solver::Result::BudgetExceeded) continue;
    std::size_t& bucket = st.result == solver::Result::Sat ? sat : unsat;
    if (bucket >= half) continue;
    ++bucket;
    f.source_name = instance_name(config.prefix, out.size());
    out.push_back(std::move(f));
  }
  return out;
}

void write_instances(const fs::path& dir, std::span<const cnf::Formula> formulas) {
  fs::create_directories(dir);
  for (const cnf::Formula& f : formulas) {
    if (f.source_name.empty()) throw std::invalid_argument("cannot write an instance without an id");
    cnf::write_dimacs(f, dir / (f.source_name + ".cnf"));
  }
}

std::vector<cnf::Formula> load_instances(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cnf") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<cnf::Formula> out;
  out.reserve(files.size());
  for (const auto& p : files) out.push_back(cnf::read_dimacs(p));
  return out;
}

// --- labeling ----------------------------------------------------------------

solver::SolverConfig base_solver_config(solver::Heuristic heuristic, std::optional<std::uint64_t> budget) {
  solver::SolverConfig c;
  c.heuristic = heuristic;
  c.propagation_limit = budget;
  return c;
}

labeling::LabelRecord label_instance(const cnf::Formula& formula, const LabelingConfig& config,
                                     const labeling::SolveFn& solve) {
  const std::uint64_t seed = derive_seed(config.seed, {hash_id(formula.source_name)});
  solver::SolverConfig cfg = base_solver_config(config.heuristic, config.budget);
  switch (config.method) {
    case labeling::Method::Conflict: {
      cfg.seed = seed;
      return labeling::conflict_label(formula, cfg, solve);
    }
    case labeling::Method::FirstVariable:
      return labeling::first_variable_label(formula, {config.trials, seed, 1}, cfg, solve);
    case labeling::Method::Genetic:
      return labeling::genetic_label(formula, {config.population, config.generations, seed, 1}, cfg, solve);
  }
  throw std::logic_error("unhandled labeling method");
}

std::vector<labeling::LabelRecord> label_instances(std::span<const cnf::Formula> formulas,
                                                   const LabelingConfig& config, unsigned workers,
                                                   const labeling::SolveFn& solve) {
  std::vector<labeling::LabelRecord> out(formulas.size());
  parallel_for(formulas.size(), workers, [&](std::size_t i) { out[i] = label_instance(formulas[i], config, solve); });
  return out;
}

// --- dataset -----------------------------------------------------------------

namespace {

std::vector<cnf::Formula> resolve_instances(const std::optional<std::string>& dir,
                                            const std::optional<GenerateConfig>& generator) {
  if (dir && generator) throw std::invalid_argument("give either an instance directory or a generator, not both");
  if (dir) return load_instances(*dir);
  if (generator) return generate_instances(*generator);
  throw std::invalid_argument("no instance source configured");
}

std::set<std::string> ids_in(const fs::path& path) {
  std::set<std::string> ids;
  if (!fs::exists(path)) return ids;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ids.insert(nlohmann::json::parse(line).at("instance_id").get<std::string>());
  }
  return ids;
}

}  // namespace

DatasetReport build_dataset(const DatasetConfig& config) {
  if (config.labels_path == config.graphs_path) throw std::invalid_argument("labels and graphs paths must differ");
  std::vector<cnf::Formula> formulas = resolve_instances(config.instance_dir, config.generator);
  if (config.instances_out) {
    std::vector<cnf::Formula> missing;
    for (const auto& f : formulas) {
      if (!fs::exists(fs::path(*config.instances_out) / (f.source_name + ".cnf"))) missing.push_back(f);
    }
    if (!missing.empty()) write_instances(*config.instances_out, missing);
  }

  DatasetReport report;
  report.instances = formulas.size();
  const auto have_labels = ids_in(config.labels_path);
  const auto have_graphs = ids_in(config.graphs_path);

  std::vector<cnf::Formula> to_label;
  for (const auto& f : formulas) {
    if (!have_labels.contains(f.source_name)) to_label.push_back(f);
  }
  std::vector<labeling::LabelRecord> fresh = label_instances(to_label, config.labeling, config.workers);
  for (const auto& r : fresh) report.partial += r.partial ? 1 : 0;
  if (!fresh.empty()) labeling::write_labels(config.labels_path, fresh, /*append=*/true);
  report.labeled = fresh.size();

  std::map<std::string, labeling::LabelRecord> by_id;
  bool need_graphs = std::any_of(formulas.begin(), formulas.end(),
                                 [&](const cnf::Formula& f) { return !have_graphs.contains(f.source_name); });
  if (need_graphs) {
    for (auto& r : labeling::read_labels(config.labels_path)) by_id.emplace(r.instance_id, std::move(r));
    std::vector<graphx::GraphInstance> graphs;
    std::vector<labeling::LabelRecord> labels;
    for (const auto& f : formulas) {
      if (have_graphs.contains(f.source_name)) continue;
      graphs.push_back(graphx::to_graph(f));
      labels.push_back(by_id.at(f.source_name));
    }
    graphx::export_graphs(config.graphs_path, graphs, labels, /*append=*/true);
    report.graphed = graphs.size();
  }
  return report;
}

// --- branching impact --------------------------------------------------------

InstanceImpact summarize_impact(std::string instance_id, std::size_t num_vars, std::span<const double> means) {
  InstanceImpact s;
  s.instance_id = std::move(instance_id);
  s.num_vars = num_vars;
  s.sampled = means.size();
  if (means.empty()) {
    s.skipped = true;
    return s;
  }
  std::vector<double> sorted(means.begin(), means.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  s.median = k % 2 == 1 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  s.best = sorted.front();
  s.worst = sorted.back();
  const auto p10_rank = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(k)));
  s.top10 = sorted[p10_rank == 0 ? 0 : p10_rank - 1];
  auto speedup = [&](double x) { return x > 0.0 ? (s.median - x) / x * 100.0 : 0.0; };
  s.best_speedup_pct = speedup(s.best);
  s.top10_speedup_pct = speedup(s.top10);
  s.max_min_ratio = s.best > 0.0 ? s.worst / s.best : (s.worst > 0.0 ? INFINITY : 1.0);
  return s;
}

BranchingReport run_branching_impact(const BranchingConfig& config, std::span<const cnf::Formula> formulas) {
  if (config.runs_per_variable < 1) throw std::invalid_argument("runs_per_variable must be >= 1");
  struct Task {
    std::size_t instance;
    Var var;
    std::size_t run;
  };
  std::vector<std::vector<Var>> sampled(formulas.size());
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    const std::size_t n = formulas[i].num_vars;
    std::vector<Var> vars(n);
    for (std::size_t v = 0; v < n; ++v) vars[v] = static_cast<Var>(v + 1);
    Rng rng(derive_seed(config.seed, {hash_id(formulas[i].source_name), 0}));
    rng.shuffle(std::span<Var>(vars));
    vars.resize(std::min(n, config.sampled_variables));
    std::sort(vars.begin(), vars.end());
    sampled[i] = vars;
    for (Var v : vars) {
      for (std::size_t r = 0; r < config.runs_per_variable; ++r) tasks.push_back(Task{i, v, r});
    }
  }

  struct Outcome {
    std::uint64_t propagations = 0;
    double time_ms = 0.0;
    bool censored = false;
  };
  std::vector<Outcome> outcomes(tasks.size());
  const solver::SolverConfig base = base_solver_config(config.heuristic, config.budget);
  parallel_for(tasks.size(), config.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    const cnf::Formula& f = formulas[task.instance];
    Rng rng(derive_seed(config.seed, {hash_id(f.source_name), 1, task.var, task.run}));
    std::vector<Var> order{task.var};
    for (std::size_t v = 1; v <= f.num_vars; ++v) {
      if (v != task.var) order.push_back(static_cast<Var>(v));
    }
    rng.shuffle(std::span<Var>(order).subspan(1));
    solver::SolverConfig cfg = base;
    cfg.injected_order = VariableOrder(std::move(order));
    const auto st = solver::solve(f, cfg);
    outcomes[t] = Outcome{st.propagations, st.wall_time.count() * 1e3, st.result == solver::Result::BudgetExceeded};
  });

  BranchingReport report;
  std::size_t t = 0;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    std::vector<VariableImpact> rows;
    bool censored = false;
    for (Var v : sampled[i]) {
      std::vector<double> props;
      double time_sum = 0.0;
      for (std::size_t r = 0; r < config.runs_per_variable; ++r, ++t) {
        props.push_back(static_cast<double>(outcomes[t].propagations));
        time_sum += outcomes[t].time_ms;
        censored = censored || outcomes[t].censored;
      }
      rows.push_back(VariableImpact{formulas[i].source_name, v, props.size(), ranking::mean_ci(props),
                                    time_sum / static_cast<double>(props.size())});
    }
    if (censored || rows.empty()) {
      std::cerr << "notice: skipping " << formulas[i].source_name
                << (censored ? " (budget exceeded)" : " (no variables)") << '\n';
      InstanceImpact skipped;
      skipped.instance_id = formulas[i].source_name;
      skipped.num_vars = formulas[i].num_vars;
      skipped.skipped = true;
      report.instances.push_back(std::move(skipped));
      continue;
    }
    std::vector<double> means;
    for (const auto& r : rows) means.push_back(r.propagations.mean);
    report.instances.push_back(summarize_impact(formulas[i].source_name, formulas[i].num_vars, means));
    report.variables.insert(report.variables.end(), rows.begin(), rows.end());
  }
  return report;
}

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? ranking::format_double(*v) : std::string(); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw std::invalid_argument(path.string() + ": unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(ranking::split_csv_line(line));
  }
  return rows;
}

const std::string kVariablesHeader = "instance_id,variable,runs,mean_propagations,ci_low,ci_high";
const std::string kSummaryHeader =
    "instance_id,num_vars,sampled,skipped,median,best,top10,worst,best_speedup_pct,top10_speedup_pct,max_min_ratio";

}  // namespace

void write_branching_report(const std::string& prefix, const BranchingReport& report) {
  auto vars = open_out(prefix + ".variables.csv");
  auto timing = open_out(prefix + ".timing.csv");
  vars << kVariablesHeader << '\n';
  timing << "instance_id,variable,mean_time_ms\n";
  for (const auto& v : report.variables) {
    vars << v.instance_id << ',' << v.var << ',' << v.runs << ',' << ranking::format_double(v.propagations.mean)
         << ',' << opt_cell(v.propagations.low()) << ',' << opt_cell(v.propagations.high()) << '\n';
    timing << v.instance_id << ',' << v.var << ',' << ranking::format_double(v.mean_time_ms) << '\n';
  }
  auto summary = open_out(prefix + ".summary.csv");
  summary << kSummaryHeader << '\n';
  for (const auto& s : report.instances) {
    summary << s.instance_id << ',' << s.num_vars << ',' << s.sampled << ',' << (s.skipped ? 1 : 0);
    if (s.skipped) {
      summary << ",,,,,,,\n";
      continue;
    }
    for (double x : {s.median, s.best, s.top10, s.worst, s.best_speedup_pct, s.top10_speedup_pct, s.max_min_ratio}) {
      summary << ',' << ranking::format_double(x);
    }
    summary << '\n';
  }
}

std::vector<VariableImpact> read_variable_impacts(const fs::path& path) {
  std::vector<VariableImpact> out;
  for (const auto& c : read_csv(path, kVariablesHeader)) {
    if (c.size() != 6) throw std::invalid_argument(path.string() + ": expected 6 columns");
    VariableImpact v;
    v.instance_id = c[0];
    v.var = static_cast<Var>(std::stoul(c[1]));
    v.runs = std::stoul(c[2]);
    v.propagations.n = v.runs;
    v.propagations.mean = std::stod(c[3]);
    if (!c[4].empty()) v.propagations.half_width = std::stod(c[5]) - v.propagations.mean;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<InstanceImpact> read_instance_impacts(const fs::path& path) {
  std::vector<InstanceImpact> out;
  for (const auto& c : read_csv(path, kSummaryHeader)) {
    if (c.size() != 11) throw std::invalid_argument(path.string() + ": expected 11 columns");
    InstanceImpact s;
    s.instance_id = c[0];
    s.num_vars = std::stoul(c[1]);
    s.sampled = std::stoul(c[2]);
    s.skipped = c[3] == "1";
    if (!s.skipped) {
      double* fields[] = {&s.median, &s.best, &s.top10, &s.worst, &s.best_speedup_pct, &s.top10_speedup_pct,
                          &s.max_min_ratio};
      for (std::size_t k = 0; k < 7; ++k) *fields[k] = std::stod(c[4 + k]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// --- orders & evaluation -----------------------------------------------------

std::map<std::string, OrderEntry> read_orders(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::map<std::string, OrderEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      OrderEntry e;
      e.instance_id = j.at("instance_id").get<std::string>();
      e.order = VariableOrder(j.at("order").get<std::vector<Var>>());
      if (j.contains("scores")) e.scores = j["scores"].get<std::vector<double>>();
      if (j.contains("inference_time_ms")) e.inference_time_ms = j["inference_time_ms"].get<double>();
      if (!out.emplace(e.instance_id, e).second) throw std::invalid_argument("duplicate instance_id " + e.instance_id);
    } catch (const std::exception& ex) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

void write_orders(const fs::path& path, std::span<const OrderEntry> entries) {
  auto out = open_out(path);
  for (const auto& e : entries) {
    auto perm = e.order.permutation();
    nlohmann::json j{{"instance_id", e.instance_id}, {"order", std::vector<Var>(perm.begin(), perm.end())}};
    if (e.scores) j["scores"] = *e.scores;
    if (e.inference_time_ms) j["inference_time_ms"] = *e.inference_time_ms;
    out << j.dump() << '\n';
  }
}

std::vector<ranking::EvalRow> evaluate_orders(std::span<const cnf::Formula> formulas,
                                              const std::map<std::string, OrderEntry>& orders,
                                              const std::map<std::string, OrderEntry>* reference,
                                              const EvaluateConfig& config, std::vector<double>* solve_time_ms) {
  std::vector<ranking::EvalRow> rows(formulas.size());
  std::vector<double> times(formulas.size(), 0.0);
  const solver::SolverConfig base = base_solver_config(config.heuristic, config.budget);

  parallel_for(formulas.size(), config.workers, [&](std::size_t i) {
    const cnf::Formula& f = formulas[i];
    ranking::EvalRow& row = rows[i];
    row.instance_id = f.source_name;
    row.num_vars = f.num_vars;
    row.propagations_default = solver::solve(f, base).propagations;

    if (config.random_baseline) {
      std::vector<Var> perm(f.num_vars);
      for (std::size_t v = 0; v < f.num_vars; ++v) perm[v] = static_cast<Var>(v + 1);
      Rng rng(derive_seed(config.seed, {hash_id(f.source_name)}));
      rng.shuffle(std::span<Var>(perm));
      solver::SolverConfig cfg = base;
      cfg.injected_order = VariableOrder(std::move(perm));
      row.propagations_random = solver::solve(f, cfg).propagations;
      row.reduction_random = ranking::reduction(row.propagations_default, *row.propagations_random);
    }

    auto it = orders.find(f.source_name);
    if (it == orders.end()) return;
    const OrderEntry& entry = it->second;
    if (entry.order.size() != f.num_vars) {
      throw std::invalid_argument("order for " + f.source_name + " covers " + std::to_string(entry.order.size()) +
                                  " variables, instance has " + std::to_string(f.num_vars));
    }
    solver::SolverConfig cfg = base;
    cfg.injected_order = entry.order;
    const auto st = solver::solve(f, cfg);
    times[i] = st.wall_time.count() * 1e3;
    row.propagations_tested = st.propagations;
    row.reduction = ranking::reduction(row.propagations_default, st.propagations);
    row.inference_time_ms = entry.inference_time_ms;
    if (reference && f.num_vars >= 2) {
      auto ref = reference->find(f.source_name);
      if (ref != reference->end()) row.spearman = ranking::spearman(entry.order, ref->second.order);
    }
  });
  if (solve_time_ms) *solve_time_ms = std::move(times);
  return rows;
}

// --- persisted jobs ----------------------------------------------------------

namespace {

template <typename T>
void put_opt(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
  else j[key] = nullptr;
}

template <typename T>
std::optional<T> get_opt(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

void to_json(nlohmann::json& j, const GenerateConfig& c) {
  j = {{"count", c.count},
       {"min_vars", c.min_vars},
       {"max_vars", c.max_vars},
       {"clause_ratio", c.clause_ratio},
       {"seed", c.seed},
       {"forbid_duplicate_clauses", c.forbid_duplicate_clauses},
       {"balanced", c.balanced},
       {"prefix", c.prefix}};
  put_opt(j, "budget", c.budget);
}

void from_json(const nlohmann::json& j, GenerateConfig& c) {
  GenerateConfig d;
  c.count = j.value("count", d.count);
  c.min_vars = j.value("min_vars", d.min_vars);
  c.max_vars = j.value("max_vars", d.max_vars);
  c.clause_ratio = j.value("clause_ratio", d.clause_ratio);
  c.seed = j.value("seed", d.seed);
  c.forbid_duplicate_clauses = j.value("forbid_duplicate_clauses", d.forbid_duplicate_clauses);
  c.balanced = j.value("balanced", d.balanced);
  c.prefix = j.value("prefix", d.prefix);
  c.budget = get_opt<std::uint64_t>(j, "budget");
}

void to_json(nlohmann::json& j, const LabelingConfig& c) {
  j = {{"method", labeling::to_string(c.method)},
       {"trials", c.trials},
       {"population", c.population},
       {"generations", c.generations},
       {"seed", c.seed},
       {"heuristic", solver::to_string(c.heuristic)}};
  put_opt(j, "budget", c.budget);
}

void from_json(const nlohmann::json& j, LabelingConfig& c) {
  LabelingConfig d;
  c.method = labeling::parse_method(j.value("method", std::string(labeling::to_string(d.method))));
  c.trials = j.value("trials", d.trials);
  c.population = j.value("population", d.population);
  c.generations = j.value("generations", d.generations);
  c.seed = j.value("seed", d.seed);
  c.heuristic = solver::parse_heuristic(j.value("heuristic", std::string("vsids")));
  c.budget = get_opt<std::uint64_t>(j, "budget");
}

void to_json(nlohmann::json& j, const DatasetConfig& c) {
  j = {{"labeling", c.labeling}, {"labels_path", c.labels_path}, {"graphs_path", c.graphs_path}, {"workers", c.workers}};
  put_opt(j, "instance_dir", c.instance_dir);
  put_opt(j, "generator", c.generator);
  put_opt(j, "instances_out", c.instances_out);
}

void from_json(const nlohmann::json& j, DatasetConfig& c) {
  c.instance_dir = get_opt<std::string>(j, "instance_dir");
  c.generator = get_opt<GenerateConfig>(j, "generator");
  c.instances_out = get_opt<std::string>(j, "instances_out");
  c.labeling = j.value("labeling", LabelingConfig{});
  c.labels_path = j.value("labels_path", std::string("labels.jsonl"));
  c.graphs_path = j.value("graphs_path", std::string("graphs.jsonl"));
  c.workers = j.value("workers", 1u);
}

void to_json(nlohmann::json& j, const BranchingConfig& c) {
  j = {{"sampled_variables", c.sampled_variables},
       {"runs_per_variable", c.runs_per_variable},
       {"seed", c.seed},
       {"heuristic", solver::to_string(c.heuristic)},
       {"workers", c.workers}};
  put_opt(j, "instance_dir", c.instance_dir);
  put_opt(j, "generator", c.generator);
  put_opt(j, "budget", c.budget);
}

void from_json(const nlohmann::json& j, BranchingConfig& c) {
  BranchingConfig d;
  c.instance_dir = get_opt<std::string>(j, "instance_dir");
  c.generator = get_opt<GenerateConfig>(j, "generator");
  c.sampled_variables = j.value("sampled_variables", d.sampled_variables);
  c.runs_per_variable = j.value("runs_per_variable", d.runs_per_variable);
  c.seed = j.value("seed", d.seed);
  c.budget = get_opt<std::uint64_t>(j, "budget");
  c.heuristic = solver::parse_heuristic(j.value("heuristic", std::string("vsids")));
  c.workers = j.value("workers", 1u);
}

void to_json(nlohmann::json& j, const EvaluateConfig& c) {
  j = {{"heuristic", solver::to_string(c.heuristic)},
       {"random_baseline", c.random_baseline},
       {"seed", c.seed},
       {"workers", c.workers}};
  put_opt(j, "budget", c.budget);
}

void from_json(const nlohmann::json& j, EvaluateConfig& c) {
  EvaluateConfig d;
  c.heuristic = solver::parse_heuristic(j.value("heuristic", std::string("vsids")));
  c.budget = get_opt<std::uint64_t>(j, "budget");
  c.random_baseline = j.value("random_baseline", d.random_baseline);
  c.seed = j.value("seed", d.seed);
  c.workers = j.value("workers", 1u);
}

void write_job(const fs::path& path, std::string_view command, const nlohmann::json& config) {
  auto out = open_out(path);
  nlohmann::json j{{"command", command}, {"rng", Rng::kAlgorithm}, {"config", config}};
  out << j.dump(2) << '\n';
}

}  // namespace satorder::harness
