#include "satorder/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "satorder/parallel.hpp"
#include "satorder/rng.hpp"

namespace satorder::labeling {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Conflict: return "conflict";
    case Method::FirstVariable: return "first";
    case Method::Genetic: return "genetic";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "conflict") return Method::Conflict;
  if (s == "first") return Method::FirstVariable;
  if (s == "genetic") return Method::Genetic;
  throw std::invalid_argument("unknown labeling method '" + std::string(s) + "'");
}

SortDirection direction_of(Method m) {
  return m == Method::Conflict ? SortDirection::Descending : SortDirection::Ascending;
}

VariableOrder order_from_scores(std::span<const double> scores, SortDirection direction) {
  std::vector<Var> vars(scores.size());
  std::iota(vars.begin(), vars.end(), Var{1});
  std::stable_sort(vars.begin(), vars.end(), [&](Var a, Var b) {
    double sa = scores[a - 1], sb = scores[b - 1];
    return direction == SortDirection::Ascending ? sa < sb : sa > sb;
  });
  return VariableOrder(std::move(vars));
}

void to_json(nlohmann::json& j, const LabelRecord& r) {
  j = nlohmann::json{{"instance_id", r.instance_id},
                     {"method", to_string(r.method)},
                     {"seed", r.seed},
                     {"scores", r.scores},
                     {"order", std::vector<Var>(r.order.permutation().begin(), r.order.permutation().end())},
                     {"trials_used", r.trials_used},
                     {"total_propagations_spent", r.total_propagations_spent},
                     {"partial", r.partial},
                     {"censored_trials", r.censored_trials}};
  if (!r.best_trace.empty()) j["best_trace"] = r.best_trace;
}

void from_json(const nlohmann::json& j, LabelRecord& r) {
  r.instance_id = j.at("instance_id").get<std::string>();
  r.method = parse_method(j.at("method").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.scores = j.at("scores").get<std::vector<double>>();
  r.order = VariableOrder(j.at("order").get<std::vector<Var>>());
  r.trials_used = j.at("trials_used").get<std::uint64_t>();
  r.total_propagations_spent = j.at("total_propagations_spent").get<std::uint64_t>();
  r.partial = j.value("partial", false);
  r.censored_trials = j.value("censored_trials", std::uint64_t{0});
  r.best_trace = j.value("best_trace", std::vector<std::uint64_t>{});
  if (r.scores.size() != r.order.size()) {
    throw std::invalid_argument("label " + r.instance_id + ": scores and order lengths differ");
  }
}

void write_labels(const std::filesystem::path& path, std::span<const LabelRecord> records, bool append) {
  std::ofstream out(path, append ? std::ios::app | std::ios::binary : std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const LabelRecord& r : records) out << nlohmann::json(r).dump() << '\n';
}

std::vector<LabelRecord> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<LabelRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<LabelRecord>());
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

SolveFn default_solve() {
  return [](const cnf::Formula& f, const solver::SolverConfig& c) { return solver::solve(f, c); };
}

namespace {

struct Trial {
  std::uint64_t score = 0;
  bool censored = false;
};

Trial run_trial(const cnf::Formula& formula, const solver::SolverConfig& base, VariableOrder order,
                const SolveFn& solve) {
  solver::SolverConfig cfg = base;
  cfg.injected_order = std::move(order);
  solver::SolveStats st = solve(formula, cfg);
  if (st.result == solver::Result::BudgetExceeded) {
    return Trial{base.propagation_limit.value_or(st.propagations), true};
  }
  return Trial{st.propagations, false};
}

std::vector<Var> random_permutation(std::size_t n, Rng& rng) {
  std::vector<Var> p(n);
  std::iota(p.begin(), p.end(), Var{1});
  rng.shuffle(std::span<Var>(p));
  return p;
}

}  // namespace

LabelRecord conflict_label(const cnf::Formula& formula, const solver::SolverConfig& config, const SolveFn& solve) {
  solver::SolverConfig cfg = config;
  cfg.injected_order.reset();
  cfg.remind_factor = 0.0;
  solver::SolveStats st = solve(formula, cfg);

  LabelRecord r;
  r.instance_id = formula.source_name;
  r.method = Method::Conflict;
  r.seed = config.seed;
  r.scores.assign(st.per_var_conflicts.begin(), st.per_var_conflicts.end());
  r.scores.resize(formula.num_vars, 0.0);
  r.order = order_from_scores(r.scores, direction_of(r.method));
  r.trials_used = 1;
  r.total_propagations_spent = st.propagations;
  r.partial = st.result == solver::Result::BudgetExceeded;
  r.censored_trials = r.partial ? 1 : 0;
  return r;
}

LabelRecord first_variable_label(const cnf::Formula& formula, const FirstVariableConfig& fv,
                                 const solver::SolverConfig& config, const SolveFn& solve) {
  if (fv.trials < 1) throw std::invalid_argument("first-variable labeling needs at least one trial per variable");
  const std::size_t n = formula.num_vars;
  const std::size_t k = fv.trials;
  std::vector<Trial> trials(n * k);

  parallel_for(n * k, fv.workers, [&](std::size_t task) {
    const std::size_t var_index = task / k;
    const std::size_t trial = task % k;
    Rng rng(derive_seed(fv.seed, {var_index, trial}));
    std::vector<Var> rest;
    rest.reserve(n - 1);
    for (std::size_t v = 1; v <= n; ++v) {
      if (v != var_index + 1) rest.push_back(static_cast<Var>(v));
    }
    rng.shuffle(std::span<Var>(rest));
    std::vector<Var> order;
    order.reserve(n);
    order.push_back(static_cast<Var>(var_index + 1));
    order.insert(order.end(), rest.begin(), rest.end());
    trials[task] = run_trial(formula, config, VariableOrder(std::move(order)), solve);
  });

  LabelRecord r;
  r.instance_id = formula.source_name;
  r.method = Method::FirstVariable;
  r.seed = fv.seed;
  r.scores.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const Trial& t = trials[i * k + j];
      sum += static_cast<double>(t.score);
      r.total_propagations_spent += t.score;
      if (t.censored) ++r.censored_trials;
    }
    r.scores[i] = sum / static_cast<double>(k);
  }
  r.order = order_from_scores(r.scores, direction_of(r.method));
  r.trials_used = n * k;
  r.partial = r.censored_trials > 0;
  return r;
}

void GeneticConfig::validate() const {
  if (population < 1) throw std::invalid_argument("genetic population must be >= 1");
}

std::size_t swap_length(std::size_t num_vars, std::size_t generation) {
  std::size_t l = num_vars / 2;
  for (std::size_t g = 1; g < generation && l > 1; ++g) l /= 2;
  return std::max<std::size_t>(l, 1);
}

std::pair<std::size_t, std::size_t> random_swap(std::vector<Var>& permutation, std::size_t max_length, Rng& rng) {
  const std::size_t n = permutation.size();
  if (n < 2) return {0, 0};
  max_length = std::max<std::size_t>(max_length, 1);
  const std::size_t i = rng.below(n);
  const std::size_t lo = i >= max_length ? i - max_length : 0;
  const std::size_t hi = std::min(n - 1, i + max_length);
  // Uniform over [lo, hi] without i.
  std::size_t j = lo + rng.below(hi - lo);
  if (j >= i) ++j;
  std::swap(permutation[i], permutation[j]);
  return {i, j};
}

void random_swaps(std::vector<Var>& permutation, std::size_t max_length, Rng& rng) {
  for (std::size_t s = 0; s < permutation.size(); ++s) random_swap(permutation, max_length, rng);
}

LabelRecord genetic_label(const cnf::Formula& formula, const GeneticConfig& gen, const solver::SolverConfig& config,
                          const SolveFn& solve) {
  gen.validate();
  const std::size_t n = formula.num_vars;
  const std::size_t k = gen.population;

  LabelRecord r;
  r.instance_id = formula.source_name;
  r.method = Method::Genetic;
  r.seed = gen.seed;

  auto evaluate = [&](std::vector<std::vector<Var>>& candidates) {
    std::vector<Trial> scores(candidates.size());
    parallel_for(candidates.size(), gen.workers, [&](std::size_t j) {
      scores[j] = run_trial(formula, config, VariableOrder(candidates[j]), solve);
    });
    std::size_t best = 0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      r.total_propagations_spent += scores[j].score;
      if (scores[j].censored) ++r.censored_trials;
      if (scores[j].score < scores[best].score) best = j;
    }
    r.trials_used += scores.size();
    return std::pair{best, scores[best].score};
  };

  std::vector<std::vector<Var>> candidates(k);
  for (std::size_t j = 0; j < k; ++j) {
    Rng rng(derive_seed(gen.seed, {0, j}));
    candidates[j] = random_permutation(n, rng);
  }
  auto [first_best, best_score] = evaluate(candidates);
  std::vector<Var> incumbent = std::move(candidates[first_best]);
  r.best_trace.push_back(best_score);

  for (std::size_t g = 1; g <= gen.generations; ++g) {
    const std::size_t l = swap_length(n, g);
    for (std::size_t j = 0; j < k; ++j) {
      Rng rng(derive_seed(gen.seed, {g, j}));
      candidates[j] = incumbent;
      random_swaps(candidates[j], l, rng);
    }
    auto [best, score] = evaluate(candidates);
    if (score < best_score) {
      best_score = score;
      incumbent = std::move(candidates[best]);
    }
    r.best_trace.push_back(best_score);
  }

  r.order = VariableOrder(std::move(incumbent));
  r.scores.assign(n, 0.0);
  for (Var v = 1; v <= n; ++v) r.scores[v - 1] = static_cast<double>(r.order.rank(v));
  r.partial = r.censored_trials > 0;
  return r;
}

}  // namespace satorder::labeling
