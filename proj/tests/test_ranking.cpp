#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "satorder/ranking.hpp"
#include "satorder/rng.hpp"

using namespace satorder;

namespace {

VariableOrder shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<Var> p(n);
  std::iota(p.begin(), p.end(), Var{1});
  Rng rng(seed);
  rng.shuffle(std::span<Var>(p));
  return VariableOrder(std::move(p));
}

// Pearson correlation of rank vectors; no ties, so it equals Spearman.
double pearson_of_ranks(const VariableOrder& a, const VariableOrder& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (Var v = 1; v <= n; ++v) {
    ma += static_cast<double>(a.rank(v)) / n;
    mb += static_cast<double>(b.rank(v)) / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (Var v = 1; v <= n; ++v) {
    const double da = static_cast<double>(a.rank(v)) - ma, db = static_cast<double>(b.rank(v)) - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("relevance") {
  CHECK(ranking::relevance(1) == 1.0);
  CHECK(ranking::relevance(3) == 0.5);
  CHECK(ranking::relevance(7) == doctest::Approx(1.0 / 3.0));
  for (std::size_t r = 1; r <= 10000; ++r) {
    CHECK(ranking::relevance(r) > 0.0);
    CHECK(ranking::relevance(r) > ranking::relevance(r + 1));
  }
  CHECK_THROWS_AS(ranking::relevance(0), std::invalid_argument);
}

TEST_CASE("spearman fixed cases") {
  const auto id = VariableOrder::identity(9);
  CHECK(ranking::spearman(id, id) == 1.0);
  CHECK(ranking::spearman(id, VariableOrder({9, 8, 7, 6, 5, 4, 3, 2, 1})) == -1.0);
  CHECK(std::abs(ranking::spearman(VariableOrder({1, 2, 3, 4}), VariableOrder({2, 1, 4, 3})) - 0.6) <= 1e-12);
  CHECK_THROWS_AS(ranking::spearman(id, VariableOrder::identity(8)), std::invalid_argument);
  CHECK_THROWS_AS(ranking::spearman(VariableOrder({1}), VariableOrder({1})), std::invalid_argument);
}

TEST_CASE("spearman properties") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::size_t n = 2 + s % 30;
    const auto a = shuffled(n, s);
    const auto b = shuffled(n, s + 1000);
    const double r = ranking::spearman(a, b);
    CHECK(r == ranking::spearman(b, a));
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(r == doctest::Approx(pearson_of_ranks(a, b)).epsilon(1e-9));
    if (!(a == b)) CHECK(r < 1.0);
  }
}

TEST_CASE("reduction") {
  CHECK(ranking::reduction(100, 100) == 0.0);
  CHECK(ranking::reduction(100, 75) == 0.25);
  CHECK(ranking::reduction(100, 300) == -2.0);
  CHECK(!ranking::reduction(0, 5));
}

TEST_CASE("mean and confidence interval") {
  const std::vector<double> one{0.4};
  const auto single = ranking::mean_ci(one);
  CHECK(single.mean == 0.4);
  CHECK(!single.half_width);
  const std::vector<double> flat(5, 0.3);
  CHECK(*ranking::mean_ci(flat).half_width == 0.0);
  const std::vector<double> three{0.1, 0.2, 0.3};
  const auto ci = ranking::mean_ci(three);
  CHECK(ci.mean == doctest::Approx(0.2));
  CHECK(*ci.half_width == doctest::Approx(1.96 * 0.1 / std::sqrt(3.0)));
  CHECK(ci.excludes_zero());
  CHECK_THROWS_AS(ranking::mean_ci(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("aggregate by group") {
  std::vector<ranking::EvalRow> rows;
  for (int i = 0; i < 3; ++i) {
    ranking::EvalRow r;
    r.instance_id = "a" + std::to_string(i);
    r.num_vars = 20;
    r.reduction = 0.1 * (i + 1);
    r.spearman = 0.5;
    rows.push_back(r);
  }
  ranking::EvalRow lone;
  lone.instance_id = "b";
  lone.num_vars = 50;
  lone.reduction = -0.2;
  rows.push_back(lone);
  ranking::EvalRow missing;
  missing.instance_id = "c";
  missing.num_vars = 20;
  rows.push_back(missing);

  const auto groups = ranking::aggregate(rows, [](const ranking::EvalRow& r) { return std::to_string(r.num_vars); });
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].key == "20");
  CHECK(groups[0].rows == 4);
  CHECK(groups[0].reduction.n == 3);
  CHECK(groups[0].reduction.mean == doctest::Approx(0.2));
  CHECK(groups[0].spearman->mean == 0.5);
  CHECK(groups[1].key == "50");
  CHECK(!groups[1].reduction.half_width);
  CHECK(!groups[1].spearman);

  CHECK_THROWS_AS(ranking::aggregate({}, [](auto&) { return std::string("x"); }), std::invalid_argument);
  CHECK_THROWS_AS(ranking::aggregate(std::span(&missing, 1), [](auto&) { return std::string("x"); }),
                  std::invalid_argument);
}

TEST_CASE("results CSV round-trip") {
  std::vector<ranking::EvalRow> rows(2);
  rows[0] = {"x", 20, 100, 80, 0.2, 120, -0.2, 0.35, 1.5};
  rows[1].instance_id = "y";
  rows[1].num_vars = 30;
  rows[1].propagations_default = 7;
  const auto path = std::filesystem::temp_directory_path() / "satorder_results_rt.csv";
  ranking::write_results_csv(path, rows);
  CHECK(ranking::read_results_csv(path) == rows);
  std::filesystem::remove(path);
  CHECK(ranking::format_double(0.1) == "0.1");
  CHECK(ranking::format_double(2.0) == "2");
}
