#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "resedf/edf.hpp"
#include "resedf/simulation.hpp"

using namespace resedf;
using namespace resedf::simulation;

namespace {

StudyConfig small_config(std::size_t replications)
{
  StudyConfig c;
  c.sample_sizes = {100};
  c.replications = replications;
  c.mise_grid = edf::uniform_grid(-4.0, 4.0, 0.1);
  c.seed = 77;
  return c;
}

} // namespace

TEST_CASE("reference model functions")
{
  const auto m = TrueModel::reference();
  const std::vector<double> origin{0.0, 0.0};
  CHECK(m.regression(origin) == doctest::Approx(3.0));
  CHECK(m.scale(origin) == doctest::Approx(1.0));
  CHECK(m.observation_probability(origin) == doctest::Approx(0.5));
  const std::vector<double> corner{1.0, 1.0};
  CHECK(m.observation_probability(corner) == doctest::Approx(0.2689414213699951));
  const std::vector<double> other{-1.0, -1.0};
  CHECK(m.observation_probability(other) == doctest::Approx(0.7310585786300049));
  CHECK(m.scale(corner) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("generate_dataset")
{
  const auto model = TrueModel::reference();
  Stream stream = derive_stream(1, 100000, 0);
  const auto sample = generate_dataset(model, 100000, stream);
  REQUIRE(sample.data.size() == 100000);
  const double rate = static_cast<double>(sample.data.complete_count()) / 1e5;
  CHECK(std::abs(rate - 0.5) < 0.005);

  double lo = 1.0, hi = 0.0;
  for (const double p : sample.observation_probability) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  CHECK(lo >= 0.2689414213699951 - 1e-12);
  CHECK(hi <= 0.7310585786300049 + 1e-12);

  const auto stored = sample.data.stored_responses();
  for (std::size_t j = 0; j < sample.data.size(); ++j) {
    const auto x = sample.data.covariates(j);
    CHECK((x[0] > -1.0 && x[0] < 1.0 && x[1] > -1.0 && x[1] < 1.0));
    if (sample.data.observed(j)) {
      CHECK(stored[j] == doctest::Approx(model.regression(x) + model.scale(x) * sample.errors[j]));
    } else {
      CHECK(stored[j] == 0.0);
    }
  }

  Stream again = derive_stream(1, 100000, 0);
  const auto repeat = generate_dataset(model, 1000, again);
  Stream once = derive_stream(1, 100000, 0);
  const auto first = generate_dataset(model, 1000, once);
  CHECK(std::equal(repeat.errors.begin(), repeat.errors.end(), first.errors.begin()));
  CHECK(std::equal(repeat.data.stored_responses().begin(), repeat.data.stored_responses().end(),
                   first.data.stored_responses().begin()));
}

TEST_CASE("derived streams are distinct per (seed, n, k, attempt)")
{
  auto head = [](Stream s) { return s(); };
  const auto base = head(derive_stream(5, 100, 3));
  CHECK(base == head(derive_stream(5, 100, 3)));
  CHECK(base != head(derive_stream(6, 100, 3)));
  CHECK(base != head(derive_stream(5, 200, 3)));
  CHECK(base != head(derive_stream(5, 100, 4)));
  CHECK(base != head(derive_stream(5, 100, 3, 1)));
  CHECK(head(derive_stream(5, 100, 4)) != head(derive_stream(5, 101, 3)));
}

TEST_CASE("run_replication")
{
  const auto model = TrueModel::reference();
  const auto cfg = small_config(2);
  const auto start = std::chrono::steady_clock::now();
  const auto a = run_replication(model, 100, cfg, 0);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 1.0);
  const auto b = run_replication(model, 100, cfg, 0);
  CHECK(a.at_points == b.at_points);
  CHECK(a.on_grid == b.on_grid);
  const auto c = run_replication(model, 100, cfg, 1);
  CHECK(a.on_grid != c.on_grid);

  REQUIRE(a.on_grid.size() == cfg.mise_grid.size());
  for (std::size_t i = 0; i < a.on_grid.size(); ++i) {
    CHECK(a.on_grid[i] >= 0.0);
    CHECK(a.on_grid[i] <= 1.0);
    if (i > 0) {
      CHECK(a.on_grid[i] >= a.on_grid[i - 1]);
    }
  }
  for (std::size_t i = 1; i < a.at_points.size(); ++i) {
    CHECK(a.at_points[i] >= a.at_points[i - 1]);
  }
}

TEST_CASE("parallel replications match the serial reference")
{
  const auto model = TrueModel::reference();
  auto cfg = small_config(6);
  const auto serial = run_replications_serial(model, 100, cfg);
  for (const std::size_t workers : {1u, 3u}) {
    cfg.workers = workers;
    const auto par = run_replications(model, 100, cfg);
    REQUIRE(par.size() == serial.size());
    for (std::size_t k = 0; k < par.size(); ++k) {
      CHECK(par[k].index == k);
      CHECK(par[k].at_points == serial[k].at_points);
      CHECK(par[k].on_grid == serial[k].on_grid);
    }
  }
}

TEST_CASE("summarize")
{
  const auto model = TrueModel::reference();
  const auto cfg = small_config(2);
  const auto results = run_replications_serial(model, 100, small_config(12));

  SUBCASE("identical replications have zero variance")
  {
    std::vector<ReplicationResult> same(5, results.front());
    const auto t = summarize(same, model, cfg);
    for (const double v : t.scaled_variance) {
      CHECK(v == 0.0);
    }
  }
  SUBCASE("MSE decomposes into variance and squared bias")
  {
    const auto t = summarize(results, model, cfg);
    const double R = static_cast<double>(results.size());
    for (std::size_t i = 0; i < t.eval_points.size(); ++i) {
      const double rebuilt = t.scaled_variance[i] * (R - 1.0) / R + t.scaled_bias[i] * t.scaled_bias[i];
      CHECK(t.scaled_mse[i] == doctest::Approx(rebuilt).epsilon(1e-12));
    }
    CHECK(t.scaled_mise >= 0.0);
    CHECK(t.replications == results.size());
    CHECK(t.n == 100);
  }
  SUBCASE("hand-checked statistics")
  {
    std::vector<ReplicationResult> two(2, results.front());
    two[0].at_points = {0.0, 0.1, 0.2, 0.4};
    two[1].at_points = {0.0, 0.1, 0.4, 0.6};
    const auto t = summarize(two, model, cfg);
    const double F = model.error_law.cdf(-1.0);
    CHECK(t.scaled_bias[2] == doctest::Approx(10.0 * (0.3 - F)));
    CHECK(t.scaled_variance[2] == doctest::Approx(100.0 * 0.02));
    CHECK(t.scaled_mse[2] == doctest::Approx(100.0 * ((0.2 - F) * (0.2 - F) + (0.4 - F) * (0.4 - F)) / 2.0));
  }
  SUBCASE("needs two replications")
  {
    const std::vector<ReplicationResult> one(1, results.front());
    CHECK_THROWS_AS(summarize(one, model, cfg), std::invalid_argument);
  }
}

TEST_CASE("observation rate and asymptotic row")
{
  const auto model = TrueModel::reference();
  CHECK(observation_rate(model) == doctest::Approx(0.5).epsilon(1e-10));

  auto skewed = model;
  skewed.observation_probability = [](std::span<const double> x) { return 0.25 + 0.25 * (x[0] + 1.0); };
  CHECK(observation_rate(skewed) == doctest::Approx(0.5).epsilon(1e-10));
  skewed.observation_probability = [](std::span<const double> x) { return 0.5 + 0.2 * x[0] * x[1] + 0.3 * x[1] * x[1]; };
  CHECK(observation_rate(skewed) == doctest::Approx(0.6).epsilon(1e-10));

  StudyConfig cfg;
  const auto row = asymptotic_row(model, cfg);
  CHECK(std::abs(row.amse[3] - 0.1817) < 5e-4);
  CHECK(std::abs(row.amise - 0.4231) < 0.01);
}

TEST_CASE("small study is complete and well formed")
{
  auto cfg = small_config(10);
  cfg.sample_sizes = {60, 100};
  const auto study = run_study(cfg);
  REQUIRE(study.tables.size() == 2);
  for (const auto& t : study.tables) {
    CHECK(t.replications == 10);
    CHECK(t.scaled_bias.size() == 4);
    for (const double v : t.scaled_mse) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
    CHECK(std::isfinite(t.scaled_mise));
  }
  CHECK(study.asymptotic.amse.size() == 4);

  StudyConfig bad;
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
