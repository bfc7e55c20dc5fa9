// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Tolerances are fixed here; pass --quick to skip the full-size Monte Carlo run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "resedf/edf.hpp"
#include "resedf/efficiency.hpp"
#include "resedf/localpoly.hpp"
#include "resedf/simulation.hpp"
#include "test_support.hpp"

using namespace resedf;

namespace {

constexpr double kInfRow[] = {0.0025, 0.0270, 0.0913, 0.1817};
constexpr double kInfRowTol = 5e-4;
constexpr double kAmise = 0.4231;
constexpr double kAmiseTol = 0.01;
constexpr double kReductionTol = 1e-8;
constexpr double kFiniteRow[] = {0.0030, 0.0362, 0.1226, 0.1916};
constexpr double kFiniteRowRelTol = 0.25;
constexpr double kRateTol = 0.005;
constexpr double kPiLow = 0.2689;
constexpr double kPiHigh = 0.7311;
constexpr double kExactnessTol = 1e-8;
constexpr double kOrthogonalityTol = 1e-6;
constexpr double kMeanZeroTol = 1e-6;
constexpr double kExpansionSlack = 1.10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<void(Outcome&)>& body)
{
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds > limit_seconds) {
    out.pass = false;
    out.detail << " [over time limit " << limit_seconds << " s]";
  }
  if (!out.pass) {
    ++failures;
  }
  std::printf("[%s] %s (%.2f s)%s\n", out.pass ? "PASS" : "FAIL", name.c_str(), seconds, out.detail.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void infinite_row(Outcome& out)
{
  const auto law = efficiency::ErrorLaw::standard_normal();
  const efficiency::MissingnessSummary miss(0.5);
  const double ts[] = {-3.0, -2.0, -1.0, 0.0};
  out.detail << " AV =";
  for (int i = 0; i < 4; ++i) {
    const double v = efficiency::asymptotic_variance_F(law, miss, ts[i]);
    out.detail << ' ' << fmt(v);
    out.require(std::abs(v - kInfRow[i]) <= kInfRowTol, "t=" + fmt(ts[i]));
  }
  const auto grid = edf::uniform_grid(-5.0, 5.0, 0.01);
  const double total = efficiency::amise(law, miss, grid);
  out.detail << ", AMISE = " << fmt(total);
  out.require(std::abs(total - kAmise) <= kAmiseTol, "AMISE");
}

void influence_reduction(Outcome& out)
{
  const auto law = efficiency::ErrorLaw::standard_normal();
  const efficiency::MissingnessSummary miss(0.5);
  double worst = 0.0;
  for (const double t : {-2.0, 0.0}) {
    const auto eif = efficiency::efficient_influence_general(law, miss, efficiency::indicator_below(t));
    for (const double z : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
      worst = std::max(worst, std::abs(eif(true, z) - efficiency::influence_F(law, miss, true, z, t)));
    }
  }
  out.detail << " max |difference| = " << worst;
  out.require(worst <= kReductionTol, "pointwise agreement");
}

std::vector<double> summary_mse(const simulation::StudyResult& study, std::size_t n)
{
  for (const auto& t : study.tables) {
    if (t.n == n) {
      return t.scaled_mse;
    }
  }
  throw std::runtime_error("sample size missing from study");
}

void monte_carlo_full(Outcome& out)
{
  const simulation::StudyConfig cfg; // default: n in {100, 200, 500, 1000}, R = 1000
  const auto study = simulation::run_study(cfg);
  const auto mse = summary_mse(study, 1000);
  out.detail << " n=1000 nMSE =";
  for (int i = 0; i < 4; ++i) {
    out.detail << ' ' << fmt(mse[i]);
    out.require(std::abs(mse[i] - kFiniteRow[i]) <= kFiniteRowRelTol * kFiniteRow[i],
                "within 25% at t=" + fmt(cfg.eval_points[i]));
    out.require(mse[i] > study.asymptotic.amse[i], "above limit at t=" + fmt(cfg.eval_points[i]));
  }
}

void monte_carlo_desk(Outcome& out)
{
  simulation::StudyConfig cfg;
  cfg.sample_sizes = {100, 500};
  cfg.replications = 200;
  const auto study = simulation::run_study(cfg);
  for (const std::size_t n : cfg.sample_sizes) {
    const auto mse = summary_mse(study, n);
    out.detail << " n=" << n << ":";
    for (int i = 0; i < 4; ++i) {
      out.detail << ' ' << fmt(mse[i]);
      out.require(mse[i] > study.asymptotic.amse[i], "n=" + std::to_string(n) + " above limit at t=" +
                                                         fmt(cfg.eval_points[i]));
    }
  }
}

void missingness(Outcome& out)
{
  const auto model = simulation::TrueModel::reference();
  auto stream = simulation::derive_stream(20260101, 100000, 0);
  const auto sample = simulation::generate_dataset(model, 100000, stream);
  const double rate = static_cast<double>(sample.data.complete_count()) / static_cast<double>(sample.data.size());
  const auto [lo, hi] =
    std::minmax_element(sample.observation_probability.begin(), sample.observation_probability.end());
  out.detail << " mean delta = " << fmt(rate) << ", pi in [" << fmt(*lo) << ", " << fmt(*hi) << "]";
  out.require(std::abs(rate - 0.5) <= kRateTol, "mean delta");
  out.require(*lo >= kPiLow && *hi <= kPiHigh, "pi range");
}

void properties(Outcome& out)
{
  std::mt19937_64 rng(99);

  // Polynomial exactness for noiseless data of degree <= d.
  {
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> point(-0.6, 0.6);
    double worst = 0.0;
    for (const auto [m, d] : {std::pair<std::size_t, int>{1, 3}, {2, 3}, {3, 2}}) {
      const auto basis = localpoly::multi_index_set(m, d);
      std::vector<double> gamma(basis.size());
      for (auto& g : gamma) {
        g = coef(rng);
      }
      auto poly = [&](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i) {
          v += gamma[i] * localpoly::psi(basis[i], x);
        }
        return v;
      };
      const Dataset data = testing::uniform_design(400, m, -1.0, 1.0, rng, poly);
      localpoly::SmootherConfig c;
      c.dimension = m;
      c.degree = d;
      c.bandwidth = 0.9;
      const localpoly::Smoother smoother(data, c);
      for (int p = 0; p < 10; ++p) {
        std::vector<double> x0(m);
        for (auto& v : x0) {
          v = point(rng);
        }
        const double truth = poly(x0);
        worst = std::max(worst, std::abs(smoother.fit(x0).mean - truth) / std::max(1.0, std::abs(truth)));
      }
    }
    out.detail << " exactness " << worst << ";";
    out.require(worst <= kExactnessTol, "polynomial exactness");
  }

  // EDF monotone, bounded, right-continuous on ties.
  {
    std::normal_distribution<double> z;
    const auto grid = edf::uniform_grid(-4.0, 4.0, 0.05);
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v(40);
      for (auto& x : v) {
        x = std::round(z(rng) * 20.0) / 20.0;
      }
      const auto c = edf::edf_curve(v, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double exact = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double e) { return e <= grid[i]; })) /
                             static_cast<double>(v.size());
        ok = ok && c.values[i] >= 0.0 && c.values[i] <= 1.0 && c.values[i] == exact;
        ok = ok && (i == 0 || c.values[i] >= c.values[i - 1]);
      }
    }
    out.require(ok, "EDF shape");
  }

  // Complete-case invariance under corruption of unobserved responses.
  {
    auto stream = simulation::derive_stream(5, 300, 0);
    const auto model = simulation::TrueModel::reference();
    const auto sample = simulation::generate_dataset(model, 300, stream);
    localpoly::SmootherConfig c;
    c.dimension = 2;
    c.bandwidth = localpoly::bandwidth_rule(300);
    const auto grid = edf::uniform_grid(-5.0, 5.0, 0.01);
    const auto base = edf::edf_curve(edf::complete_case_residuals(sample.data, c), grid);
    bool ok = true;
    for (const double junk : {-1e12, 0.0, 7.5, 1e300}) {
      const auto other = edf::edf_curve(edf::complete_case_residuals(testing::corrupt_missing(sample.data, junk), c), grid);
      ok = ok && other.values == base.values;
    }
    out.require(ok, "complete-case invariance");
  }

  // h0 orthogonality, J_d inverse at the normal moments, influence mean zero.
  {
    const auto law = efficiency::ErrorLaw::standard_normal();
    double worst = 0.0;
    for (const double t : {-2.0, -0.5, 0.0, 1.0}) {
      const auto p = efficiency::h0_projection(law, efficiency::indicator_below(t));
      const auto& cuts = p.breakpoints();
      for (int k = 0; k < 3; ++k) {
        worst = std::max(worst, std::abs(law.expectation([&](double z) { return std::pow(z, k) * p(z); }, cuts)));
      }
    }
    out.detail << " orthogonality " << worst << ";";
    out.require(worst < kOrthogonalityTol, "h0 orthogonality");

    const Eigen::Matrix2d j = efficiency::jd_inverse(0.0, 3.0);
    out.require(j(0, 0) == 1.0 && j(0, 1) == 0.0 && j(1, 0) == 0.0 && j(1, 1) == 2.0, "J_d inverse");

    const efficiency::MissingnessSummary miss(0.5);
    double mean_worst = 0.0;
    for (const double t : {-2.0, 0.0, 1.5}) {
      const double cut[] = {t};
      const double mean =
        0.5 * law.expectation([&](double z) { return efficiency::influence_F(law, miss, true, z, t); }, cut);
      mean_worst = std::max(mean_worst, std::abs(mean));
    }
    out.detail << " influence mean " << mean_worst;
    out.require(mean_worst < kMeanZeroTol, "influence mean zero");
  }
}

void expansion(Outcome& out)
{
  const auto model = simulation::TrueModel::reference();
  const auto grid = edf::uniform_grid(-5.0, 5.0, 0.01);
  constexpr std::size_t kReplications = 20;
  std::vector<double> medians;
  for (const std::size_t n : {200u, 800u, 3200u}) {
    simulation::StudyConfig cfg;
    const auto smoother = cfg.smoother_for(n, model.dimension());
    std::vector<double> distances;
    for (std::size_t k = 0; k < kReplications; ++k) {
      auto stream = simulation::derive_stream(cfg.seed ^ 0x5eedULL, n, k);
      const auto sample = simulation::generate_dataset(model, n, stream);
      const auto fitted = edf::edf_curve(edf::complete_case_residuals(sample.data, smoother), grid);
      const auto oracle = edf::expansion_curve(sample.errors, sample.data.indicators(), model.error_law, grid);
      distances.push_back(std::sqrt(static_cast<double>(n)) * edf::sup_distance(fitted, oracle));
    }
    std::nth_element(distances.begin(), distances.begin() + kReplications / 2, distances.end());
    const double upper = distances[kReplications / 2];
    std::nth_element(distances.begin(), distances.begin() + kReplications / 2 - 1, distances.end());
    const double lower = distances[kReplications / 2 - 1];
    medians.push_back(0.5 * (upper + lower));
    out.detail << " n=" << n << ": " << fmt(medians.back());
  }
  for (std::size_t i = 1; i < medians.size(); ++i) {
    out.require(medians[i] <= kExpansionSlack * medians[i - 1], "non-increasing medians");
  }
}

} // namespace

int main(int argc, char** argv)
{
  const bool quick = argc > 1 && std::string(argv[1]) == "--quick";

  criterion("asymptotic row: AV(t) and AMISE for the normal law at E delta = 0.5", 5.0, infinite_row);
  criterion("efficient influence for 1[e <= t] equals the EDF influence function", 1.0, influence_reduction);
  if (quick) {
    std::printf("[SKIP] Monte Carlo n = 1000 row at R = 1000 (--quick)\n");
  } else {
    criterion("Monte Carlo default study: n = 1000 row within 25% and above the limit", 30.0 * 60.0,
              monte_carlo_full);
  }
  criterion("Monte Carlo desk study: n in {100, 500}, R = 200, above the limit", 180.0, monte_carlo_desk);
  criterion("missingness marginal over 1e5 rows", 60.0, missingness);
  criterion("property suites", 120.0, properties);
  criterion("expansion distance non-increasing in n", 600.0, expansion);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
