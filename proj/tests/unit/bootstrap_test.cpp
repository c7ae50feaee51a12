#include "evint/bootstrap.hpp"
#include "evint/errors.hpp"
#include "evint/simulation.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <tuple>

using namespace evint;

namespace {

// Table row 1 generator on a 30-row design.
Dataset
case_one_data(std::size_t n, std::uint64_t seed)
{
  SimulationSettings s;
  s.n = n;
  s.seed = seed;
  const auto g = case_generator(topology_case(1), s);
  Philox4x32 rng(seed, 99);
  return g.draw(rng);
}

// Straight loop over replicates with no threading or precomputation.
std::vector<double>
serial_global(const LinearModelSpace& r, const LinearModelSpace& a, const Dataset& d, std::uint64_t seed, std::size_t B)
{
  std::vector<double> out;
  const auto pen = Penalty::sic();
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t attempt = 0;; ++attempt) {
      try {
        out.push_back(raw_evidence_global(r, a, resample_rows(d, b, seed, attempt), pen).value);
        break;
      } catch (const StatisticalError&) {
      }
    }
  }
  return out;
}

} // namespace

TEST_CASE("resample: single row and determinism")
{
  Eigen::VectorXd y(1);
  y << 4.0;
  RowMatrix x(1, 1);
  x << 2.0;
  const Dataset one(y, x);
  for (std::size_t b = 0; b < 10; ++b) {
    const auto r = resample_rows(one, b, 3);
    CHECK(r.size() == 1);
    CHECK(r.response(0) == 4.0);
  }
  const auto d = oracle::random_dataset(50, 2, 1);
  const auto a = resample_rows(d, 17, 99);
  const auto b = resample_rows(d, 17, 99);
  CHECK(a.response() == b.response());
  CHECK(a.covariates() == b.covariates());
  CHECK(resample_indices(50, 17, 99) != resample_indices(50, 18, 99));
  CHECK(resample_indices(50, 17, 99) != resample_indices(50, 17, 99, 1));
}

TEST_CASE("resample: rows are picked uniformly")
{
  std::vector<double> count(10, 0.0);
  const std::size_t reps = 100000;
  for (std::size_t b = 0; b < reps; ++b) {
    for (auto r : resample_indices(10, b, 7)) {
      count[r] += 1.0;
    }
  }
  for (double c : count) {
    CHECK(std::abs(c / (10.0 * reps) - 0.1) < 0.005);
  }
}

TEST_CASE("bootstrap: identical spaces give all zeros in every mode")
{
  const auto d = oracle::random_dataset(40, 2, 2);
  const LinearModelSpace s({0, 1});
  for (auto mode : {EvidenceMode::global, EvidenceMode::local, EvidenceMode::specified}) {
    BootstrapConfig cfg;
    cfg.replicates = 200;
    cfg.mode = mode;
    const auto out = bootstrap_evidence(s, s, d, cfg, Penalty::sic());
    CHECK(out.values.size() == 200);
    for (double v : out.values) {
      CHECK(v == 0.0);
    }
  }
}

TEST_CASE("bootstrap: identical covariate rows leave only the penalty in local mode")
{
  const std::size_t n = 40;
  auto base = oracle::random_dataset(n, 1, 3);
  RowMatrix x(n, 2);
  x.col(0).setConstant(1.5);
  x.col(1).setConstant(-0.5);
  const Dataset d(base.response(), x);
  BootstrapConfig cfg;
  cfg.replicates = 300;
  cfg.mode = EvidenceMode::local;
  cfg.rank_policy = RankPolicy::minimum_norm;
  const auto out = bootstrap_evidence(LinearModelSpace({0}), LinearModelSpace({0, 1}), d, cfg, Penalty::sic());
  for (double v : out.values) {
    CHECK(v == doctest::Approx(std::log(double(n))).epsilon(1e-9));
  }
}

TEST_CASE("bootstrap: engine agrees with a serial reference")
{
  const auto d = case_one_data(30, 11);
  const auto r = topology_case(1).reference();
  const auto a = topology_case(1).alternative();
  BootstrapConfig cfg;
  cfg.replicates = 2000;
  cfg.seed = 1234;
  cfg.threads = 4;
  const auto out = bootstrap_evidence(r, a, d, cfg, Penalty::sic());
  const auto ref = serial_global(r, a, d, cfg.seed, cfg.replicates);
  REQUIRE(ref.size() == out.values.size());
  const double m1 = std::accumulate(out.values.begin(), out.values.end(), 0.0) / 2000.0;
  const double m2 = std::accumulate(ref.begin(), ref.end(), 0.0) / 2000.0;
  CHECK(std::abs(m1 - m2) < 1e-9);
  for (std::size_t b = 0; b < ref.size(); ++b) {
    CHECK(std::abs(out.values[b] - ref[b]) < 1e-9);
  }
}

TEST_CASE("bootstrap: identical results for any thread count")
{
  const auto d = oracle::random_dataset(60, 3, 4);
  const LinearModelSpace r({0}), a({1, 2});
  BootstrapConfig cfg;
  cfg.replicates = 500;
  cfg.seed = 77;
  for (auto mode : {EvidenceMode::global, EvidenceMode::local, EvidenceMode::specified}) {
    cfg.mode = mode;
    cfg.threads = 1;
    const auto one = bootstrap_evidence(r, a, d, cfg, Penalty::sic());
    for (unsigned t : {2u, 3u, 8u}) {
      cfg.threads = t;
      const auto many = bootstrap_evidence(r, a, d, cfg, Penalty::sic());
      CHECK(many.values == one.values);
      CHECK(many.rejected_count == one.rejected_count);
    }
  }
}

TEST_CASE("bootstrap: shared global/local run equals the separate runs")
{
  const auto d = oracle::random_dataset(45, 3, 5);
  const LinearModelSpace r({0, 1}), a({2});
  BootstrapConfig cfg;
  cfg.replicates = 300;
  cfg.seed = 8;
  const auto both = bootstrap_global_local(r, a, d, cfg, Penalty::sic());
  cfg.mode = EvidenceMode::global;
  CHECK(bootstrap_evidence(r, a, d, cfg, Penalty::sic()).values == both.global.values);
  cfg.mode = EvidenceMode::local;
  CHECK(bootstrap_evidence(r, a, d, cfg, Penalty::sic()).values == both.local.values);
}

TEST_CASE("bootstrap: antisymmetric in the model roles")
{
  const auto d = oracle::random_dataset(45, 3, 6);
  const LinearModelSpace r({0, 1}), a({2});
  BootstrapConfig cfg;
  cfg.replicates = 200;
  const auto f = bootstrap_global_local(r, a, d, cfg, Penalty::sic());
  const auto g = bootstrap_global_local(a, r, d, cfg, Penalty::sic());
  for (std::size_t b = 0; b < 200; ++b) {
    CHECK(f.global.values[b] == -g.global.values[b]);
    CHECK(f.local.values[b] == -g.local.values[b]);
  }
}

TEST_CASE("bootstrap: specified models evaluate fixed densities on resamples")
{
  const auto d = oracle::random_dataset(30, 1, 7);
  BootstrapConfig cfg;
  cfg.replicates = 100;
  cfg.mode = EvidenceMode::specified;
  const auto r = SpecifiedModel::normal(0.0, 1.0);
  const auto a = SpecifiedModel::normal(0.5, 2.0);
  const auto out = bootstrap_evidence(r, a, d, cfg);
  for (std::size_t b = 0; b < 100; ++b) {
    const auto rb = resample_rows(d, b, cfg.seed);
    CHECK(out.values[b] == doctest::Approx(raw_evidence_specified(r, a, rb).value).epsilon(1e-11));
  }
  const auto same = bootstrap_evidence(r, r, d, cfg);
  for (double v : same.values) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("bootstrap: rank-deficient resamples are redrawn and counted")
{
  // A binary covariate with two ones: many resamples miss both.
  const std::size_t n = 40;
  auto base = oracle::random_dataset(n, 1, 8);
  RowMatrix x = RowMatrix::Zero(n, 1);
  x(3, 0) = 1.0;
  x(20, 0) = 1.0;
  const Dataset d(base.response(), x);
  BootstrapConfig cfg;
  cfg.replicates = 200;
  cfg.max_reject_fraction = 0.5;
  const auto out = bootstrap_evidence(LinearModelSpace(std::vector<std::size_t>{}), LinearModelSpace({0}), d, cfg, Penalty::sic());
  CHECK(out.values.size() == 200);
  CHECK(out.rejected_count > 0);
  cfg.max_reject_fraction = 0.01;
  CHECK_THROWS_AS(bootstrap_evidence(LinearModelSpace(std::vector<std::size_t>{}), LinearModelSpace({0}), d, cfg, Penalty::sic()),
                  TooManyRejections);
}

TEST_CASE("bootstrap: config validation")
{
  BootstrapConfig cfg;
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.replicates = 10;
  cfg.max_reject_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("bootstrap: local spread is below global spread on a case-4 dataset")
{
  SimulationSettings s;
  s.seed = 2024;
  const auto& c = topology_case(4);
  const auto g = case_generator(c, s);
  Philox4x32 rng(s.seed, 1);
  const auto d = g.draw(rng);
  BootstrapConfig cfg;
  cfg.replicates = 4000;
  cfg.seed = 5;
  const auto both = bootstrap_global_local(c.reference(), c.alternative(), d, cfg, Penalty::sic());
  auto sd = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double ss = 0.0;
    for (double x : v) {
      ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / double(v.size() - 1));
  };
  CHECK(sd(both.local.values) < sd(both.global.values));
}

TEST_CASE("bootstrap: nested spaces bound the global evidence")
{
  const auto small = LinearModelSpace::from_mask("001");
  const auto big = LinearModelSpace::from_mask("011");
  const auto other = LinearModelSpace::from_mask("110");
  const double c = std::log(100.0);

  auto [lo, hi] = global_evidence_bounds(small, big, c);
  CHECK(std::isinf(lo));
  CHECK(hi == doctest::Approx(c));
  std::tie(lo, hi) = global_evidence_bounds(big, small, c);
  CHECK(lo == doctest::Approx(-c));
  CHECK(std::isinf(hi));
  std::tie(lo, hi) = global_evidence_bounds(small, other, c);
  CHECK((std::isinf(lo) && std::isinf(hi)));
  // Dropping the intercept breaks the nesting.
  std::tie(lo, hi) = global_evidence_bounds(LinearModelSpace({2}, true), LinearModelSpace({1, 2}, false), c);
  CHECK((std::isinf(lo) && std::isinf(hi)));

  const auto d = case_one_data(60, 4);
  BootstrapConfig cfg;
  cfg.replicates = 300;
  cfg.seed = 2;
  const auto s = bootstrap_global_local(small, big, d, cfg, Penalty::sic());
  const double shift = std::log(60.0);
  CHECK(s.global.upper_bound == doctest::Approx(shift));
  for (double e : s.global.values) {
    CHECK(e <= shift + 1e-9);
  }
  CHECK(std::isinf(s.local.upper_bound));
}
