#include "evint/analysis.hpp"
#include "evint/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace evint;

namespace {

AnalysisConfig
config(std::vector<std::size_t> r, std::vector<std::size_t> a)
{
  AnalysisConfig c{LinearModelSpace(std::move(r)), LinearModelSpace(std::move(a))};
  c.replicates = 400;
  c.seed = 12;
  return c;
}

bool
has_warning(const EvidenceReport& r, std::string_view needle)
{
  return std::any_of(r.warnings.begin(), r.warnings.end(), [&](const std::string& w) {
    return w.find(needle) != std::string::npos;
  });
}

} // namespace

TEST_CASE("analysis: report agrees with the components")
{
  const auto d = oracle::random_dataset(80, 3, 21);
  auto cfg = config({0, 1}, {1, 2});
  const auto rep = analyze(d, cfg);

  CHECK(rep.n == 80);
  CHECK(rep.replicates == 400);
  CHECK(rep.penalty == "sic");
  CHECK(rep.reference_label == "{intercept,x1,x2}");
  const double lr = oracle::max_loglik(d, {0, 1});
  const double la = oracle::max_loglik(d, {1, 2});
  CHECK(rep.observed == doctest::Approx(-2.0 * (la - lr)).epsilon(1e-10));
  REQUIRE(rep.global);
  REQUIRE(rep.local);

  BootstrapConfig bc;
  bc.replicates = 400;
  bc.seed = 12;
  const auto both = bootstrap_global_local(cfg.reference, cfg.alternative, d, bc, Penalty::sic());
  for (auto [kind, sample] : {std::pair{&*rep.global, &both.global}, std::pair{&*rep.local, &both.local}}) {
    const auto sm = smooth(*sample, cfg.density);
    CHECK(kind->point == smoothed_mean(sm));
    REQUIRE(kind->levels.size() == 2);
    const auto iv = interval(sm, 0.95);
    CHECK(kind->levels[0].interval.lower == iv.lower);
    CHECK(kind->levels[0].interval.upper == iv.upper);
    CHECK(kind->category == evidence_category(kind->point, cfg.thresholds));
    CHECK(kind->levels[0].security ==
          security_category(kind->point, iv.lower, iv.upper, cfg.thresholds));
  }
  // Observed data strongly favour the space with the larger slopes.
  CHECK(rep.observed < 0.0);
  CHECK(rep.warnings.empty());
}

TEST_CASE("analysis: mode selection")
{
  const auto d = oracle::random_dataset(60, 2, 22);
  auto cfg = config({0}, {1});
  cfg.local = false;
  const auto rep = analyze(d, cfg);
  CHECK(rep.global);
  CHECK_FALSE(rep.local);
  cfg.global = false;
  CHECK_THROWS_AS(analyze(d, cfg), ConfigError);
}

TEST_CASE("analysis: identical spaces give a point mass at zero")
{
  const auto d = oracle::random_dataset(50, 2, 23);
  const auto rep = analyze(d, config({0}, {0}));
  CHECK(has_warning(rep, "identical"));
  CHECK(rep.global->point_mass);
  CHECK(rep.global->point == 0.0);
  CHECK(rep.local->levels[0].interval.lower == 0.0);
  CHECK(rep.local->levels[0].interval.upper == 0.0);
  CHECK(rep.local->levels[0].security == SecurityCategory::WI);
}

TEST_CASE("analysis: inconsistent penalty is flagged")
{
  const auto d = oracle::random_dataset(50, 2, 24);
  auto cfg = config({0}, {1});
  cfg.penalty = "aic";
  const auto rep = analyze(d, cfg);
  CHECK(has_warning(rep, "not consistent"));
  CHECK(rep.penalty == "aic");
}

TEST_CASE("analysis: configuration errors")
{
  const auto d = oracle::random_dataset(50, 2, 25);
  auto cfg = config({0}, {1});
  cfg.replicates = 99;
  CHECK_THROWS_AS(analyze(d, cfg), ConfigError);
  cfg = config({0}, {5});
  CHECK_THROWS_AS(analyze(d, cfg), DimensionMismatch);
  cfg = config({0}, {1});
  cfg.levels = {0.95, 1.0};
  CHECK_THROWS_AS(analyze(d, cfg), ConfigError);
  cfg = config({0}, {1});
  cfg.penalty = "bic2";
  CHECK_THROWS_AS(analyze(d, cfg), ConfigError);
}
