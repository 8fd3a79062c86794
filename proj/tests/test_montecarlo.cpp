// Copyright 2026 The crnsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/expint.hpp>

#include "catch_amalgamated.hpp"
#include "crn/montecarlo.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

crn::SweepRow synthetic_row(std::int64_t n, double mean) {
  crn::SweepRow r;
  r.n = n;
  r.estimate.mean = mean;
  return r;
}

}  // namespace

TEST_CASE("summary statistics", "[montecarlo]") {
  const auto e = crn::summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(e.mean == 2.5);
  CHECK_THAT(e.std_error, WithinAbs(std::sqrt(5.0 / 3.0 / 4.0), 1e-15));
  CHECK(e.trials == 4);
  CHECK_THROWS(crn::summarize({1.0}));
}

TEST_CASE("silent secondary averages to zero", "[montecarlo]") {
  crn::SystemConfig cfg;
  cfg.secondary_users = 1;
  cfg.tolerance = 0.1;
  const auto e = crn::estimate_throughput(cfg, 50, 1);
  CHECK(e.mean == 0.0);
  CHECK(e.std_error == 0.0);
}

TEST_CASE("estimates are reproducible and worker-invariant", "[montecarlo]") {
  crn::SystemConfig cfg;
  cfg.secondary_users = 300;
  const auto a = crn::estimate_throughput(cfg, 200, 9, 1);
  const auto b = crn::estimate_throughput(cfg, 200, 9, 1);
  const auto c = crn::estimate_throughput(cfg, 200, 9, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.mean == c.mean);
  CHECK(a.std_error == c.std_error);
  CHECK(crn::estimate_throughput(cfg, 200, 10, 1).mean != a.mean);
}

TEST_CASE("trial runner preserves order and rethrows", "[montecarlo]") {
  const auto v = crn::run_trials(1000, 3, [](std::int64_t t) { return t * t; });
  for (std::int64_t t = 0; t < 1000; ++t) REQUIRE(v[static_cast<std::size_t>(t)] == t * t);
  CHECK_THROWS_AS(crn::run_trials(100, 4,
                                  [](std::int64_t t) {
                                    if (t == 57) throw std::runtime_error("boom");
                                    return t;
                                  }),
                  std::runtime_error);
}

TEST_CASE("scalar link matches the exponential-integral quadrature", "[montecarlo]") {
  constexpr double rho = 5.0;
  const double exact = crn::detail::integrate([](double x) { return std::log1p(rho * x) * std::exp(-x); }, 0.0, 80.0);
  // Closed form e^{1/rho} E1(1/rho) as a second opinion on the quadrature.
  CHECK_THAT(exact, WithinRel(std::exp(1.0 / rho) * -boost::math::expint(-1.0 / rho), 1e-10));

  const crn::ComplexMatrix no_primary = crn::ComplexMatrix::Zero(1, 1);
  const crn::HermitianMatrix q_p = crn::HermitianMatrix::Zero(1, 1);
  const auto rates = crn::run_trials(1000000, 4, [&](std::int64_t t) {
    const auto h = crn::sample_cn_matrix(crn::trial_stream(60, 1, t), 1, 1);
    return crn::mac_sum_rate(h, rho, no_primary, q_p);
  });
  const auto e = crn::summarize(rates);
  CHECK(std::abs(e.mean - exact) < 3.0 * e.std_error);
}

TEST_CASE("standard error shrinks as one over root trials", "[montecarlo]") {
  crn::SystemConfig cfg;
  cfg.secondary_users = 200;
  const auto small = crn::estimate_throughput(cfg, 500, 3);
  const auto large = crn::estimate_throughput(cfg, 8000, 3);
  CHECK_THAT(small.std_error / large.std_error, WithinAbs(4.0, 0.6));
}

TEST_CASE("throughput grows with the tolerance", "[montecarlo]") {
  crn::SystemConfig cfg;
  for (const auto secondary : {crn::SecondaryMode::Mac, crn::SecondaryMode::Broadcast}) {
    cfg.secondary_mode = secondary;
    double prev = -1.0;
    for (const double gamma : {0.5, 2.0, 8.0}) {
      cfg.tolerance = gamma;
      const double mean = crn::estimate_throughput(cfg, 400, 4).mean;
      CHECK(mean > prev);
      prev = mean;
    }
  }
}

TEST_CASE("gamma schedules in sweeps", "[montecarlo]") {
  crn::ExperimentSpec spec;
  spec.trials = 20;
  spec.n_grid = {100, 1000, 10000};
  spec.schedule = {crn::GammaLaw::PowerLaw, 2.0, 0.2};
  const auto rows = crn::run_sweep(spec);
  REQUIRE(rows.size() == 3);
  CHECK_THAT(rows[0].gamma, WithinAbs(0.7962, 1e-4));
  CHECK_THAT(rows[1].gamma, WithinAbs(0.5024, 1e-4));
  CHECK_THAT(rows[2].gamma, WithinAbs(0.3170, 1e-4));
  for (const auto& r : rows) CHECK(r.violations == 0);

  spec.schedule = {};
  for (const auto& r : crn::run_sweep(spec)) CHECK(r.gamma == 2.0);
}

TEST_CASE("rows depend only on their own grid point", "[montecarlo]") {
  crn::ExperimentSpec spec;
  spec.trials = 30;
  spec.n_grid = {100, 500};
  const auto both = crn::run_sweep(spec);
  spec.n_grid = {500};
  const auto alone = crn::run_sweep(spec);
  CHECK(both[1].estimate.mean == alone[0].estimate.mean);
  CHECK(both[1].estimate.std_error == alone[0].estimate.std_error);
}

TEST_CASE("sweep spec validation", "[montecarlo]") {
  crn::ExperimentSpec spec;
  spec.n_grid = {10, 100};
  CHECK_NOTHROW(spec.validate());
  spec.trials = 1;
  CHECK_THROWS_AS(spec.validate(), crn::ConfigError);
  spec.trials = 10;
  spec.n_grid = {100, 10};
  CHECK_THROWS_AS(spec.validate(), crn::ConfigError);
  spec.n_grid = {10, 100};
  spec.schedule = {crn::GammaLaw::LogLaw, 2.0, 1.5};
  CHECK_THROWS_AS(spec.validate(), crn::ConfigError);
  spec.schedule = {crn::GammaLaw::Constant, 0.0, 0.0};
  CHECK_THROWS_AS(spec.validate(), crn::ConfigError);
}

TEST_CASE("slope fitting", "[montecarlo]") {
  std::vector<crn::SweepRow> rows;
  for (const std::int64_t n : {100, 1000, 10000, 100000}) rows.push_back(synthetic_row(n, 2.0 * std::log(n) + 1.0));
  CHECK_THAT(crn::fit_slope(rows, crn::Abscissa::LogN), WithinAbs(2.0, 1e-12));
  rows.clear();
  for (const std::int64_t n : {100, 1000, 10000, 100000})
    rows.push_back(synthetic_row(n, 3.0 * std::log(std::log(n)) - 0.5));
  CHECK_THAT(crn::fit_slope(rows, crn::Abscissa::LogLogN), WithinAbs(3.0, 1e-12));
  rows.pop_back();
  rows.pop_back();
  CHECK_THROWS(crn::fit_slope(rows, crn::Abscissa::LogN));
}

TEST_CASE("Kolmogorov-Smirnov distance", "[montecarlo]") {
  crn::StreamEngine e(crn::RandomStream{70, 0});
  std::vector<double> samples(100000);
  for (auto& x : samples) x = e.exponential();
  const auto expcdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  const double d = crn::ks_distance(samples, expcdf);
  CHECK(d < 1.63 / std::sqrt(1e5));
  CHECK_THAT(crn::ks_critical_value(100000, 0.01), WithinAbs(1.6276 / std::sqrt(1e5), 1e-5));

  CHECK(crn::ks_distance(std::vector<double>(1000, 0.7), expcdf) >= 0.5);

  std::vector<double> scaled = samples;
  for (auto& x : scaled) x = 3.0 * x * x;
  CHECK_THAT(crn::ks_distance(scaled, [&](double y) { return expcdf(std::sqrt(y / 3.0)); }), WithinAbs(d, 1e-12));
}
