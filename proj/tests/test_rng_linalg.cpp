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


#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "catch_amalgamated.hpp"
#include "crn/linalg.hpp"
#include "crn/montecarlo.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Determinant of a 3x3 complex matrix by cofactor expansion along row 0.
crn::Complex det3(const crn::ComplexMatrix& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

}  // namespace

TEST_CASE("philox known-answer vectors", "[rng]") {
  using crn::detail::philox4x32_10;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == crn::detail::PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        crn::detail::PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        crn::detail::PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of (seed, id)", "[rng]") {
  const crn::RandomStream s{42, 7};
  crn::StreamEngine a(s), b(s), c(s.derive(1)), d(crn::RandomStream{43, 7});
  std::vector<std::uint32_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  CHECK(s.derive(1) == s.derive(1));
  CHECK(s.derive(1) != s.derive(2));
  CHECK(s.derive(1).derive(2) != s.derive(2).derive(1));
}

TEST_CASE("uniform draws stay in range", "[rng]") {
  crn::StreamEngine e(crn::RandomStream{3, 0});
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const double u = e.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double p = e.uniform_positive();
    REQUIRE(p > 0.0);
    REQUIRE(p <= 1.0);
    const auto k = e.uniform_below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  // Chi-square with 6 degrees of freedom; 22.46 is the 0.001 quantile.
  double chi2 = 0.0;
  for (const int c : counts) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  CHECK(chi2 < 22.46);
}

TEST_CASE("complex normal moments", "[rng]") {
  const auto z = crn::sample_cn_matrix(crn::RandomStream{11, 0}, 1000, 1000);
  CHECK_THAT(z.cwiseAbs2().mean(), WithinAbs(1.0, 0.005));
  CHECK_THAT(z.real().mean(), WithinAbs(0.0, 0.005));
  CHECK_THAT(z.imag().mean(), WithinAbs(0.0, 0.005));
  CHECK_THAT(z.real().cwiseAbs2().mean(), WithinAbs(0.5, 0.005));
  CHECK_THAT((z.real().array() * z.imag().array()).mean(), WithinAbs(0.0, 0.005));
}

TEST_CASE("cn matrix shapes", "[linalg]") {
  const auto empty = crn::sample_cn_matrix(crn::RandomStream{1, 0}, 0, 3);
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 3);
  CHECK_THROWS_AS(crn::sample_cn_matrix(crn::RandomStream{1, 0}, -1, 3), std::invalid_argument);
  // Column-major fill: a taller matrix extends each column, so only column 0 prefixes agree.
  const auto a = crn::sample_cn_matrix(crn::RandomStream{1, 0}, 3, 2);
  const auto b = crn::sample_cn_matrix(crn::RandomStream{1, 0}, 6, 1);
  CHECK(a.col(0) == b.block(0, 0, 3, 1));
  CHECK(a.col(1) == b.block(3, 0, 3, 1));
}

TEST_CASE("haar beams are unitary", "[linalg]") {
  const auto one = crn::sample_haar_beams(crn::RandomStream{5, 0}, 1);
  CHECK_THAT(std::abs(one(0, 0)), WithinAbs(1.0, 1e-15));
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto phi = crn::sample_haar_beams(crn::RandomStream{5, s}, 4);
    CHECK((phi.adjoint() * phi - crn::ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(crn::sample_haar_beams(crn::RandomStream{5, 0}, 0), std::invalid_argument);
}

TEST_CASE("haar columns are isotropic", "[linalg]") {
  constexpr int m = 4;
  constexpr std::size_t draws = 100000;
  // Fixed unit h: |h^H phi_j|^2 ~ Beta(1, m - 1).
  crn::ComplexMatrix h = crn::ComplexMatrix::Zero(m, 1);
  h(0, 0) = crn::Complex(0.6, 0.0);
  h(2, 0) = crn::Complex(0.0, 0.8);
  std::vector<double> fixed, random;
  fixed.reserve(draws);
  random.reserve(draws);
  for (std::size_t t = 0; t < draws; ++t) {
    const crn::RandomStream s{77, t};
    const auto phi = crn::sample_haar_beams(s, m);
    fixed.push_back(std::norm((h.adjoint() * phi.col(static_cast<Eigen::Index>(t % m)))(0, 0)));
    // CN(0, I) h independent of phi: |h^H phi_j|^2 ~ Exp(1).
    const auto g = crn::sample_cn_matrix(s.derive(99), m, 1);
    random.push_back(std::norm((g.adjoint() * phi.col(0))(0, 0)));
  }
  const double crit = crn::ks_critical_value(draws, 0.01);
  CHECK(crn::ks_distance(fixed, [](double x) { return 1.0 - std::pow(1.0 - std::clamp(x, 0.0, 1.0), m - 1); }) < crit);
  CHECK(crn::ks_distance(random, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); }) < crit);
}

TEST_CASE("logdet of simple matrices", "[linalg]") {
  CHECK_THAT(crn::logdet_hpd(crn::HermitianMatrix::Identity(4, 4)), WithinAbs(0.0, 1e-15));
  crn::HermitianMatrix d = crn::HermitianMatrix::Identity(2, 2) * 2.0;
  CHECK_THAT(crn::logdet_hpd(d), WithinAbs(2.0 * std::log(2.0), 1e-14));
  CHECK(crn::logdet_hpd(crn::HermitianMatrix(0, 0)) == 0.0);
  crn::HermitianMatrix neg = -crn::HermitianMatrix::Identity(2, 2);
  CHECK_THROWS_AS(crn::logdet_hpd(neg), crn::NotPositiveDefinite);
  CHECK_THROWS_AS(crn::logdet_hpd(crn::HermitianMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("logdet matches the cofactor determinant", "[linalg]") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto g = crn::sample_cn_matrix(crn::RandomStream{8, s}, 3, 3);
    const crn::HermitianMatrix a = crn::HermitianMatrix::Identity(3, 3) + g * g.adjoint();
    const crn::Complex det = det3(a);
    CHECK_THAT(det.imag(), WithinAbs(0.0, 1e-9 * std::abs(det)));
    CHECK_THAT(crn::logdet_hpd(a), WithinAbs(std::log(det.real()), 1e-9));
  }
}

TEST_CASE("logdet satisfies Sylvester's identity", "[linalg]") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = crn::sample_cn_matrix(crn::RandomStream{9, s}, 4, 2);
    const double lhs = crn::logdet_hpd(crn::HermitianMatrix::Identity(4, 4) + 3.0 * a * a.adjoint());
    const double rhs = crn::logdet_hpd(crn::HermitianMatrix::Identity(2, 2) + 3.0 * a.adjoint() * a);
    CHECK_THAT(lhs, WithinAbs(rhs, 1e-10));
  }
}

TEST_CASE("logdet is additive over diagonal blocks", "[linalg]") {
  const auto x = crn::sample_cn_matrix(crn::RandomStream{10, 0}, 2, 2);
  const auto y = crn::sample_cn_matrix(crn::RandomStream{10, 1}, 3, 3);
  const crn::HermitianMatrix a = crn::HermitianMatrix::Identity(2, 2) + x * x.adjoint();
  const crn::HermitianMatrix b = crn::HermitianMatrix::Identity(3, 3) + y * y.adjoint();
  crn::HermitianMatrix block = crn::HermitianMatrix::Zero(5, 5);
  block.topLeftCorner(2, 2) = a;
  block.bottomRightCorner(3, 3) = b;
  CHECK_THAT(crn::logdet_hpd(block), WithinAbs(crn::logdet_hpd(a) + crn::logdet_hpd(b), 1e-12));
}

TEST_CASE("diag quadratic matches a triple loop", "[linalg]") {
  const auto g = crn::sample_cn_matrix(crn::RandomStream{12, 0}, 2, 3);
  crn::HermitianMatrix q = crn::HermitianMatrix::Zero(3, 3);
  q(0, 0) = 0.5;
  q(1, 1) = 2.0;
  q(2, 2) = 1.25;
  const auto d = crn::diag_quadratic(g, q);
  for (Eigen::Index l = 0; l < 2; ++l) {
    crn::Complex sum = 0.0;
    for (Eigen::Index a = 0; a < 3; ++a)
      for (Eigen::Index b = 0; b < 3; ++b) sum += g(l, a) * q(a, b) * std::conj(g(l, b));
    CHECK_THAT(d(l), WithinAbs(sum.real(), 1e-12));
  }
  CHECK_THROWS_AS(crn::diag_quadratic(g, crn::HermitianMatrix::Identity(2, 2)), std::invalid_argument);
}
