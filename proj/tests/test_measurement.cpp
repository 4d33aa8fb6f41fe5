#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "infodist/measurement.hpp"

using Catch::Matchers::WithinAbs;
using namespace infodist;

namespace {

Vec random_descending(std::mt19937_64& rng, int d, double lo = 0.02,
                      double hi = 0.98) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(static_cast<size_t>(d));
  for (auto& x : v) x = u(rng);
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

}  // namespace

TEST_CASE("construction validates the singular-value vector") {
  REQUIRE_THROWS_AS(Measurement({0.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(Measurement({0.5, 0.7}), std::invalid_argument);
  REQUIRE_THROWS_AS(Measurement({0.5, -0.1}), std::invalid_argument);
  REQUIRE_THROWS_AS(Measurement({1.2, 0.1}), std::invalid_argument);
  REQUIRE_THROWS_AS(Measurement({0.0, 0.0}), std::invalid_argument);

  SECTION("tiny numerical spill is repaired, not rejected") {
    const Measurement m({1.0 + 5e-10, 0.5, -5e-13});
    CHECK(m.front() == 1.0);
    CHECK(m.back() == 0.0);
  }
}

TEST_CASE("canonicalize sorts, clamps, and rescales") {
  const Measurement m = canonicalize({0.4, 0.8, 0.0, 0.7});
  CHECK(m.lambdas() == Vec{0.8, 0.7, 0.4, 0.0});

  SECTION("rescaling pins the top entry to exactly 1") {
    const Measurement r = canonicalize({1.6, 0.8, 0.4}, true);
    CHECK(r.front() == 1.0);
    CHECK_THAT(r.lambda(1), WithinAbs(0.5, 1e-15));
    CHECK_THAT(r.lambda(2), WithinAbs(0.25, 1e-15));
  }
  SECTION("oversized entries are rejected without the rescale flag") {
    REQUIRE_THROWS_AS(canonicalize({1.5, 0.2}), std::invalid_argument);
    REQUIRE_THROWS_AS(canonicalize({0.0, 0.0}, true), std::invalid_argument);
  }
}

TEST_CASE("flat and two-block families") {
  CHECK(family_p(4, 2).lambdas() == Vec{1.0, 1.0, 0.0, 0.0});
  CHECK(family_p(3, 3, 0.5).lambdas() == Vec{0.5, 0.5, 0.5});
  CHECK(family_m(4, 1, 3, 0.5).lambdas() == Vec{1.0, 0.5, 0.5, 0.5});
  CHECK(family_m(5, 2, 2, 0.5, 0.5).lambdas() ==
        Vec{0.5, 0.5, 0.25, 0.25, 0.0});
  REQUIRE_THROWS_AS(family_p(4, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(family_p(4, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(family_m(4, 2, 3, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(family_m(4, 1, 2, 1.0), std::invalid_argument);
}

TEST_CASE("metric anchor values") {
  const Measurement m({0.8, 0.7, 0.4, 0.0});
  const auto mo = moments(m);
  CHECK_THAT(mo.sigma_sq, WithinAbs(1.29, 1e-15));
  CHECK_THAT(mo.tau, WithinAbs(1.9, 1e-15));
  const auto mt = metrics(m);
  CHECK_THAT(mt.g, WithinAbs(0.2992248062015504, 1e-15));
  CHECK_THAT(mt.f, WithinAbs(0.75968992248062006, 1e-15));
  CHECK(mt.r == 0.0);
  CHECK_THAT(outcome_probability(m), WithinAbs(0.3225, 1e-15));

  SECTION("extreme members") {
    const auto proj = metrics(family_p(2, 1));  // projective, d = 2
    CHECK_THAT(proj.g, WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(proj.f, WithinAbs(2.0 / 3.0, 1e-15));
    CHECK(proj.r == 0.0);

    const auto rank1 = metrics(family_p(4, 1));  // projective, d = 4
    CHECK_THAT(rank1.g, WithinAbs(0.4, 1e-15));
    CHECK_THAT(rank1.f, WithinAbs(0.4, 1e-15));
    CHECK(rank1.r == 0.0);

    const auto id4 = metrics(family_p(4, 4));  // identity, d = 4
    CHECK_THAT(id4.g, WithinAbs(0.25, 1e-15));
    CHECK_THAT(id4.f, WithinAbs(1.0, 1e-15));
    CHECK_THAT(id4.r, WithinAbs(1.0, 1e-15));
    CHECK_THAT(outcome_probability(family_p(4, 4)), WithinAbs(1.0, 1e-15));
  }
}

TEST_CASE("metric bounds and invariances on random vectors") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    const Vec v = random_descending(rng, d);
    const Measurement m(v);
    const auto mt = metrics(m);
    const double d1 = d + 1.0;

    CHECK(mt.g > 1.0 / d1);
    CHECK(mt.g <= 2.0 / d1 + 1e-15);
    CHECK(mt.f > 1.0 / d1);
    CHECK(mt.f <= 1.0 + 1e-15);
    CHECK(mt.r >= 0.0);
    CHECK(mt.r <= 1.0 + 1e-15);
    CHECK(outcome_probability(m) <= 1.0 + 1e-15);

    // Scaling every entry by a constant leaves all three metrics unchanged.
    for (double c : {0.1, 0.5, 0.99}) {
      Vec w(v);
      for (auto& x : w) x *= c;
      const auto ms = metrics(Measurement(w));
      CHECK_THAT(ms.g, WithinAbs(mt.g, 1e-12));
      CHECK_THAT(ms.f, WithinAbs(mt.f, 1e-12));
      CHECK_THAT(ms.r, WithinAbs(mt.r, 1e-12));
    }

    Vec shuffled(v);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(canonicalize(shuffled).lambdas() == v);
  }
}

TEST_CASE("degeneracy profile counts ties at relative tolerance") {
  auto prof = degeneracy_profile(Measurement({0.8, 0.7, 0.4, 0.0}));
  CHECK(prof.n1 == 1);
  CHECK(prof.nd == 1);
  CHECK(prof.n0 == 1);

  prof = degeneracy_profile(Measurement({1.0, 1.0, 0.5, 0.5}));
  CHECK(prof.n1 == 2);
  CHECK(prof.nd == 2);
  CHECK(prof.n0 == 0);

  prof = degeneracy_profile(Measurement({1.0, 1e-10, 0.0}));
  CHECK(prof.n1 == 1);
  CHECK(prof.nd == 2);
  CHECK(prof.n0 == 2);

  SECTION("the tie threshold scales with lambda_1") {
    CHECK(degeneracy_profile(Measurement({0.5, 0.5 - 1e-10, 0.3})).n1 == 2);
    CHECK(degeneracy_profile(Measurement({0.5, 0.5 - 1e-9, 0.3})).n1 == 1);
  }
}

TEST_CASE("text round trip") {
  const Vec v = parse_lambda_text("0.8,0.7,0.4,0");
  CHECK(v == Vec{0.8, 0.7, 0.4, 0.0});
  CHECK(parse_lambda_text(lambda_text(v)) == v);
  CHECK(format_g17(0.1) == "0.10000000000000001");

  REQUIRE_THROWS_AS(parse_lambda_text(""), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_lambda_text("0.8,,0.4"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_lambda_text("abc"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_lambda_text("0.5x,0.2"), std::invalid_argument);
}
