#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "infodist/oracle.hpp"

using Catch::Matchers::WithinAbs;
using namespace infodist;

namespace {

Measurement random_smooth(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (;;) {
    Vec v(static_cast<size_t>(d));
    for (auto& x : v) x = u(rng);
    std::sort(v.begin(), v.end(), std::greater<double>());
    bool ok = true;
    for (size_t i = 0; i + 1 < v.size(); ++i)
      if (v[i] - v[i + 1] < 5e-3) ok = false;
    if (ok) return Measurement(std::move(v));
  }
}

double rel_vec_err(const Vec& got, const Vec& want) {
  double diff = 0.0, mag = 0.0;
  for (size_t i = 0; i < got.size(); ++i) {
    diff += (got[i] - want[i]) * (got[i] - want[i]);
    mag += want[i] * want[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(mag), 1e-12);
}

}  // namespace

TEST_CASE("state sampling reproduces the closed forms") {
  const Vec cases[] = {{0.8, 0.7, 0.4, 0.0},
                       {0.9, 0.6, 0.35, 0.145},
                       {1.0, 0.5, 0.5}};
  for (const auto& lam : cases) {
    CAPTURE(lam);
    const Measurement m(lam);
    const auto mt = metrics(m);
    const double p = outcome_probability(m);
    const auto mc = haar_mc_metrics(m, 100000, 21);

    CHECK(std::abs(mc.p.value - p) <= 5.0 * mc.p.std_error);
    CHECK(std::abs(mc.g.value - mt.g) <= 5.0 * mc.g.std_error);
    CHECK(std::abs(mc.f.value - mt.f) <= 5.0 * mc.f.std_error);
    CHECK(std::abs(mc.r.value - mt.r) <= 5.0 * mc.r.std_error + 1e-12);
    CHECK(mc.p.std_error > 0.0);
    CHECK(mc.p.std_error < 1e-2);
    CHECK(mc.p.samples == 100000);
  }
  REQUIRE_THROWS_AS(haar_mc_metrics(Measurement({0.8, 0.5}), 1, 1),
                    std::invalid_argument);
}

TEST_CASE("degenerate sampling cases") {
  SECTION("identity measurement has a sure outcome") {
    const auto mc = haar_mc_metrics(family_p(4, 4), 20000, 3);
    CHECK_THAT(mc.p.value, WithinAbs(1.0, 1e-12));
    CHECK(mc.p.std_error <= 1e-12);
    CHECK_THAT(mc.f.value, WithinAbs(1.0, 1e-12));
    CHECK(mc.f.std_error <= 1e-12);
    CHECK_THAT(mc.r.value, WithinAbs(1.0, 1e-12));
    CHECK(std::abs(mc.g.value - 0.25) <= 5.0 * mc.g.std_error);
    CHECK(mc.g.std_error > 0.0);
  }
  SECTION("a zero bottom entry kills reversibility exactly") {
    const auto mc = haar_mc_metrics(Measurement({0.8, 0.7, 0.4, 0.0}), 5000, 3);
    CHECK(mc.r.value == 0.0);
    CHECK(mc.r.std_error == 0.0);
  }
  SECTION("runs are reproducible from the seed") {
    const Measurement m({0.9, 0.6, 0.35, 0.145});
    const auto a = haar_mc_metrics(m, 5000, 77);
    const auto b = haar_mc_metrics(m, 5000, 77);
    const auto c = haar_mc_metrics(m, 5000, 78);
    CHECK(a.p.value == b.p.value);
    CHECK(a.g.value == b.g.value);
    CHECK(a.f.std_error == b.f.std_error);
    CHECK(a.p.value != c.p.value);
  }
}

TEST_CASE("finite differences confirm the analytic gradients") {
  std::mt19937_64 rng(31);
  for (int d : {2, 3, 4, 6}) {
    for (int t = 0; t < 25; ++t) {
      const auto m = random_smooth(rng, d);
      CAPTURE(m.lambdas());
      const auto fd = finite_difference_gradients(m);
      const auto gs = gradients(m);
      CHECK(rel_vec_err(fd[0], gs.grad_g) <= 1e-6);
      CHECK(rel_vec_err(fd[1], gs.grad_f) <= 1e-6);
      CHECK(rel_vec_err(fd[2], gs.grad_r) <= 1e-6);
    }
  }

  SECTION("the stencil refuses non-smooth points") {
    REQUIRE_THROWS_AS(finite_difference_gradients(Measurement({0.5, 0.5, 0.3})),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(finite_difference_gradients(Measurement({0.5, 0.4, 1e-7})),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        finite_difference_gradients(Measurement({1.0, 0.5, 0.2})),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        finite_difference_gradients(Measurement({0.8, 0.5, 0.2}), 0.0),
        std::invalid_argument);
  }
}

TEST_CASE("blind search never beats the folded steepest direction") {
  const Measurement m({1.0, 0.5, 0.5});
  const auto prof = degeneracy_profile(m);
  const auto ds = direction_set(m, prof);
  const auto ang = boundary_angles(m, prof);

  SECTION("reversibility ascent folds across the bottom tie") {
    const Vec win = brute_force_steepest(m, Target::R, true, 100000, 13);
    const double change = detail::dot(win, ds.grad_r);
    CHECK(change <= ds.mag_r * ang.cos_theta_r + 1e-9);
    CHECK(change >= ds.mag_r * ang.cos_theta_r * (1.0 - 1e-3));
    CHECK(detail::dot(win, ds.r_plus) >= 0.999);
    // The winner stays measurably away from the raw gradient direction.
    CHECK(detail::dot(win, ds.r) <= ang.cos_theta_r + 1e-3);
  }
  SECTION("estimation and fidelity ascents are unconstrained here") {
    const Vec wg = brute_force_steepest(m, Target::G, true, 20000, 13);
    CHECK(detail::dot(wg, ds.grad_g) <= ds.mag_g + 1e-9);
    CHECK(detail::dot(wg, ds.g_plus) >= 0.99);
    const Vec wf = brute_force_steepest(m, Target::F, true, 20000, 13);
    CHECK(detail::dot(wf, ds.grad_f) <= ds.mag_f + 1e-9);
    CHECK(detail::dot(wf, ds.f_plus) >= 0.99);
  }
  SECTION("reversibility descent is the reversed direction") {
    const Vec win = brute_force_steepest(m, Target::R, false, 100000, 13);
    const double change = detail::dot(win, ds.grad_r);
    CHECK(change >= -ds.mag_r - 1e-9);
    CHECK(change <= -ds.mag_r * (1.0 - 1e-3));
  }
  REQUIRE_THROWS_AS(brute_force_steepest(m, Target::G, true, 0, 1),
                    std::invalid_argument);
}

TEST_CASE("sampled changes stay inside the attainable region") {
  for (const auto& preset : figure_presets()) {
    CAPTURE(preset.name);
    const auto report =
        region_membership_check(preset.m, preset.pair, 2000, 19);
    CHECK(report.points_checked == 2000);
    CHECK(report.outside_gamma == 0);
    CHECK(report.vertices_checked == 4 * 256);
    CHECK(report.vertices_outside_sigma == 0);
  }
}

TEST_CASE("explicit membership probes") {
  const auto& preset = preset_by_name("gf-smooth");
  const GammaRegion region(preset.m, preset.pair);

  CHECK(region.contains(0.0, 0.0));
  CHECK_FALSE(region.contains(2.0, 0.0));
  CHECK_FALSE(region.contains(0.0, -2.0));

  const auto arcs = gamma_boundary(preset.m, preset.pair, 33);
  for (const auto& arc : arcs) {
    for (const auto& v : arc.polyline) {
      CHECK(region.contains(0.999 * v[0], 0.999 * v[1]));
      CHECK(region.contains(v[0], v[1]));
      CHECK_FALSE(region.contains(1.05 * v[0], 1.05 * v[1]));
    }
  }
}

TEST_CASE("scatter sampling reaches the steep corner") {
  const auto& preset = preset_by_name("gf-smooth");
  const auto pts = scatter_dataset(preset.m, preset.pair, 2000, 0.01, 23);
  double max_dg = -2.0;
  for (const auto& p : pts) max_dg = std::max(max_dg, p.dg);
  CHECK(max_dg >= 0.8);
}
