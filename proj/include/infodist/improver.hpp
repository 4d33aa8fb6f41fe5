#ifndef INFODIST_IMPROVER_HPP
#define INFODIST_IMPROVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "infodist/correlation.hpp"
#include "infodist/geometry.hpp"
#include "infodist/measurement.hpp"
#include "infodist/rng.hpp"

namespace infodist {

// How much room the simultaneous-ascent step has: 1 + c(++) for the pair,
// in [0, 2]. Zero exactly on the optimal family; the flat points p_1 and p_d
// also evaluate to 1 under the 0-convention but cannot actually be improved
// (see degenerate_extremum).
inline double improvability(const Measurement& m, Pair pair) {
  const auto as = angle_set(m);
  return 1.0 + ((pair == Pair::GF) ? as.c_gf_pp : as.c_gr_pp);
}

inline bool degenerate_extremum(const Measurement& m,
                                const DegeneracyProfile& prof) {
  return prof.n0 == m.d() - 1 || prof.n1 == m.d();
}

struct StepEvents {
  bool renormalized = false;
  bool boundary_landed = false;
  bool converged = false;
  bool degenerate = false;  // converged at p_1/p_d rather than at an optimum
};

// One row of an improvement trajectory: the state after `iteration` steps.
struct TrajectoryRecord {
  int iteration;
  Vec lambdas;
  double metric_g;
  double metric_d;  // F for the GF pair, R for GR
  double improvability;
  int nd;
  StepEvents events;
};

namespace detail {

inline TrajectoryRecord snapshot(const Measurement& m, Pair pair,
                                 int iteration, StepEvents ev) {
  const auto mt = metrics(m);
  TrajectoryRecord rec;
  rec.iteration = iteration;
  rec.lambdas = m.lambdas();
  rec.metric_g = mt.g;
  rec.metric_d = (pair == Pair::GF) ? mt.f : mt.r;
  rec.improvability = improvability(m, pair);
  rec.nd = degeneracy_profile(m).nd;
  rec.events = ev;
  return rec;
}

}  // namespace detail

// One fixed-size step along the sum of the two steepest-ascent directions.
// For the GR pair a step that would push the entry above the bottom tie
// block below the block is shortened to land exactly on the tie (growing the
// block); any step that carries lambda_1 above 1 is renormalized back. The
// GF pair keeps order by re-sorting instead, which is the same projection
// expressed on an unconstrained bottom.
inline std::pair<Measurement, TrajectoryRecord> improvement_step(
    const Measurement& m, Pair pair, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("improvement_step: eps <= 0");
  const auto prof = degeneracy_profile(m);
  if (degenerate_extremum(m, prof)) {
    StepEvents ev;
    ev.converged = ev.degenerate = true;
    return {m, detail::snapshot(m, pair, 0, ev)};
  }
  const auto ds = direction_set(m, prof);
  const Vec& d_plus = (pair == Pair::GF) ? ds.f_plus : ds.r_plus;
  const int d = m.d();
  Vec dir(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) dir[i] = ds.g_plus[i] + d_plus[i];

  StepEvents ev;
  Vec next(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) next[i] = m.lambda(i) + eps * dir[i];

  if (pair == Pair::GR && prof.nd < d) {
    const int a = d - prof.nd - 1;  // entry just above the bottom block
    const int b = d - prof.nd;      // top of the block
    if (next[a] < next[b]) {
      const double eps_star = (m.lambda(a) - m.lambda(b)) / (dir[b] - dir[a]);
      for (int i = 0; i < d; ++i) next[i] = m.lambda(i) + eps_star * dir[i];
      next[a] = next[b];  // land exactly on the tie
      ev.boundary_landed = true;
    }
  }
  if (pair == Pair::GF) std::sort(next.begin(), next.end(), std::greater<double>());
  if (next[0] > 1.0) {
    const double inv = 1.0 / next[0];
    for (auto& x : next) x *= inv;
    next[0] = 1.0;
    ev.renormalized = true;
  }
  Measurement improved(std::move(next));
  auto rec = detail::snapshot(improved, pair, 0, ev);
  return {std::move(improved), std::move(rec)};
}

// Iterates improvement_step until the improvability falls to conv_tol, the
// walk hits a degenerate flat point, or max_iter steps have been taken.
// Record 0 is the starting state; the final record carries the converged
// event when a stop condition other than max_iter fired.
inline std::vector<TrajectoryRecord> improve(const Measurement& start,
                                             Pair pair, double eps,
                                             int max_iter = 100000,
                                             double conv_tol = 1e-8) {
  if (!(eps > 0.0)) throw std::invalid_argument("improve: eps <= 0");
  if (max_iter < 0) throw std::invalid_argument("improve: max_iter < 0");
  std::vector<TrajectoryRecord> records;
  records.push_back(detail::snapshot(start, pair, 0, StepEvents{}));
  Measurement m = start;
  for (int it = 1; it <= max_iter; ++it) {
    const auto prof = degeneracy_profile(m);
    if (degenerate_extremum(m, prof)) {
      records.back().events.converged = true;
      records.back().events.degenerate = true;
      return records;
    }
    if (records.back().improvability <= conv_tol) {
      records.back().events.converged = true;
      return records;
    }
    auto [next, rec] = improvement_step(m, pair, eps);
    rec.iteration = it;
    m = std::move(next);
    records.push_back(std::move(rec));
  }
  if (records.back().improvability <= conv_tol ||
      degenerate_extremum(m, degeneracy_profile(m))) {
    records.back().events.converged = true;
    if (degenerate_extremum(m, degeneracy_profile(m)))
      records.back().events.degenerate = true;
  }
  return records;
}

// Empirical check of the improvability-decrease law: any admissible
// perturbation that raises both paired metrics to first order must lower
// c(++). Probes that would change the bottom multiplicity are skipped for
// the GR pair (the law compares like with like there). Sampling continues
// until `qualifying` hypothesis-satisfying probes have been scored.
struct LawCheckReport {
  long probes = 0;  // raw directions drawn, qualifying or not
  int qualifying = 0;
  int violations = 0;
  double max_delta_c = -1.0;  // largest observed change among qualifying probes
};

inline LawCheckReport law_of_decrease_check(const Measurement& m, Pair pair,
                                            int qualifying, double probe_eps,
                                            std::uint64_t seed) {
  if (!(probe_eps > 0.0))
    throw std::invalid_argument("law_of_decrease_check: probe_eps <= 0");
  if (qualifying < 1)
    throw std::invalid_argument("law_of_decrease_check: qualifying < 1");
  const auto prof = degeneracy_profile(m);
  const bool flat = (prof.n1 + prof.n0 == m.d()) || prof.n1 == m.d();
  if (flat)
    throw std::invalid_argument(
        "law_of_decrease_check: flat measurements are out of scope");
  const auto ds = direction_set(m, prof);
  const Vec& grad_d = (pair == Pair::GF) ? ds.grad_f : ds.grad_r;
  const double c0 = (pair == Pair::GF) ? angle_set(m).c_gf_pp
                                       : angle_set(m).c_gr_pp;
  LawCheckReport report;
  const int d = m.d();
  const long budget = 10000L * qualifying;
  for (long chunk = 0; report.qualifying < qualifying; ++chunk) {
    auto rng = chunk_rng(seed, 4, static_cast<std::uint64_t>(chunk));
    const long chunk_end = (chunk + 1) * kChunkSamples;
    for (; report.probes < chunk_end; ++report.probes) {
      if (report.qualifying >= qualifying) break;
      if (report.probes >= budget)
        throw RejectionBudgetError(
            "law_of_decrease_check exhausted its probe budget");
      Vec e = sphere_sample(rng, d);
      if (!admissible(e, m, prof, pair)) continue;
      const double dgain = detail::dot(e, ds.grad_g);
      const double ddgain = detail::dot(e, grad_d);
      if (!(dgain > 0.0) || !(ddgain > 0.0)) continue;
      Vec probe(m.lambdas());
      for (int i = 0; i < d; ++i) probe[i] += probe_eps * e[i];
      std::sort(probe.begin(), probe.end(), std::greater<double>());
      Measurement moved(std::move(probe));
      if (pair == Pair::GR &&
          degeneracy_profile(moved).nd != prof.nd)
        continue;
      const auto as = angle_set(moved);
      const double c1 = (pair == Pair::GF) ? as.c_gf_pp : as.c_gr_pp;
      const double delta = c1 - c0;
      ++report.qualifying;
      if (delta >= 0.0) ++report.violations;
      report.max_delta_c = std::max(report.max_delta_c, delta);
    }
  }
  return report;
}

}  // namespace infodist

#endif
