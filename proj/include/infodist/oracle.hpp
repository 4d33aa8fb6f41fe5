#ifndef INFODIST_ORACLE_HPP
#define INFODIST_ORACLE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "infodist/correlation.hpp"
#include "infodist/geometry.hpp"
#include "infodist/measurement.hpp"
#include "infodist/rng.hpp"

namespace infodist {

// Independent numerical ground truth for the closed forms. Everything here
// avoids the analytic shortcuts under test: the Monte Carlo estimators
// integrate over Haar-random pure states directly, the gradients come from
// central differences, and the steepest directions from blind search.

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

struct McMetrics {
  McEstimate p, g, f, r;
};

// Haar-averaged estimates of outcome probability and the three metrics. A
// Haar state in the outcome's eigenbasis is a normalized vector of complex
// standard Gaussians; the conditional outcome probability on it is
// sum_i lambda_i^2 |psi_i|^2. G and F are ratio estimators (posterior means
// against the outcome probability), so their errors use the delta method.
inline McMetrics haar_mc_metrics(const Measurement& m, long samples,
                                 std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("haar_mc_metrics: samples < 2");
  const Vec& lam = m.lambdas();
  const int d = m.d();
  double sw = 0, sww = 0;        // outcome probability terms
  double sg = 0, sgg = 0, sgw = 0;  // estimation numerator terms
  double sf = 0, sff = 0, sfw = 0;  // fidelity numerator terms
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> prob(static_cast<size_t>(d));
  long done = 0;
  for (long chunk = 0; done < samples; ++chunk) {
    auto rng = chunk_rng(seed, 10, static_cast<std::uint64_t>(chunk));
    const long chunk_end = std::min<long>(samples, (chunk + 1) * kChunkSamples);
    for (; done < chunk_end; ++done) {
      double norm_sq = 0.0;
      for (int i = 0; i < d; ++i) {
        const double re = gauss(rng), im = gauss(rng);
        prob[i] = re * re + im * im;
        norm_sq += prob[i];
      }
      double w = 0.0, amp = 0.0;
      for (int i = 0; i < d; ++i) {
        prob[i] /= norm_sq;  // |psi_i|^2 of a Haar state
        w += lam[i] * lam[i] * prob[i];
        amp += lam[i] * prob[i];
      }
      const double xg = w * prob[0];
      const double xf = amp * amp;
      sw += w;
      sww += w * w;
      sg += xg;
      sgg += xg * xg;
      sgw += xg * w;
      sf += xf;
      sff += xf * xf;
      sfw += xf * w;
    }
  }
  const double n = static_cast<double>(samples);
  const double wbar = sw / n;
  auto ratio = [&](double sx, double sxx, double sxw) {
    McEstimate e;
    e.samples = samples;
    e.value = sx / sw;
    // Var(x - theta w) / (n wbar^2), the first-order variance of the ratio.
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vw = sww / n - wbar * wbar;
    const double cxw = sxw / n - (sx / n) * wbar;
    const double var =
        (vx - 2.0 * e.value * cxw + e.value * e.value * vw) / (n * wbar * wbar);
    e.std_error = std::sqrt(std::max(0.0, var));
    return e;
  };
  McMetrics out;
  out.p.samples = samples;
  out.p.value = wbar;
  out.p.std_error =
      std::sqrt(std::max(0.0, (sww / n - wbar * wbar) / n));
  out.g = ratio(sg, sgg, sgw);
  out.f = ratio(sf, sff, sfw);
  out.r.samples = samples;
  out.r.value = lam.back() * lam.back() / wbar;
  out.r.std_error =
      lam.back() * lam.back() * out.p.std_error / (wbar * wbar);
  return out;
}

// Central-difference gradients of (G, F, R). Only valid on measurements whose
// entries are separated (and away from 0 and 1) by more than the stencil can
// reach, since the closed forms are only smooth there.
inline std::array<Vec, 3> finite_difference_gradients(const Measurement& m,
                                                      double h = 1e-6) {
  if (!(h > 0.0)) throw std::invalid_argument("finite differences: h <= 0");
  const Vec& lam = m.lambdas();
  const int d = m.d();
  for (int i = 0; i + 1 < d; ++i)
    if (lam[i] - lam[i + 1] <= 10.0 * h)
      throw std::invalid_argument(
          "finite differences need a smooth point (gaps > 10h)");
  if (lam.back() <= 10.0 * h || lam.front() >= 1.0 - 10.0 * h)
    throw std::invalid_argument(
        "finite differences need a smooth point (gaps > 10h)");
  std::array<Vec, 3> out{Vec(lam.size()), Vec(lam.size()), Vec(lam.size())};
  for (int i = 0; i < d; ++i) {
    Vec hi(lam), lo(lam);
    hi[i] += h;
    lo[i] -= h;
    const auto mh = metrics_raw(hi);
    const auto ml = metrics_raw(lo);
    out[0][i] = (mh.g - ml.g) / (2.0 * h);
    out[1][i] = (mh.f - ml.f) / (2.0 * h);
    out[2][i] = (mh.r - ml.r) / (2.0 * h);
  }
  return out;
}

enum class Target { G, F, R };

// Best admissible unit direction for raising (ascent) or lowering the target
// metric at first order, found by blind search over random admissible
// directions. Returns the winning direction; ties broken by first hit.
inline Vec brute_force_steepest(const Measurement& m, Target target,
                                bool ascent, long dirs, std::uint64_t seed) {
  if (dirs < 1) throw std::invalid_argument("brute_force_steepest: dirs < 1");
  const auto prof = degeneracy_profile(m);
  const auto gs = gradients(m);
  const Vec& grad = (target == Target::G)   ? gs.grad_g
                    : (target == Target::F) ? gs.grad_f
                                            : gs.grad_r;
  Vec best;
  double best_change = ascent ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
  long done = 0;
  for (long chunk = 0; done < dirs; ++chunk) {
    auto rng = chunk_rng(seed, 11, static_cast<std::uint64_t>(chunk));
    const long chunk_end = std::min<long>(dirs, (chunk + 1) * kChunkSamples);
    for (; done < chunk_end; ++done) {
      Vec e = sphere_sample(rng, m.d());
      if (!admissible(e, m, prof, Pair::GR)) continue;  // full constraint set
      const double change = detail::dot(e, grad);
      if (ascent ? (change > best_change) : (change < best_change)) {
        best_change = change;
        best = std::move(e);
      }
    }
  }
  if (best.empty())
    throw RejectionBudgetError(
        "brute_force_steepest found no admissible direction");
  return best;
}

// Exact membership test for the attainable-change region. The region is
// star-shaped around the origin, so a point is inside iff its radius along
// its own direction does not exceed the boundary radius there; boundary
// pieces are the four quarter arcs (conic sections in compressed
// coordinates, or segments/points at anomalies).
class GammaRegion {
 public:
  GammaRegion(const Measurement& m, Pair pair)
      : arcs_(gamma_boundary(m, pair, 257)) {}

  bool contains(double x, double y, double slack = 1e-9) const {
    const double radius = std::hypot(x, y);
    if (radius <= slack) return true;
    double bound = 0.0;
    for (const auto& arc : arcs_) {
      switch (arc.kind) {
        case ArcKind::Point:
          break;
        case ArcKind::Line:
          bound = std::max(bound, ray_segment(x, y, arc.start, arc.end));
          break;
        case ArcKind::EllipseArc: {
          const double a0 = std::atan2(arc.start[1], arc.start[0]);
          const double a1 = std::atan2(arc.end[1], arc.end[0]);
          const double th = std::atan2(y, x);
          if (!angle_between(th, a0, a1)) break;
          const double ux = (x / radius) / arc.compress_x;
          const double uy = (y / radius) / arc.compress_y;
          const double q =
              ux * ux + uy * uy - 2.0 * arc.coefficient * ux * uy;
          const double rhs = 1.0 - arc.coefficient * arc.coefficient;
          if (q > 0.0 && rhs > 0.0)
            bound = std::max(bound, std::sqrt(rhs / q));
          break;
        }
      }
    }
    if (radius <= bound + slack) return true;
    return boundary_distance(x, y) <= slack;
  }

 private:
  static bool angle_between(double th, double a0, double a1) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    double span = a1 - a0;
    while (span < 0.0) span += kTwoPi;
    double off = th - a0;
    while (off < 0.0) off += kTwoPi;
    return off <= span + 1e-12;
  }

  // Distance from the origin along direction (x, y) to segment [A, B];
  // 0 when the ray misses it.
  static double ray_segment(double x, double y, const std::array<double, 2>& a,
                            const std::array<double, 2>& b) {
    const double rnorm = std::hypot(x, y);
    const double ux = x / rnorm, uy = y / rnorm;
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double denom = ux * ey - uy * ex;
    if (std::abs(denom) < 1e-15) {
      // Ray parallel to the segment: reachable only if collinear.
      if (std::abs(a[0] * uy - a[1] * ux) > 1e-12) return 0.0;
      const double t0 = a[0] * ux + a[1] * uy;
      const double t1 = b[0] * ux + b[1] * uy;
      return std::max(0.0, std::max(t0, t1));
    }
    const double s = (a[0] * uy - a[1] * ux) / denom;
    if (s < -1e-12 || s > 1.0 + 1e-12) return 0.0;
    const double t = (a[0] * ey - a[1] * ex) / denom;
    return std::max(0.0, t);
  }

  double boundary_distance(double x, double y) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& arc : arcs_) {
      for (size_t i = 0; i + 1 < arc.polyline.size(); ++i) {
        const auto& p = arc.polyline[i];
        const auto& q = arc.polyline[i + 1];
        const double ex = q[0] - p[0], ey = q[1] - p[1];
        const double len_sq = ex * ex + ey * ey;
        double t = 0.0;
        if (len_sq > 0.0)
          t = std::clamp(((x - p[0]) * ex + (y - p[1]) * ey) / len_sq, 0.0, 1.0);
        best = std::min(best, std::hypot(x - (p[0] + t * ex),
                                         y - (p[1] + t * ey)));
      }
    }
    return best;
  }

  std::vector<RegionArc> arcs_;
};

struct MembershipReport {
  long points_checked = 0;
  long outside_gamma = 0;
  long vertices_checked = 0;
  long vertices_outside_sigma = 0;
};

// Drives scatter sampling against the boundary: every sampled change point
// must sit inside the Gamma region, and every Gamma polyline vertex inside
// the Sigma envelope.
inline MembershipReport region_membership_check(const Measurement& m,
                                                Pair pair, long points,
                                                std::uint64_t seed,
                                                double slack = 1e-9,
                                                double eps_norm = 0.01) {
  MembershipReport report;
  const GammaRegion region(m, pair);
  const auto pts =
      scatter_dataset(m, pair, static_cast<int>(points), eps_norm, seed);
  for (const auto& p : pts) {
    ++report.points_checked;
    if (!region.contains(p.dg, p.dd, slack)) ++report.outside_gamma;
  }
  const auto as = angle_set(m);
  const double c = (pair == Pair::GF) ? as.c_gf : as.c_gr;
  const double rhs = 1.0 - c * c;
  for (const auto& arc : gamma_boundary(m, pair)) {
    for (const auto& v : arc.polyline) {
      ++report.vertices_checked;
      const double q = v[0] * v[0] + v[1] * v[1] - 2.0 * c * v[0] * v[1];
      if (q > rhs + slack) ++report.vertices_outside_sigma;
    }
  }
  return report;
}

}  // namespace infodist

#endif
