#ifndef INFODIST_CORRELATION_HPP
#define INFODIST_CORRELATION_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "infodist/geometry.hpp"
#include "infodist/measurement.hpp"
#include "infodist/rng.hpp"

namespace infodist {

// Thrown when rejection sampling exhausts its attempt budget; the CLI maps
// this to its own exit code so callers can tell it apart from bad input.
struct RejectionBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A modification of the singular-value vector with its Euclidean length.
struct Perturbation {
  Vec eps;
  double norm;
};

// First-order metric changes of a unit perturbation, in units of the two
// gradient magnitudes: dg along the estimation direction, dd along the
// fidelity (GF) or reversibility (GR) direction.
struct ChangePoint {
  double dg;
  double dd;
};

// Admissibility of a modification direction: components at zero singular
// values may not point negative, top-tie components may not overtake the
// first, and (for the G-R pair, whose reversibility metric watches the
// bottom of the spectrum) bottom-tie components may not undercut the last.
inline bool admissible(const Vec& eps, const Measurement& m,
                       const DegeneracyProfile& prof, Pair pair,
                       double slack = 0.0) {
  const int d = m.d();
  for (int i = d - prof.n0; i < d; ++i)
    if (eps[i] < -slack) return false;
  for (int i = 1; i < prof.n1; ++i)
    if (eps[0] - eps[i] < -slack) return false;
  if (pair == Pair::GR) {
    for (int i = d - prof.nd; i < d - 1; ++i)
      if (eps[i] - eps[d - 1] < -slack) return false;
  }
  return true;
}

// Uniform admissible directions of length eps_norm, by rejection from the
// sphere. Chunked subseeds keep the result a pure function of (seed, count).
inline std::vector<Perturbation> sample_admissible(
    const Measurement& m, Pair pair, double eps_norm, int count,
    std::uint64_t seed, long max_attempts_per_sample = 1000000) {
  if (!(eps_norm > 0.0)) throw std::invalid_argument("eps_norm must be positive");
  if (count < 0) throw std::invalid_argument("count must be nonnegative");
  const auto prof = degeneracy_profile(m);
  std::vector<Perturbation> out;
  out.reserve(static_cast<size_t>(count));
  const std::uint64_t stream = (pair == Pair::GR) ? 2 : 1;
  for (long chunk = 0; static_cast<long>(out.size()) < count; ++chunk) {
    auto rng = chunk_rng(seed, stream, static_cast<std::uint64_t>(chunk));
    const long chunk_end =
        std::min<long>(count, (chunk + 1) * kChunkSamples);
    while (static_cast<long>(out.size()) < chunk_end) {
      Vec dir;
      long attempts = 0;
      do {
        if (++attempts > max_attempts_per_sample)
          throw RejectionBudgetError(
              "admissible-direction sampling exhausted its attempt budget");
        dir = sphere_sample(rng, m.d());
      } while (!admissible(dir, m, prof, pair));
      for (auto& x : dir) x *= eps_norm;
      out.push_back(Perturbation{std::move(dir), eps_norm});
    }
  }
  return out;
}

inline ChangePoint normalized_changes(const Measurement& m,
                                      const Perturbation& pert, Pair pair) {
  if (!(pert.norm > 0.0))
    throw std::invalid_argument("perturbation must have positive norm");
  auto dirs = unit_gradient_directions(m);
  const Vec& dunit = (pair == Pair::GF) ? dirs[1] : dirs[2];
  ChangePoint p{};
  p.dg = detail::dot(pert.eps, dirs[0]) / pert.norm;
  p.dd = detail::dot(pert.eps, dunit) / pert.norm;
  return p;
}

enum class ArcKind { EllipseArc, Line, Point };

// One quarter of the attainable-region boundary. Between its corner points
// the locus satisfies X^2 + Y^2 - 2*coefficient*X*Y = 1 - coefficient^2 with
// X = x / compress_x and Y = y / compress_y; anomalous quarters collapse to a
// straight segment or a single point, flagged by kind.
struct RegionArc {
  std::string segment;
  double coefficient;
  double compress_x, compress_y;
  ArcKind kind;
  std::array<double, 2> start, end;
  std::vector<std::array<double, 2>> polyline;
};

// Correlation ellipse x^2 + y^2 - 2 c x y = 1 - c^2 (tilted -45 degrees for
// c < 0), the outer envelope of every attainable change pair. Degenerates to
// the line y = -x at c = -1 and to the unit circle at c = 0.
struct SigmaEllipse {
  double c;
  enum class Kind { Ellipse, Circle, Line } kind;
  std::vector<std::array<double, 2>> polyline;
};

inline SigmaEllipse sigma_ellipse(double c, int points = 256) {
  if (c < -1.0 - 1e-12 || c > 1e-12)
    throw std::invalid_argument("sigma_ellipse: c must lie in [-1, 0]");
  if (points < 2) throw std::invalid_argument("sigma_ellipse: points < 2");
  SigmaEllipse s;
  s.c = c;
  s.kind = (c <= -1.0 + 1e-12) ? SigmaEllipse::Kind::Line
           : (c >= -1e-12)     ? SigmaEllipse::Kind::Circle
                               : SigmaEllipse::Kind::Ellipse;
  const double root = std::sqrt(std::max(0.0, 1.0 - c * c));
  s.polyline.reserve(static_cast<size_t>(points) + 1);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (int j = 0; j <= points; ++j) {
    const double t = kTwoPi * j / points;
    s.polyline.push_back({std::cos(t), c * std::cos(t) - root * std::sin(t)});
  }
  return s;
}

namespace detail {

inline std::array<double, 2> plane_point(const Vec& v, const Vec& gx,
                                         const Vec& dy) {
  return {dot(v, gx), dot(v, dy)};
}

}  // namespace detail

// The four boundary arcs of the attainable region, walked counterclockwise
// from the steepest-ascent corner of the first metric: G+ -> D+ -> G- -> D-
// and back (D is F or R). Each arc is swept as eps(phi) = A cos phi +
// B sin phi between its two corner direction vectors and mapped through the
// normalized changes; zero corner vectors collapse the quarter to a segment
// or point, matching the flat-measurement anomalies.
inline std::vector<RegionArc> gamma_boundary(const Measurement& m, Pair pair,
                                             int points_per_arc = 256) {
  if (points_per_arc < 2)
    throw std::invalid_argument("gamma_boundary: points_per_arc < 2");
  const auto prof = degeneracy_profile(m);
  const auto ds = direction_set(m, prof);
  const auto as = angle_set(m);
  const Vec& gx = ds.g;
  const Vec& dy = (pair == Pair::GF) ? ds.f : ds.r;
  const Vec& d_plus = (pair == Pair::GF) ? ds.f_plus : ds.r_plus;
  const Vec& d_minus = (pair == Pair::GF) ? ds.f_minus : ds.r_minus;
  const char gname = 'G';
  const char dname = (pair == Pair::GF) ? 'F' : 'R';

  struct Quarter {
    const Vec *a, *b;
    std::string label;
    double coeff, cx, cy;
  };
  const double cg = as.cos_theta_g, cf = as.cos_theta_f, cr = as.cos_theta_r;
  const double cy_up = (pair == Pair::GF) ? 1.0 : cr;
  const double cy_dn = (pair == Pair::GF) ? cf : 1.0;
  const double c_pp = (pair == Pair::GF) ? as.c_gf_pp : as.c_gr_pp;
  const double c_mp = (pair == Pair::GF) ? as.c_gf_mp : as.c_gr_mp;
  const double c_pm = (pair == Pair::GF) ? as.c_gf_pm : as.c_gr_pm;
  const double c_mm = (pair == Pair::GF) ? as.c_gf_mm : as.c_gr_mm;
  const std::array<Quarter, 4> quarters{
      Quarter{&ds.g_plus, &d_plus,
              std::string() + gname + '+' + dname + '+', c_pp, 1.0, cy_up},
      Quarter{&d_plus, &ds.g_minus,
              std::string() + dname + '+' + gname + '-', -c_mp, cg, cy_up},
      Quarter{&ds.g_minus, &d_minus,
              std::string() + gname + '-' + dname + '-', c_mm, cg, cy_dn},
      Quarter{&d_minus, &ds.g_plus,
              std::string() + dname + '-' + gname + '+', -c_pm, 1.0, cy_dn}};

  std::vector<RegionArc> arcs;
  arcs.reserve(4);
  constexpr double kHalfPi = 1.5707963267948966192313216916398;
  for (const auto& q : quarters) {
    RegionArc arc;
    arc.segment = q.label;
    arc.coefficient = q.coeff;
    arc.compress_x = q.cx;
    arc.compress_y = q.cy;
    arc.start = detail::plane_point(*q.a, gx, dy);
    arc.end = detail::plane_point(*q.b, gx, dy);
    const bool a0 = detail::is_zero(*q.a), b0 = detail::is_zero(*q.b);
    const double ab = detail::dot(*q.a, *q.b);
    const double corner_gap = std::hypot(arc.end[0] - arc.start[0],
                                         arc.end[1] - arc.start[1]);
    if (a0 && b0) {
      arc.kind = ArcKind::Point;
    } else if (a0 || b0) {
      arc.kind = ArcKind::Line;
    } else if (ab <= -1.0 + 1e-12) {
      arc.kind = ArcKind::Line;
    } else if (corner_gap <= 1e-12) {
      arc.kind = ArcKind::Point;
    } else {
      arc.kind = ArcKind::EllipseArc;
    }
    arc.polyline.reserve(static_cast<size_t>(points_per_arc));
    for (int j = 0; j < points_per_arc; ++j) {
      const double t = static_cast<double>(j) / (points_per_arc - 1);
      std::array<double, 2> pt{};
      if (arc.kind == ArcKind::EllipseArc) {
        const double phi = kHalfPi * t;
        const double ca = std::cos(phi), sb = std::sin(phi);
        Vec e(m.lambdas().size());
        for (size_t i = 0; i < e.size(); ++i)
          e[i] = ca * (*q.a)[i] + sb * (*q.b)[i];
        const double n = detail::norm(e);
        pt = {detail::dot(e, gx) / n, detail::dot(e, dy) / n};
      } else {
        pt = {arc.start[0] + t * (arc.end[0] - arc.start[0]),
              arc.start[1] + t * (arc.end[1] - arc.start[1])};
      }
      if (j == 0) pt = arc.start;
      if (j == points_per_arc - 1) pt = arc.end;
      arc.polyline.push_back(pt);
    }
    arcs.push_back(std::move(arc));
  }
  return arcs;
}

// Normalized changes of `count` admissible perturbations of length eps_norm.
inline std::vector<ChangePoint> scatter_dataset(const Measurement& m,
                                                Pair pair, int count,
                                                double eps_norm,
                                                std::uint64_t seed) {
  auto perts = sample_admissible(m, pair, eps_norm, count, seed);
  auto dirs = unit_gradient_directions(m);
  const Vec& dunit = (pair == Pair::GF) ? dirs[1] : dirs[2];
  std::vector<ChangePoint> out;
  out.reserve(perts.size());
  for (const auto& p : perts)
    out.push_back(ChangePoint{detail::dot(p.eps, dirs[0]) / p.norm,
                              detail::dot(p.eps, dunit) / p.norm});
  return out;
}

// One point of a coefficient-versus-G sweep. `family` identifies the curve:
// m_k_l (two-block family over its inner value), P_r (flat members, where the
// coefficient is exactly 0), or L_n (G-R pair only: the coefficient along the
// optimal family evaluated as if the bottom multiplicity were n).
struct RangeCurvePoint {
  std::string family;
  double param;
  double g;
  double c;
};

inline std::vector<RangeCurvePoint> coefficient_range_curves(int d, Pair pair,
                                                             int grid) {
  if (d < 2) throw std::invalid_argument("coefficient_range_curves: d < 2");
  if (grid < 2) throw std::invalid_argument("coefficient_range_curves: grid < 2");
  std::vector<RangeCurvePoint> out;
  for (int k = 1; k < d; ++k) {
    for (int l = 1; k + l <= d; ++l) {
      const std::string label =
          "m_" + std::to_string(k) + "_" + std::to_string(l);
      for (int j = 0; j < grid; ++j) {
        const double lam = static_cast<double>(j + 1) / (grid + 1);
        const Measurement mm = family_m(d, k, l, lam);
        const auto as = angle_set(mm);
        out.push_back(RangeCurvePoint{
            label, lam, metrics(mm).g,
            (pair == Pair::GF) ? as.c_gf_pp : as.c_gr_pp});
      }
    }
  }
  for (int r = 1; r <= d; ++r) {
    const Measurement pr = family_p(d, r);
    const auto as = angle_set(pr);
    out.push_back(RangeCurvePoint{"P_" + std::to_string(r),
                                  static_cast<double>(r), metrics(pr).g,
                                  (pair == Pair::GF) ? as.c_gf_pp : as.c_gr_pp});
  }
  if (pair == Pair::GR) {
    for (int n = 1; n < d; ++n) {
      const std::string label = "L_" + std::to_string(n);
      for (int j = 0; j < grid; ++j) {
        const double lam = static_cast<double>(j + 1) / (grid + 1);
        const Measurement mm = family_m(d, 1, d - 1, lam);
        const double sigma_sq = 1.0 + (d - 1) * lam * lam;
        const double c =
            -std::sqrt(static_cast<double>(n)) * lam /
            std::sqrt((sigma_sq - 1.0) * (sigma_sq - n * lam * lam));
        out.push_back(RangeCurvePoint{label, lam, metrics(mm).g, c});
      }
    }
  }
  return out;
}

// Sample Pearson correlation of (dg, dd) over isotropic perturbations. Only
// meaningful where no admissibility constraint is active (n1 = 1, n0 = 0);
// there the population value is the plain gradient cosine c_gf.
inline double pearson_check(const Measurement& m, int count, double eps_norm,
                            std::uint64_t seed) {
  const auto prof = degeneracy_profile(m);
  if (prof.n1 != 1 || prof.n0 != 0)
    throw std::invalid_argument(
        "pearson_check needs an unconstrained measurement (n1 = 1, n0 = 0)");
  if (count < 2) throw std::invalid_argument("pearson_check: count < 2");
  auto dirs = unit_gradient_directions(m);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  long done = 0;
  for (long chunk = 0; done < count; ++chunk) {
    auto rng = chunk_rng(seed, 3, static_cast<std::uint64_t>(chunk));
    const long chunk_end = std::min<long>(count, (chunk + 1) * kChunkSamples);
    for (; done < chunk_end; ++done) {
      const Vec e = sphere_sample(rng, m.d());
      const double x = detail::dot(e, dirs[0]) * eps_norm;
      const double y = detail::dot(e, dirs[1]) * eps_norm;
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
    }
  }
  const double n = static_cast<double>(count);
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

// Named d = 4 archetypes covering every documented region shape.
struct FigurePreset {
  std::string name;
  Pair pair;
  Measurement m;
};

inline const std::vector<FigurePreset>& figure_presets() {
  static const std::vector<FigurePreset> presets = [] {
    std::vector<FigurePreset> v;
    auto add = [&v](const char* name, Pair p, Vec lam) {
      v.push_back(FigurePreset{name, p, Measurement(std::move(lam))});
    };
    add("gf-smooth", Pair::GF, {0.9, 0.6, 0.35, 0.145});
    add("gf-optimal", Pair::GF, {1.0, 0.5, 0.5, 0.5});
    add("gf-n1", Pair::GF, {0.8, 0.8, 0.5, 0.2});
    add("gf-n0", Pair::GF, {0.8, 0.7, 0.4, 0.0});
    add("gf-n1n0", Pair::GF, {0.9, 0.9, 0.4, 0.0});
    add("gf-pr", Pair::GF, {1.0, 1.0, 0.0, 0.0});
    add("gr-smooth", Pair::GR, {0.9, 0.6, 0.35, 0.145});
    add("gr-nd", Pair::GR, {0.9, 0.6, 0.3, 0.3});
    add("gr-n1nd", Pair::GR, {0.9, 0.9, 0.3, 0.3});
    add("gr-optimal", Pair::GR, {1.0, 0.31, 0.31, 0.31});
    add("gr-zero", Pair::GR, {0.8, 0.7, 0.4, 0.0});
    add("gr-pd", Pair::GR, {1.0, 1.0, 1.0, 1.0});
    return v;
  }();
  return presets;
}

inline const FigurePreset& preset_by_name(const std::string& name) {
  for (const auto& p : figure_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace infodist

#endif
