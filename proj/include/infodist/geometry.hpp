#ifndef INFODIST_GEOMETRY_HPP
#define INFODIST_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <stdexcept>

#include "infodist/measurement.hpp"

namespace infodist {

enum class Pair { GF, GR };

namespace detail {

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec zeros(size_t n) { return Vec(n, 0.0); }

inline bool is_zero(const Vec& a) {
  for (double x : a)
    if (x != 0.0) return false;
  return true;
}

// Shared positive quantities, each accumulated as a sum of nonnegative terms
// instead of a difference of near-equal ones. At the flat-family members the
// relevant residual is an exact 0 rather than rounding noise, which is what
// makes the 0-convention cases below exact.
struct Residuals {
  double sigma_sq, tau, l1, ld;
  double s_less_top1;    // sigma_sq - lambda_1^2        = sum_{i>=2} li^2
  double s_less_topn;    // sigma_sq - n1 lambda_1^2     = sum_{i>n1} li^2
  double s_less_bot1;    // sigma_sq - lambda_d^2        = sum_{i<d} li^2
  double s_less_botn;    // sigma_sq - nd lambda_d^2     = sum_{i<=d-nd} li^2
  double spread_all;     // d sigma_sq - tau^2           = sum_{i<j} (li-lj)^2
  double spread_pos;     // (d-n0) sigma_sq - tau^2 over the nonzero entries
  double tau_l1_less_s;  // tau lambda_1 - sigma_sq      = sum_i li (l1 - li)
  bool p1;               // single nonzero entry
  bool pd;               // all entries equal
  bool pr;               // flat: every nonzero entry equals lambda_1
};

inline Residuals residuals(const Measurement& m, const DegeneracyProfile& prof) {
  const Vec& l = m.lambdas();
  const int d = m.d();
  Residuals r{};
  r.l1 = l.front();
  r.ld = l.back();
  for (double x : l) {
    r.sigma_sq += x * x;
    r.tau += x;
  }
  for (int i = 1; i < d; ++i) r.s_less_top1 += l[i] * l[i];
  for (int i = prof.n1; i < d; ++i) r.s_less_topn += l[i] * l[i];
  for (int i = 0; i + 1 < d; ++i) r.s_less_bot1 += l[i] * l[i];
  for (int i = 0; i < d - prof.nd; ++i) r.s_less_botn += l[i] * l[i];
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double gap = l[i] - l[j];
      r.spread_all += gap * gap;
      if (l[j] > 0.0) r.spread_pos += gap * gap;
    }
  for (double x : l) r.tau_l1_less_s += x * (r.l1 - x);
  if (r.tau_l1_less_s < 0.0) r.tau_l1_less_s = 0.0;
  r.p1 = (prof.n0 == d - 1);
  r.pd = (prof.n1 == d);
  r.pr = (prof.n1 + prof.n0 == d) || r.pd;
  return r;
}

}  // namespace detail

// Euclidean gradients of the three metrics with respect to the singular
// values, plus their magnitudes. Every gradient is orthogonal to lambda
// itself (the metrics are scale-invariant).
struct GradientSet {
  Vec grad_g, grad_f, grad_r;
  double mag_g, mag_f, mag_r;
};

inline GradientSet gradients(const Measurement& m) {
  const Vec& l = m.lambdas();
  const int d = m.d();
  const auto prof = degeneracy_profile(m);
  const auto rs = detail::residuals(m, prof);
  const double s = rs.sigma_sq;
  GradientSet out;
  out.grad_g.resize(l.size());
  out.grad_f.resize(l.size());
  out.grad_r.resize(l.size());
  const double cg = 2.0 / (d + 1.0) * (rs.l1 / s);
  const double cf = 2.0 / (d + 1.0) * (rs.tau / s);
  const double cr = 2.0 * d * (rs.ld / s);
  for (int i = 0; i < d; ++i) {
    const double e1 = (i == 0) ? 1.0 : 0.0;
    const double ed = (i == d - 1) ? 1.0 : 0.0;
    out.grad_g[i] = cg * (e1 - rs.l1 / s * l[i]);
    out.grad_f[i] = cf * (1.0 - rs.tau / s * l[i]);
    out.grad_r[i] = cr * (ed - rs.ld / s * l[i]);
  }
  out.mag_g = cg * std::sqrt(rs.s_less_top1 / s);
  out.mag_f = cf * std::sqrt(rs.spread_all / s);
  out.mag_r = cr * std::sqrt(rs.s_less_bot1 / s);
  return out;
}

// Averages v over the index block [begin, end) and returns the result; this
// is the projection onto the subspace where the blocked components are equal,
// the elementary move that folds a gradient back into the ordering cone.
inline Vec successive_projection(Vec v, int begin, int end) {
  const int n = static_cast<int>(v.size());
  if (begin < 0 || end > n || begin >= end)
    throw std::invalid_argument("successive_projection: bad block");
  double avg = 0.0;
  for (int i = begin; i < end; ++i) avg += v[i];
  avg /= static_cast<double>(end - begin);
  for (int i = begin; i < end; ++i) v[i] = avg;
  return v;
}

// Unit vectors of the three gradients, with the 0/0 conventions: the top
// flat point p_1 has no estimation direction (g = 0) and the all-equal point
// p_d has no fidelity direction (f = 0). The reversibility direction r is
// always defined and equals e_d when lambda_d = 0.
inline std::array<Vec, 3> unit_gradient_directions(const Measurement& m) {
  const Vec& l = m.lambdas();
  const int d = m.d();
  const auto prof = degeneracy_profile(m);
  const auto rs = detail::residuals(m, prof);
  const double s = rs.sigma_sq;
  const double sig = std::sqrt(s);
  Vec g = detail::zeros(l.size()), f = detail::zeros(l.size()),
      r = detail::zeros(l.size());
  if (!rs.p1) {
    const double c = sig / std::sqrt(rs.s_less_top1);
    for (int i = 0; i < d; ++i)
      g[i] = c * (((i == 0) ? 1.0 : 0.0) - rs.l1 / s * l[i]);
  }
  if (!rs.pd) {
    const double c = sig / std::sqrt(rs.spread_all);
    for (int i = 0; i < d; ++i) f[i] = c * (1.0 - rs.tau / s * l[i]);
  }
  {
    const double c = sig / std::sqrt(rs.s_less_bot1);
    for (int i = 0; i < d; ++i)
      r[i] = c * (((i == d - 1) ? 1.0 : 0.0) - rs.ld / s * l[i]);
  }
  return {std::move(g), std::move(f), std::move(r)};
}

// Steepest admissible ascent directions (unit or zero). g and f are already
// admissible, so they ascend as-is; r must be folded across the bottom tie
// block, which shortens it by cos(theta_r).
inline std::array<Vec, 3> steepest_ascent(const Measurement& m,
                                          const DegeneracyProfile& prof) {
  const Vec& l = m.lambdas();
  const int d = m.d();
  const auto rs = detail::residuals(m, prof);
  auto dirs = unit_gradient_directions(m);
  Vec r_plus = detail::zeros(l.size());
  if (prof.nd < d) {
    const double c =
        std::sqrt(static_cast<double>(prof.nd)) * std::sqrt(rs.sigma_sq) /
        std::sqrt(rs.s_less_botn);
    for (int i = 0; i < d; ++i) {
      const double block = (i >= d - prof.nd) ? 1.0 / prof.nd : 0.0;
      r_plus[i] = c * (block - rs.ld / rs.sigma_sq * l[i]);
    }
  }
  return {std::move(dirs[0]), std::move(dirs[1]), std::move(r_plus)};
}

// Steepest admissible descent directions (unit or zero). Descending g folds
// -g across the top tie block; descending f drops the zero components of -f;
// -r is admissible only when nothing is pinned at zero.
inline std::array<Vec, 3> steepest_descent(const Measurement& m,
                                           const DegeneracyProfile& prof) {
  const Vec& l = m.lambdas();
  const int d = m.d();
  const auto rs = detail::residuals(m, prof);
  Vec g_minus = detail::zeros(l.size()), f_minus = detail::zeros(l.size()),
      r_minus = detail::zeros(l.size());
  if (!rs.pr) {
    const double c =
        -std::sqrt(static_cast<double>(prof.n1)) * std::sqrt(rs.sigma_sq) /
        std::sqrt(rs.s_less_topn);
    for (int i = 0; i < d; ++i) {
      const double block = (i < prof.n1) ? 1.0 / prof.n1 : 0.0;
      g_minus[i] = c * (block - rs.l1 / rs.sigma_sq * l[i]);
    }
  }
  if (!rs.pr) {
    const double c = -std::sqrt(rs.sigma_sq) / std::sqrt(rs.spread_pos);
    for (int i = 0; i < d; ++i) {
      const double live = (i < d - prof.n0) ? 1.0 : 0.0;
      f_minus[i] = c * (live - rs.tau / rs.sigma_sq * l[i]);
    }
  }
  if (prof.n0 == 0) {
    auto dirs = unit_gradient_directions(m);
    for (int i = 0; i < d; ++i) r_minus[i] = -dirs[2][i];
  }
  return {std::move(g_minus), std::move(f_minus), std::move(r_minus)};
}

// Cosines of the angles between each gradient and its folded steepest
// replacement; 1 when no constraint is active, 0 when the whole direction is
// forbidden (p_1 for g, p_d for f and r).
struct BoundaryAngles {
  double cos_theta_g, cos_theta_f, cos_theta_r;
};

inline BoundaryAngles boundary_angles(const Measurement& m,
                                      const DegeneracyProfile& prof) {
  const auto rs = detail::residuals(m, prof);
  BoundaryAngles a{};
  a.cos_theta_g =
      rs.p1 ? 0.0 : std::sqrt(rs.s_less_topn / (prof.n1 * rs.s_less_top1));
  a.cos_theta_f = rs.pd ? 0.0 : std::sqrt(rs.spread_pos / rs.spread_all);
  a.cos_theta_r = std::sqrt(rs.s_less_botn / (prof.nd * rs.s_less_bot1));
  return a;
}

// Everything directional about one measurement in a single bundle.
struct DirectionSet {
  Vec grad_g, grad_f, grad_r;
  double mag_g, mag_f, mag_r;
  Vec g, f, r;
  Vec g_plus, f_plus, r_plus;
  Vec g_minus, f_minus, r_minus;
};

inline DirectionSet direction_set(const Measurement& m,
                                  const DegeneracyProfile& prof) {
  DirectionSet ds;
  auto gs = gradients(m);
  ds.grad_g = std::move(gs.grad_g);
  ds.grad_f = std::move(gs.grad_f);
  ds.grad_r = std::move(gs.grad_r);
  ds.mag_g = gs.mag_g;
  ds.mag_f = gs.mag_f;
  ds.mag_r = gs.mag_r;
  auto unit = unit_gradient_directions(m);
  ds.g = std::move(unit[0]);
  ds.f = std::move(unit[1]);
  ds.r = std::move(unit[2]);
  auto up = steepest_ascent(m, prof);
  ds.g_plus = std::move(up[0]);
  ds.f_plus = std::move(up[1]);
  ds.r_plus = std::move(up[2]);
  auto down = steepest_descent(m, prof);
  ds.g_minus = std::move(down[0]);
  ds.f_minus = std::move(down[1]);
  ds.r_minus = std::move(down[2]);
  return ds;
}

// Cosines between the steepest directions of the two metrics in a pair.
// c_gf/c_gr are the plain gradient cosines; the four signed variants pick
// ascent (+) or descent (-) of each metric in turn. Flat measurements (every
// nonzero entry equal) take the 0/0 -> 0 convention; the one exception worth
// remembering is c_gr at p_d, which is a genuine -1/(d-1), not 0.
struct AngleSet {
  double c_gf, c_gr;
  double c_gf_pp, c_gf_mp, c_gf_pm, c_gf_mm;
  double c_gr_pp, c_gr_mp, c_gr_pm, c_gr_mm;
  double cos_theta_g, cos_theta_f, cos_theta_r;
};

inline AngleSet angle_set(const Measurement& m) {
  const auto prof = degeneracy_profile(m);
  const auto rs = detail::residuals(m, prof);
  const auto ang = boundary_angles(m, prof);
  AngleSet a{};
  a.cos_theta_g = ang.cos_theta_g;
  a.cos_theta_f = ang.cos_theta_f;
  a.cos_theta_r = ang.cos_theta_r;

  const double num_gf = rs.tau_l1_less_s;
  a.c_gf_pp = rs.pr ? 0.0
                    : -num_gf / std::sqrt(rs.s_less_top1 * rs.spread_all);
  a.c_gf_mp = rs.pr ? 0.0
                    : std::sqrt(static_cast<double>(prof.n1)) * num_gf /
                          std::sqrt(rs.s_less_topn * rs.spread_all);
  a.c_gf_pm = rs.pr ? 0.0
                    : num_gf / std::sqrt(rs.s_less_top1 * rs.spread_pos);
  a.c_gf_mm = rs.pr ? 0.0
                    : -std::sqrt(static_cast<double>(prof.n1)) * num_gf /
                          std::sqrt(rs.s_less_topn * rs.spread_pos);
  a.c_gf = a.c_gf_pp;

  const double num_gr = rs.l1 * rs.ld;
  a.c_gr = rs.p1 ? 0.0
                 : -num_gr / std::sqrt(rs.s_less_top1 * rs.s_less_bot1);
  a.c_gr_pp = (rs.p1 || prof.nd == m.d())
                  ? 0.0
                  : -std::sqrt(static_cast<double>(prof.nd)) * num_gr /
                        std::sqrt(rs.s_less_top1 * rs.s_less_botn);
  a.c_gr_mp = (rs.pr || prof.nd == m.d())
                  ? 0.0
                  : std::sqrt(static_cast<double>(prof.n1 * prof.nd)) * num_gr /
                        std::sqrt(rs.s_less_topn * rs.s_less_botn);
  a.c_gr_pm = -a.c_gr;
  a.c_gr_mm = rs.pr ? 0.0
                    : -std::sqrt(static_cast<double>(prof.n1)) * num_gr /
                          std::sqrt(rs.s_less_topn * rs.s_less_bot1);
  return a;
}

// Same set assembled from dot products of an explicit DirectionSet. Exists so
// tests can pin the closed forms against the constructed vectors.
inline AngleSet angle_set_from_directions(const Measurement& m,
                                          const DirectionSet& ds,
                                          const DegeneracyProfile& prof) {
  AngleSet a{};
  using detail::dot;
  a.c_gf = dot(ds.g, ds.f);
  a.c_gr = dot(ds.g, ds.r);
  a.c_gf_pp = dot(ds.g_plus, ds.f_plus);
  a.c_gf_mp = dot(ds.g_minus, ds.f_plus);
  a.c_gf_pm = dot(ds.g_plus, ds.f_minus);
  a.c_gf_mm = dot(ds.g_minus, ds.f_minus);
  a.c_gr_pp = dot(ds.g_plus, ds.r_plus);
  a.c_gr_mp = dot(ds.g_minus, ds.r_plus);
  a.c_gr_pm = dot(ds.g_plus, ds.r_minus);
  a.c_gr_mm = dot(ds.g_minus, ds.r_minus);
  const auto ang = boundary_angles(m, prof);
  a.cos_theta_g = ang.cos_theta_g;
  a.cos_theta_f = ang.cos_theta_f;
  a.cos_theta_r = ang.cos_theta_r;
  return a;
}

}  // namespace infodist

#endif
