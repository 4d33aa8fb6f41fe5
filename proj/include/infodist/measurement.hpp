#ifndef INFODIST_MEASUREMENT_HPP
#define INFODIST_MEASUREMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace infodist {

using Vec = std::vector<double>;

// Equality tolerance for degeneracy detection, relative to lambda_1.
inline constexpr double kEqualityTol = 1e-9;
// Tiny negatives produced by projection arithmetic are clamped to 0; anything
// more negative is rejected as invalid input.
inline constexpr double kNegativeClamp = 1e-12;

// One measurement outcome, represented by the descending vector of singular
// values of its measurement operator. Invariants: d >= 2, lambda_1 in (0, 1],
// entries descending and nonnegative. Scale never matters to any metric, so
// vectors are kept as given (<= 1) rather than forced to lambda_1 = 1.
class Measurement {
 public:
  explicit Measurement(Vec v) : lam_(std::move(v)) { validate(); }

  int d() const { return static_cast<int>(lam_.size()); }
  const Vec& lambdas() const { return lam_; }
  double lambda(int i) const { return lam_[static_cast<size_t>(i)]; }
  double front() const { return lam_.front(); }
  double back() const { return lam_.back(); }

 private:
  void validate() {
    if (lam_.size() < 2)
      throw std::invalid_argument("measurement needs at least 2 singular values");
    for (auto& x : lam_) {
      if (!std::isfinite(x))
        throw std::invalid_argument("singular values must be finite");
      if (x < 0.0) {
        if (x < -kNegativeClamp)
          throw std::invalid_argument("negative singular value");
        x = 0.0;
      }
      if (x > 1.0) {
        if (x > 1.0 + kEqualityTol)
          throw std::invalid_argument("singular value above 1 (rescale first)");
        x = 1.0;
      }
    }
    for (size_t i = 0; i + 1 < lam_.size(); ++i)
      if (lam_[i] < lam_[i + 1])
        throw std::invalid_argument("singular values must be descending");
    if (lam_.front() <= 0.0)
      throw std::invalid_argument("lambda_1 must be positive");
  }

  Vec lam_;
};

// Sorts descending, clamps tiny negatives, and optionally rescales so the
// largest entry is 1 when it exceeds 1. Throws on entries that cannot be
// repaired (beyond 1 + tol without rescaling, below -1e-12, all zero).
inline Measurement canonicalize(Vec raw, bool allow_rescale = false,
                                double tol = kEqualityTol) {
  if (raw.size() < 2)
    throw std::invalid_argument("measurement needs at least 2 singular values");
  for (auto& x : raw) {
    if (!std::isfinite(x))
      throw std::invalid_argument("singular values must be finite");
    if (x < 0.0) {
      if (x < -kNegativeClamp)
        throw std::invalid_argument("negative singular value");
      x = 0.0;
    }
  }
  std::sort(raw.begin(), raw.end(), std::greater<double>());
  if (raw.front() <= 0.0)
    throw std::invalid_argument("all singular values are zero");
  if (raw.front() > 1.0) {
    if (allow_rescale) {
      const double inv = 1.0 / raw.front();
      for (auto& x : raw) x *= inv;
      raw.front() = 1.0;
    } else if (raw.front() > 1.0 + tol) {
      throw std::invalid_argument("singular value above 1 (rescale first)");
    }
  }
  return Measurement(std::move(raw));
}

// p^(d)_r: r unit entries followed by zeros, scaled by c.
inline Measurement family_p(int d, int r, double c = 1.0) {
  if (d < 2 || r < 1 || r > d) throw std::invalid_argument("family_p: bad (d, r)");
  if (!(c > 0.0) || c > 1.0) throw std::invalid_argument("family_p: c must be in (0, 1]");
  Vec v(static_cast<size_t>(d), 0.0);
  for (int i = 0; i < r; ++i) v[static_cast<size_t>(i)] = c;
  return Measurement(std::move(v));
}

// m^(d)_{k,l}(lam): k unit entries, l entries equal to lam in (0, 1), zeros
// after, scaled by c. The k = 1, l = d-1 members are the optimal measurements.
inline Measurement family_m(int d, int k, int l, double lam, double c = 1.0) {
  if (d < 2 || k < 1 || l < 1 || k + l > d)
    throw std::invalid_argument("family_m: bad (d, k, l)");
  if (!(lam > 0.0) || lam >= 1.0)
    throw std::invalid_argument("family_m: lam must be in (0, 1)");
  if (!(c > 0.0) || c > 1.0) throw std::invalid_argument("family_m: c must be in (0, 1]");
  Vec v(static_cast<size_t>(d), 0.0);
  for (int i = 0; i < k; ++i) v[static_cast<size_t>(i)] = c;
  for (int i = k; i < k + l; ++i) v[static_cast<size_t>(i)] = c * lam;
  return Measurement(std::move(v));
}

struct Moments {
  double sigma_sq;  // sum of squares
  double tau;       // plain sum
};

inline Moments moments(const Measurement& m) {
  Moments mo{0.0, 0.0};
  for (double x : m.lambdas()) {
    mo.sigma_sq += x * x;
    mo.tau += x;
  }
  return mo;
}

// Multiplicity of the top value (n1), of the bottom value (nd), and the count
// of zero entries (n0, which equals nd when the bottom value is zero).
struct DegeneracyProfile {
  int n1;
  int nd;
  int n0;
  double tol;
};

inline DegeneracyProfile degeneracy_profile(const Measurement& m,
                                            double tol = kEqualityTol) {
  const Vec& l = m.lambdas();
  const double scale = tol * l.front();
  DegeneracyProfile p{0, 0, 0, tol};
  for (double x : l) {
    if (l.front() - x <= scale) ++p.n1;
    if (x - l.back() <= scale) ++p.nd;
    if (x <= tol) ++p.n0;
  }
  return p;
}

// The three trade-off metrics of a single outcome. All are invariant under
// rescaling of the vector and depend only on the multiset of entries.
struct MetricTriple {
  double g;  // estimation fidelity gain ratio
  double f;  // non-disturbance (mean fidelity) ratio
  double r;  // worst-case reversibility
};

namespace detail {
inline MetricTriple metrics_from(const Vec& l, double lam_top, double lam_bot) {
  double sigma_sq = 0.0, tau = 0.0;
  for (double x : l) {
    sigma_sq += x * x;
    tau += x;
  }
  const double d1 = static_cast<double>(l.size()) + 1.0;
  MetricTriple t{};
  t.g = (1.0 + lam_top * lam_top / sigma_sq) / d1;
  t.f = (1.0 + tau * tau / sigma_sq) / d1;
  t.r = static_cast<double>(l.size()) * lam_bot * lam_bot / sigma_sq;
  return t;
}
}  // namespace detail

inline MetricTriple metrics(const Measurement& m) {
  return detail::metrics_from(m.lambdas(), m.front(), m.back());
}

// Same formulas on an unsorted probe vector (finite-difference oracles poke
// individual components; the max/min entries are taken positionally, valid in
// any smooth neighborhood where the perturbation cannot reorder entries).
inline MetricTriple metrics_raw(const Vec& l) {
  if (l.size() < 2) throw std::invalid_argument("metrics_raw: need >= 2 entries");
  return detail::metrics_from(l, l.front(), l.back());
}

// Probability of obtaining this outcome on the maximally mixed state.
inline double outcome_probability(const Measurement& m) {
  return moments(m).sigma_sq / static_cast<double>(m.d());
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Comma-separated singular values, e.g. "0.8,0.7,0.4,0".
inline Vec parse_lambda_text(const std::string& text) {
  Vec out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    try {
      size_t used = 0;
      const double v = std::stod(item, &used);
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
        ++used;
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad singular value list: '" + text + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (out.empty()) throw std::invalid_argument("empty singular value list");
  return out;
}

inline std::string lambda_text(const Vec& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_g17(v[i]);
  }
  return s;
}

}  // namespace infodist

#endif
