#ifndef INFODIST_IO_HPP
#define INFODIST_IO_HPP

#include <string>
#include <vector>

#include "infodist/correlation.hpp"
#include "infodist/improver.hpp"
#include "infodist/measurement.hpp"
#include "infodist/oracle.hpp"

namespace infodist {

// CSV emitters for the documented interchange schemas. All floats use 17
// significant digits so files round-trip to the exact doubles.

inline std::string csv_scatter(const std::vector<ChangePoint>& pts) {
  std::string out = "index,dg,dd\n";
  for (size_t i = 0; i < pts.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_g17(pts[i].dg);
    out += ',';
    out += format_g17(pts[i].dd);
    out += '\n';
  }
  return out;
}

inline std::string csv_region(const std::vector<RegionArc>& arcs,
                              const SigmaEllipse* sigma = nullptr) {
  std::string out = "segment,t,x,y\n";
  auto emit = [&out](const std::string& seg,
                     const std::vector<std::array<double, 2>>& poly) {
    const size_t n = poly.size();
    for (size_t j = 0; j < n; ++j) {
      const double t = (n > 1) ? static_cast<double>(j) / (n - 1) : 0.0;
      out += seg;
      out += ',';
      out += format_g17(t);
      out += ',';
      out += format_g17(poly[j][0]);
      out += ',';
      out += format_g17(poly[j][1]);
      out += '\n';
    }
  };
  for (const auto& arc : arcs) emit(arc.segment, arc.polyline);
  if (sigma) emit("sigma", sigma->polyline);
  return out;
}

inline std::string csv_range(const std::vector<RangeCurvePoint>& pts) {
  std::string out = "family,param,G,C\n";
  for (const auto& p : pts) {
    out += p.family;
    out += ',';
    out += format_g17(p.param);
    out += ',';
    out += format_g17(p.g);
    out += ',';
    out += format_g17(p.c);
    out += '\n';
  }
  return out;
}

inline std::string event_tokens(const StepEvents& ev) {
  std::string s;
  auto add = [&s](const char* tok) {
    if (!s.empty()) s += '|';
    s += tok;
  };
  if (ev.renormalized) add("renormalized");
  if (ev.boundary_landed) add("boundary_landed");
  if (ev.converged) add("converged");
  if (ev.degenerate) add("degenerate");
  return s;
}

inline std::string csv_trajectory(const std::vector<TrajectoryRecord>& recs) {
  std::string out = "iter";
  if (!recs.empty())
    for (size_t i = 0; i < recs.front().lambdas.size(); ++i)
      out += ",lambda" + std::to_string(i + 1);
  out += ",G,D,improvability,nd,events\n";
  for (const auto& r : recs) {
    out += std::to_string(r.iteration);
    for (double l : r.lambdas) {
      out += ',';
      out += format_g17(l);
    }
    out += ',';
    out += format_g17(r.metric_g);
    out += ',';
    out += format_g17(r.metric_d);
    out += ',';
    out += format_g17(r.improvability);
    out += ',';
    out += std::to_string(r.nd);
    out += ',';
    out += event_tokens(r.events);
    out += '\n';
  }
  return out;
}

inline std::string csv_mc_report(const McMetrics& mc, const MetricTriple& mt,
                                 double p_closed) {
  std::string out = "quantity,closed_form,mc_value,std_error,z_score\n";
  auto row = [&out](const char* name, double closed, const McEstimate& e) {
    const double z =
        (e.std_error > 0.0) ? (e.value - closed) / e.std_error : 0.0;
    out += name;
    out += ',';
    out += format_g17(closed);
    out += ',';
    out += format_g17(e.value);
    out += ',';
    out += format_g17(e.std_error);
    out += ',';
    out += format_g17(z);
    out += '\n';
  };
  row("p", p_closed, mc.p);
  row("G", mt.g, mc.g);
  row("F", mt.f, mc.f);
  row("R", mt.r, mc.r);
  return out;
}

}  // namespace infodist

#endif
