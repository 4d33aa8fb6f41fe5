// Command-line front end: evaluate a measurement, generate scatter / region /
// range datasets, run the improvement iteration, or audit the closed forms
// against the Monte Carlo, finite-difference, and brute-force oracles.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infodist/correlation.hpp"
#include "infodist/geometry.hpp"
#include "infodist/improver.hpp"
#include "infodist/io.hpp"
#include "infodist/measurement.hpp"
#include "infodist/oracle.hpp"

namespace {

using infodist::Measurement;
using infodist::Pair;
using infodist::Vec;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRejection = 3;
constexpr int kExitUnknownCommand = 64;

struct Options {
  std::string lambda_text;
  std::string preset;
  std::string pair = "gf";
  std::string format;
  std::string out_path;
  std::string check = "formulas";
  double eps = 0.01;
  double conv_tol = 1e-8;
  int count = 1000;
  int d = 4;
  long max_iter = 100000;
  long samples = 100000;
  std::uint64_t seed = 0;
  bool rescale = false;
};

Pair parse_pair(const std::string& s) {
  return (s == "gr") ? Pair::GR : Pair::GF;
}

Measurement load_measurement(const Options& o) {
  if (!o.preset.empty()) return infodist::preset_by_name(o.preset).m;
  if (o.lambda_text.empty())
    throw std::invalid_argument("--lambda (or --preset) is required");
  return infodist::canonicalize(infodist::parse_lambda_text(o.lambda_text),
                                o.rescale);
}

void emit(const Options& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f)
    throw std::invalid_argument("cannot open output file '" + o.out_path + "'");
  f << text;
}

ordered_json eval_object(const Measurement& m) {
  const auto mt = infodist::metrics(m);
  const auto prof = infodist::degeneracy_profile(m);
  const auto as = infodist::angle_set(m);
  ordered_json j;
  j["d"] = m.d();
  j["lambdas"] = m.lambdas();
  j["G"] = mt.g;
  j["F"] = mt.f;
  j["R"] = mt.r;
  j["p"] = infodist::outcome_probability(m);
  j["n1"] = prof.n1;
  j["nd"] = prof.nd;
  j["n0"] = prof.n0;
  j["cos_theta_g"] = as.cos_theta_g;
  j["cos_theta_f"] = as.cos_theta_f;
  j["cos_theta_r"] = as.cos_theta_r;
  j["C_GF"] = as.c_gf;
  j["C_GR"] = as.c_gr;
  j["C_GF_pp"] = as.c_gf_pp;
  j["C_GF_mp"] = as.c_gf_mp;
  j["C_GF_pm"] = as.c_gf_pm;
  j["C_GF_mm"] = as.c_gf_mm;
  j["C_GR_pp"] = as.c_gr_pp;
  j["C_GR_mp"] = as.c_gr_mp;
  j["C_GR_pm"] = as.c_gr_pm;
  j["C_GR_mm"] = as.c_gr_mm;
  j["improvability_gf"] = 1.0 + as.c_gf_pp;
  j["improvability_gr"] = 1.0 + as.c_gr_pp;
  return j;
}

void run_eval(const Options& o) {
  const Measurement m = load_measurement(o);
  const ordered_json j = eval_object(m);
  if (o.format == "csv") {
    std::string out = "key,value\n";
    for (const auto& [key, val] : j.items()) {
      out += key;
      out += ',';
      if (val.is_array()) {
        std::string list;
        for (const auto& x : val) {
          if (!list.empty()) list += ',';
          list += infodist::format_g17(x.get<double>());
        }
        out += '"' + list + '"';
      } else if (val.is_number_integer()) {
        out += std::to_string(val.get<long>());
      } else {
        out += infodist::format_g17(val.get<double>());
      }
      out += '\n';
    }
    emit(o, out);
  } else {
    emit(o, j.dump(2) + "\n");
  }
}

void run_scatter(const Options& o) {
  const Measurement m = load_measurement(o);
  const auto pts = infodist::scatter_dataset(m, parse_pair(o.pair), o.count,
                                             o.eps, o.seed);
  if (o.format == "json") {
    ordered_json rows = ordered_json::array();
    for (size_t i = 0; i < pts.size(); ++i)
      rows.push_back({{"index", i}, {"dg", pts[i].dg}, {"dd", pts[i].dd}});
    emit(o, rows.dump(2) + "\n");
  } else {
    emit(o, infodist::csv_scatter(pts));
  }
}

void run_region(const Options& o, bool pair_given) {
  Pair pair = parse_pair(o.pair);
  Measurement m = [&] {
    if (!o.preset.empty()) {
      const auto& p = infodist::preset_by_name(o.preset);
      if (!pair_given) pair = p.pair;
      return p.m;
    }
    return load_measurement(o);
  }();
  const auto arcs = infodist::gamma_boundary(m, pair, o.count);
  const auto as = infodist::angle_set(m);
  const double c = (pair == Pair::GF) ? as.c_gf : as.c_gr;
  const auto sigma = infodist::sigma_ellipse(c, 4 * (o.count - 1));
  if (o.format == "json") {
    ordered_json rows = ordered_json::array();
    auto push = [&rows](const std::string& seg,
                        const std::vector<std::array<double, 2>>& poly) {
      const size_t n = poly.size();
      for (size_t j = 0; j < n; ++j)
        rows.push_back({{"segment", seg},
                        {"t", (n > 1) ? static_cast<double>(j) / (n - 1) : 0.0},
                        {"x", poly[j][0]},
                        {"y", poly[j][1]}});
    };
    for (const auto& arc : arcs) push(arc.segment, arc.polyline);
    push("sigma", sigma.polyline);
    emit(o, rows.dump(2) + "\n");
  } else {
    emit(o, infodist::csv_region(arcs, &sigma));
  }
}

void run_range(const Options& o) {
  const auto pts =
      infodist::coefficient_range_curves(o.d, parse_pair(o.pair), o.count);
  if (o.format == "json") {
    ordered_json rows = ordered_json::array();
    for (const auto& p : pts)
      rows.push_back({{"family", p.family},
                      {"param", p.param},
                      {"G", p.g},
                      {"C", p.c}});
    emit(o, rows.dump(2) + "\n");
  } else {
    emit(o, infodist::csv_range(pts));
  }
}

void run_improve(const Options& o) {
  const Measurement m = load_measurement(o);
  const auto trail = infodist::improve(m, parse_pair(o.pair), o.eps,
                                       o.max_iter, o.conv_tol);
  if (o.format == "json") {
    ordered_json rows = ordered_json::array();
    for (const auto& r : trail) {
      ordered_json events = ordered_json::array();
      if (r.events.renormalized) events.push_back("renormalized");
      if (r.events.boundary_landed) events.push_back("boundary_landed");
      if (r.events.converged) events.push_back("converged");
      if (r.events.degenerate) events.push_back("degenerate");
      rows.push_back({{"iter", r.iteration},
                      {"lambdas", r.lambdas},
                      {"G", r.metric_g},
                      {"D", r.metric_d},
                      {"improvability", r.improvability},
                      {"nd", r.nd},
                      {"events", events}});
    }
    emit(o, rows.dump(2) + "\n");
  } else {
    emit(o, infodist::csv_trajectory(trail));
  }
}

struct AuditRow {
  std::string quantity;
  double closed_form, mc_value, std_error, z_score;
};

std::vector<AuditRow> audit_formulas(const Measurement& m, const Options& o) {
  const auto mc = infodist::haar_mc_metrics(m, o.samples, o.seed);
  const auto mt = infodist::metrics(m);
  const double p = infodist::outcome_probability(m);
  auto row = [](const char* name, double closed,
                const infodist::McEstimate& e) {
    const double z =
        (e.std_error > 0.0) ? (e.value - closed) / e.std_error : 0.0;
    return AuditRow{name, closed, e.value, e.std_error, z};
  };
  return {row("p", p, mc.p), row("G", mt.g, mc.g), row("F", mt.f, mc.f),
          row("R", mt.r, mc.r)};
}

// Gradient audit: one row per metric, comparing vector magnitudes and scoring
// the component-wise error against the documented 1e-6 relative tolerance.
std::vector<AuditRow> audit_gradients(const Measurement& m) {
  const auto gs = infodist::gradients(m);
  const auto fd = infodist::finite_difference_gradients(m);
  const Vec* analytic[3] = {&gs.grad_g, &gs.grad_f, &gs.grad_r};
  const char* names[3] = {"grad_G", "grad_F", "grad_R"};
  std::vector<AuditRow> rows;
  for (int k = 0; k < 3; ++k) {
    double err_sq = 0.0;
    for (size_t i = 0; i < fd[k].size(); ++i) {
      const double e = fd[k][i] - (*analytic[k])[i];
      err_sq += e * e;
    }
    const double mag = infodist::detail::norm(*analytic[k]);
    const double tol = 1e-6 * (mag > 0.0 ? mag : 1.0);
    rows.push_back(AuditRow{names[k], mag, infodist::detail::norm(fd[k]), tol,
                            std::sqrt(err_sq) / tol});
  }
  return rows;
}

// Steepest-direction audit: the brute-force winner's first-order change may
// not beat the analytic steepest ascent (z > 1 would mean it did by more
// than the documented 1e-9 margin).
std::vector<AuditRow> audit_directions(const Measurement& m,
                                       const Options& o) {
  const auto prof = infodist::degeneracy_profile(m);
  const auto gs = infodist::gradients(m);
  const auto asc = infodist::steepest_ascent(m, prof);
  const Vec* grads[3] = {&gs.grad_g, &gs.grad_f, &gs.grad_r};
  const infodist::Target targets[3] = {infodist::Target::G,
                                       infodist::Target::F,
                                       infodist::Target::R};
  const char* names[3] = {"G_ascent", "F_ascent", "R_ascent"};
  std::vector<AuditRow> rows;
  for (int k = 0; k < 3; ++k) {
    const Vec winner =
        infodist::brute_force_steepest(m, targets[k], true, o.samples, o.seed);
    const double analytic = infodist::detail::dot(asc[k], *grads[k]);
    const double found = infodist::detail::dot(winner, *grads[k]);
    rows.push_back(
        AuditRow{names[k], analytic, found, 1e-9, (found - analytic) / 1e-9});
  }
  return rows;
}

std::vector<AuditRow> audit_region(const Measurement& m, const Options& o,
                                   Pair pair) {
  const auto rep = infodist::region_membership_check(m, pair, o.count, o.seed,
                                                     1e-9, o.eps);
  auto count_row = [](const char* name, long expected, long got) {
    return AuditRow{name, static_cast<double>(expected),
                    static_cast<double>(got), 1.0,
                    static_cast<double>(got - expected)};
  };
  return {count_row("points_checked", o.count, rep.points_checked),
          count_row("points_outside_gamma", 0, rep.outside_gamma),
          count_row("vertices_checked", rep.vertices_checked,
                    rep.vertices_checked),
          count_row("vertices_outside_sigma", 0, rep.vertices_outside_sigma)};
}

void run_oracle(const Options& o) {
  const Measurement m = load_measurement(o);
  std::vector<AuditRow> rows;
  if (o.check == "formulas") {
    rows = audit_formulas(m, o);
  } else if (o.check == "gradients") {
    rows = audit_gradients(m);
  } else if (o.check == "directions") {
    rows = audit_directions(m, o);
  } else {
    rows = audit_region(m, o, parse_pair(o.pair));
  }
  if (o.format == "json") {
    ordered_json out = ordered_json::array();
    for (const auto& r : rows)
      out.push_back({{"quantity", r.quantity},
                     {"closed_form", r.closed_form},
                     {"mc_value", r.mc_value},
                     {"std_error", r.std_error},
                     {"z_score", r.z_score}});
    emit(o, out.dump(2) + "\n");
  } else {
    std::string out = "quantity,closed_form,mc_value,std_error,z_score\n";
    for (const auto& r : rows) {
      out += r.quantity;
      out += ',';
      out += infodist::format_g17(r.closed_form);
      out += ',';
      out += infodist::format_g17(r.mc_value);
      out += ',';
      out += infodist::format_g17(r.std_error);
      out += ',';
      out += infodist::format_g17(r.z_score);
      out += '\n';
    }
    emit(o, out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Information-disturbance metrics of a single measurement outcome"};
  app.require_subcommand(1);

  Options o;

  auto add_lambda = [&o](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--lambda", o.lambda_text,
                                "singular values, e.g. 0.8,0.7,0.4,0");
    if (required) opt->required();
    cmd->add_flag("--rescale", o.rescale,
                  "rescale so the largest singular value becomes 1");
  };
  auto add_pair = [&o](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--pair", o.pair, "metric pair")
                    ->check(CLI::IsMember({"gf", "gr"}));
    if (required) opt->required();
    return opt;
  };
  // One Options struct serves every subcommand, so per-command defaults are
  // applied in the callbacks (only one of which runs) rather than at
  // registration time.
  auto add_common = [&o](CLI::App* cmd) {
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
    cmd->add_option("--seed", o.seed, "RNG seed");
  };

  auto* eval = app.add_subcommand("eval", "metrics, angles, improvabilities");
  add_lambda(eval, true);
  add_common(eval);
  eval->callback([&] {
    if (!eval->count("--format")) o.format = "json";
    run_eval(o);
  });

  auto* scatter = app.add_subcommand(
      "scatter", "normalized changes of random admissible perturbations");
  add_lambda(scatter, true);
  add_pair(scatter, true);
  scatter->add_option("--eps", o.eps, "perturbation norm");
  scatter->add_option("--count", o.count, "number of samples");
  add_common(scatter);
  scatter->callback([&] {
    if (!scatter->count("--format")) o.format = "csv";
    run_scatter(o);
  });

  auto* region = app.add_subcommand(
      "region", "attainable-region boundary arcs and correlation ellipse");
  add_lambda(region, false);
  auto* pair_opt = add_pair(region, false);
  region->add_option("--preset", o.preset, "named archetype measurement");
  region->add_option("--count", o.count, "points per arc");
  add_common(region);
  region->callback([&] {
    if (!region->count("--format")) o.format = "csv";
    if (!region->count("--count")) o.count = 256;
    run_region(o, pair_opt->count() > 0);
  });

  auto* range = app.add_subcommand(
      "range", "coefficient-versus-G sweeps of the two-block families");
  range->add_option("--d", o.d, "dimension")->required();
  add_pair(range, true);
  range->add_option("--count", o.count, "grid points per curve");
  add_common(range);
  range->callback([&] {
    if (!range->count("--format")) o.format = "csv";
    if (!range->count("--count")) o.count = 64;
    run_range(o);
  });

  auto* improve = app.add_subcommand(
      "improve", "iterative measurement improvement trajectory");
  add_lambda(improve, true);
  add_pair(improve, true);
  improve->add_option("--eps", o.eps, "step size")->required();
  improve->add_option("--max-iter", o.max_iter, "iteration cap");
  improve->add_option("--conv-tol", o.conv_tol,
                      "improvability convergence threshold");
  add_common(improve);
  improve->callback([&] {
    if (!improve->count("--format")) o.format = "csv";
    run_improve(o);
  });

  auto* oracle = app.add_subcommand(
      "oracle", "audit closed forms against independent oracles");
  add_lambda(oracle, true);
  oracle->add_option("--check", o.check, "which audit to run")
      ->required()
      ->check(CLI::IsMember({"formulas", "gradients", "directions", "region"}));
  add_pair(oracle, false);
  oracle->add_option("--samples", o.samples, "MC / search sample count");
  oracle->add_option("--eps", o.eps, "perturbation norm (region check)");
  oracle->add_option("--count", o.count, "points to test (region check)");
  add_common(oracle);
  oracle->callback([&] {
    if (!oracle->count("--format")) o.format = "csv";
    run_oracle(o);
  });

  // A first token that is neither a flag nor a known subcommand gets its own
  // exit code so scripts can tell a typo'd verb from bad flag values.
  if (argc > 1 && argv[1][0] != '-') {
    static const std::set<std::string> known = {"eval",  "scatter", "region",
                                                "range", "improve", "oracle"};
    if (!known.count(argv[1])) {
      std::cerr << "unknown subcommand '" << argv[1] << "'\n";
      return kExitUnknownCommand;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return (code == 0) ? kExitOk : kExitValidation;
  } catch (const infodist::RejectionBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRejection;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
