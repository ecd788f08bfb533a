#include "tsl/pipeline.hpp"

#include "tsl/error.hpp"
#include "tsl/glue.hpp"
#include "tsl/linear_surrogate.hpp"
#include "tsl/phase_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsl {

namespace {

std::string t_label(double T) {
  std::ostringstream os;
  os << T;
  return os.str();
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  if (name == "binary") return OutputFormat::Binary;
  throw Error(ErrorCode::ConfigError, "unknown format '" + name + "' (csv, json or binary)");
}

ValidationOutcome run_validate(const TropicalCurve& curve) {
  ValidationReport rep = validate_balancing(curve);
  rep.merge(validate_locally_planar(curve));
  ValidationOutcome out;
  out.passed = rep.passed();
  json deficits = json::object();
  for (const auto& v : curve.vertex_ids()) {
    const LocalFan fan = localize(curve, v);
    json d = json::array();
    for (const auto& x : balancing_deficit(fan.rays)) d.push_back(x.str());
    deficits[v] = d;
  }
  out.report = {{"passed", out.passed},
                {"balanced", rep.balanced},
                {"locally_planar", rep.locally_planar},
                {"deficits", deficits},
                {"messages", rep.messages},
                {"moduli_dimension", out.passed ? json(moduli_dimension(curve)) : json(nullptr)}};
  return out;
}

Artifacts run_compile(const TropicalCurve& curve, const RunConfig& cfg) {
  const auto free = resolve_free_phases(cfg, curve);
  Artifacts files;
  for (double T : cfg.T_list) {
    const MatchingDatum d = build_matching(curve, *cfg.kahler, T, free, *cfg.seed);
    json doc = datum_to_json(d);
    const MatchingReport rep = check_matching(d);
    doc["matching_report"] = {{"passed", rep.passed},
                              {"failures", rep.failures},
                              {"l_min", number_or_null(rep.l_min)},
                              {"l_max", number_or_null(rep.l_max)},
                              {"max_phase_residual", rep.max_phase_residual}};
    files["datum_T" + t_label(T) + ".json"] = dump(doc);
  }
  return files;
}

Artifacts run_sample(const TropicalCurve& curve, const RunConfig& cfg, OutputFormat format) {
  const auto free = resolve_free_phases(cfg, curve);
  const double box = cfg.clip_box.value_or(default_clip_box(curve));
  Artifacts files;
  for (double T : cfg.T_list) {
    const MatchingDatum d = build_matching(curve, *cfg.kahler, T, free, *cfg.seed);
    const PointCloud cloud = rescaled_cloud(d, cfg.resolution, box);
    std::ostringstream os;
    std::string ext;
    switch (format) {
      case OutputFormat::Csv:
        write_csv(os, cloud);
        ext = ".csv";
        break;
      case OutputFormat::Json:
        os << dump(cloud_to_json(cloud));
        ext = ".json";
        break;
      case OutputFormat::Binary:
        write_binary(os, cloud);
        ext = ".bin";
        break;
    }
    files["cloud_T" + t_label(T) + ext] = os.str();
  }
  return files;
}

LinearOutcome run_linear(const TropicalCurve& curve, const RunConfig& cfg, double T) {
  LinearOutcome out;
  const MetricGraph g = metric_graph_from_curve(curve, edge_lengths(curve, cfg.kahler->g), T, cfg.tolerances.h_grid);
  ParametrixOptions opts;
  opts.tolerance = cfg.tolerances.parametrix;
  opts.delta = cfg.tolerances.delta;
  try {
    const Discretization d = discretize(g);
    const Field f = localized_source(g, d, 0);
    const ParametrixResult r = parametrix_solve(g, f, opts);
    out.report = diagnostics_to_json(r.diagnostics);
    out.passed = r.diagnostics.residual < opts.tolerance;
    if (!out.passed) {
      out.error_code = "NoConvergence";
      out.message = "parametrix residual above tolerance";
    }
  } catch (const Error& e) {
    // Edges too short for the partition put the graph outside the regime
    // where the parametrix contracts, which is reported as NoConvergence.
    out.error_code = e.code() == ErrorCode::EdgeTooShort ? "NoConvergence" : std::string(to_string(e.code()));
    out.message = e.what();
    out.report = {{"error", out.error_code}, {"cause", std::string(to_string(e.code()))}, {"message", out.message}};
  }
  out.report["T"] = T;
  out.report["l_min"] = number_or_null(g.l_min());
  out.report["l_max"] = number_or_null(g.l_max());
  return out;
}

VerifyOutcome run_verify(const TropicalCurve& curve, const RunConfig& cfg) {
  if (cfg.T_list.size() < 3) throw Error(ErrorCode::ConfigError, "verify needs at least three T values");
  VerifyOutcome out;
  const auto free = resolve_free_phases(cfg, curve);
  auto fail = [&](const std::string& criterion, const std::string& code, const std::string& msg) {
    if (!out.failed_criterion.empty()) return;
    out.failed_criterion = criterion;
    out.error_code = code;
    out.message = msg;
  };

  ConvergenceOptions copts;
  copts.resolution = cfg.resolution;
  copts.clip_box = cfg.clip_box;
  copts.seed = *cfg.seed;
  const ConvergenceTable table = convergence_test(curve, *cfg.kahler, free, cfg.T_list, copts);
  bool decreasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    decreasing = decreasing && table.rows[i].d_hausdorff < table.rows[i - 1].d_hausdorff;
  const double first = table.rows.front().d_hausdorff, last = table.rows.back().d_hausdorff;
  const bool conv_ok = decreasing && last < kFinalDistance && last / first < kDistanceRatio;
  if (!conv_ok) {
    std::ostringstream msg;
    msg << "Hausdorff distances " << (decreasing ? "" : "not decreasing, ") << "final " << last << ", final/first "
        << last / first;
    fail("convergence", "CriterionFailed", msg.str());
  }
  {
    std::ostringstream csv;
    write_convergence_csv(csv, table);
    out.files["convergence.csv"] = csv.str();
    json cj = convergence_to_json(table);
    cj["passed"] = conv_ok;
    out.files["convergence.json"] = dump(cj);
  }

  const MatchingDatum datum = build_matching(curve, *cfg.kahler, cfg.T_list.front(), free, *cfg.seed);
  json fits = json::array();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : datum.halves) {
    const DecayFit f = fit_end_decay(datum, h.vertex, h.edge);
    worst = std::max(worst, f.slope_R);
    fits.push_back({{"vertex", h.vertex}, {"edge", h.edge}, {"slope_R", f.slope_R}, {"rate", f.rate}, {"amplitude", f.amplitude}});
  }
  const bool decay_ok = worst < kDecaySlope;
  if (!decay_ok) {
    std::ostringstream msg;
    msg << "decay slope " << worst << " is not below " << kDecaySlope;
    fail("decay", "CriterionFailed", msg.str());
  }
  out.files["decay.json"] = dump({{"fits", fits}, {"max_slope", worst}, {"passed", decay_ok}});

  const LinearOutcome lin = run_linear(curve, cfg, cfg.T_list.back());
  if (!lin.passed) fail("linear", lin.error_code, lin.message);
  json lj = lin.report;
  lj["passed"] = lin.passed;
  out.files["linear.json"] = dump(lj);

  out.passed = out.failed_criterion.empty();
  out.files["summary.json"] = dump({{"passed", out.passed},
                                    {"criteria", {{"convergence", conv_ok}, {"decay", decay_ok}, {"linear", lin.passed}}},
                                    {"failed_criterion", out.failed_criterion.empty() ? json(nullptr) : json(out.failed_criterion)},
                                    {"seed", *cfg.seed},
                                    {"free_phases", free},
                                    {"genericity_attempts", datum.genericity_attempts},
                                    {"warnings", datum.warnings}});
  return out;
}

}  // namespace tsl
