// Command-line front end. Exit codes: 0 pass, 1 domain failure, 2 usage or
// parse failure. Failures print one JSON line {"error", "message"} on stderr.

#include "tsl/config.hpp"
#include "tsl/error.hpp"
#include "tsl/pipeline.hpp"
#include "tsl/serialize.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace tsl;

namespace {

struct UsageFailure {
  std::string code;
  std::string message;
};

int report_error(const std::string& code, const std::string& message, int exit_code, const json& extra = json::object()) {
  nlohmann::ordered_json j;  // keeps "error" first
  j["error"] = code;
  j["message"] = message;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  std::cerr << j.dump() << std::endl;
  return exit_code;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::SyntaxError:
    case ErrorCode::SchemaError:
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
      return 2;
    default:
      return 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_artifacts(const fs::path& dir, const Artifacts& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, bytes] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + (dir / name).string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
}

struct Options {
  std::string curve_path;
  std::string config_path;
  std::vector<double> T;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
};

TropicalCurve load_curve(const std::string& path) {
  try {
    return parse_curve(read_file(path));
  } catch (const Error& e) {
    // anything wrong with the document itself is a parse failure
    throw UsageFailure{std::string(to_string(e.code())), e.what()};
  }
}

RunConfig load_config(const Options& o, const TropicalCurve& curve) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = parse_config(read_file(o.config_path));
  if (!o.T.empty()) cfg.T_list = o.T;
  if (o.seed) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  finalize_config(cfg, curve);
  return cfg;
}

// Unbalanced takes precedence; a balanced but non-planar curve is a
// RankMismatch.
Error validation_error(const ValidationOutcome& v) {
  bool balanced = true;
  for (const auto& [k, ok] : v.report.at("balanced").items()) balanced = balanced && ok.get<bool>();
  std::string msg;
  for (const auto& m : v.report.at("messages")) msg += (msg.empty() ? "" : "; ") + m.get<std::string>();
  return Error(balanced ? ErrorCode::RankMismatch : ErrorCode::Unbalanced, msg);
}

int cmd_validate(const Options& o) {
  const TropicalCurve curve = load_curve(o.curve_path);
  const ValidationOutcome v = run_validate(curve);
  std::cout << dump(v.report);
  if (v.passed) return 0;
  const Error e = validation_error(v);
  return report_error(std::string(to_string(e.code())), e.what(), 1);
}

// Refuses curves that fail validation before any construction runs.
void require_valid(const TropicalCurve& curve) {
  const ValidationOutcome v = run_validate(curve);
  if (!v.passed) throw validation_error(v);
}

int cmd_compile(const Options& o) {
  const TropicalCurve curve = load_curve(o.curve_path);
  require_valid(curve);
  const RunConfig cfg = load_config(o, curve);
  const Artifacts files = run_compile(curve, cfg);
  write_artifacts(cfg.out, files);
  for (const auto& [name, _] : files) std::cout << (fs::path(cfg.out) / name).string() << "\n";
  return 0;
}

int cmd_sample(const Options& o) {
  const TropicalCurve curve = load_curve(o.curve_path);
  require_valid(curve);
  const RunConfig cfg = load_config(o, curve);
  const OutputFormat fmt = parse_format(o.format);
  const Artifacts files = run_sample(curve, cfg, fmt);
  write_artifacts(cfg.out, files);
  for (const auto& [name, _] : files) std::cout << (fs::path(cfg.out) / name).string() << "\n";
  return 0;
}

int cmd_verify(const Options& o) {
  const TropicalCurve curve = load_curve(o.curve_path);
  require_valid(curve);
  const RunConfig cfg = load_config(o, curve);
  if (cfg.T_list.size() < 3) throw Error(ErrorCode::ConfigError, "verify needs at least three T values");
  const VerifyOutcome v = run_verify(curve, cfg);
  write_artifacts(cfg.out, v.files);
  std::cout << v.files.at("convergence.csv");
  if (v.passed) return 0;
  return report_error(v.error_code, v.message, 1, {{"criterion", v.failed_criterion}});
}

int cmd_solve_linear(const Options& o) {
  const TropicalCurve curve = load_curve(o.curve_path);
  require_valid(curve);
  const RunConfig cfg = load_config(o, curve);
  const LinearOutcome lin = run_linear(curve, cfg, cfg.T_list.back());
  json doc = lin.report;
  doc["passed"] = lin.passed;
  write_artifacts(cfg.out, {{"linear.json", dump(doc)}});
  std::cout << dump(doc);
  if (lin.passed) return 0;
  return report_error(lin.error_code, lin.message, 1);
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_file(p.string()));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, p.string() + ": " + e.what());
  }
}

int cmd_report(const Options& o) {
  const fs::path dir = o.out.empty() ? fs::path("out") : fs::path(o.out);
  const json summary = read_json(dir / "summary.json");
  const json conv = read_json(dir / "convergence.json");
  const json decay = read_json(dir / "decay.json");
  const json lin = read_json(dir / "linear.json");
  std::cout << "convergence (fitted rate " << conv.value("fitted_rate", 0.0) << ")\n";
  for (const auto& r : conv.at("rows")) std::cout << "  T=" << r.at("T") << "  d_H=" << r.at("d_hausdorff") << "\n";
  std::cout << "decay (worst slope " << decay.at("max_slope") << ")\n";
  for (const auto& f : decay.at("fits"))
    std::cout << "  " << f.at("vertex").get<std::string>() << "/" << f.at("edge").get<std::string>()
              << "  slope=" << f.at("slope_R") << "\n";
  std::cout << "linear surrogate\n";
  if (lin.contains("error"))
    std::cout << "  " << lin.at("error").get<std::string>() << ": " << lin.at("message").get<std::string>() << "\n";
  else
    std::cout << "  contraction=" << lin.at("contraction_ratio") << "  iterations=" << lin.at("iterations")
              << "  residual=" << lin.at("residual") << "\n";
  for (const auto& [name, ok] : summary.at("criteria").items())
    std::cout << (ok.get<bool>() ? "PASS " : "FAIL ") << name << "\n";
  return summary.at("passed").get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tropical special Lagrangian toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_curve) {
    if (with_curve) sub->add_option("curve", o.curve_path, "curve JSON file")->required();
    sub->add_option("--config", o.config_path, "run configuration (schema 1)");
    sub->add_option("--T", o.T, "scale parameters, overriding T_list");
    sub->add_option("--seed", o.seed, "seed for every stochastic step");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "csv, json or binary")->check(CLI::IsMember({"csv", "json", "binary"}));
  };
  CLI::App* validate = app.add_subcommand("validate", "check balancing and local planarity");
  validate->add_option("curve", o.curve_path, "curve JSON file")->required();
  CLI::App* compile = app.add_subcommand("compile", "build matching data per T");
  add_common(compile, true);
  CLI::App* sample = app.add_subcommand("sample", "export rescaled base projections per T");
  add_common(sample, true);
  CLI::App* verify = app.add_subcommand("verify", "convergence, decay and linear-surrogate checks");
  add_common(verify, true);
  CLI::App* linear = app.add_subcommand("solve-linear", "parametrix solve on the metric graph at the largest T");
  add_common(linear, true);
  CLI::App* report = app.add_subcommand("report", "summarize the artifacts of a verify run");
  report->add_option("--out", o.out, "directory written by verify");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), 2);
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*compile) return cmd_compile(o);
    if (*sample) return cmd_sample(o);
    if (*verify) return cmd_verify(o);
    if (*linear) return cmd_solve_linear(o);
    if (*report) return cmd_report(o);
  } catch (const UsageFailure& u) {
    return report_error(u.code, u.message, 2);
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.code())), e.what(), exit_code_for(e.code()));
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), 1);
  }
  return 2;
}
