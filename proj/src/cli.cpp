#include "chemolab/cli.hpp"

#include "chemolab/config.hpp"
#include "chemolab/io.hpp"
#include "chemolab/run.hpp"
#include "chemolab/weight_function.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace chemolab {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path resolve_out_dir(const std::optional<fs::path>& flag) {
  if (const char* env = std::getenv("CHEMOLAB_OUT"); env && *env) return fs::path(env);
  return flag.value_or(fs::path("chemolab_out"));
}

namespace {

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json report_json(const TheoremReport& rep, const ThresholdReport<double>& thr) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"status", to_string(c.status)},
                      {"value", c.value},
                      {"limit", c.limit},
                      {"detail", c.detail}});
  json j = {{"all_pass", rep.all_pass()},
            {"checks", checks},
            {"threshold", {{"m1", thr.m1}, {"m2", thr.m2}, {"bound", thr.bound}, {"within", thr.within}}},
            {"note", "end_state limits are engineering tolerances; only the signal has a proven decay rate"}};
  if (rep.decay)
    j["decay"] = {{"t_start", rep.decay->t_start},
                  {"rate", rep.decay->rate},
                  {"r_squared", rep.decay->r_squared},
                  {"reference_rate", rep.decay->reference_rate},
                  {"half_reference", rep.decay->half_reference}};
  return j;
}

}  // namespace

int cmd_run(const fs::path& config, const fs::path& out, std::ostream& os, std::ostream& err, bool quiet) {
  json manifest = {{"tool_version", kToolVersion}, {"started", utc_timestamp()}};

  ScenarioConfig cfg;
  try {
    cfg = parse_config(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  const json resolved = config_to_json(cfg);
  manifest["config_digest"] = sha256_hex(resolved.dump());
  manifest["config"] = resolved;

  try {
    ensure_dir(out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitError;
  }

  json files = json::array();
  try {
    const RunResult res = run(cfg);
    write_diagnostics_csv(out / "diagnostics.csv", res.series);
    files.push_back("diagnostics.csv");
    for (auto& f : write_snapshot(out, "final_state", res.final_state, cfg.grid)) files.push_back(f);

    int code = kExitOk;
    manifest["outcome"] = to_string(res.outcome);
    manifest["steps"] = res.steps;
    if (res.outcome == Outcome::blowup) {
      manifest["blowup"] = {{"t", res.blowup->t},
                            {"field", res.blowup->field},
                            {"cell", res.blowup->cell},
                            {"value", std::isfinite(res.blowup->value) ? json(res.blowup->value) : json("nan")}};
      code = kExitBlowup;
      if (!quiet)
        os << "blow-up sentinel: " << res.blowup->field << " in cell " << res.blowup->cell << " at t="
           << res.blowup->t << '\n';
    } else {
      const TheoremReport rep = verify_theorems(res.series, res.context);
      const auto thr = threshold_check(cfg.params, res.context.w0_max, cfg.grid.dim());
      write_json(out / "report.json", report_json(rep, thr));
      files.push_back("report.json");
      code = rep.all_pass() ? kExitOk : kExitCheckFailed;
      if (!quiet) {
        os << "completed " << res.steps << " steps to t=" << res.final_state.t << '\n';
        for (const auto& c : rep.checks)
          os << "  " << std::left << std::setw(20) << c.name << to_string(c.status) << "  " << c.detail << '\n';
      }
    }
    manifest["files"] = files;
    manifest["finished"] = utc_timestamp();
    write_json(out / "manifest.json", manifest);
    return code;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    manifest["outcome"] = to_string(Outcome::error);
    manifest["error"] = e.what();
    manifest["files"] = files;
    manifest["finished"] = utc_timestamp();
    try {
      write_json(out / "manifest.json", manifest);
    } catch (const IoError&) {
    }
    return kExitError;
  }
}

ThresholdTable threshold_table(int n, double chi1, double chi2, double w0_max) {
  const auto params = ModelParamsd::make(chi1, chi2, 1.0, 1.0);
  const auto thr = threshold_check(params, w0_max, n);
  ThresholdTable t;
  t.n = n;
  t.bound = thr.bound;
  t.within = thr.within;
  const double ms[2] = {thr.m1, thr.m2};
  for (int i = 0; i < 2; ++i) {
    auto& sp = t.species[i];
    sp.m = ms[i];
    sp.within = ms[i] < thr.bound;
    if (!sp.within) continue;
    sp.eps = epsilon_for_threshold(ms[i], n);
    if (ms[i] > 0.0 && *sp.eps < 1.0) {
      sp.p = p_for_equality(ms[i], *sp.eps);
      if (*sp.p > 1.0) sp.admissible = admissible_bound(*sp.p, *sp.eps);
    }
  }
  return t;
}

int cmd_threshold(int n, double chi1, double chi2, double w0_max, bool as_json, std::ostream& os,
                  std::ostream& err) {
  ThresholdTable t;
  try {
    t = threshold_table(n, chi1, chi2, w0_max);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  if (as_json) {
    json sp = json::array();
    for (const auto& s : t.species)
      sp.push_back({{"m", s.m}, {"within", s.within}, {"eps", opt(s.eps)}, {"p", opt(s.p)},
                    {"admissible_bound", opt(s.admissible)}});
    os << json{{"n", t.n}, {"bound", t.bound}, {"within", t.within}, {"species", sp}}.dump(2) << '\n';
    return kExitOk;
  }
  const auto show = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string("-"); };
  os << "n      " << t.n << '\n'
     << "bound  " << format_double(t.bound) << "  (sqrt(2/n)*pi)\n"
     << "within " << (t.within ? "true" : "false") << '\n'
     << "species  m                     within  eps                   p                     "
        "admissible_bound\n";
  for (int i = 0; i < 2; ++i) {
    const auto& s = t.species[i];
    os << std::left << std::setw(9) << i + 1 << std::setw(22) << format_double(s.m) << std::setw(8)
       << (s.within ? "true" : "false") << std::setw(22) << show(s.eps) << std::setw(22) << show(s.p)
       << show(s.admissible) << '\n';
  }
  return kExitOk;
}

std::vector<WeightSample> weight_table(double p, double eps, double m, int samples) {
  if (samples < 2) throw ParameterError("need at least 2 samples");
  const auto wf = make_weight(p, eps, m);
  std::vector<WeightSample> rows;
  rows.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double s = i + 1 == samples ? m : m * double(i) / double(samples - 1);
    rows.push_back({s, wf.phi(s), wf.phi_prime(s), wf.phi_second(s), wf.identity_residual(s)});
  }
  return rows;
}

int cmd_analyze_weight(double p, double eps, double m, int samples, const std::optional<fs::path>& out, bool quiet,
                       std::ostream& os, std::ostream& err) {
  std::vector<WeightSample> rows;
  try {
    rows = weight_table(p, eps, m, samples);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  const auto emit = [&](std::ostream& o) {
    o << "s,phi,phi_prime,phi_second,residual\n";
    for (const auto& r : rows)
      o << format_double(r.s) << ',' << format_double(r.phi) << ',' << format_double(r.phi_prime) << ','
        << format_double(r.phi_second) << ',' << format_double(r.residual) << '\n';
  };
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(r.residual));

  if (out) {
    try {
      ensure_dir(*out);
      std::ofstream f(*out / "weight_table.csv", std::ios::binary);
      if (!f) throw IoError("cannot write " + (*out / "weight_table.csv").string());
      emit(f);
    } catch (const IoError& e) {
      err << "I/O error: " << e.what() << '\n';
      return kExitError;
    }
  }
  if (!quiet) emit(os);
  os << "# admissible_bound " << format_double(admissible_bound(p, eps)) << '\n'
     << "# max |residual| " << format_double(worst) << '\n';
  return kExitOk;
}

int cmd_convergence(const fs::path& config, int levels, const fs::path& out, std::ostream& os, std::ostream& err,
                    bool quiet) {
  ScenarioConfig cfg;
  try {
    cfg = parse_config(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  std::vector<ConvergenceRow> rows;
  try {
    rows = convergence_study(cfg, levels);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  const auto show = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  const auto emit = [&](std::ostream& o) {
    o << "level,cells_x,h,err_u,err_v,err_w,order_u,order_v,order_w\n";
    for (const auto& r : rows)
      o << r.level << ',' << r.cells[0] << ',' << format_double(r.h) << ',' << format_double(r.err_u) << ','
        << format_double(r.err_v) << ',' << format_double(r.err_w) << ',' << show(r.order_u) << ','
        << show(r.order_v) << ',' << show(r.order_w) << '\n';
  };
  try {
    ensure_dir(out);
    std::ofstream f(out / "convergence.csv", std::ios::binary);
    if (!f) throw IoError("cannot write " + (out / "convergence.csv").string());
    emit(f);
    const json resolved = config_to_json(cfg);
    write_json(out / "manifest.json", {{"tool_version", kToolVersion},
                                       {"config_digest", sha256_hex(resolved.dump())},
                                       {"config", resolved},
                                       {"levels", levels},
                                       {"outcome", "completed"},
                                       {"finished", utc_timestamp()},
                                       {"files", {"convergence.csv"}}});
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitError;
  }
  if (!quiet) emit(os);
  return kExitOk;
}

}  // namespace chemolab
