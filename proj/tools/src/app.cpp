#include "dpbc/cli/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dpbc/certificates.hpp"
#include "dpbc/cli/tables.hpp"
#include "dpbc/dp_oracle.hpp"
#include "dpbc/error.hpp"
#include "dpbc/model_io.hpp"
#include "dpbc/monte_carlo.hpp"
#include "dpbc/synthesis.hpp"

namespace dpbc::cli {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string point_str(std::span<const double> x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + fmt("%g", x[i]);
  return s;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw ConfigError(what + ": cannot parse '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

Task task_from(const std::string& spec) {
  if (spec == "safety") return Task::Safety;
  if (spec == "reach-avoid") return Task::ReachAvoid;
  throw ConfigError("--spec: expected safety or reach-avoid, got '" + spec + "'");
}

// "# key = value" lines describing every option of the subcommand after
// flags, config file and defaults have been merged.
std::vector<std::string> resolved_config(const CLI::App& root, const CLI::App& sub) {
  std::vector<std::string> lines{"dpbc " + sub.get_name()};
  auto emit = [&](const CLI::App& app, const std::string& prefix) {
    for (const CLI::Option* o : app.get_options()) {
      const std::string name = o->get_single_name();
      if (name == "help" || name == "h" || name == "config") continue;
      std::string value;
      if (o->count() > 0) {
        if (o->get_expected_max() == 0) {
          value = "true";
        } else {
          for (const auto& r : o->results()) value += (value.empty() ? "" : " ") + r;
        }
      } else if (!o->get_default_str().empty()) {
        value = o->get_default_str();
      } else {
        value = o->get_expected_max() == 0 ? "false" : "(unset)";
      }
      lines.push_back(prefix + name + " = " + value);
    }
  };
  emit(root, "");
  emit(sub, "");
  return lines;
}

void print_header(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& l : lines) out << "# " << l << "\n";
}

std::vector<std::vector<double>> points_from(const std::vector<double>& flat, const SystemModel& m,
                                             const char* what) {
  const int n = m.space.state_dim;
  if (flat.empty()) return m.initial_points;
  if (static_cast<int>(flat.size()) % n != 0) {
    throw ConfigError(std::string(what) + ": expected a multiple of " + std::to_string(n) + " coordinates");
  }
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < flat.size(); i += n) pts.emplace_back(flat.begin() + i, flat.begin() + i + n);
  return pts;
}

// ---------------------------------------------------------------- dp

struct DpArgs {
  std::string model;
  std::string spec = "safety";
  std::vector<double> x0;
  bool x0_grid = false;
  int nodes = 0;
  int quad = 201;
  double truncation = 8.0;
  int horizon = 0;
  bool no_convergence = false;
  std::string dump_csv;
  std::string format = "human";
};

GridSpec grid_for(const SystemModel& m, int nodes, int quad, double truncation) {
  GridSpec g = default_grid(m);
  if (nodes > 0) {
    for (auto& a : g.axes) a.nodes = nodes;
  }
  g.quadrature_nodes = quad;
  g.normal_truncation = truncation;
  g.validate();
  return g;
}

int cmd_dp(const DpArgs& a, const std::vector<std::string>& header, std::ostream& out) {
  const SystemModel model = resolve_model(a.model);
  const Task task = task_from(a.spec);
  validate(model, task);
  const GridSpec grid = grid_for(model, a.nodes, a.quad, a.truncation);
  const std::optional<int> horizon = a.horizon > 0 ? std::optional<int>(a.horizon) : std::nullopt;
  const DpResult dp = solve_dp(model, grid, task, horizon);

  std::vector<std::vector<double>> pts = points_from(a.x0, model, "--x0");
  if (a.x0_grid) {
    const SemialgebraicSet& x0set = model.region(RegionName::X0);
    std::vector<double> node(grid.dim());
    for (int i = 0; i < grid.total_nodes(); ++i) {
      grid.node(i, node);
      if (x0set.contains(node, 1e-12)) pts.push_back(node);
    }
  }
  if (pts.empty()) throw ConfigError("no initial state: pass --x0, --x0-grid or set initial_points in the model");

  std::optional<DpResult> coarse;
  GridSpec cgrid = grid;
  if (!a.no_convergence) {
    for (auto& ax : cgrid.axes) ax.nodes = (ax.nodes - 1) / 2 + 1;
    if (cgrid.axes.empty() || cgrid.axes[0].nodes >= 3) coarse.emplace(solve_dp(model, cgrid, task, horizon));
  }

  const bool safety = task == Task::Safety;
  const char* quantity = safety ? "unsafe probability 1 - SA" : "reach-avoid probability RA";
  print_header(out, header);
  if (a.format == "csv") {
    out << "x0,value" << (coarse ? ",coarse_value,abs_diff" : "") << "\n";
  } else {
    out << "model " << model.name << ", " << (safety ? "safety" : "reach-avoid") << ", horizon "
        << dp.horizon() << "\n";
    out << "grid " << grid.total_nodes() << " nodes";
    for (const auto& ax : grid.axes) out << " [" << fmt("%g", ax.lower) << ", " << fmt("%g", ax.upper) << "]";
    out << ", " << grid.quadrature_nodes << " quadrature nodes per panel, max mass error "
        << fmt("%.2e", dp.max_mass_error()) << "\n";
    out << std::left << std::setw(16) << "x0" << quantity << "\n" << std::right;
  }
  double extreme = safety ? -1.0 : 2.0;
  double worst_diff = 0.0;
  for (const auto& p : pts) {
    const double v = dp.value_at(p);
    if (!std::isfinite(v)) throw NumericalError("non-finite DP value at x0 = " + point_str(p));
    extreme = safety ? std::max(extreme, v) : std::min(extreme, v);
    std::optional<double> cv;
    if (coarse) {
      cv = coarse->value_at(p);
      worst_diff = std::max(worst_diff, std::abs(*cv - v));
    }
    if (a.format == "csv") {
      out << point_str(p) << "," << fmt("%.6f", v);
      if (cv) out << "," << fmt("%.6f", *cv) << "," << fmt("%.2e", std::abs(*cv - v));
      out << "\n";
    } else if (!a.x0_grid || pts.size() <= 20) {
      out << std::left << std::setw(16) << point_str(p) << std::right << fmt("%.6f", v) << "\n";
    }
  }
  if (a.format != "csv") {
    if (pts.size() > 1) out << (safety ? "max" : "min") << " over " << pts.size() << " points: " << fmt("%.6f", extreme) << "\n";
    if (coarse) {
      out << "grid convergence: " << cgrid.total_nodes() << "-node grid differs by at most "
          << fmt("%.2e", worst_diff) << "\n";
    }
  }
  if (!a.dump_csv.empty()) {
    std::ofstream f(a.dump_csv);
    if (!f) throw ConfigError("cannot open '" + a.dump_csv + "' for writing");
    f << "stage";
    for (int k = 0; k < grid.dim(); ++k) f << ",x" << k + 1;
    f << ",value\n";
    std::vector<double> node(grid.dim());
    for (int t = 0; t <= dp.horizon(); ++t) {
      const ValueTable& vt = dp.stage(t);
      for (int i = 0; i < grid.total_nodes(); ++i) {
        grid.node(i, node);
        f << t;
        for (double c : node) f << "," << fmt("%.10g", c);
        f << "," << fmt("%.10g", vt.values[i]) << "\n";
      }
    }
  }
  return kExitPass;
}

// ---------------------------------------------------------------- mc

struct McArgs {
  std::string model;
  std::string spec = "safety";
  std::vector<double> x0;
  long long samples = 1000000;
  std::uint64_t seed = 7;
  double confidence = 0.99;
  std::string format = "human";
};

int cmd_mc(const McArgs& a, const std::vector<std::string>& header, std::ostream& out) {
  if (a.samples <= 0) throw ConfigError("--samples must be positive");
  if (!(a.confidence > 0.0 && a.confidence < 1.0)) throw ConfigError("--confidence must lie in (0, 1)");
  const SystemModel model = resolve_model(a.model);
  const Task task = task_from(a.spec);
  validate(model, task);
  const auto pts = points_from(a.x0, model, "--x0");
  if (pts.empty()) throw ConfigError("no initial state: pass --x0 or set initial_points in the model");
  const bool safety = task == Task::Safety;
  print_header(out, header);
  if (a.format == "csv") {
    out << "x0,samples,satisfied,estimate,ci_low,ci_high\n";
  } else {
    out << "model " << model.name << ", " << (safety ? "safety" : "reach-avoid") << ", horizon " << model.horizon
        << ", " << a.samples << " trajectories, seed " << a.seed << "\n";
  }
  for (const auto& p : pts) {
    const MonteCarloResult r = monte_carlo(model, p, task, a.samples, a.seed, a.confidence);
    // Report the same quantity as the dp command.
    double est = r.estimate, lo = r.ci_low, hi = r.ci_high;
    if (safety) {
      est = 1.0 - r.estimate;
      std::tie(lo, hi) = r.complement_interval();
    }
    if (a.format == "csv") {
      out << point_str(p) << "," << r.samples << "," << r.satisfied << "," << fmt("%.6f", est) << ","
          << fmt("%.6f", lo) << "," << fmt("%.6f", hi) << "\n";
    } else {
      out << "x0 = " << point_str(p) << ": " << (safety ? "1 - SA" : "RA") << " = " << fmt("%.6f", est) << ", "
          << fmt("%g", 100.0 * a.confidence) << "% CI [" << fmt("%.6f", lo) << ", " << fmt("%.6f", hi) << "]"
          << " (" << r.satisfied << "/" << r.samples << " satisfied)\n";
    }
  }
  return kExitPass;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  std::string model;
  std::string certificate;
  int samples = 10000;
  std::uint64_t seed = 1;
  bool envelope = false;
  int nodes = 0;
  std::string format = "human";
};

int cmd_check(const CheckArgs& a, const std::vector<std::string>& header, std::ostream& out) {
  const SystemModel model = resolve_model(a.model);
  const BarrierCertificate cert = load_certificate(a.certificate, model.space);
  const Task task = is_safety_kind(cert.kind) ? Task::Safety : Task::ReachAvoid;
  validate(model, task);
  SamplingConfig cfg;
  cfg.samples_per_region = a.samples;
  cfg.seed = a.seed;
  const CheckReport rep = check_certificate(cert, model, cfg);

  print_header(out, header);
  const bool csv = a.format == "csv";
  if (csv) {
    out << "condition,region,worst_margin,samples,witness\n";
  } else {
    out << to_string(cert.kind) << " certificate, degree " << cert.v.degree() << ", alpha " << fmt("%g", cert.alpha)
        << ", beta " << fmt("%.6g", cert.beta);
    if (cert.delta) out << ", delta " << fmt("%.6g", *cert.delta);
    out << ", gamma " << fmt("%.6g", rep.gamma) << "\n";
    out << std::left << std::setw(8) << "cond" << std::setw(10) << "region" << std::setw(16) << "worst margin"
        << std::setw(10) << "samples" << "witness / description\n" << std::right;
  }
  for (const auto& c : rep.conditions) {
    if (csv) {
      out << c.id << "," << c.region << "," << fmt("%.6e", c.worst_margin) << "," << c.samples << ","
          << point_str(c.witness) << "\n";
    } else {
      out << std::left << std::setw(8) << c.id << std::setw(10) << c.region << std::setw(16)
          << fmt("%.6e", c.worst_margin) << std::setw(10) << c.samples << point_str(c.witness) << "  ("
          << c.description << ")" << (c.worst_margin < -1e-6 ? "  VIOLATED" : "") << "\n"
          << std::right;
    }
  }
  bool pass = rep.passed(1e-6);
  if (!csv) {
    if (!rep.tail_note.empty()) out << "tail: " << rep.tail_note << "\n";
    const char* what = is_safety_kind(cert.kind) ? "upper bound on 1 - SA" : "lower bound on RA";
    if (cert.delta) {
      const BoundReport b = evaluate_bound_over_x0(cert, model.horizon);
      out << what << " over X0: " << fmt("%.6f", b.clamped) << " (raw " << fmt("%.6g", b.raw) << ", "
          << (b.branch == BoundBranch::GammaNegative ? "gamma < 0 branch" : "alpha-power branch") << ")\n";
    }
    for (const auto& p : model.initial_points) {
      out << what << " at x0 = " << point_str(p) << ": "
          << fmt("%.6f", evaluate_bound_at(cert, model.horizon, p).clamped) << "\n";
    }
  }
  if (a.envelope) {
    const DpResult dp = solve_dp(model, grid_for(model, a.nodes, 201, 8.0), task);
    const EnvelopeViolation ev = induction_envelope_check(cert, model, dp, cfg);
    const bool ok = ev.gap >= -1e-3;
    pass = pass && ok;
    if (!csv) {
      out << "induction envelope: smallest gap " << fmt("%.3e", ev.gap) << " at stage " << ev.stage << ", x = "
          << point_str(ev.x) << " (" << ev.points_checked << " points)" << (ok ? "" : "  VIOLATED") << "\n";
    } else {
      out << "envelope,," << fmt("%.6e", ev.gap) << "," << ev.points_checked << "," << point_str(ev.x) << "\n";
    }
  }
  if (!csv) out << (pass ? "PASS" : "FAIL") << " (worst margin " << fmt("%.3e", rep.worst_margin()) << ")\n";
  return pass ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------- synthesize

struct SynthArgs {
  std::string model;
  std::string kind;
  int degree = 6;
  int multiplier_degree = -1;
  std::string alphas = "1";
  std::string out_path = "certificate.json";
  std::string backend = "ipm";
  std::string sdpa_out = "problem.dat-s";
  bool no_check = false;
  int samples = 10000;
  std::uint64_t seed = 1;
  int max_iterations = 100;
  double tolerance = 1e-8;
  std::string format = "human";
};

int cmd_synthesize(const SynthArgs& a, const std::vector<std::string>& header, std::ostream& out) {
  const SystemModel model = resolve_model(a.model);
  CertificateKind kind;
  try {
    kind = kind_from_string(a.kind);
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("--kind: ") + e.what());
  }
  if (a.degree < 0) throw ConfigError("--deg must be non-negative");
  validate(model, is_safety_kind(kind) ? Task::Safety : Task::ReachAvoid);
  const std::vector<double> alphas = parse_alpha_list(a.alphas);

  SynthesisOptions opt;
  opt.degrees.certificate = a.degree;
  if (a.multiplier_degree >= 0) opt.degrees.multiplier = a.multiplier_degree;
  opt.ipm.max_iterations = a.max_iterations;
  opt.ipm.tolerance = a.tolerance;
  opt.check.samples_per_region = a.samples;
  opt.check.seed = a.seed;
  opt.run_check = !a.no_check;
  std::unique_ptr<SdpBackend> backend = make_backend(a.backend, opt.ipm, a.sdpa_out);
  opt.backend = backend.get();
  const bool exporting = a.backend == "sdpa-export";
  if (exporting && alphas.size() != 1) throw ConfigError("--backend sdpa-export takes exactly one alpha");

  const SweepTable sweep = alpha_sweep(model, kind, alphas, opt);

  print_header(out, header);
  const bool csv = a.format == "csv";
  const bool safety = is_safety_kind(kind);
  if (csv) {
    out << "alpha,status,valid,bound,gamma,beta,delta,iterations,max_residual,min_gram_eigenvalue,worst_margin\n";
  } else {
    out << to_string(kind) << " synthesis, model " << model.name << ", degree " << a.degree << ", horizon "
        << model.horizon << " (" << (safety ? "upper bound on 1 - SA" : "lower bound on RA") << ")\n";
    out << std::setw(8) << "alpha" << std::setw(18) << "status" << std::setw(7) << "valid" << std::setw(10)
        << "bound" << std::setw(12) << "gamma" << std::setw(12) << "beta" << std::setw(12) << "delta"
        << std::setw(6) << "iter" << std::setw(10) << "residual" << std::setw(11) << "min eig" << "\n";
  }
  int attempted = 0;
  for (const SweepRow& row : sweep.rows) {
    const std::string al = fmt("%g", row.alpha);
    if (!row.applicable || !row.result) {
      const std::string mark = row.applicable ? kFailed : kNotApplicable;
      attempted += row.applicable ? 1 : 0;
      if (csv) {
        out << al << "," << mark << ",,,,,,,,,\n";
      } else {
        out << std::setw(8) << al << std::setw(18) << mark;
        if (!row.error.empty()) out << "  " << row.error;
        out << "\n";
      }
      continue;
    }
    ++attempted;
    const SynthesisResult& r = *row.result;
    const std::string bound = r.valid && r.bound ? fmt("%.6f", r.bound->clamped) : std::string(kFailed);
    const double margin = r.check ? r.check->worst_margin() : 0.0;
    if (csv) {
      out << al << "," << to_string(r.status) << "," << (r.valid ? 1 : 0) << "," << bound << ","
          << fmt("%.6g", r.gamma) << "," << fmt("%.10g", r.beta) << "," << fmt("%.10g", r.delta) << ","
          << r.iterations << "," << fmt("%.3e", r.max_residual) << "," << fmt("%.3e", r.min_gram_eigenvalue)
          << "," << fmt("%.3e", margin) << "\n";
    } else {
      out << std::setw(8) << al << std::setw(18) << to_string(r.status) << std::setw(7) << (r.valid ? "yes" : "no")
          << std::setw(10) << bound << std::setw(12) << fmt("%.3g", r.gamma) << std::setw(12)
          << fmt("%.6g", r.beta) << std::setw(12) << fmt("%.6g", r.delta) << std::setw(6) << r.iterations
          << std::setw(10) << fmt("%.1e", r.max_residual) << std::setw(11) << fmt("%.1e", r.min_gram_eigenvalue)
          << "\n";
    }
  }
  if (exporting) {
    if (!csv) out << "SDP written to " << a.sdpa_out << " (not solved)\n";
    return kExitPass;
  }
  if (!sweep.best_index) {
    if (attempted == 0) {
      if (!csv) out << "no alpha in the " << to_string(kind) << " parameter domain\n";
      return kExitPass;
    }
    if (!csv) out << "no valid certificate found\n";
    return kExitNumericalError;
  }
  const SynthesisResult& best = *sweep.rows[*sweep.best_index].result;
  save_certificate(*best.certificate, a.out_path);
  if (!csv) {
    out << "best: alpha " << fmt("%g", best.alpha) << ", bound " << fmt("%.6f", best.bound->clamped)
        << "; certificate written to " << a.out_path << "\n";
  }
  return kExitPass;
}

// ---------------------------------------------------------------- tables

struct TablesArgs {
  std::vector<std::string> which;
  std::string out_dir = "tables";
  int degree = -1;
  std::string format = "human";
};

int cmd_tables(const TablesArgs& a, const std::vector<std::string>& header, std::ostream& out) {
  std::vector<TableId> ids;
  for (const auto& w : a.which) {
    if (w == "all") {
      ids = {TableId::I, TableId::II, TableId::III, TableId::IV};
      break;
    }
    ids.push_back(table_from_string(w));
  }
  if (ids.empty()) throw ConfigError("tables: name at least one of I, II, III, IV or all");
  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) throw ConfigError("cannot create '" + a.out_dir + "': " + ec.message());

  TableOptions opt;
  if (a.degree >= 0) opt.degree = a.degree;
  bool failed = false;
  print_header(out, header);
  for (TableId id : ids) {
    const TableRun t = run_table(id, opt);
    const std::string stem = (std::filesystem::path(a.out_dir) / ("table_" + to_string(id))).string();
    std::vector<std::string> comments = header;
    comments.push_back("table " + to_string(id) + ": " + t.title);
    auto write = [&](const std::string& path, auto writer, const char* what) {
      std::ofstream f(path);
      if (!f) throw ConfigError("cannot open '" + path + "' for writing");
      std::vector<std::string> c = comments;
      c.push_back(what);
      writer(t, f, c);
    };
    write(stem + ".csv", write_values_csv, "values from this run");
    write(stem + "_reference.csv", write_reference_csv, "published values");
    write(stem + "_deviation.csv", write_deviation_csv, "absolute deviation from the published values");
    if (a.format == "csv") {
      write_values_csv(t, out, {});
    } else {
      print_table(t, out);
    }
    if (id == TableId::III) {
      const SignCheck s = gamma_sign_check(t);
      out << "gamma sign pattern (|published| >= 1e-3): " << s.compared - s.mismatches << "/" << s.compared
          << " match, " << s.skipped << " near-zero entries skipped\n";
    }
    out << "wrote " << stem << ".csv, " << stem << "_reference.csv, " << stem << "_deviation.csv\n";
    failed = failed || t.any_failure();
  }
  return failed ? kExitNumericalError : kExitPass;
}

void add_format(CLI::App* sub, std::string& format) {
  sub->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"human", "csv"}))
      ->capture_default_str();
}

}  // namespace

std::vector<double> parse_alpha_list(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("--alphas: range must be start:stop:step");
    const double lo = parse_double(parts[0], "--alphas"), hi = parse_double(parts[1], "--alphas"),
                 step = parse_double(parts[2], "--alphas");
    if (!(step > 0.0) || hi < lo) throw ConfigError("--alphas: need start <= stop and step > 0");
    const long long count = std::llround(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError("--alphas: too many points");
    for (long long i = 0; i < count; ++i) out.push_back(parse_double(fmt("%.12g", lo + i * step), "--alphas"));
  } else {
    for (const auto& p : split(spec, ',')) out.push_back(parse_double(p, "--alphas"));
  }
  if (out.empty()) throw ConfigError("--alphas: empty list");
  for (double v : out) {
    if (!(v > 0.0)) throw ConfigError("--alphas: alpha must be positive");
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Barrier-certificate verification of stochastic polynomial systems", "dpbc"};
  app.set_config("--config", "", "TOML/INI file with option values (flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  DpArgs dp;
  auto* s_dp = app.add_subcommand("dp", "Exhaustive grid dynamic programming");
  s_dp->add_option("model", dp.model, "Model file, or example1 / example2")->required();
  s_dp->add_option("--spec", dp.spec, "safety or reach-avoid")
      ->check(CLI::IsMember({"safety", "reach-avoid"}))
      ->capture_default_str();
  s_dp->add_option("--x0", dp.x0, "Initial state(s); n coordinates each")->allow_extra_args()->expected(1, -1);
  s_dp->add_flag("--x0-grid", dp.x0_grid, "Also evaluate every grid node inside X0");
  s_dp->add_option("--nodes", dp.nodes, "Grid nodes per axis (0: model default)")->capture_default_str();
  s_dp->add_option("--quad", dp.quad, "Quadrature nodes per panel")->capture_default_str();
  s_dp->add_option("--truncation", dp.truncation, "Normal noise truncation in sigmas")->capture_default_str();
  s_dp->add_option("--horizon", dp.horizon, "Override the model horizon (0: model)")->capture_default_str();
  s_dp->add_flag("--no-convergence", dp.no_convergence, "Skip the half-resolution grid comparison");
  s_dp->add_option("--dump-csv", dp.dump_csv, "Write all stage value tables to this CSV");
  add_format(s_dp, dp.format);

  McArgs mc;
  auto* s_mc = app.add_subcommand("mc", "Monte-Carlo estimate with a Wilson confidence interval");
  s_mc->add_option("model", mc.model, "Model file, or example1 / example2")->required();
  s_mc->add_option("--spec", mc.spec, "safety or reach-avoid")
      ->check(CLI::IsMember({"safety", "reach-avoid"}))
      ->capture_default_str();
  s_mc->add_option("--x0", mc.x0, "Initial state(s); n coordinates each")->expected(1, -1);
  s_mc->add_option("-N,--samples", mc.samples, "Number of trajectories")->capture_default_str();
  s_mc->add_option("--seed", mc.seed, "RNG seed")->capture_default_str();
  s_mc->add_option("--confidence", mc.confidence, "Confidence level")->capture_default_str();
  add_format(s_mc, mc.format);

  CheckArgs ck;
  auto* s_ck = app.add_subcommand("check", "Sampling check of a certificate file");
  s_ck->add_option("model", ck.model, "Model file, or example1 / example2")->required();
  s_ck->add_option("certificate", ck.certificate, "Certificate JSON")->required();
  s_ck->add_option("--samples", ck.samples, "Samples per region")->capture_default_str();
  s_ck->add_option("--seed", ck.seed, "Sampling seed")->capture_default_str();
  s_ck->add_flag("--envelope", ck.envelope, "Also compare against the DP value functions stage by stage");
  s_ck->add_option("--nodes", ck.nodes, "DP grid nodes per axis for --envelope (0: default)")
      ->capture_default_str();
  add_format(s_ck, ck.format);

  SynthArgs sy;
  auto* s_sy = app.add_subcommand("synthesize", "SOS synthesis over one or more alpha values");
  s_sy->add_option("model", sy.model, "Model file, or example1 / example2")->required();
  s_sy->add_option("--kind", sy.kind, "dsbc, msbc, ssbc or rabc")->required();
  s_sy->add_option("--deg", sy.degree, "Certificate degree")->capture_default_str();
  s_sy->add_option("--multiplier-deg", sy.multiplier_degree, "Multiplier degree (-1: balanced)")
      ->capture_default_str();
  s_sy->add_option("--alphas", sy.alphas, "start:stop:step, a comma list or one value")->capture_default_str();
  s_sy->add_option("-o,--out", sy.out_path, "Where to write the best certificate")->capture_default_str();
  s_sy->add_option("--backend", sy.backend, "ipm or sdpa-export")
      ->check(CLI::IsMember({"ipm", "sdpa-export"}))
      ->capture_default_str();
  s_sy->add_option("--sdpa-out", sy.sdpa_out, "SDPA file for --backend sdpa-export")->capture_default_str();
  s_sy->add_flag("--no-check", sy.no_check, "Skip the sampling check (results are never VALID)");
  s_sy->add_option("--samples", sy.samples, "Check samples per region")->capture_default_str();
  s_sy->add_option("--seed", sy.seed, "Check sampling seed")->capture_default_str();
  s_sy->add_option("--max-iter", sy.max_iterations, "Interior-point iteration limit")->capture_default_str();
  s_sy->add_option("--tol", sy.tolerance, "Interior-point tolerance")->capture_default_str();
  add_format(s_sy, sy.format);

  TablesArgs tb;
  auto* s_tb = app.add_subcommand("tables", "Regenerate the result tables as CSV");
  s_tb->add_option("which", tb.which, "I, II, III, IV or all")->required()->expected(1, -1);
  s_tb->add_option("--out-dir", tb.out_dir, "Output directory")->capture_default_str();
  s_tb->add_option("--deg", tb.degree, "Certificate degree for I-III (-1: 6 for Example 1, 4 for Example 2)")
      ->capture_default_str();
  add_format(s_tb, tb.format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "dpbc: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    if (s_dp->parsed()) return cmd_dp(dp, resolved_config(app, *s_dp), out);
    if (s_mc->parsed()) return cmd_mc(mc, resolved_config(app, *s_mc), out);
    if (s_ck->parsed()) return cmd_check(ck, resolved_config(app, *s_ck), out);
    if (s_sy->parsed()) return cmd_synthesize(sy, resolved_config(app, *s_sy), out);
    if (s_tb->parsed()) return cmd_tables(tb, resolved_config(app, *s_tb), out);
  } catch (const NumericalError& e) {
    err << "dpbc: numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const Error& e) {
    // ConfigError, DomainError, DimensionError, InvalidInputError
    err << "dpbc: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "dpbc: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitConfigError;
}

}  // namespace dpbc::cli
