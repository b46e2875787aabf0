// Command-line front end: synth, project, filter, box, bench, maximal, check.
//
// Exit codes: 0 ok, 1 parse error, 2 empty implicit set, 3 projection
// explosion, 4 initially infeasible filter, 5 shrinking safe set, 6 any other
// failure (including a failed check).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cis/bench.h"
#include "cis/io.h"
#include "cis/oracle.h"
#include "cis/runtime.h"

namespace {

using namespace cis;

constexpr int kExitParse = 1;
constexpr int kExitEmpty = 2;
constexpr int kExitExplosion = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitShrank = 5;
constexpr int kExitOther = 6;

struct Global {
  std::optional<double> tol_feas;
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
  std::string json_out;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Tolerances tolerances(const Global& g, const ProblemFile* p = nullptr) {
  Tolerances tol = default_tolerances();
  if (p && p->options.tol_feas) tol.feasibility = *p->options.tol_feas;
  if (g.tol_feas) tol.feasibility = *g.tol_feas;
  return tol;
}

std::uint64_t seed_of(const Global& g, const ProblemFile* p = nullptr) {
  if (g.seed) return *g.seed;
  if (p && p->options.seed) return *p->options.seed;
  return 1;
}

void emit_json(const Global& g, const Json& j) {
  if (!g.json_out.empty()) write_json_file(g.json_out, j);
}

// Flag values win over the problem file; (0, 1) is the fallback.
LassoSpec resolve_spec(const ProblemFile& p, std::optional<int> tau,
                       std::optional<int> lambda) {
  if (!tau && !lambda && p.spec.custom) return *p.spec.custom;
  const int t = tau.value_or(p.spec.tau.value_or(0));
  const int l = lambda.value_or(p.spec.lambda.value_or(1));
  if (t < 0 || l < 1) throw ParseError("spec: need tau >= 0 and lambda >= 1");
  return LassoSpec::lasso(t, l, p.system.m());
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : ".json";
  p.replace_extension();
  return p.string() + suffix + ext;
}

Vector parse_vector(std::istringstream& in, int n, const std::string& line) {
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    if (!(in >> v(i))) throw ParseError("filter: short line '" + line + "'");
  }
  return v;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string file;
  std::string out = "rcis.json";
  std::optional<int> tau, lambda, q;
  bool want_explicit = false;
};

int cmd_synth(const SynthArgs& a, const Global& g) {
  const ProblemFile p = problem_from_json(read_json_file(a.file));
  const Tolerances tol = tolerances(g, &p);
  std::vector<LassoSpec> specs;
  std::optional<int> q = a.q ? a.q : (a.tau || a.lambda ? std::nullopt : p.spec.q);
  if (q) {
    if (*q < 1) throw ParseError("synth: q must be positive");
    for (auto [t, l] : theta(*q)) {
      specs.push_back(LassoSpec::lasso(t, l, p.system.m()));
    }
  } else {
    specs.push_back(resolve_spec(p, a.tau, a.lambda));
  }

  Json summary = Json::array();
  bool any_nonempty = false;
  for (const LassoSpec& spec : specs) {
    const ImplicitRCIS ir = implicit_rcis(p.system, p.safe_set, spec, tol);
    const std::string path =
        q ? with_suffix(a.out, "_t" + std::to_string(spec.tau) + "_l" +
                                   std::to_string(spec.lambda))
          : a.out;
    write_json_file(path, to_json(ir));
    any_nonempty = any_nonempty || !ir.empty;
    Json row = {{"tau", spec.tau},
                {"lambda", spec.lambda},
                {"rows", ir.polytope.rows()},
                {"empty", ir.empty},
                {"file", path}};
    std::cout << "tau=" << spec.tau << " lambda=" << spec.lambda
              << " rows=" << ir.polytope.rows()
              << " empty=" << (ir.empty ? "yes" : "no") << " -> " << path
              << '\n';
    if (a.want_explicit && !ir.empty) {
      ProjectOptions opt;
      opt.tol = tol;
      const HPolytope C = explicit_rcis(ir, opt);
      const std::string epath = with_suffix(path, ".explicit");
      write_json_file(epath, to_json(C));
      row["explicit_rows"] = C.rows();
      row["explicit_file"] = epath;
      std::cout << "  explicit rows=" << C.rows() << " -> " << epath << '\n';
    }
    summary.push_back(row);
  }
  emit_json(g, summary);
  return any_nonempty ? 0 : kExitEmpty;
}

// ---- project ---------------------------------------------------------------

int cmd_project(const std::string& file, int keep, const std::string& out,
                const Global& g) {
  const HPolytope P = polytope_from_json(read_json_file(file));
  if (keep < 0 || keep > P.dim()) throw ParseError("project: bad --keep");
  ProjectOptions opt;
  opt.tol = tolerances(g);
  const HPolytope R = project(P, keep, opt);
  const Json j = to_json(R);
  if (out.empty()) {
    std::cout << j.dump(1) << '\n';
  } else {
    write_json_file(out, j);
    std::cout << "rows=" << R.rows() << " -> " << out << '\n';
  }
  emit_json(g, j);
  return 0;
}

// ---- filter ----------------------------------------------------------------

struct FilterArgs {
  std::string file;
  std::string rcis;
  std::optional<int> tau, lambda;
  std::string encoding = "U3";
  bool stream = false;
};

int cmd_filter(const FilterArgs& a, const Global& g) {
  const ProblemFile p = problem_from_json(read_json_file(a.file));
  LassoSpec spec = resolve_spec(p, a.tau, a.lambda);
  if (!a.rcis.empty() && !a.tau && !a.lambda) {
    spec = implicit_from_json(read_json_file(a.rcis)).spec;
  }
  const Encoding enc = parse_encoding(a.encoding);
  const int n = p.system.n();
  const int m = p.system.m();

  FilterState fs;
  long steps = 0, passes = 0, corrected = 0, fallbacks = 0;
  double max_distance = 0.0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    int t = 0;
    if (!(in >> t)) throw ParseError("filter: bad line '" + line + "'");
    const Vector x = parse_vector(in, n, line);
    const Vector u_req = parse_vector(in, m, line);
    const FilterOutput o =
        filter_step(fs, p.system, t, p.safe_set_at(t), x, u_req, spec, enc);
    ++steps;
    if (o.status == SuperviseStatus::kPass) ++passes;
    if (o.status == SuperviseStatus::kCorrected) ++corrected;
    if (o.fell_back) ++fallbacks;
    max_distance = std::max(max_distance, (o.u - u_req).norm());
    for (int i = 0; i < m; ++i) std::cout << num(o.u(i)) << ' ';
    std::cout << to_string(o.status) << ' ' << o.t_star << '\n';
    if (a.stream) std::cout.flush();
  }
  std::cout << "# steps=" << steps << " pass=" << passes
            << " corrected=" << corrected << " fallbacks=" << fallbacks
            << " max_correction=" << num(max_distance) << '\n';
  emit_json(g, {{"steps", steps},
                {"pass", passes},
                {"corrected", corrected},
                {"fallbacks", fallbacks},
                {"max_correction", max_distance}});
  return 0;
}

// ---- box -------------------------------------------------------------------

int cmd_box(const std::string& file, const std::string& mode_name,
            std::optional<int> tau, std::optional<int> lambda,
            const Global& g) {
  const ProblemFile p = problem_from_json(read_json_file(file));
  BoxMode mode;
  if (mode_name == "geomean") {
    mode = BoxMode::kGeometricMean;
  } else if (mode_name == "sum") {
    mode = BoxMode::kSumWidth;
  } else if (mode_name == "feasibility") {
    mode = BoxMode::kFeasibility;
  } else {
    throw ParseError("box: unknown mode '" + mode_name + "'");
  }
  const SafeBoxResult r =
      safe_box(p.system, p.safe_set, resolve_spec(p, tau, lambda), mode,
               HyperBox(), tolerances(g, &p));
  const Json j = to_json(r);
  std::cout << j.dump(1) << '\n';
  emit_json(g, j);
  return r.status == BoxStatus::kInfeasible ? kExitEmpty : 0;
}

// ---- bench -----------------------------------------------------------------

int cmd_bench(const std::string& suite, BenchOptions opt,
              const std::string& out, const Global& g) {
  opt.seed = seed_of(g);
  if (g.samples) opt.samples = *g.samples;
  const std::string csv = run_bench(suite, opt);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << csv;
  }
  return 0;
}

// ---- maximal ---------------------------------------------------------------

int cmd_maximal(const std::string& file, int max_iters, const std::string& out,
                const Global& g) {
  const ProblemFile p = problem_from_json(read_json_file(file));
  ProjectOptions opt;
  opt.tol = tolerances(g, &p);
  const MaximalResult r = maximal_rcis(p.system, p.safe_set, max_iters,
                                       opt.tol.containment, opt);
  std::cout << "converged=" << (r.converged ? "yes" : "no")
            << " iterations=" << r.iterations << " rows=" << r.set.rows()
            << " empty=" << (is_empty(r.set) ? "yes" : "no") << '\n';
  const Json j = to_json(r.set);
  if (!out.empty()) write_json_file(out, j);
  emit_json(g, {{"converged", r.converged},
                {"iterations", r.iterations},
                {"set", j}});
  return r.converged ? 0 : kExitOther;
}

// ---- check -----------------------------------------------------------------

int cmd_check(const std::string& file, const std::string& rcis_file,
              int samples, const Global& g) {
  const ProblemFile p = problem_from_json(read_json_file(file));
  const ImplicitRCIS ir = implicit_from_json(read_json_file(rcis_file));
  Json report;
  bool ok = true;

  const bool fp_ok = fingerprint(p.safe_set) == ir.fingerprint;
  report["safe_set_matches"] = fp_ok;
  ok = ok && fp_ok;

  const PeriodicityReport per =
      verify_eventually_periodic(ir.spec.P, ir.spec.tau, ir.spec.lambda);
  report["periodic"] = per.holds;
  ok = ok && per.holds;

  if (ir.empty) {
    report["empty"] = true;
  } else {
    const HPolytope C = explicit_rcis(ir);
    const InvarianceReport inv =
        invariance_check(p.system, p.safe_set, C, samples, seed_of(g, &p));
    report["empty"] = false;
    report["samples"] = inv.samples;
    report["violations"] = inv.violations;
    ok = ok && inv.violations == 0;
  }
  report["ok"] = ok;
  std::cout << report.dump(1) << '\n';
  emit_json(g, report);
  return ok ? 0 : kExitOther;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controlled invariant sets for linear systems"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--tol-feas", g.tol_feas, "LP/QP feasibility tolerance");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--samples", g.samples, "Monte Carlo samples");
  app.add_option("--json-out", g.json_out, "write a JSON summary here");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "build implicit invariant sets");
  s->add_option("file", synth.file, "problem JSON")->required();
  s->add_option("--out,-o", synth.out, "implicit set JSON path");
  auto* s_tau = s->add_option("--tau", synth.tau, "transient length");
  auto* s_lam = s->add_option("--lambda", synth.lambda, "period");
  s->add_option("--q", synth.q, "every (tau, lambda) with tau + lambda = q")
      ->excludes(s_tau)
      ->excludes(s_lam);
  s->add_flag("--explicit", synth.want_explicit, "also project onto x");

  std::string proj_file, proj_out;
  int proj_keep = 0;
  auto* pr = app.add_subcommand("project", "project a polytope");
  pr->add_option("file", proj_file, "polytope JSON")->required();
  pr->add_option("--keep", proj_keep, "leading coordinates kept")->required();
  pr->add_option("--out,-o", proj_out, "output JSON path");

  FilterArgs filt;
  auto* f = app.add_subcommand("filter", "supervise inputs read from stdin");
  f->add_option("file", filt.file, "problem JSON")->required();
  f->add_option("rcis", filt.rcis, "implicit set JSON supplying the spec");
  f->add_option("--tau", filt.tau);
  f->add_option("--lambda", filt.lambda);
  f->add_option("--encoding", filt.encoding, "U1, U2 or U3");
  f->add_flag("--stream", filt.stream, "flush after every line");

  std::string box_file, box_mode = "geomean";
  std::optional<int> box_tau, box_lambda;
  auto* b = app.add_subcommand("box", "largest safe hyper-box");
  b->add_option("file", box_file, "problem JSON")->required();
  b->add_option("--mode", box_mode, "geomean, sum or feasibility");
  b->add_option("--tau", box_tau);
  b->add_option("--lambda", box_lambda);

  std::string bench_suite, bench_out;
  BenchOptions bench_opt;
  auto* be = app.add_subcommand("bench", "experiment suites as CSV");
  be->add_option("suite", bench_suite, "suite name")
      ->required()
      ->check(CLI::IsMember(bench_suites()));
  be->add_option("--instances", bench_opt.instances);
  be->add_option("--n-max", bench_opt.n_max);
  be->add_option("--wbar", bench_opt.wbar);
  be->add_flag("--timing", bench_opt.timing, "fill the time_s column");
  be->add_option("--timing-runs", bench_opt.timing_runs);
  be->add_option("--out,-o", bench_out, "CSV path (stdout otherwise)");

  std::string max_file, max_out;
  int max_iters = 200;
  auto* mx = app.add_subcommand("maximal", "maximal invariant set by iteration");
  mx->add_option("file", max_file, "problem JSON")->required();
  mx->add_option("--max-iters", max_iters);
  mx->add_option("--out,-o", max_out, "output JSON path");

  std::string check_file, check_rcis;
  int check_samples = 200;
  auto* ch = app.add_subcommand("check", "verify an implicit set file");
  ch->add_option("file", check_file, "problem JSON")->required();
  ch->add_option("rcis", check_rcis, "implicit set JSON")->required();
  ch->add_option("--check-samples", check_samples);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    if (*s) return cmd_synth(synth, g);
    if (*pr) return cmd_project(proj_file, proj_keep, proj_out, g);
    if (*f) return cmd_filter(filt, g);
    if (*b) return cmd_box(box_file, box_mode, box_tau, box_lambda, g);
    if (*be) return cmd_bench(bench_suite, bench_opt, bench_out, g);
    if (*mx) return cmd_maximal(max_file, max_iters, max_out, g);
    if (*ch) return cmd_check(check_file, check_rcis, check_samples, g);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ExplosionAbort& e) {
    std::cerr << "projection aborted: " << e.what() << '\n';
    return kExitExplosion;
  } catch (const InitiallyInfeasible& e) {
    std::cerr << "initially infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const SafeSetShrank& e) {
    std::cerr << "safe set shrank: " << e.what() << '\n';
    return kExitShrank;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
