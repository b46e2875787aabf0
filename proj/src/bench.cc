#include "cis/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "cis/oracle.h"

namespace cis {

namespace {

using Row = std::map<std::string, std::string>;

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string csv_escape(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

class Table {
 public:
  explicit Table(const BenchOptions& opt, const std::string& suite) {
    out_ << "# suite=" << suite << " seed=" << opt.seed
         << " samples=" << opt.samples << " instances=" << opt.instances
         << " n_max=" << opt.n_max << " wbar=" << fmt(opt.wbar)
         << " timing=" << (opt.timing ? 1 : 0) << '\n';
    const auto& cols = bench_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out_ << (i ? "," : "") << cols[i];
    }
    out_ << '\n';
  }
  void add(const Row& row) {
    const auto& cols = bench_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      auto it = row.find(cols[i]);
      out_ << (i ? "," : "") << (it == row.end() ? "NA" : csv_escape(it->second));
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

// Median wall time of f over `runs` runs, 3 significant digits.
std::string time_median(const BenchOptions& opt,
                        const std::function<void()>& f) {
  if (!opt.timing) return "NA";
  std::vector<double> times;
  for (int r = 0; r < std::max(1, opt.timing_runs); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return fmt3(times[times.size() / 2]);
}

// Guards one row: on failure the error column is filled and the suite goes
// on.
void guarded(Table& table, Row row, const std::function<void(Row&)>& body) {
  try {
    body(row);
  } catch (const std::exception& e) {
    row["error"] = e.what();
  }
  table.add(row);
}

std::uint64_t instance_seed(std::uint64_t base, int n, int i) {
  std::seed_seq seq{static_cast<std::uint32_t>(base),
                    static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(i)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Row base_row(const std::string& suite, const Problem& p) {
  return {{"suite", suite},
          {"instance", p.name},
          {"n", std::to_string(p.system.n())}};
}

void set_spec(Row& row, int tau, int lambda) {
  row["tau"] = std::to_string(tau);
  row["lambda"] = std::to_string(lambda);
  row["q"] = std::to_string(tau + lambda);
}

// Volume of the projected implicit set relative to a reference, from one
// shared sample of the reference's bounding box.
VolumeRatio projected_ratio(const ImplicitRCIS& ir, const HPolytope& ref,
                            long samples, std::uint64_t seed) {
  if (ir.empty || is_empty(ref)) return VolumeRatio{};
  return mc_volume_ratio(view(ir.lifted_view()), view(ref), samples, seed);
}

std::string run_hierarchy(const BenchOptions& opt) {
  Table table(opt, "hierarchy");
  const Problem p = double_integrator();
  const std::vector<double> levels =
      hierarchy_level_volumes(p, 6, opt.samples, opt.seed);
  for (int q = 1; q <= 6; ++q) {
    for (auto [tau, lambda] : theta(q)) {
      Row row = base_row("hierarchy", p);
      set_spec(row, tau, lambda);
      guarded(table, row, [&](Row& r) {
        ImplicitRCIS ir;
        r["time_s"] = time_median(opt, [&] {
          ir = implicit_rcis(p.system, p.safe_set,
                             LassoSpec::lasso(tau, lambda, 1));
        });
        if (!opt.timing) {
          ir = implicit_rcis(p.system, p.safe_set,
                             LassoSpec::lasso(tau, lambda, 1));
        }
        r["implicit_rows"] = std::to_string(ir.polytope.rows());
        r["empty"] = ir.empty ? "1" : "0";
        r["volume"] = fmt(ir.empty ? 0.0
                                   : mc_volume(explicit_rcis(ir), opt.samples,
                                               opt.seed));
      });
    }
    Row level = base_row("hierarchy", p);
    level["q"] = std::to_string(q);
    level["tau"] = "level";
    level["volume"] = fmt(levels[q - 1]);
    table.add(level);
  }
  return table.str();
}

std::string run_scal(const BenchOptions& opt) {
  Table table(opt, "scal");
  for (int n = 2; n <= opt.n_max; n += (n < 10 ? 2 : 10)) {
    for (int kind = 0; kind < 2; ++kind) {
      const int k = kind == 0 ? 2 * n : n * n;
      const Problem p =
          random_brunovsky(n, k, instance_seed(opt.seed, n, kind), 0.5, 0.0);
      for (int q = 1; q <= 3; ++q) {
        Row row = base_row("scal", p);
        row["k"] = std::to_string(k);
        row["q"] = std::to_string(q);
        row["tau"] = "level";
        guarded(table, row, [&](Row& r) {
          Hierarchy h;
          auto build = [&] { h = hierarchy(p.system, p.safe_set, q); };
          r["time_s"] = time_median(opt, build);
          if (!opt.timing) build();
          long rows = 0;
          bool all_empty = true;
          for (const auto& c : h.components) {
            rows += c.polytope.rows();
            all_empty = all_empty && c.empty;
          }
          r["implicit_rows"] = std::to_string(rows);
          r["empty"] = all_empty ? "1" : "0";
        });
      }
    }
  }
  return table.str();
}

std::string run_volume(const BenchOptions& opt) {
  Table table(opt, "volume");
  const std::vector<std::pair<int, int>> specs = {{0, 1}, {0, 2}, {2, 2},
                                                  {4, 2}};
  for (int n = 2; n <= 4; ++n) {
    for (int i = 0; i < opt.instances; ++i) {
      const Problem p = random_brunovsky(n, 2 * n, instance_seed(opt.seed, n, i),
                                         0.5, opt.wbar);
      MaximalResult cmax;
      std::string cmax_error;
      try {
        cmax = maximal_rcis(p.system, p.safe_set);
      } catch (const std::exception& e) {
        cmax_error = e.what();
      }
      for (auto [tau, lambda] : specs) {
        Row row = base_row("volume", p);
        row["k"] = std::to_string(2 * n);
        row["wbar"] = fmt(opt.wbar);
        set_spec(row, tau, lambda);
        guarded(table, row, [&](Row& r) {
          if (!cmax_error.empty()) throw Error(cmax_error);
          if (!cmax.converged) throw NotConverged("maximal set not converged");
          const ImplicitRCIS ir = implicit_rcis(
              p.system, p.safe_set, LassoSpec::lasso(tau, lambda, 1));
          r["implicit_rows"] = std::to_string(ir.polytope.rows());
          r["empty"] = ir.empty ? "1" : "0";
          r["ref_empty"] = is_empty(cmax.set) ? "1" : "0";
          const VolumeRatio vr =
              projected_ratio(ir, cmax.set, opt.samples, opt.seed);
          r["volume"] = fmt(vr.inner_volume);
          r["ref_volume"] = fmt(vr.outer_volume);
          r["ratio"] = fmt(vr.ratio);
        });
      }
    }
  }
  return table.str();
}

std::string run_sweep(const BenchOptions& opt) {
  Table table(opt, "sweep");
  const Problem base = random_brunovsky(4, 8, opt.seed, 0.5, 0.0);
  for (int step = 1; step <= 8; ++step) {
    const double wbar = 0.05 * step;
    const Problem p = with_disturbance(base, wbar);
    Row row = base_row("sweep", p);
    row["k"] = "8";
    row["wbar"] = fmt(wbar);
    set_spec(row, 2, 2);
    guarded(table, row, [&](Row& r) {
      const NominalProblem nom = nominal_problem(p.system, p.safe_set);
      const bool nominal_empty = is_empty(nom.safe_set);
      const FixedPointReport fp = fixed_points(nom.system, nom.safe_set);
      r["fixed_point"] = fp.exists ? "NE" : "E";
      r["safe_empty"] = nominal_empty ? "1" : "0";
      r["safe_ratio"] = fmt(
          nominal_empty ? 0.0
                        : mc_volume_ratio(view(project(nom.safe_set, 4)),
                                          view(project(p.safe_set, 4)),
                                          opt.samples, opt.seed)
                              .ratio);
      const ImplicitRCIS ir =
          implicit_rcis(p.system, p.safe_set, LassoSpec::lasso(2, 2, 1));
      r["implicit_rows"] = std::to_string(ir.polytope.rows());
      r["empty"] = ir.empty ? "1" : "0";
      const MaximalResult cmax = maximal_rcis(p.system, p.safe_set);
      if (!cmax.converged) throw NotConverged("maximal set not converged");
      const bool ref_empty = is_empty(cmax.set);
      r["ref_empty"] = ref_empty ? "1" : "0";
      const VolumeRatio vr =
          projected_ratio(ir, cmax.set, opt.samples, opt.seed);
      r["volume"] = fmt(vr.inner_volume);
      r["ref_volume"] = fmt(vr.outer_volume);
      r["ratio"] = fmt(vr.ratio);
    });
  }
  return table.str();
}

std::string run_converge(const BenchOptions& opt) {
  Table table(opt, "converge");
  const Problem p = double_integrator();
  const std::vector<int> taus = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  ConvergenceCurve curve;
  std::string error;
  try {
    curve = convergence_curve(p.system, p.safe_set, 2, taus, 2000, opt.seed);
  } catch (const std::exception& e) {
    error = e.what();
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    Row row = base_row("converge", p);
    set_spec(row, taus[i], 2);
    if (!error.empty()) {
      row["error"] = error;
    } else {
      row["distance"] = fmt(curve.points[i].distance);
      row["fixed_point"] = curve.precondition_met ? "interior" : "boundary";
    }
    table.add(row);
  }
  return table.str();
}

}  // namespace

const std::vector<std::string>& bench_columns() {
  static const std::vector<std::string> cols = {
      "suite",  "instance",   "n",          "k",       "tau",
      "lambda", "q",          "wbar",       "implicit_rows", "empty",
      "ref_empty", "volume",  "ref_volume", "ratio",   "safe_ratio",
      "safe_empty", "fixed_point", "distance", "time_s",  "error"};
  return cols;
}

const std::vector<std::string>& bench_suites() {
  static const std::vector<std::string> suites = {"hierarchy", "scal", "volume",
                                                  "sweep", "converge"};
  return suites;
}

std::vector<double> hierarchy_level_volumes(const Problem& p, int q_max,
                                            long samples, std::uint64_t seed) {
  // Every component lies in the state projection of S_xu; sample its box.
  const int n = p.system.n();
  const HPolytope Sx = project(p.safe_set, n);
  const HyperBox box = bounding_box(Sx);
  std::vector<std::vector<HPolytope>> levels(q_max);
  for (int q = 1; q <= q_max; ++q) {
    for (auto [tau, lambda] : theta(q)) {
      const ImplicitRCIS ir = implicit_rcis(p.system, p.safe_set,
                                            LassoSpec::lasso(tau, lambda,
                                                             p.system.m()));
      if (!ir.empty) levels[q - 1].push_back(explicit_rcis(ir));
    }
  }
  std::vector<long> hits(q_max, 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vector w = box.widths();
  Vector x(n);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) x(i) = box.lower(i) + w(i) * unif(rng);
    for (int q = 0; q < q_max; ++q) {
      for (const auto& c : levels[q]) {
        if (c.contains_point(x)) {
          ++hits[q];
          break;
        }
      }
    }
  }
  std::vector<double> out(q_max);
  for (int q = 0; q < q_max; ++q) {
    out[q] = box.volume() * static_cast<double>(hits[q]) /
             static_cast<double>(std::max(samples, 1L));
  }
  return out;
}

std::string run_bench(const std::string& suite, const BenchOptions& opt) {
  if (suite == "hierarchy") return run_hierarchy(opt);
  if (suite == "scal") return run_scal(opt);
  if (suite == "volume") return run_volume(opt);
  if (suite == "sweep") return run_sweep(opt);
  if (suite == "converge") return run_converge(opt);
  throw std::invalid_argument("unknown bench suite '" + suite + "'");
}

}  // namespace cis
