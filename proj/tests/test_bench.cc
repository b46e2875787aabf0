#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cis/bench.h"
#include "cis/oracle.h"
#include "oracles.h"

using namespace cis;

namespace {

using Csv = std::vector<std::vector<std::string>>;

// Splits the CSV body (no quoted commas occur in these suites).
Csv parse_csv(const std::string& text, std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  Csv rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (header.empty()) {
      header = cells;
    } else {
      rows.push_back(cells);
    }
  }
  return rows;
}

int column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  FAIL("missing column " << name);
  return -1;
}

// Membership of x in the state projection of an implicit set by one LP in v.
bool in_implicit(const ImplicitRCIS& ir, const Vector& x) {
  const Matrix& G = ir.polytope.G();
  const int n = ir.n;
  const Vector f = ir.polytope.f() - G.leftCols(n) * x;
  if (ir.v_dim() == 0) return f.minCoeff() >= 0.0;
  return find_feasible_point(G.rightCols(ir.v_dim()), f).optimal();
}

BenchOptions small() {
  BenchOptions o;
  o.samples = 2000;
  o.instances = 2;
  o.n_max = 4;
  return o;
}

}  // namespace

TEST_CASE("suites and columns") {
  CHECK(bench_suites().size() == 5);
  CHECK(bench_columns().front() == "suite");
  CHECK_THROWS(run_bench("nope", small()));
}

TEST_CASE("equal seeds give identical output") {
  for (const std::string suite : {"hierarchy", "converge", "scal"}) {
    CAPTURE(suite);
    const std::string a = run_bench(suite, small());
    const std::string b = run_bench(suite, small());
    CHECK(a == b);
    CHECK(a.rfind("# suite=" + suite, 0) == 0);
  }
}

TEST_CASE("timing off writes NA") {
  std::vector<std::string> header;
  const Csv rows = parse_csv(run_bench("converge", small()), header);
  const int t = column(header, "time_s");
  for (const auto& r : rows) CHECK(r[t] == "NA");
  CHECK(header == bench_columns());
}

TEST_CASE("hierarchy level volumes are nondecreasing and match a grid oracle") {
  const Problem p = double_integrator();
  const std::vector<double> levels = hierarchy_level_volumes(p, 6, 200000, 3);
  REQUIRE(levels.size() == 6);
  for (std::size_t q = 1; q < levels.size(); ++q) {
    CHECK(levels[q] >= levels[q - 1] - 0.02);
  }
  // Midpoint quadrature of the union indicator on [-1, 1]^2.
  const double h = 0.04;
  for (int q = 1; q <= 6; q += 5) {
    std::vector<ImplicitRCIS> comps;
    for (auto [tau, lambda] : theta(q)) {
      comps.push_back(implicit_rcis(p.system, p.safe_set, LassoSpec::lasso(tau, lambda, 1)));
    }
    long hits = 0, total = 0;
    oracle::for_grid(Vector::Constant(2, -1 + h / 2), Vector::Constant(2, 1), h,
                     [&](const Vector& x) {
                       ++total;
                       for (const auto& c : comps) {
                         if (!c.empty && in_implicit(c, x)) {
                           ++hits;
                           break;
                         }
                       }
                     });
    const double grid = 4.0 * static_cast<double>(hits) / static_cast<double>(total);
    CAPTURE(q);
    CHECK(levels[q - 1] == doctest::Approx(grid).epsilon(0.05));
  }
}

TEST_CASE("hierarchy suite: volume grows with the level") {
  std::vector<std::string> header;
  const Csv rows = parse_csv(run_bench("hierarchy", small()), header);
  const int tau = column(header, "tau"), vol = column(header, "volume");
  double prev = -1;
  int levels = 0;
  for (const auto& r : rows) {
    if (r[tau] != "level") continue;
    ++levels;
    const double v = std::stod(r[vol]);
    CHECK(v >= prev - 0.05);
    prev = v;
  }
  CHECK(levels == 6);
}

TEST_CASE("sweep suite: maximal set empty at the largest disturbance") {
  BenchOptions o = small();
  std::vector<std::string> header;
  const Csv rows = parse_csv(run_bench("sweep", o), header);
  const int wbar = column(header, "wbar"), ref = column(header, "ref_empty"),
            err = column(header, "error");
  REQUIRE_FALSE(rows.empty());
  const auto& last = rows.back();
  CHECK(std::stod(last[wbar]) == doctest::Approx(0.40));
  CHECK(last[ref] == "1");
  for (const auto& r : rows) CHECK(r[err] == "NA");
}

TEST_CASE("scal suite covers n = 2 for both row-count kinds") {
  std::vector<std::string> header;
  const Csv rows = parse_csv(run_bench("scal", small()), header);
  const int n = column(header, "n"), k = column(header, "k");
  int n2 = 0;
  for (const auto& r : rows) {
    if (r[n] == "2") {
      ++n2;
      CHECK(r[k] == "4");  // 2n and n^2 coincide
    }
  }
  CHECK(n2 == 6);
}

TEST_CASE("random instances are bounded and contain the origin") {
  for (int seed = 1; seed <= 30; ++seed) {
    const int n = 2 + seed % 4;
    const Problem p = random_brunovsky(n, 2 * n, seed, 0.5, 0.05);
    CHECK_FALSE(is_empty(p.safe_set));
    CHECK(p.safe_set.contains_point(Vector::Zero(n + 1), 1e-12));
    const HyperBox b = bounding_box(p.safe_set);
    CHECK(b.lower.allFinite());
    CHECK(b.upper.allFinite());
    const Problem d = random_dynamics(n, seed);
    CHECK(d.safe_set.contains_point(Vector::Zero(n + 1), 1e-12));
    CHECK(bounding_box(d.safe_set).upper.allFinite());
  }
}
