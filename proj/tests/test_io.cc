#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "cis/instances.h"
#include "cis/io.h"

using namespace cis;

namespace {

bool same(const HPolytope& a, const HPolytope& b) {
  return a.dim() == b.dim() && a.G() == b.G() && a.f() == b.f();
}

}  // namespace

TEST_CASE("polytope round trip is exact") {
  const Problem p = random_brunovsky(3, 7, 11, 0.5, 0.1);
  const HPolytope back = polytope_from_json(Json::parse(to_json(p.safe_set).dump()));
  CHECK(same(back, p.safe_set));
}

TEST_CASE("implicit set round trip") {
  for (const Problem& p : {cone_example(), double_integrator(0.5, 1.0, 0.2, 0.01)}) {
    const ImplicitRCIS ir = implicit_rcis(p.system, p.safe_set, LassoSpec::lasso(2, 2, 1));
    const ImplicitRCIS back = implicit_from_json(Json::parse(to_json(ir).dump()));
    CHECK(same(back.polytope, ir.polytope));
    CHECK(back.spec.tau == ir.spec.tau);
    CHECK(back.spec.lambda == ir.spec.lambda);
    CHECK(back.spec.P == ir.spec.P);
    CHECK(back.spec.H == ir.spec.H);
    CHECK(back.K == ir.K);
    CHECK(back.n == ir.n);
    CHECK(back.nu == ir.nu);
    CHECK(back.empty == ir.empty);
    CHECK(back.blocks == ir.blocks);
    CHECK(back.fingerprint == ir.fingerprint);
  }
}

TEST_CASE("problem round trip through a file") {
  const Problem p = double_integrator(0.5, 1.0, 0.2, 0.01);
  ProblemFile pf;
  pf.system = p.system;
  pf.safe_set = p.safe_set;
  pf.spec.tau = 3;
  pf.spec.lambda = 2;
  pf.options.seed = 42;
  pf.schedule = {{0, p.safe_set}, {5, p.safe_set}};
  pf.union_sets = {p.safe_set};
  const auto path = std::filesystem::temp_directory_path() / "cis_io_roundtrip.json";
  write_json_file(path.string(), to_json(pf));
  const ProblemFile back = problem_from_json(read_json_file(path.string()));
  std::filesystem::remove(path);
  CHECK(back.system.A == p.system.A);
  CHECK(back.system.B == p.system.B);
  CHECK(back.system.E == p.system.E);
  CHECK(same(back.system.W, p.system.W));
  CHECK(same(back.safe_set, p.safe_set));
  CHECK(back.spec.tau == 3);
  CHECK(back.spec.lambda == 2);
  CHECK_FALSE(back.spec.q.has_value());
  CHECK(back.options.seed == 42u);
  CHECK(back.schedule.size() == 2);
  CHECK(back.union_sets.size() == 1);
}

TEST_CASE("box round trip") {
  const Problem p = double_integrator();
  const SafeBoxResult r =
      safe_box(p.system, p.safe_set, LassoSpec::lasso(1, 1, 1), BoxMode::kSumWidth);
  const HyperBox b = box_from_json(Json::parse(to_json(r).dump()));
  CHECK(b.lower == r.box.lower);
  CHECK(b.upper == r.box.upper);
}

TEST_CASE("missing E means no disturbance") {
  const Json j = Json::parse(R"({"A": [[0]], "B": [[1]],
    "Sxu": {"G": [[1, 0], [-1, 0], [0, 1], [0, -1]], "f": [1, 1, 1, 1]}})");
  const ProblemFile p = problem_from_json(j);
  CHECK_FALSE(p.system.has_disturbance());
  CHECK(p.safe_set.dim() == 2);
}

TEST_CASE("schedule lookup") {
  const Json j = Json::parse(R"({"A": [[0]], "B": [[1]],
    "Sxu": {"G": [[1, 0]], "f": [1]},
    "schedule": [{"t": 4, "Sxu": {"G": [[1, 0]], "f": [3]}},
                 {"t": 0, "Sxu": {"G": [[1, 0]], "f": [2]}}]})");
  const ProblemFile p = problem_from_json(j);
  CHECK(p.schedule.front().t == 0);
  CHECK(p.safe_set_at(0).f()(0) == 2);
  CHECK(p.safe_set_at(3).f()(0) == 2);
  CHECK(p.safe_set_at(9).f()(0) == 3);
}

TEST_CASE("malformed input raises ParseError") {
  const char* bad[] = {
      R"([1, 2])",
      R"({"B": [[1]], "Sxu": {"G": [[1, 0]], "f": [1]}})",
      R"({"A": [[0, 1]], "B": [[1]], "Sxu": {"G": [[1, 0]], "f": [1]}})",
      R"({"A": [[0]], "B": [[1]], "Sxu": {"G": [[1, 0]], "f": [1, 2]}})",
      R"({"A": [[0]], "B": [[1]], "Sxu": {"G": [[1, 0], [1]], "f": [1, 2]}})",
      R"({"A": [["a"]], "B": [[1]], "Sxu": {"G": [[1, 0]], "f": [1]}})",
      R"({"A": [[0]], "B": [[1]], "E": [[1]], "Sxu": {"G": [[1, 0]], "f": [1]}})",
      R"({"version": 2, "A": [[0]], "B": [[1]], "Sxu": {"G": [[1, 0]], "f": [1]}})",
      R"({"A": [[0]], "B": [[1]], "Sxu": {"G": [[1, 0, 0]], "f": [1]}})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(problem_from_json(Json::parse(text)), ParseError);
  }
  CHECK_THROWS_AS(read_json_file("/nonexistent/cis.json"), ParseError);
  CHECK_THROWS_AS(implicit_from_json(Json::parse(R"({"version": 1})")), ParseError);
  CHECK_THROWS_AS(box_from_json(Json::parse(R"({"lower": [0]})")), ParseError);
}
