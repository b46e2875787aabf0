#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cis/instances.h"
#include "cis/io.h"

using namespace cis;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

class Workdir {
 public:
  explicit Workdir(const std::string& name)
      : dir_(fs::temp_directory_path() / ("cis_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }

  std::string path(const std::string& file) const { return (dir_ / file).string(); }

  void write(const std::string& file, const std::string& text) const {
    std::ofstream(path(file)) << text;
  }

  std::string read(const std::string& file) const {
    std::ifstream in(path(file));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string problem(const std::string& file, const Problem& p) const {
    ProblemFile pf;
    pf.system = p.system;
    pf.safe_set = p.safe_set;
    write_json_file(path(file), to_json(pf));
    return path(file);
  }

  // Runs the CLI with `args`, stdin from `input` (if any), stdout captured.
  Run run(const std::string& args, const std::string& input = "") const {
    std::string cmd = std::string(CIS_CLI_PATH) + " " + args;
    if (!input.empty()) {
      write("stdin.txt", input);
      cmd += " < " + path("stdin.txt");
    }
    cmd += " > " + path("stdout.txt") + " 2> " + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read("stdout.txt");
    return r;
  }

 private:
  fs::path dir_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("synth on the degenerate cone example") {
  Workdir w("synth");
  const std::string prob = w.problem("e1.json", cone_example());
  const Run r = w.run("synth " + prob + " --tau 1 --lambda 1 --explicit --out " +
                      w.path("rcis.json"));
  REQUIRE(r.code == 0);
  const ImplicitRCIS ir = implicit_from_json(read_json_file(w.path("rcis.json")));
  CHECK_FALSE(ir.empty);
  CHECK(ir.spec.tau == 1);
  const HPolytope C = polytope_from_json(read_json_file(w.path("rcis.explicit.json")));
  CHECK(C.contains_point(Vector::Zero(2), 1e-9));
  const HyperBox b = bounding_box(C);
  CHECK(b.widths().maxCoeff() < 1e-7);

  // Written file equals a direct synthesis field for field.
  const Problem p = cone_example();
  const ImplicitRCIS direct = implicit_rcis(p.system, p.safe_set, LassoSpec::lasso(1, 1, 1));
  CHECK(to_json(direct) == to_json(ir));
}

TEST_CASE("synth --q writes one file per spec") {
  Workdir w("synthq");
  const std::string prob = w.problem("di.json", double_integrator());
  const Run r = w.run("synth " + prob + " --q 3 --out " + w.path("c.json"));
  REQUIRE(r.code == 0);
  CHECK(lines(r.out).size() == 3);
  for (const char* f : {"c_t0_l3.json", "c_t1_l2.json", "c_t2_l1.json"}) {
    CAPTURE(f);
    CHECK(fs::exists(w.path(f)));
  }
}

TEST_CASE("synth on an empty instance exits 2") {
  Workdir w("empty");
  const std::string prob = w.problem("s.json", cone_example_shrunk(0.01));
  CHECK(w.run("synth " + prob + " --out " + w.path("r.json")).code == 2);
}

TEST_CASE("parse errors exit 1") {
  Workdir w("parse");
  w.write("bad.json", "{\"A\": [[1]]}");
  CHECK(w.run("synth " + w.path("bad.json")).code == 1);
  w.write("junk.json", "not json");
  CHECK(w.run("synth " + w.path("junk.json")).code == 1);
  CHECK(w.run("synth").code == 1);
  CHECK(w.run("bench nosuchsuite").code == 1);
}

TEST_CASE("filter: passes and corrections") {
  Workdir w("filter");
  const LinearSystem sys(Matrix::Zero(1, 1), Matrix::Ones(1, 1));
  const Problem p{"scalar", sys,
                  HPolytope::box(Vector::Constant(2, -1), Vector::Constant(2, 1))};
  const std::string prob = w.problem("p.json", p);
  const Run r = w.run("filter " + prob, "# t x u\n0 0.5 0.25\n\n1 0.25 2\n2 1 -3\n");
  REQUIRE(r.code == 0);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 4);
  CHECK(out[0] == "0.25 pass 0");
  CHECK(out[1] == "1 corrected 1");
  CHECK(out[2] == "-1 corrected 2");
  CHECK(out[3].rfind("# steps=3 pass=1 corrected=2 fallbacks=0", 0) == 0);
}

TEST_CASE("filter: shrinking schedule exits 5, bad start exits 4") {
  Workdir w("filter_err");
  w.write("sched.json", R"({"A": [[0]], "B": [[1]],
    "Sxu": {"G": [[1, 0], [-1, 0], [0, 1], [0, -1]], "f": [1, 1, 1, 1]},
    "schedule": [{"t": 2, "Sxu": {"G": [[1, 0], [-1, 0], [0, 1], [0, -1]],
                                  "f": [0.5, 0.5, 0.5, 0.5]}}]})");
  CHECK(w.run("filter " + w.path("sched.json"), "0 0 0\n1 0 0\n2 0 0\n").code == 5);
  CHECK(w.run("filter " + w.path("sched.json"), "0 3 0\n").code == 4);
}

TEST_CASE("box, maximal and check") {
  Workdir w("misc");
  const std::string prob = w.problem("di.json", double_integrator());
  const Run b = w.run("box " + prob + " --mode geomean --tau 1 --lambda 1");
  REQUIRE(b.code == 0);
  CHECK(Json::parse(b.out)["status"] == "optimal");
  const HyperBox box = box_from_json(Json::parse(b.out));
  CHECK((box.upper - box.lower).minCoeff() > 0.0);
  const Run sum = w.run("box " + prob + " --mode sum --tau 1 --lambda 1");
  REQUIRE(sum.code == 0);
  CHECK(Json::parse(sum.out).contains("status"));
  CHECK(w.run("box " + prob + " --mode nonsense").code == 1);

  const Run m = w.run("maximal " + prob + " --out " + w.path("max.json"));
  CHECK(m.code == 0);
  CHECK(m.out.rfind("converged=yes", 0) == 0);
  CHECK_FALSE(is_empty(polytope_from_json(read_json_file(w.path("max.json")))));

  REQUIRE(w.run("synth " + prob + " --tau 2 --lambda 2 --out " + w.path("r.json")).code == 0);
  const Run c = w.run("check " + prob + " " + w.path("r.json"));
  CHECK(c.code == 0);
  const Json report = Json::parse(c.out);
  CHECK(report["ok"] == true);
  CHECK(report["violations"] == 0);

  // The same set checked against a different safe set is rejected.
  const std::string other = w.problem("other.json", double_integrator(0.5, 0.8));
  CHECK(w.run("check " + other + " " + w.path("r.json")).code == 6);
}

TEST_CASE("bench output is byte-stable for a fixed seed") {
  Workdir w("bench");
  const Run a = w.run("--seed 5 --samples 1000 bench converge");
  const Run b = w.run("--seed 5 --samples 1000 bench converge");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("# suite=converge seed=5 samples=1000", 0) == 0);
  CHECK(w.run("--seed 5 --samples 1000 bench converge --out " + w.path("b.csv")).code == 0);
  CHECK(w.read("b.csv") == a.out);
}
