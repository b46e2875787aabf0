#include "cis/io.h"

#include <algorithm>
#include <fstream>

namespace cis {

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const HPolytope& p) {
  Json j = {{"G", to_json(p.G())}, {"f", to_json(p.f())}};
  // Keep the dimension of row-free polytopes recoverable.
  if (p.rows() == 0) j["dim"] = p.dim();
  return j;
}

Matrix matrix_from_json(const Json& j, const char* what, int cols) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, std::max(cols, 0));
  if (!j[0].is_array()) {
    throw ParseError(std::string(what) + ": expected array of rows");
  }
  const auto width = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, width);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != width) {
      throw ParseError(std::string(what) + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < width; ++c) {
      if (!row[c].is_number()) {
        throw ParseError(std::string(what) + ": non-numeric entry");
      }
      m(r, c) = row[c].get<double>();
    }
  }
  if (cols >= 0 && width != cols) {
    throw ParseError(std::string(what) + ": expected " + std::to_string(cols) +
                     " columns");
  }
  return m;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError(std::string(what) + ": non-numeric entry");
    }
    v(i) = j[i].get<double>();
  }
  return v;
}

HPolytope polytope_from_json(const Json& j, int dim) {
  if (!j.is_object() || !j.contains("G") || !j.contains("f")) {
    throw ParseError("polytope: need object with \"G\" and \"f\"");
  }
  if (dim < 0 && j.contains("dim")) dim = j["dim"].get<int>();
  Matrix G = matrix_from_json(j["G"], "polytope G", dim);
  Vector f = vector_from_json(j["f"], "polytope f");
  if (G.rows() != f.size()) throw ParseError("polytope: |f| != rows of G");
  try {
    return HPolytope(std::move(G), std::move(f));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("polytope: ") + e.what());
  }
}

Json to_json(const ImplicitRCIS& ir) {
  return {{"version", 1},
          {"polytope", to_json(ir.polytope)},
          {"tau", ir.spec.tau},
          {"lambda", ir.spec.lambda},
          {"nu", ir.nu},
          {"n", ir.n},
          {"H", to_json(ir.spec.H)},
          {"P", to_json(ir.spec.P)},
          {"K", to_json(ir.K)},
          {"empty", ir.empty},
          {"blocks", ir.blocks},
          {"fingerprint", ir.fingerprint}};
}

ImplicitRCIS implicit_from_json(const Json& j) {
  try {
    ImplicitRCIS ir;
    ir.n = j.at("n").get<int>();
    ir.nu = j.at("nu").get<int>();
    ir.spec.tau = j.at("tau").get<int>();
    ir.spec.lambda = j.at("lambda").get<int>();
    ir.spec.P = matrix_from_json(j.at("P"), "P");
    ir.spec.H = matrix_from_json(j.at("H"), "H", ir.spec.v_dim());
    ir.K = matrix_from_json(j.at("K"), "K", ir.n);
    ir.polytope = polytope_from_json(j.at("polytope"), ir.n + ir.spec.v_dim());
    ir.empty = j.at("empty").get<bool>();
    ir.blocks = j.at("blocks").get<int>();
    ir.fingerprint = j.at("fingerprint").get<std::string>();
    return ir;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("implicit set: ") + e.what());
  }
}

Json to_json(const SafeBoxResult& box) {
  Json j = {{"status", to_string(box.status)},
            {"objective", box.objective},
            {"v", to_json(box.v)}};
  if (box.status != BoxStatus::kInfeasible) {
    j["lower"] = to_json(box.box.lower);
    j["upper"] = to_json(box.box.upper);
  }
  return j;
}

HyperBox box_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) {
    throw ParseError("box: need \"lower\" and \"upper\"");
  }
  try {
    return HyperBox(vector_from_json(j["lower"], "lower"),
                    vector_from_json(j["upper"], "upper"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("box: ") + e.what());
  }
}

const HPolytope& ProblemFile::safe_set_at(int t) const {
  const HPolytope* cur = &safe_set;
  for (const auto& e : schedule) {
    if (e.t <= t) cur = &e.safe_set;
  }
  return *cur;
}

ProblemFile problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("problem: expected object");
  if (j.contains("version") && j["version"] != 1) {
    throw ParseError("problem: unsupported version");
  }
  for (const char* key : {"A", "B", "Sxu"}) {
    if (!j.contains(key)) throw ParseError(std::string("problem: missing ") + key);
  }
  ProblemFile p;
  try {
    Matrix A = matrix_from_json(j["A"], "A");
    const int n = static_cast<int>(A.rows());
    Matrix B = matrix_from_json(j["B"], "B");
    if (A.cols() != n || B.rows() != n) throw ParseError("problem: A/B shapes");
    const int m = static_cast<int>(B.cols());
    if (j.contains("E") && !j["E"].is_null()) {
      Matrix E = matrix_from_json(j["E"], "E");
      if (!j.contains("W")) throw ParseError("problem: E given without W");
      HPolytope W = polytope_from_json(j["W"], static_cast<int>(E.cols()));
      p.system = LinearSystem(std::move(A), std::move(B), std::move(E),
                              std::move(W));
    } else {
      p.system = LinearSystem(std::move(A), std::move(B));
    }
    p.safe_set = polytope_from_json(j["Sxu"], n + m);

    if (j.contains("spec")) {
      const Json& s = j["spec"];
      if (s.contains("P")) {
        p.spec.custom = LassoSpec::custom(
            matrix_from_json(s.at("P"), "P"), matrix_from_json(s.at("H"), "H"),
            s.at("tau").get<int>(), s.at("lambda").get<int>());
      } else {
        if (s.contains("tau")) p.spec.tau = s["tau"].get<int>();
        if (s.contains("lambda")) p.spec.lambda = s["lambda"].get<int>();
        if (s.contains("q")) p.spec.q = s["q"].get<int>();
      }
    }
    if (j.contains("options")) {
      const Json& o = j["options"];
      if (o.contains("tol_feas")) p.options.tol_feas = o["tol_feas"].get<double>();
      if (o.contains("seed")) p.options.seed = o["seed"].get<std::uint64_t>();
      if (o.contains("samples")) p.options.samples = o["samples"].get<long>();
    }
    if (j.contains("schedule")) {
      for (const Json& e : j["schedule"]) {
        p.schedule.push_back(
            {e.at("t").get<int>(), polytope_from_json(e.at("Sxu"), n + m)});
      }
      std::stable_sort(p.schedule.begin(), p.schedule.end(),
                       [](const auto& a, const auto& b) { return a.t < b.t; });
    }
    if (j.contains("union")) {
      for (const Json& e : j["union"]) {
        p.union_sets.push_back(polytope_from_json(e, n + m));
      }
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("problem: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
  return p;
}

Json to_json(const ProblemFile& p) {
  Json j = {{"version", 1},
            {"A", to_json(p.system.A)},
            {"B", to_json(p.system.B)},
            {"Sxu", to_json(p.safe_set)}};
  if (p.system.d() > 0) {
    j["E"] = to_json(p.system.E);
    j["W"] = to_json(p.system.W);
  }
  if (p.spec.custom) {
    j["spec"] = {{"P", to_json(p.spec.custom->P)},
                 {"H", to_json(p.spec.custom->H)},
                 {"tau", p.spec.custom->tau},
                 {"lambda", p.spec.custom->lambda}};
  } else if (p.spec.tau || p.spec.lambda || p.spec.q) {
    Json s = Json::object();
    if (p.spec.tau) s["tau"] = *p.spec.tau;
    if (p.spec.lambda) s["lambda"] = *p.spec.lambda;
    if (p.spec.q) s["q"] = *p.spec.q;
    j["spec"] = s;
  }
  Json o = Json::object();
  if (p.options.tol_feas) o["tol_feas"] = *p.options.tol_feas;
  if (p.options.seed) o["seed"] = *p.options.seed;
  if (p.options.samples) o["samples"] = *p.options.samples;
  if (!o.empty()) j["options"] = o;
  if (!p.schedule.empty()) {
    Json s = Json::array();
    for (const auto& e : p.schedule) {
      s.push_back({{"t", e.t}, {"Sxu", to_json(e.safe_set)}});
    }
    j["schedule"] = s;
  }
  if (!p.union_sets.empty()) {
    Json u = Json::array();
    for (const auto& s : p.union_sets) u.push_back(to_json(s));
    j["union"] = u;
  }
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(1) << '\n';
}

}  // namespace cis
