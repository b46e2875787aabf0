#pragma once

// JSON encodings of polytopes, systems, implicit sets and boxes.
//
//   polytope:  {"G": [[...], ...], "f": [...]}
//   problem:   {"version": 1, "A", "B", "E"?, "W"?, "Sxu",
//               "spec"?: {"tau", "lambda"} | {"q"} | {"P", "H", "tau", "lambda"},
//               "options"?: {"tol_feas", "seed", "samples"},
//               "schedule"?: [{"t", "Sxu"}, ...],
//               "union"?: [polytope, ...]}
//   implicit:  {"version": 1, "polytope", "tau", "lambda", "nu", "n", "H",
//               "P", "K", "empty", "blocks", "fingerprint"}
//   box:       {"lower": [...], "upper": [...], "v": [...], "status"}

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cis/invariance.h"

namespace cis {

using Json = nlohmann::json;

/// Malformed or inconsistent input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const HPolytope& p);
Json to_json(const ImplicitRCIS& ir);
Json to_json(const SafeBoxResult& box);

/// `cols` fixes the width of an empty matrix.
Matrix matrix_from_json(const Json& j, const char* what, int cols = -1);
Vector vector_from_json(const Json& j, const char* what);
HPolytope polytope_from_json(const Json& j, int dim = -1);
ImplicitRCIS implicit_from_json(const Json& j);
HyperBox box_from_json(const Json& j);

struct SpecRequest {
  std::optional<int> tau;
  std::optional<int> lambda;
  std::optional<int> q;
  std::optional<LassoSpec> custom;
};

struct ProblemOptions {
  std::optional<double> tol_feas;
  std::optional<std::uint64_t> seed;
  std::optional<long> samples;
};

struct ScheduleEntry {
  int t = 0;
  HPolytope safe_set;
};

struct ProblemFile {
  LinearSystem system;
  HPolytope safe_set;
  SpecRequest spec;
  ProblemOptions options;
  std::vector<ScheduleEntry> schedule;  // sorted by t
  std::vector<HPolytope> union_sets;

  /// Safe set in force at time t (the static one without a schedule).
  const HPolytope& safe_set_at(int t) const;
};

ProblemFile problem_from_json(const Json& j);
Json to_json(const ProblemFile& p);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace cis
