#pragma once

// Experiment suites that write one CSV row per (instance, spec).

#include <cstdint>
#include <string>
#include <vector>

#include "cis/instances.h"
#include "cis/invariance.h"

namespace cis {

struct BenchOptions {
  std::uint64_t seed = 1;
  long samples = 100000;  // Monte Carlo samples per volume estimate
  int instances = 10;     // random instances per dimension
  int n_max = 10;         // largest dimension of the scal suite
  double wbar = 0.0;      // disturbance bound for the volume suite
  bool timing = false;    // fill time_s (otherwise NA, for byte-stable output)
  int timing_runs = 5;    // median of this many runs
};

/// Column names of every suite's CSV, in order.
const std::vector<std::string>& bench_columns();

/// Names accepted by run_bench.
const std::vector<std::string>& bench_suites();

/// Runs `suite` and returns the CSV text: a "# ..." comment line with the
/// options, the header, then the rows. A failing row records the error and
/// the suite continues.
std::string run_bench(const std::string& suite, const BenchOptions& opt);

/// Union volume per hierarchy level by shared-sample membership in the
/// explicit components. Exposed for tests.
std::vector<double> hierarchy_level_volumes(const Problem& p, int q_max,
                                            long samples, std::uint64_t seed);

}  // namespace cis
