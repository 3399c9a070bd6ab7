#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "auxss/training.hpp"

namespace auxss {

struct SweepJob {
  std::string label;
  std::uint64_t seed = 0;
  std::filesystem::path metrics_path;  // empty when the sweep keeps results in memory
  bool ok = false;
  std::string error;
  std::vector<MetricsRow> rows;
};

struct AggregateRow {
  std::string label;
  int checkpoint = 0;
  std::int64_t step = 0;  // nominal: min(checkpoint * interval, T_max)
  int runs = 0;
  double id_median = 0.0, id_q25 = 0.0, id_q75 = 0.0;
  double ood_median = 0.0, ood_q25 = 0.0, ood_q75 = 0.0;
};

struct SweepOptions {
  int n_seeds = 5;
  int parallelism = 1;
  // When set, job i writes <out_dir>/<label>/seed_<s>.csv (and its checkpoint).
  std::optional<std::filesystem::path> out_dir;
  std::function<void(const SweepJob&)> on_job_done;  // called under a lock
};

struct SweepResult {
  std::vector<SweepJob> jobs;
  std::vector<AggregateRow> aggregate;
};

// Linear-interpolation quantile (R type 7). Throws ConfigError on empty input.
double quantile(std::vector<double> values, double q);

// Seeds of config c are c.seed, c.seed + 1, ..., c.seed + n_seeds - 1. Every
// (config, seed) job owns its own state; a job that throws is recorded as
// failed and left out of the aggregate.
SweepResult sweep(const std::vector<RunConfig>& configs, const SweepOptions& options);

// Per label and checkpoint ordinal, median and quartiles over the runs that
// reached that checkpoint.
std::vector<AggregateRow> aggregate(const std::vector<SweepJob>& jobs, const std::vector<RunConfig>& configs);

// label,checkpoint,step,runs,id_median,id_q25,id_q75,ood_median,ood_q25,ood_q75
void write_aggregate(std::ostream& out, const std::vector<AggregateRow>& rows);

}  // namespace auxss
