#pragma once

#include <functional>

#include "cda/dataset.hpp"

namespace cda {

struct BootstrapOptions {
  int replicates = 200;
  std::uint64_t seed = 0;
  bool cluster = false;  // requires a cluster role column
  double level = 0.95;
  double max_failure_rate = 0.05;
};

struct BootstrapResult {
  double estimate = 0.0;  // statistic on the original data
  double se = 0.0;        // sd over replicate draws
  double ci_lo = 0.0;     // percentile interval
  double ci_hi = 0.0;
  int failures = 0;
  std::vector<double> draws;
};

/// Nonparametric resample of the rows (or of whole clusters, keeping every
/// member row of each drawn cluster). Deterministic in (seed).
Dataset resample(const Dataset& ds, std::uint64_t seed, bool cluster);

using Statistic = std::function<double(const Dataset&)>;

/// Percentile bootstrap with full per-replicate refits. Replicates that
/// throw ValidationError/NumericError are dropped and counted; more than
/// max_failure_rate of them fails the whole run.
BootstrapResult bootstrap(const Dataset& ds, const Statistic& stat,
                          const BootstrapOptions& opts);

}  // namespace cda
