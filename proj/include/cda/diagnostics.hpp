#pragma once

#include "cda/estimators.hpp"

namespace cda {

/// Compares the mean of a working outcome model under a redraw of one
/// block from its fitted critical density against the plainly observed
/// group mean. A well-specified density leaves the two equal in
/// expectation.
struct DensityCheck {
  std::string which;          // "lambda_0^Z" or "lambda_1^N"
  double emulated_mean = 0.0; // working model averaged over the redrawn sample
  double observed_mean = 0.0; // group outcome mean
  double gap = 0.0;           // emulated - observed
};

/// check = z_check (□, audits lambda_0^Z) or n_check (■, audits lambda_1^N).
DensityCheck density_diagnostic(Engine& e, SampleKind check);

struct WeightMoment {
  std::string kind;
  std::string subsample;
  double mean = 0.0;
  double se = 0.0;  // sd/sqrt(n) over the diagnostic subsample
  Eigen::Index n = 0;
};

WeightMoment weight_moment(const WeightVector& w);

struct BalanceRow {
  std::string weight;
  std::string column;
  double analytic_mean = 0.0;
  double target_mean = 0.0;
  double std_diff = 0.0;  // (analytic - target) / weighted target SD
};

/// Weighted-mean comparison of `cols` between an analytic table and its
/// intended target table, standardized by the target's SD.
std::vector<BalanceRow> target_balance(const std::string& label, const Table& analytic,
                                       const Eigen::VectorXd& wa, const Table& target,
                                       const Eigen::VectorXd& wt,
                                       const std::vector<std::string>& cols);

struct DiagnosticsReport {
  std::vector<DensityCheck> density_checks;
  std::vector<WeightMoment> weight_moments;
  std::vector<BalanceRow> balance;
  std::vector<std::pair<std::string, ConvenientCheck>> convenient_checks;

  std::string to_json() const;
};

struct DiagnosticsOptions {
  bool density = true;
  bool moments = true;
  bool balance = true;
  bool convenient = true;
};

DiagnosticsReport run_diagnostics(Engine& e, const DiagnosticsOptions& opts = {});

}  // namespace cda
