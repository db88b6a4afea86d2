#pragma once

#include <optional>

#include "cda/dgm.hpp"
#include "cda/estimators.hpp"

namespace cda {

/// Nuisance specification tier for the benchmark study. correct follows
/// the generator's functional forms (quadratics, treatment-by-Az2
/// interaction); flexible adds selected two-way interactions; incorrect
/// drops the higher-order terms and the covariates Ay1, Az1, N2.
enum class SpecLevel { correct, flexible, incorrect };

SpecLevel parse_spec_level(const std::string& s);
std::string spec_level_name(SpecLevel lv);

/// Per-avenue tier overrides for the robustness grid. Unset slots fall
/// back to `all`. Slots mirror the corruptible avenues: the outcome and
/// pseudo-outcome models, the zn weight nuisances, the two bridge-step
/// weights, and the a_z weight.
struct SlotLevels {
  SpecLevel all = SpecLevel::flexible;
  std::optional<SpecLevel> mu, zeta, nu, kappa, w_zn, w_black, w_open, w_01;
  SpecLevel get(const std::optional<SpecLevel>& s) const { return s ? *s : all; }
};

enum class EstimatorId {
  eobd,
  z_model_pw, n_model_pw, z_bridge_pw, n_bridge_pw,
  z_model_se, n_model_se, z_bridge_se, n_bridge_se,
  z_model_wse, n_model_wse, z_bridge_wse, n_bridge_wse,
  z_model_rw, n_model_rw, z_bridge_rw, n_bridge_rw,
};

std::string estimator_name(EstimatorId id);
EstimatorId parse_estimator(const std::string& name);
std::vector<EstimatorId> all_estimators();

/// theta_1* estimate for one estimator on one engine.
double run_estimator(Engine& e, EstimatorId id);

/// EstimatorConfig for a benchmark-generator dataset at the given tiers.
/// gate_handling: estimate the zn weights only where Az2 >= 140 (weight 1
/// elsewhere) and force Z=0 outside the gate in the assigned samples.
EstimatorConfig benchmark_config(const Dataset& ds, const SlotLevels& levels,
                                 bool gate_handling, std::uint64_t sample_seed = 0);

struct ScenarioSpec {
  Eigen::Index n = 5000;
  bool binary_outcome = false;
  SlotLevels levels;
  bool gate_handling = true;
  int reps = 200;
  int bootstrap_b = 200;
  double ci_level = 0.95;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<EstimatorId> estimators;  // empty = all
  double truth = 0.0;                   // theta_1* reference value
};

struct MetricsRow {
  std::string estimator;
  double bias = 0.0;
  double se = 0.0;    // empirical SD over replicates
  double rmse = 0.0;  // sqrt(bias^2 + se^2)
  double coverage = 0.0;
  int reps_used = 0;
  int failures = 0;
};

/// Monte Carlo grid run: reps independent observed-arm datasets, point
/// estimates plus shared-resample bootstrap CIs for every requested
/// estimator, aggregated against `truth`. Deterministic in seed, and
/// byte-identical across thread counts (per-rep derived seeds, results
/// stored by rep index).
std::vector<MetricsRow> run_scenario(const ScenarioSpec& sc);

}  // namespace cda
