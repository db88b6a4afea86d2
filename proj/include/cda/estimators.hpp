#pragma once

#include <map>
#include <optional>

#include "cda/samples.hpp"
#include "cda/weights.hpp"

namespace cda {

enum class ThetaForm { pw, se, wse };

struct Estimate {
  double value = 0.0;
  std::string estimator;
  bool used_censoring_weights = false;
};

struct DecompositionResult {
  double theta1 = 0.0;
  double theta0 = 0.0;
  double theta1_star = 0.0;
  double observed = 0.0;  // theta1 - theta0
  double reduced = 0.0;   // theta1 - theta1_star
  double residual = 0.0;  // theta1_star - theta0
};

struct InfluenceResult {
  Eigen::VectorXd phi;
  Eigen::VectorXd part1, part2, part3, part4;
  double theta = 0.0;
  double mean = 0.0;
  double se = 0.0;  // sd(phi)/sqrt(n)
};

/// Model specifications for every nuisance an estimator may need. All slots
/// are populated by defaults()/saturated(); callers override individual
/// pieces. Density factorizations are ordered target lists over the Z or N
/// block; bases name the conditioning sets.
struct EstimatorConfig {
  Family outcome_family = Family::gaussian;

  BasisSpec mu1;     // Y ~ (Z,N,A_z,A_y)
  BasisSpec eobd;    // E-OBD linear model; Z columns must appear as plain terms
  BasisSpec eta1;    // pseudo-outcome ~ A_y
  BasisSpec kappa1;  // pseudo-outcome ~ (A_z,A_y)
  BasisSpec zeta1;   // pseudo-outcome ~ (Z,A_z,A_y)
  BasisSpec nu1;     // pseudo-outcome ~ (N,A_z,A_y)

  std::vector<TargetSpec> lambda0z;  // Z | A_z,A_y   (fit on G=0)
  std::vector<TargetSpec> lambda1n;  // N | A_z,A_y   (fit on G=1)
  std::vector<TargetSpec> pz_full1;  // Z | N,A_z,A_y (fit on G=1)
  std::vector<TargetSpec> pn_full1;  // N | Z,A_z,A_y (fit on G=1)
  std::vector<TargetSpec> rw_den_z;  // Z | N,A_z,A_y (fit on G=0)
  std::vector<TargetSpec> rw_den_n;  // N | Z,A_z,A_y (fit on G=0)

  BasisSpec t_ay;       // T ~ A_y
  BasisSpec g_ay;       // G ~ A_y
  BasisSpec w01_num;    // a_z weight numerator membership, G ~ (A_z,A_y)
  BasisSpec w01_den;    // a_z weight denominator membership, G ~ A_y
  BasisSpec g_azay;     // G ~ (A_z,A_y)
  BasisSpec g_zazay;    // G ~ (Z,A_z,A_y)
  BasisSpec g_nazay;    // G ~ (N,A_z,A_y)
  BasisSpec bd_znazay;  // stacked membership ~ (Z,N,A_z,A_y)
  BasisSpec bd_zazay;   // stacked membership ~ (Z,A_z,A_y)
  BasisSpec bd_nazay;   // stacked membership ~ (N,A_z,A_y)
  BasisSpec step_black_num, step_black_den;  // ◆-step memberships
  BasisSpec step_open_num, step_open_den;    // ◇-step memberships
  BasisSpec cens;       // C == 0 ~ (Z,N,A_z,A_y), per group
  BasisSpec b0;         // diagnostic working model Y ~ (Z,A_z,A_y) on G=0
  BasisSpec h1;         // diagnostic working model Y ~ (N,A_z,A_y) on G=1

  SampleOptions sample_opts;
  ConvenientDist conv;
  WeightOptions weight_opts;
  StandardPopulation std_pop = StandardPopulation::group_g(1);

  static EstimatorConfig defaults(const Dataset& ds);
  /// Fully saturated bases and densities over binary columns (exact cell
  /// means; used for discrete-data oracle checks).
  static EstimatorConfig saturated(const Dataset& ds);
};

/// Owns the fitted nuisances for one dataset+config pair so the whole
/// estimator family shares them. References the dataset; keep it alive.
class Engine {
 public:
  Engine(const Dataset& ds, EstimatorConfig cfg);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const Dataset& data() const { return ds_; }
  const EstimatorConfig& config() const { return cfg_; }
  bool censoring() const { return !ds_.roles().censor.empty(); }
  const Eigen::VectorXd& standard() const { return t_; }
  const Eigen::VectorXd& group() const { return g_; }

  const DensityModel& lambda0z();
  const DensityModel& lambda1n();
  const DensityModel& pz_full1();
  const DensityModel& pn_full1();
  const DensityModel& rw_den(RwForm form);
  const ArtificialSample& sample(SampleKind kind);
  const WeightVector& w_ay(int g);
  const WeightVector& w_az();
  const WeightVector& w_cens(int g);
  const WeightVector& w_zn(ZnStrategy s);
  const WeightVector& w_bridge_step(BridgeStepKind k);
  const WeightVector& w_rw(RwForm form);
  const FittedModel& mu1_plain();                 // censoring-weighted only
  const FittedModel& mu1_weighted(ZnStrategy s);  // x w_zn x w_1T

  /// Gathers an origin-row weight vector onto the clone rows of a sample.
  static Eigen::VectorXd at_origin(const Eigen::VectorXd& per_row,
                                   const ArtificialSample& s);

 private:
  const Dataset& ds_;
  EstimatorConfig cfg_;
  Eigen::VectorXd t_, g_;

  std::optional<DensityModel> lambda0z_, lambda1n_, pz_full1_, pn_full1_;
  std::map<int, DensityModel> rw_den_;
  std::map<int, ArtificialSample> samples_;
  std::map<int, WeightVector> w_ay_, w_cens_, w_zn_, w_bridge_, w_rw_;
  std::optional<WeightVector> w_az_;
  std::optional<FittedModel> mu1_plain_;
  std::map<int, FittedModel> mu1_weighted_;
};

/// Observation-arm outcome mean for group g standardized to the standard
/// population.
Estimate estimate_theta_obs(Engine& e, int g, ThetaForm form);

/// Linear outcome-model decomposition estimate of the intervention-arm
/// mean (gaussian outcomes only).
Estimate estimate_eobd(Engine& e);

Estimate estimate_pw(Engine& e, ZnStrategy s);
Estimate estimate_se(Engine& e, ZnStrategy s);
Estimate estimate_wse(Engine& e, ZnStrategy s);
/// Regress-then-weight forms; strategy selects the weight construction
/// (z_model / n_model over G=0, z_bridge over ◆, n_bridge over ◇).
Estimate estimate_rw(Engine& e, ZnStrategy s);

DecompositionResult decompose(Engine& e, const Estimate& theta1_star,
                              ThetaForm obs_form);

/// Per-row efficient-influence-value evaluation at the fitted nuisances,
/// with the zn weight built under the given strategy.
InfluenceResult evaluate_influence(Engine& e, ZnStrategy s);

}  // namespace cda
