#pragma once

#include "cda/density.hpp"

namespace cda {

/// Per-row nonnegative weights over an analytic sample. `analytic` is a 0/1
/// indicator of the same length as `values`; rows outside it carry weight 0.
/// `diagnostic` marks the subsample over which the defining density ratio
/// has expectation 1 (usually equal to analytic).
struct WeightVector {
  Eigen::VectorXd values;
  Eigen::VectorXd analytic;
  Eigen::VectorXd diagnostic;
  std::string kind;
  std::string analytic_tag;
  std::string target_tag;

  WeightVector scaled_by(const Eigen::VectorXd& other) const;
};

/// Hájek (self-normalized) weighted mean of x over rows with mask=1.
double hajek_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                  const Eigen::VectorXd& mask);

struct WeightOptions {
  double probability_floor = 1e-6;
  // optional truncation percentile in (0,1]; 1 = off
  double truncate_percentile = 1.0;
  // rows where gate_col < gate_threshold get weight exactly 1 (the
  // deterministic-support practice for the zn weights)
  std::string gate_col;
  double gate_threshold = 0.0;
};

/// P_std(A_y)/P_g(A_y) on G=g rows. Identically 1 when A_y is empty or when
/// the standard population is "group g is standard".
WeightVector weight_ay(const Dataset& ds, int g, const StandardPopulation& std_pop,
                       const BasisSpec& t_basis, const BasisSpec& g_basis,
                       const WeightOptions& opts = {});

/// odds(G=1 vs 0 | A_z,A_y) / odds(G=1 vs 0 | A_y) on G=0 rows. Identically
/// 1 when A_z is empty.
WeightVector weight_az(const Dataset& ds, const BasisSpec& num_basis,
                       const BasisSpec& den_basis, const WeightOptions& opts = {});

/// P_g(C=0)/P_g(C=0|Z,N,A_z,A_y) on C=0 rows of group g. Identically 1
/// when no censoring column is assigned.
WeightVector weight_censoring(const Dataset& ds, int g, const BasisSpec& basis,
                              const WeightOptions& opts = {});

enum class ZnStrategy { z_model, n_model, z_bridge, n_bridge };

struct ArtificialSample;

/// Nuisance inputs for the four equivalent forms of the weight morphing
/// P_1(Z,N|A_z,A_y) to the intervention-arm product of critical densities.
/// Only the members required by the chosen strategy need be set.
struct ZnNuisances {
  const DensityModel* lambda0z = nullptr;   // z_model numerator
  const DensityModel* pz_full1 = nullptr;   // z_model denominator: P_1(Z|N,A_z,A_y)
  const DensityModel* lambda1n = nullptr;   // n_model numerator
  const DensityModel* pn_full1 = nullptr;   // n_model denominator: P_1(N|Z,A_z,A_y)
  const BasisSpec* g_zazay = nullptr;       // n_model: G ~ (Z,A_z,A_y)
  const BasisSpec* g_azay = nullptr;        // n_model / z_bridge: G ~ (A_z,A_y)
  const ArtificialSample* bridge = nullptr;   // z_bridge: ◆; n_bridge: ◇
  const BasisSpec* bd_znazay = nullptr;     // bridge membership ~ (Z,N,A_z,A_y)
  const BasisSpec* bd_zazay = nullptr;      // z_bridge membership ~ (Z,A_z,A_y)
  const BasisSpec* bd_nazay = nullptr;      // n_bridge membership ~ (N,A_z,A_y)
};

/// The strategy-specific estimate of
/// P_0(Z|A_z,A_y) P_1(N|A_z,A_y) / P_1(Z,N|A_z,A_y), on G=1 rows.
WeightVector weight_zn(const Dataset& ds, ZnStrategy strategy, const ZnNuisances& nz,
                       const WeightOptions& opts = {});

enum class BridgeStepKind { diamond_black, diamond_open };  // ◆-step vs ◇-step

/// ◆: odds(G=0 vs ◆|Z,A_z,A_y)/odds(G=0 vs ◆|A_z,A_y) over ◆ rows.
/// ◇: odds(G=1 vs ◇|N,A_z,A_y)/odds(G=1 vs ◇|A_y) over ◇ rows.
WeightVector weight_bridge_step(const Dataset& ds, const ArtificialSample& sample,
                                BridgeStepKind kind, const BasisSpec& num_basis,
                                const BasisSpec& den_basis,
                                const WeightOptions& opts = {});

/// Supplement regress-then-weight weights over G=0 rows.
/// :Z form: P_0(Z|A_z,A_y)/P_0(Z|N,A_z,A_y) x odds(1 vs 0|N,A_z,A_y)/odds(1 vs 0|A_y).
/// :N form: P_1(N|A_z,A_y)/P_0(N|Z,A_z,A_y) x odds(1 vs 0|A_z,A_y)/odds(1 vs 0|A_y).
struct RwNuisances {
  const DensityModel* num_density = nullptr;  // :Z -> λ_0^Z; :N -> λ_1^N
  const DensityModel* den_density = nullptr;  // :Z -> P_0(Z|N,·); :N -> P_0(N|Z,·)
  const BasisSpec* g_num = nullptr;           // :Z -> G~(N,A_z,A_y); :N -> G~(A_z,A_y)
  const BasisSpec* g_ay = nullptr;            // G ~ A_y
};
enum class RwForm { z_form, n_form };
WeightVector weight_rw(const Dataset& ds, RwForm form, const RwNuisances& nz,
                       const WeightOptions& opts = {});

/// Stacked membership odds helper: fits P(D=1|basis) on rows of `a` (D=1,
/// weight wa) stacked over rows of `b` (D=0, weight wb) and returns
/// odds = p/(1-p) evaluated on `eval` rows.
Eigen::VectorXd stacked_odds(const Table& a, const Eigen::VectorXd& wa, const Table& b,
                             const Eigen::VectorXd& wb, const BasisSpec& basis,
                             const Table& eval, double floor);

}  // namespace cda
