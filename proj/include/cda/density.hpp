#pragma once

#include <cstdint>

#include "cda/glm.hpp"

namespace cda {

/// One variable in a factored conditional density. The basis is the full
/// conditioning design for this variable; when targets are fit in order,
/// the caller lists earlier targets among the basis columns to condition
/// on them. A gate declares a deterministic-support region: where
/// gate_col < gate_threshold the variable equals closed_value with
/// probability 1 and no model is fit there.
struct TargetSpec {
  std::string name;
  int levels = 2;  // 2 = binary 0/1; k>2 = integer codes 0..k-1
  BasisSpec basis;
  std::string gate_col;
  double gate_threshold = 0.0;
  double closed_value = 0.0;
};

/// Factored conditional density P(X_1,...,X_k | conditioning), each factor
/// a canonical-link binomial GLM (categorical variables as continuation-
/// ratio binary factors).
class DensityModel {
 public:
  const std::vector<TargetSpec>& targets() const { return targets_; }
  const std::vector<std::string>& target_names() const { return names_; }
  bool has_fixed_level() const { return fixed_level_; }

  /// Joint conditional probability of the target values found in t.
  Eigen::VectorXd density_at(const Table& t) const;

  /// All target configurations (cartesian product of levels).
  std::vector<std::vector<double>> support() const;

  /// Per-row probability of one specific configuration, conditioning on t.
  Eigen::VectorXd config_probability(const Table& t, const std::vector<double>& values) const;

  /// Sequential sampling through the factorization; one vector per target.
  std::vector<Eigen::VectorXd> sample(const Table& t, std::uint64_t seed) const;

 private:
  friend DensityModel fit_density_model(const Table&, std::vector<TargetSpec>,
                                        const Eigen::VectorXd*);
  // per target: continuation-ratio binary fits for levels 0..k-2
  struct Factor {
    TargetSpec spec;
    std::vector<FittedModel> level_models;  // size levels-1
    std::vector<int> fixed;                 // -1 = modeled, else 0/1 fixed probability
  };
  // P(target >= level j reached and equals j | row), continuation-ratio step
  Eigen::VectorXd level_prob(const Factor& f, std::size_t j, const Table& t) const;
  Eigen::VectorXd factor_prob(const Factor& f, const Table& t,
                              const Eigen::VectorXd& value) const;
  std::vector<Factor> factors_;
  std::vector<TargetSpec> targets_;
  std::vector<std::string> names_;
  bool fixed_level_ = false;
};

DensityModel fit_density_model(const Table& t, std::vector<TargetSpec> targets,
                               const Eigen::VectorXd* weights = nullptr);

}  // namespace cda
