#pragma once

#include "cda/basis.hpp"

namespace cda {

enum class Family { gaussian, binomial };

struct FittedModel {
  Family family = Family::gaussian;
  Eigen::VectorXd coef;
  BasisSpec basis;          // empty when fit from a raw matrix
  std::string response;
  bool converged = false;
  bool separation = false;  // |linear predictor| hit the cap during IRLS
  int iterations = 0;
  double deviance = 0.0;

  std::string report() const;
};

/// Weighted IRLS fit with canonical link. Zero-weight rows are dropped.
/// Guarantees mean recovery on the fitting sample: sum w*(y - yhat) <=
/// 1e-8 * sum w when converged and the design spans an intercept.
FittedModel fit_glm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, Family family,
                    const Eigen::VectorXd* weights = nullptr);

FittedModel fit_glm(const Table& t, const std::string& response, const BasisSpec& spec,
                    Family family, const Eigen::VectorXd* weights = nullptr);

Eigen::VectorXd predict(const FittedModel& m, const Eigen::MatrixXd& X);
Eigen::VectorXd predict(const FittedModel& m, const Table& t);

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace cda
