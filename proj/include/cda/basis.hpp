#pragma once

#include "cda/dataset.hpp"

namespace cda {

/// Declarative design-matrix recipe: intercept + (column, power) terms +
/// pairwise interactions. Column ordering is fixed: intercept first, then
/// terms in declaration order, then interactions in declaration order.
struct BasisSpec {
  struct Term {
    std::string column;
    int power = 1;
  };
  struct Interaction {
    std::string a;
    std::string b;
  };
  bool intercept = true;
  std::vector<Term> terms;
  std::vector<Interaction> interactions;
  // Nonempty => full product basis over these binary columns (2^k columns);
  // terms/interactions must then be empty.
  std::vector<std::string> saturated_cols_;

  BasisSpec& add(const std::string& col, int power = 1);
  BasisSpec& cross(const std::string& a, const std::string& b);
  BasisSpec& add_all(const std::vector<std::string>& cols);

  /// Intercept + one main effect per column.
  static BasisSpec mains(const std::vector<std::string>& cols);
  /// Fully saturated design over binary 0/1 columns: all products of
  /// column subsets. 2^k columns including the intercept.
  static BasisSpec saturated(const std::vector<std::string>& cols);

  std::size_t width() const;
  bool empty_predictors() const { return terms.empty() && interactions.empty(); }
  /// True iff every term/interaction column is in the given span helper set.
  bool uses_only(const std::vector<std::string>& cols) const;
};

struct ExpandedBasis {
  Eigen::MatrixXd X;
  bool constant_power_warning = false;  // power >1 requested on a constant column
};

ExpandedBasis expand_basis(const Table& t, const BasisSpec& spec);

}  // namespace cda
