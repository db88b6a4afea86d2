#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cda {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Read-only column provider. Dataset and Overlay both satisfy it so basis
/// expansion and density evaluation work on either.
class Table {
 public:
  virtual ~Table() = default;
  virtual Eigen::Index rows() const = 0;
  virtual const Eigen::VectorXd& column(const std::string& name) const = 0;
  virtual bool has_column(const std::string& name) const = 0;
};

/// Variable-role assignment. Z is an ordered list (multivariate points of
/// intervention); the allowable/non-allowable lists may be empty.
struct Roles {
  std::string group;               // G, binary
  std::string outcome;             // Y
  std::string binary_outcome;      // W, optional
  std::string censor;              // C, optional
  std::string standard_pop;        // explicit T column, optional
  std::string cluster;             // optional
  std::vector<std::string> z;      // >= 1 column
  std::vector<std::string> ay;     // outcome-allowables
  std::vector<std::string> az;     // intervention-allowables
  std::vector<std::string> n;      // non-allowables
};

class Dataset;

/// Who defines the A_y standardization target.
struct StandardPopulation {
  enum class Kind { group_is_standard, explicit_column, predicate };
  Kind kind = Kind::group_is_standard;
  int group = 1;                                      // group_is_standard
  std::string column;                                 // explicit_column
  std::function<bool(const Dataset&, Eigen::Index)> pred;  // predicate over (G, A_y)

  static StandardPopulation group_g(int g) {
    StandardPopulation s;
    s.kind = Kind::group_is_standard;
    s.group = g;
    return s;
  }
  static StandardPopulation from_column(std::string col) {
    StandardPopulation s;
    s.kind = Kind::explicit_column;
    s.column = std::move(col);
    return s;
  }
};

/// Immutable column table with role assignments. Y/W may be missing (NaN)
/// only on rows with C=1; all other role columns must be fully defined.
class Dataset : public Table {
 public:
  Dataset() = default;
  static Dataset from_columns(std::vector<std::pair<std::string, Eigen::VectorXd>> cols,
                              Roles roles);
  static Dataset load_csv(const std::string& path, Roles roles, char delim = ',');
  void write_csv(const std::string& path, char delim = ',') const;

  Eigen::Index rows() const override { return n_; }
  const Eigen::VectorXd& column(const std::string& name) const override;
  bool has_column(const std::string& name) const override { return index_.count(name) > 0; }
  const std::vector<std::string>& column_names() const { return names_; }
  const Roles& roles() const { return roles_; }

  /// Binary T indicator induced by a StandardPopulation definition.
  Eigen::VectorXd standard_indicator(const StandardPopulation& sp) const;

  /// Row indices with column==value (tolerant integer compare).
  std::vector<Eigen::Index> rows_where(const std::string& col, double value) const;
  Dataset select_rows(std::span<const Eigen::Index> idx) const;

 private:
  void validate() const;
  Eigen::Index n_ = 0;
  std::vector<std::string> names_;
  std::vector<Eigen::VectorXd> cols_;
  std::map<std::string, std::size_t> index_;
  Roles roles_;
};

/// A Table view layering replacement columns over a base table.
class Overlay : public Table {
 public:
  explicit Overlay(const Table& base) : base_(&base) {}
  void set(const std::string& name, Eigen::VectorXd values);
  void set_constant(const std::string& name, double value);
  Eigen::Index rows() const override { return base_->rows(); }
  const Eigen::VectorXd& column(const std::string& name) const override;
  bool has_column(const std::string& name) const override;

 private:
  const Table* base_;
  std::map<std::string, Eigen::VectorXd> over_;
};

}  // namespace cda
