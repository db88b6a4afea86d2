#include "cda/basis.hpp"

#include <algorithm>
#include <set>

namespace cda {

BasisSpec& BasisSpec::add(const std::string& col, int power) {
  if (power < 1) throw ValidationError("basis power must be >= 1");
  for (const auto& t : terms)
    if (t.column == col && t.power == power)
      throw ValidationError("duplicate basis term '" + col + "'^" + std::to_string(power));
  terms.push_back({col, power});
  return *this;
}

BasisSpec& BasisSpec::cross(const std::string& a, const std::string& b) {
  for (const auto& x : interactions)
    if ((x.a == a && x.b == b) || (x.a == b && x.b == a))
      throw ValidationError("duplicate interaction '" + a + ":" + b + "'");
  interactions.push_back({a, b});
  return *this;
}

BasisSpec& BasisSpec::add_all(const std::vector<std::string>& cols) {
  for (const auto& c : cols) add(c);
  return *this;
}

BasisSpec BasisSpec::mains(const std::vector<std::string>& cols) {
  BasisSpec s;
  s.add_all(cols);
  return s;
}

BasisSpec BasisSpec::saturated(const std::vector<std::string>& cols) {
  // Saturated designs are handled by expand_basis via the saturated_ flag
  // below; represented as mains plus all higher-order products. For k
  // columns this needs products of arbitrary order, which the Term/
  // Interaction grammar cannot express beyond order 2, so saturated specs
  // are stored specially.
  BasisSpec s;
  s.saturated_cols_ = cols;
  return s;
}

std::size_t BasisSpec::width() const {
  if (!saturated_cols_.empty()) return std::size_t{1} << saturated_cols_.size();
  return (intercept ? 1 : 0) + terms.size() + interactions.size();
}

bool BasisSpec::uses_only(const std::vector<std::string>& cols) const {
  std::set<std::string> s(cols.begin(), cols.end());
  for (const auto& t : terms)
    if (!s.count(t.column)) return false;
  for (const auto& x : interactions)
    if (!s.count(x.a) || !s.count(x.b)) return false;
  for (const auto& c : saturated_cols_)
    if (!s.count(c)) return false;
  return true;
}

ExpandedBasis expand_basis(const Table& t, const BasisSpec& spec) {
  const Eigen::Index n = t.rows();
  ExpandedBasis out;

  if (!spec.saturated_cols_.empty()) {
    const std::size_t k = spec.saturated_cols_.size();
    if (k > 20) throw ValidationError("saturated basis over >20 columns refused");
    const std::size_t p = std::size_t{1} << k;
    out.X = Eigen::MatrixXd::Ones(n, static_cast<Eigen::Index>(p));
    std::vector<const Eigen::VectorXd*> cols;
    cols.reserve(k);
    for (const auto& c : spec.saturated_cols_) cols.push_back(&t.column(c));
    for (std::size_t mask = 1; mask < p; ++mask) {
      Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
      for (std::size_t j = 0; j < k; ++j)
        if (mask & (std::size_t{1} << j)) v = v.cwiseProduct(*cols[j]);
      out.X.col(static_cast<Eigen::Index>(mask)) = v;
    }
    return out;
  }

  out.X.resize(n, static_cast<Eigen::Index>(spec.width()));
  Eigen::Index j = 0;
  if (spec.intercept) out.X.col(j++) = Eigen::VectorXd::Ones(n);
  for (const auto& term : spec.terms) {
    const Eigen::VectorXd& c = t.column(term.column);
    if (term.power > 1 && n > 0 && (c.array() == c[0]).all())
      out.constant_power_warning = true;
    if (term.power == 1) {
      out.X.col(j++) = c;
    } else {
      Eigen::VectorXd v = c;
      for (int p = 1; p < term.power; ++p) v = v.cwiseProduct(c);
      out.X.col(j++) = v;
    }
  }
  for (const auto& x : spec.interactions)
    out.X.col(j++) = t.column(x.a).cwiseProduct(t.column(x.b));
  return out;
}

}  // namespace cda
