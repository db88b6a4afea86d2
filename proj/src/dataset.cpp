#include "cda/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cda {

namespace {

bool is_missing(double v) { return std::isnan(v); }

bool is_binary01(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0 && v[i] != 1.0) return false;
  }
  return true;
}

void require_no_missing(const Eigen::VectorXd& v, const std::string& name) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (is_missing(v[i]))
      throw ValidationError("column '" + name + "' has a missing value at row " +
                            std::to_string(i));
  }
}

}  // namespace

Dataset Dataset::from_columns(std::vector<std::pair<std::string, Eigen::VectorXd>> cols,
                              Roles roles) {
  Dataset ds;
  ds.roles_ = std::move(roles);
  for (auto& [name, v] : cols) {
    if (ds.index_.count(name))
      throw ValidationError("duplicate column '" + name + "'");
    if (!ds.names_.empty() && v.size() != ds.n_)
      throw ValidationError("column '" + name + "' length mismatch");
    ds.n_ = v.size();
    ds.index_[name] = ds.names_.size();
    ds.names_.push_back(name);
    ds.cols_.push_back(std::move(v));
  }
  ds.validate();
  return ds;
}

void Dataset::validate() const {
  const Roles& r = roles_;
  auto need = [&](const std::string& name, const char* role) {
    if (name.empty()) throw ValidationError(std::string("role '") + role + "' unassigned");
    if (!has_column(name))
      throw ValidationError("role '" + std::string(role) + "' names missing column '" +
                            name + "'");
  };
  need(r.group, "G");
  need(r.outcome, "Y");
  if (r.z.empty()) throw ValidationError("role 'Z' requires at least one column");
  for (const auto& c : r.z) need(c, "Z");
  for (const auto& c : r.ay) need(c, "A_y");
  for (const auto& c : r.az) need(c, "A_z");
  for (const auto& c : r.n) need(c, "N");
  if (!r.binary_outcome.empty()) need(r.binary_outcome, "W");
  if (!r.censor.empty()) need(r.censor, "C");
  if (!r.standard_pop.empty()) need(r.standard_pop, "T");
  if (!r.cluster.empty()) need(r.cluster, "cluster");

  // A_y, A_z, N, Z pairwise disjoint
  std::set<std::string> seen;
  auto disjoint = [&](const std::vector<std::string>& cols, const char* role) {
    for (const auto& c : cols) {
      if (!seen.insert(c).second)
        throw ValidationError("column '" + c + "' assigned to multiple roles (" + role +
                              ")");
    }
  };
  disjoint(r.z, "Z");
  disjoint(r.ay, "A_y");
  disjoint(r.az, "A_z");
  disjoint(r.n, "N");

  if (!is_binary01(column(r.group)))
    throw ValidationError("G column '" + r.group + "' is not binary 0/1");
  require_no_missing(column(r.group), r.group);
  if (!r.standard_pop.empty()) {
    if (!is_binary01(column(r.standard_pop)))
      throw ValidationError("T column '" + r.standard_pop + "' is not binary 0/1");
    require_no_missing(column(r.standard_pop), r.standard_pop);
  }
  if (!r.censor.empty()) {
    if (!is_binary01(column(r.censor)))
      throw ValidationError("C column '" + r.censor + "' is not binary 0/1");
    require_no_missing(column(r.censor), r.censor);
  }
  for (const auto& c : r.z) require_no_missing(column(c), c);
  for (const auto& c : r.ay) require_no_missing(column(c), c);
  for (const auto& c : r.az) require_no_missing(column(c), c);
  for (const auto& c : r.n) require_no_missing(column(c), c);

  // Y (and W) may be missing only where C=1
  auto check_outcome = [&](const std::string& name) {
    const Eigen::VectorXd& y = column(name);
    for (Eigen::Index i = 0; i < n_; ++i) {
      if (is_missing(y[i])) {
        if (r.censor.empty() || column(r.censor)[i] != 1.0)
          throw ValidationError("outcome '" + name + "' missing at row " +
                                std::to_string(i) + " where C=0");
      }
    }
  };
  check_outcome(r.outcome);
  if (!r.binary_outcome.empty()) check_outcome(r.binary_outcome);
}

const Eigen::VectorXd& Dataset::column(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ValidationError("unknown column '" + name + "'");
  return cols_[it->second];
}

Eigen::VectorXd Dataset::standard_indicator(const StandardPopulation& sp) const {
  Eigen::VectorXd t(n_);
  switch (sp.kind) {
    case StandardPopulation::Kind::group_is_standard: {
      const Eigen::VectorXd& g = column(roles_.group);
      for (Eigen::Index i = 0; i < n_; ++i) t[i] = (g[i] == sp.group) ? 1.0 : 0.0;
      break;
    }
    case StandardPopulation::Kind::explicit_column:
      t = column(sp.column);
      break;
    case StandardPopulation::Kind::predicate:
      for (Eigen::Index i = 0; i < n_; ++i) t[i] = sp.pred(*this, i) ? 1.0 : 0.0;
      break;
  }
  if (t.sum() <= 0.0)
    throw ValidationError("standard population is empty: P(T=1) = 0 in the data");
  return t;
}

std::vector<Eigen::Index> Dataset::rows_where(const std::string& col, double value) const {
  const Eigen::VectorXd& v = column(col);
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < n_; ++i)
    if (v[i] == value) out.push_back(i);
  return out;
}

Dataset Dataset::select_rows(std::span<const Eigen::Index> idx) const {
  Dataset out;
  out.roles_ = roles_;
  out.n_ = static_cast<Eigen::Index>(idx.size());
  out.names_ = names_;
  out.index_ = index_;
  out.cols_.reserve(cols_.size());
  for (const auto& c : cols_) {
    Eigen::VectorXd v(out.n_);
    for (Eigen::Index i = 0; i < out.n_; ++i) v[i] = c[idx[i]];
    out.cols_.push_back(std::move(v));
  }
  return out;
}

Dataset Dataset::load_csv(const std::string& path, Roles roles, char delim) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delim)) names.push_back(field);
  }
  std::vector<std::vector<double>> data(names.size());
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t c = 0;
    while (std::getline(ss, field, delim)) {
      if (c >= names.size())
        throw ValidationError("row " + std::to_string(row) + " has too many fields");
      if (field.empty() || field == "NA") {
        data[c].push_back(std::nan(""));
      } else {
        try {
          std::size_t pos = 0;
          double v = std::stod(field, &pos);
          if (pos != field.size()) throw std::invalid_argument(field);
          data[c].push_back(v);
        } catch (const std::exception&) {
          throw ValidationError("row " + std::to_string(row) + " column '" + names[c] +
                                "': cannot parse '" + field + "'");
        }
      }
      ++c;
    }
    // trailing empty field when line ends with the delimiter
    if (c == names.size() - 1 && !line.empty() && line.back() == delim) {
      data[c].push_back(std::nan(""));
      ++c;
    }
    if (c != names.size())
      throw ValidationError("row " + std::to_string(row) + " has too few fields");
    ++row;
  }
  std::vector<std::pair<std::string, Eigen::VectorXd>> cols;
  for (std::size_t c = 0; c < names.size(); ++c) {
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(data[c].data(), row);
    cols.emplace_back(names[c], std::move(v));
  }
  return from_columns(std::move(cols), std::move(roles));
}

void Dataset::write_csv(const std::string& path, char delim) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < names_.size(); ++c)
    out << names_[c] << (c + 1 < names_.size() ? std::string(1, delim) : std::string("\n"));
  char buf[64];
  for (Eigen::Index i = 0; i < n_; ++i) {
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      double v = cols_[c][i];
      if (std::isnan(v)) {
        out << "NA";
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
      }
      out << (c + 1 < cols_.size() ? std::string(1, delim) : std::string("\n"));
    }
  }
}

void Overlay::set(const std::string& name, Eigen::VectorXd values) {
  if (values.size() != base_->rows()) throw ValidationError("overlay length mismatch");
  over_[name] = std::move(values);
}

void Overlay::set_constant(const std::string& name, double value) {
  over_[name] = Eigen::VectorXd::Constant(base_->rows(), value);
}

const Eigen::VectorXd& Overlay::column(const std::string& name) const {
  auto it = over_.find(name);
  if (it != over_.end()) return it->second;
  return base_->column(name);
}

bool Overlay::has_column(const std::string& name) const {
  return over_.count(name) > 0 || base_->has_column(name);
}

}  // namespace cda
