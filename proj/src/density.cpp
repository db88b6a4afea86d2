#include "cda/density.hpp"

#include <cmath>
#include <random>

namespace cda {

namespace {

Eigen::VectorXd gate_open(const TargetSpec& spec, const Table& t) {
  if (spec.gate_col.empty()) return Eigen::VectorXd::Ones(t.rows());
  const Eigen::VectorXd& g = t.column(spec.gate_col);
  Eigen::VectorXd out(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    out[i] = (g[i] >= spec.gate_threshold) ? 1.0 : 0.0;
  return out;
}

}  // namespace

DensityModel fit_density_model(const Table& t, std::vector<TargetSpec> targets,
                               const Eigen::VectorXd* weights) {
  if (targets.empty()) throw ValidationError("density model needs >= 1 target");
  DensityModel dm;
  Eigen::VectorXd base_w = weights ? *weights : Eigen::VectorXd::Ones(t.rows());
  if (base_w.size() != t.rows())
    throw ValidationError("density model: weight length mismatch");

  for (auto& spec : targets) {
    if (spec.levels < 2) throw ValidationError("density target needs >= 2 levels");
    const Eigen::VectorXd& x = t.column(spec.name);
    Eigen::VectorXd open = gate_open(spec, t);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      double v = x[i];
      if (v != std::floor(v) || v < 0.0 || v >= spec.levels)
        throw ValidationError("density target '" + spec.name +
                              "' has non-categorical value at row " + std::to_string(i));
      if (open[i] == 0.0 && v != spec.closed_value)
        throw ValidationError("density target '" + spec.name + "' violates its gate at row " +
                              std::to_string(i));
    }

    DensityModel::Factor f;
    f.spec = spec;
    // continuation-ratio: level j modeled as I(x==j) among rows with x>=j,
    // gate-open rows only
    for (int j = 0; j + 1 < spec.levels; ++j) {
      Eigen::VectorXd y(t.rows()), w(t.rows());
      double n_active = 0.0, n_event = 0.0;
      for (Eigen::Index i = 0; i < t.rows(); ++i) {
        bool active = open[i] == 1.0 && x[i] >= j;
        y[i] = (x[i] == j) ? 1.0 : 0.0;
        w[i] = active ? base_w[i] : 0.0;
        if (active && base_w[i] > 0.0) {
          n_active += 1.0;
          if (y[i] == 1.0) n_event += 1.0;
        }
      }
      if (n_active == 0.0 || n_event == 0.0 || n_event == n_active) {
        // a level absent (or exhaustive) in the data: fix its probability
        f.fixed.push_back(n_active > 0.0 && n_event == n_active ? 1 : 0);
        f.level_models.emplace_back();
        if (n_active == 0.0 || n_event == 0.0) dm.fixed_level_ = true;
      } else {
        f.fixed.push_back(-1);
        f.level_models.push_back(
            fit_glm(expand_basis(t, spec.basis).X, y, Family::binomial, &w));
        f.level_models.back().basis = spec.basis;
        f.level_models.back().response = spec.name;
      }
    }
    dm.factors_.push_back(std::move(f));
    dm.targets_.push_back(spec);
    dm.names_.push_back(spec.name);
  }
  return dm;
}

Eigen::VectorXd DensityModel::level_prob(const Factor& f, std::size_t j,
                                         const Table& t) const {
  if (f.fixed[j] >= 0)
    return Eigen::VectorXd::Constant(t.rows(), static_cast<double>(f.fixed[j]));
  return predict(f.level_models[j], t);
}

Eigen::VectorXd DensityModel::factor_prob(const Factor& f, const Table& t,
                                          const Eigen::VectorXd& value) const {
  const Eigen::Index n = t.rows();
  Eigen::VectorXd open = gate_open(f.spec, t);
  Eigen::VectorXd prob = Eigen::VectorXd::Ones(n);
  // accumulate continuation-ratio products: P(x=v) = prod_{j<v}(1-p_j) * p_v
  // (p_v = 1 implicitly for the top level)
  std::vector<Eigen::VectorXd> p;
  for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(f.spec.levels); ++j)
    p.push_back(level_prob(f, j, t));
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = value[i];
    if (open[i] == 0.0) {
      prob[i] = (v == f.spec.closed_value) ? 1.0 : 0.0;
      continue;
    }
    double acc = 1.0;
    int vi = static_cast<int>(v);
    for (int j = 0; j < vi; ++j) acc *= 1.0 - p[j][i];
    if (vi + 1 < f.spec.levels) acc *= p[vi][i];
    prob[i] = acc;
  }
  return prob;
}

Eigen::VectorXd DensityModel::density_at(const Table& t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(t.rows());
  for (const auto& f : factors_)
    out = out.cwiseProduct(factor_prob(f, t, t.column(f.spec.name)));
  return out;
}

std::vector<std::vector<double>> DensityModel::support() const {
  std::vector<std::vector<double>> configs{{}};
  for (const auto& spec : targets_) {
    std::vector<std::vector<double>> next;
    for (const auto& c : configs) {
      for (int v = 0; v < spec.levels; ++v) {
        auto c2 = c;
        c2.push_back(static_cast<double>(v));
        next.push_back(std::move(c2));
      }
    }
    configs = std::move(next);
  }
  return configs;
}

Eigen::VectorXd DensityModel::config_probability(const Table& t,
                                                 const std::vector<double>& values) const {
  if (values.size() != factors_.size())
    throw ValidationError("config_probability: value count != target count");
  Overlay ov(t);
  for (std::size_t k = 0; k < factors_.size(); ++k)
    ov.set_constant(names_[k], values[k]);
  Eigen::VectorXd out = Eigen::VectorXd::Ones(t.rows());
  for (std::size_t k = 0; k < factors_.size(); ++k)
    out = out.cwiseProduct(factor_prob(factors_[k], ov, ov.column(names_[k])));
  return out;
}

std::vector<Eigen::VectorXd> DensityModel::sample(const Table& t,
                                                  std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Eigen::Index n = t.rows();
  Overlay ov(t);
  std::vector<Eigen::VectorXd> out;
  for (const auto& f : factors_) {
    Eigen::VectorXd open = gate_open(f.spec, ov);
    std::vector<Eigen::VectorXd> p;
    for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(f.spec.levels); ++j)
      p.push_back(level_prob(f, j, ov));
    Eigen::VectorXd draw(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (open[i] == 0.0) {
        draw[i] = f.spec.closed_value;
        unif(rng);  // keep the stream aligned across gate patterns
        continue;
      }
      double u = unif(rng);
      int v = f.spec.levels - 1;
      double carry = 1.0;
      for (int j = 0; j + 1 < f.spec.levels; ++j) {
        double pj = carry * p[static_cast<std::size_t>(j)][i];
        if (u < pj) {
          v = j;
          break;
        }
        u -= pj;
        carry *= 1.0 - p[static_cast<std::size_t>(j)][i];
      }
      draw[i] = static_cast<double>(v);
    }
    ov.set(f.spec.name, draw);
    out.push_back(std::move(draw));
  }
  return out;
}

}  // namespace cda
