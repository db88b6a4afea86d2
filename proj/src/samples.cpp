#include "cda/samples.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "cda/seeding.hpp"

namespace cda {

namespace {

std::vector<std::vector<double>> unique_configs(const Dataset& ds,
                                                const std::vector<Eigen::Index>& rows,
                                                const std::vector<std::string>& cols) {
  std::set<std::vector<double>> seen;
  for (Eigen::Index r : rows) {
    std::vector<double> v;
    v.reserve(cols.size());
    for (const auto& c : cols) v.push_back(ds.column(c)[r]);
    seen.insert(std::move(v));
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

ArtificialSample build_sample(const Dataset& ds, SampleKind kind,
                              const DensityModel* model, const ConvenientDist* conv,
                              const SampleOptions& opts) {
  ArtificialSample out;
  out.kind = kind;
  const Roles& roles = ds.roles();
  out.replaced = (kind == SampleKind::z_model || kind == SampleKind::z_bridge ||
                  kind == SampleKind::z_check)
                     ? roles.z
                     : roles.n;
  if (out.replaced.empty())
    throw ValidationError("artificial sample: the replaced variable block is empty");

  const bool model_based = kind == SampleKind::z_model || kind == SampleKind::n_model ||
                           kind == SampleKind::z_check || kind == SampleKind::n_check;
  if (model_based && !model)
    throw ValidationError("artificial sample: this kind needs a density model");
  if (!model_based && !conv)
    throw ValidationError("artificial sample: this kind needs a convenient distribution");
  if (model_based && model->target_names() != out.replaced)
    throw ValidationError("artificial sample: density model targets do not match the "
                          "replaced variable block");

  const int base_g = out.base_is_group1() ? 1 : 0;
  std::vector<Eigen::Index> base_rows = ds.rows_where(roles.group, base_g);
  if (base_rows.empty()) throw ValidationError("artificial sample: base group is empty");
  Dataset base = ds.select_rows(base_rows);
  const Eigen::Index nb = base.rows();
  const std::size_t k = out.replaced.size();

  // per clone slot: replacement values (one vector per replaced column,
  // length nb) and per-row weights
  std::vector<std::vector<Eigen::VectorXd>> slots;  // slots[c][col]
  std::vector<Eigen::VectorXd> slot_w;

  if (model_based) {
    auto configs = model->support();
    if (opts.enumerate_when_discrete &&
        configs.size() <= static_cast<std::size_t>(opts.max_enumeration)) {
      for (const auto& cfg : configs) {
        Eigen::VectorXd p = model->config_probability(base, cfg);
        std::vector<Eigen::VectorXd> cols;
        for (std::size_t j = 0; j < k; ++j)
          cols.push_back(Eigen::VectorXd::Constant(nb, cfg[j]));
        slots.push_back(std::move(cols));
        slot_w.push_back(std::move(p));
      }
    } else {
      for (int c = 0; c < opts.m; ++c) {
        slots.push_back(model->sample(base, mix_seed(opts.seed, c)));
        slot_w.push_back(Eigen::VectorXd::Constant(nb, 1.0 / opts.m));
      }
    }
  } else {
    const int contrast_g = 1 - base_g;
    std::vector<Eigen::Index> contrast_rows = ds.rows_where(roles.group, contrast_g);
    if (contrast_rows.empty())
      throw ValidationError("artificial sample: contrast group is empty");
    switch (conv->mode) {
      case ConvenientDist::Mode::enumeration: {
        for (const auto& c : out.replaced) {
          const Eigen::VectorXd& v = ds.column(c);
          for (Eigen::Index r : contrast_rows)
            if (v[r] != std::floor(v[r]))
              throw ValidationError(
                  "enumeration requested for continuous column '" + c +
                  "'; use resample_contrast or uniform mode instead");
        }
        auto configs = unique_configs(ds, contrast_rows, out.replaced);
        const double w = 1.0 / static_cast<double>(configs.size());
        for (const auto& cfg : configs) {
          std::vector<Eigen::VectorXd> cols;
          for (std::size_t j = 0; j < k; ++j)
            cols.push_back(Eigen::VectorXd::Constant(nb, cfg[j]));
          slots.push_back(std::move(cols));
          slot_w.push_back(Eigen::VectorXd::Constant(nb, w));
        }
        break;
      }
      case ConvenientDist::Mode::resample_contrast: {
        std::mt19937_64 rng(mix_seed(opts.seed, 0));
        std::uniform_int_distribution<std::size_t> pick(0, contrast_rows.size() - 1);
        for (int c = 0; c < opts.m; ++c) {
          std::vector<Eigen::VectorXd> cols(k, Eigen::VectorXd(nb));
          for (Eigen::Index i = 0; i < nb; ++i) {
            Eigen::Index src = contrast_rows[pick(rng)];
            for (std::size_t j = 0; j < k; ++j)
              cols[j][i] = ds.column(out.replaced[j])[src];
          }
          slots.push_back(std::move(cols));
          slot_w.push_back(Eigen::VectorXd::Constant(nb, 1.0 / opts.m));
        }
        break;
      }
      case ConvenientDist::Mode::uniform: {
        // per-coordinate box over the contrast group's min/max
        std::vector<double> lo(k), hi(k);
        for (std::size_t j = 0; j < k; ++j) {
          const Eigen::VectorXd& v = ds.column(out.replaced[j]);
          lo[j] = hi[j] = v[contrast_rows[0]];
          for (Eigen::Index r : contrast_rows) {
            lo[j] = std::min(lo[j], v[r]);
            hi[j] = std::max(hi[j], v[r]);
          }
        }
        std::mt19937_64 rng(mix_seed(opts.seed, 0));
        for (int c = 0; c < opts.m; ++c) {
          std::vector<Eigen::VectorXd> cols(k, Eigen::VectorXd(nb));
          for (Eigen::Index i = 0; i < nb; ++i)
            for (std::size_t j = 0; j < k; ++j) {
              std::uniform_real_distribution<double> u(lo[j], hi[j]);
              cols[j][i] = u(rng);
            }
          slots.push_back(std::move(cols));
          slot_w.push_back(Eigen::VectorXd::Constant(nb, 1.0 / opts.m));
        }
        break;
      }
    }
    // the deterministic-support gate concerns the point of intervention
    // only; a convenient sample over N ignores it
    if (!opts.gate_col.empty() && out.replaces_z()) {
      const Eigen::VectorXd& gate = base.column(opts.gate_col);
      for (std::size_t c = 0; c < slots.size(); ++c)
        for (Eigen::Index i = 0; i < nb; ++i)
          if (gate[i] < opts.gate_threshold)
            for (std::size_t j = 0; j < k; ++j)
              slots[c][j][i] = opts.gate_closed_value;
    }
  }

  // interleave: per origin row, one clone per slot
  const std::size_t m = slots.size();
  out.clones_per_row = static_cast<int>(m);
  const Eigen::Index total = nb * static_cast<Eigen::Index>(m);
  out.origin.resize(total);
  out.clone_weight.resize(total);
  std::vector<std::pair<std::string, Eigen::VectorXd>> cols;
  for (const auto& name : ds.column_names()) {
    Eigen::VectorXd v(total);
    auto it = std::find(out.replaced.begin(), out.replaced.end(), name);
    if (it == out.replaced.end()) {
      const Eigen::VectorXd& src = base.column(name);
      for (Eigen::Index i = 0; i < nb; ++i)
        for (std::size_t c = 0; c < m; ++c)
          v[i * static_cast<Eigen::Index>(m) + static_cast<Eigen::Index>(c)] = src[i];
    } else {
      std::size_t j = static_cast<std::size_t>(it - out.replaced.begin());
      for (Eigen::Index i = 0; i < nb; ++i)
        for (std::size_t c = 0; c < m; ++c)
          v[i * static_cast<Eigen::Index>(m) + static_cast<Eigen::Index>(c)] =
              slots[c][j][i];
    }
    cols.emplace_back(name, std::move(v));
  }
  for (Eigen::Index i = 0; i < nb; ++i)
    for (std::size_t c = 0; c < m; ++c) {
      Eigen::Index row = i * static_cast<Eigen::Index>(m) + static_cast<Eigen::Index>(c);
      out.origin[row] = base_rows[i];
      out.clone_weight[row] = slot_w[c][i];
    }
  out.data = Dataset::from_columns(std::move(cols), roles);
  return out;
}

ConvenientCheck convenient_distribution_check(const Dataset& ds,
                                              const ArtificialSample& sample) {
  if (sample.kind != SampleKind::z_bridge && sample.kind != SampleKind::n_bridge)
    throw ValidationError("convenient_distribution_check applies to bridge samples only");
  ConvenientCheck rep;
  const Roles& roles = ds.roles();
  const int contrast_g = sample.base_is_group1() ? 0 : 1;
  std::vector<Eigen::Index> contrast_rows = ds.rows_where(roles.group, contrast_g);

  // (a) support coverage against the contrast group
  bool discrete = true;
  for (const auto& c : sample.replaced) {
    const Eigen::VectorXd& v = ds.column(c);
    for (Eigen::Index r : contrast_rows)
      if (v[r] != std::floor(v[r])) discrete = false;
  }
  if (discrete) {
    auto want = unique_configs(ds, contrast_rows, sample.replaced);
    std::set<std::vector<double>> have;
    for (Eigen::Index i = 0; i < sample.data.rows(); ++i) {
      std::vector<double> v;
      for (const auto& c : sample.replaced) v.push_back(sample.data.column(c)[i]);
      have.insert(std::move(v));
    }
    for (const auto& cfg : want)
      if (!have.count(cfg)) {
        std::string s = "missing support configuration (";
        for (std::size_t j = 0; j < cfg.size(); ++j)
          s += (j ? "," : "") + std::to_string(cfg[j]);
        s += ") of the replaced block";
        throw ValidationError("convenient distribution coverage failure: " + s);
      }
  } else {
    for (const auto& c : sample.replaced) {
      const Eigen::VectorXd& obs = ds.column(c);
      double lo = obs[contrast_rows[0]], hi = lo;
      for (Eigen::Index r : contrast_rows) {
        lo = std::min(lo, obs[r]);
        hi = std::max(hi, obs[r]);
      }
      const Eigen::VectorXd& v = sample.data.column(c);
      if (v.minCoeff() > lo || v.maxCoeff() < hi)
        throw ValidationError("convenient distribution coverage failure: column '" + c +
                              "' does not span the contrast group's range");
    }
  }
  rep.coverage_pass = true;

  // (b) empirical independence of replaced vs retained block (weighted corr)
  const auto& retained = sample.replaces_z() ? roles.n : roles.z;
  const Eigen::VectorXd& w = sample.clone_weight;
  double wsum = w.sum();
  auto wmean = [&](const Eigen::VectorXd& x) { return x.dot(w) / wsum; };
  rep.max_dependence = 0.0;
  for (const auto& a : sample.replaced)
    for (const auto& b : retained) {
      const Eigen::VectorXd& x = sample.data.column(a);
      const Eigen::VectorXd& y = sample.data.column(b);
      double mx = wmean(x), my = wmean(y);
      Eigen::VectorXd dx = x.array() - mx, dy = y.array() - my;
      double sx = std::sqrt(dx.cwiseProduct(dx).dot(w) / wsum);
      double sy = std::sqrt(dy.cwiseProduct(dy).dot(w) / wsum);
      if (sx < 1e-12 || sy < 1e-12) continue;
      double corr = dx.cwiseProduct(dy).dot(w) / (wsum * sx * sy);
      rep.max_dependence = std::max(rep.max_dependence, std::abs(corr));
    }
  rep.independence_pass = rep.max_dependence <= 0.1;
  rep.detail = "max |weighted corr(replaced, retained)| = " +
               std::to_string(rep.max_dependence);
  return rep;
}

void ArtificialSample::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  const auto& names = data.column_names();
  for (const auto& n : names) out << n << ',';
  out << "kind,origin_row,clone_id\n";
  const char* kind_name[] = {"z_model", "n_model", "z_bridge",
                             "n_bridge", "z_check", "n_check"};
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (const auto& n : names) {
      double v = data.column(n)[i];
      if (std::isnan(v))
        out << "NA,";
      else
        out << v << ',';
    }
    out << kind_name[static_cast<int>(kind)] << ',' << origin[i] << ','
        << (i % clones_per_row) << '\n';
  }
}

}  // namespace cda
