#include "cda/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "cda/seeding.hpp"

namespace cda {

Dataset resample(const Dataset& ds, std::uint64_t seed, bool cluster) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> picked;
  if (!cluster) {
    std::uniform_int_distribution<Eigen::Index> pick(0, ds.rows() - 1);
    picked.reserve(static_cast<std::size_t>(ds.rows()));
    for (Eigen::Index i = 0; i < ds.rows(); ++i) picked.push_back(pick(rng));
  } else {
    const std::string& ccol = ds.roles().cluster;
    if (ccol.empty())
      throw ValidationError("cluster bootstrap requested but no cluster role is set");
    const Eigen::VectorXd& c = ds.column(ccol);
    // unique ids in first-appearance order so the draw is reproducible
    // regardless of id coding
    std::vector<double> ids;
    std::map<double, std::vector<Eigen::Index>> members;
    for (Eigen::Index i = 0; i < ds.rows(); ++i) {
      auto [it, inserted] = members.try_emplace(c[i]);
      if (inserted) ids.push_back(c[i]);
      it->second.push_back(i);
    }
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const auto& rows = members.at(ids[pick(rng)]);
      picked.insert(picked.end(), rows.begin(), rows.end());
    }
  }
  return ds.select_rows(picked);
}

BootstrapResult bootstrap(const Dataset& ds, const Statistic& stat,
                          const BootstrapOptions& opts) {
  if (opts.replicates < 2) throw ValidationError("bootstrap needs >= 2 replicates");
  BootstrapResult out;
  out.estimate = stat(ds);
  out.draws.reserve(static_cast<std::size_t>(opts.replicates));
  for (int b = 0; b < opts.replicates; ++b) {
    Dataset rs = resample(ds, mix_seed(opts.seed, static_cast<std::uint64_t>(b)),
                          opts.cluster);
    try {
      out.draws.push_back(stat(rs));
    } catch (const ValidationError&) {
      ++out.failures;
    } catch (const NumericError&) {
      ++out.failures;
    }
  }
  double max_fail = opts.max_failure_rate * opts.replicates;
  if (out.failures > max_fail)
    throw NumericError("bootstrap: " + std::to_string(out.failures) + " of " +
                       std::to_string(opts.replicates) + " replicates failed");

  const std::size_t n = out.draws.size();
  double mean = 0.0;
  for (double d : out.draws) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : out.draws) ss += (d - mean) * (d - mean);
  out.se = std::sqrt(ss / static_cast<double>(n - 1));

  std::vector<double> sorted = out.draws;
  std::sort(sorted.begin(), sorted.end());
  double alpha = (1.0 - opts.level) / 2.0;
  auto quantile = [&](double q) {
    // type-7 linear interpolation
    double h = q * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, n - 1);
    double frac = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  out.ci_lo = quantile(alpha);
  out.ci_hi = quantile(1.0 - alpha);
  return out;
}

}  // namespace cda
