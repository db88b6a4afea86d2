#include "cda/dgm.hpp"

#include <cmath>
#include <random>

#include "cda/glm.hpp"

namespace cda {

namespace {

struct Row {
  double g, ay1, ay2, n1, n2, az1, az2, z, y, w;
};

// One draw through the benchmark causal ordering. `fixed_group` < 0 draws
// G ~ B(.4).
Row draw(std::mt19937_64& rng, DgmArm arm, int fixed_group) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> norm(0.0, 1.0);
  Row r{};
  double g = (fixed_group >= 0) ? fixed_group : (unif(rng) < 0.4 ? 1.0 : 0.0);
  r.g = g;
  const bool standardized = arm != DgmArm::observed;
  // standard population = the G=1 group's allowable distribution
  double g_ay = standardized ? 1.0 : g;
  r.ay1 = unif(rng) < expit(-0.3 - 0.29 * g_ay) ? 1.0 : 0.0;
  r.ay2 = 64.0 - 1.5 * g_ay - 1.1 * r.ay1 + 6.0 * norm(rng);
  r.n1 = unif(rng) < expit((-.6 + .3 * g) + (.67 - 1.09 * g) * r.ay1 +
                           (.006 - .012 * g) * r.ay2)
             ? 1.0
             : 0.0;
  r.n2 = unif(rng) < expit((.39 - .69 * g) + (-.096 + .616 * g) * r.ay1 +
                           (-.0087 + .0107 * g) * r.ay2 + (.79 + 1.01 * g) * r.n1)
             ? 1.0
             : 0.0;
  r.az1 = unif(rng) < expit((-2.6 + .6 * g) + (.41 - .24 * g) * r.ay1 + .02 * r.ay2 +
                            (.08 - .16 * g) * r.n1 + (.11 - .06 * g) * r.n2)
              ? 1.0
              : 0.0;
  r.az2 = (115.0 + 16.0 * g) + (-1.78 + 3.78 * g) * r.ay1 + (.3 + .15 * g) * r.ay2 +
          (-.95 - 1.05 * g) * r.n1 + (1.58 - 8.58 * g) * r.n2 +
          (-1.12 + 2.22 * g) * r.az1 + 12.0 * norm(rng);

  double pz = 0.0;
  if (r.az2 >= 140.0) {
    if (arm == DgmArm::intervention && g == 1.0) {
      // G=1 receives Z from the G=0 conditional density, with the
      // non-allowables integrated out via fresh auxiliary draws
      double n1p = unif(rng) < expit(-.6 + .67 * r.ay1 + .006 * r.ay2) ? 1.0 : 0.0;
      double n2p =
          unif(rng) < expit(.39 - .096 * r.ay1 - .0087 * r.ay2 + .79 * n1p) ? 1.0 : 0.0;
      pz = expit(logit(.25) + .04 * r.ay1 + .01 * r.ay2 + .0005 * r.ay2 * r.ay2 +
                 .45 * n1p + .35 * n2p + .1 * r.az1 + .008 * (r.az2 - 150.0) +
                 .00005 * (r.az2 - 150.0) * (r.az2 - 150.0));
    } else {
      pz = expit(logit(.25) + (.04 - .01 * g) * r.ay1 + (.01 - .009 * g) * r.ay2 +
                 (.0005 - .0002 * g) * r.ay2 * r.ay2 + (.45 - .05 * g) * r.n1 +
                 (.35 - .05 * g) * r.n2 + (.1 - .04 * g) * r.az1 +
                 (.008 - .004 * g) * (r.az2 - 150.0) +
                 (.00005 - .00001 * g) * (r.az2 - 150.0) * (r.az2 - 150.0));
    }
  }
  r.z = unif(rng) < pz ? 1.0 : 0.0;

  double mu_y = (0.3 + .05 * g) * r.ay1 + (0.015 - .005 * g) * r.ay2 +
                .0005 * r.ay2 * r.ay2 + (-1.2 + .05 * g) * r.n1 +
                (-1.2 + .05 * g) * r.n2 + (.9 + .05 * g) * r.az1 + .95 * r.az2 +
                .0002 * r.az2 * r.az2 +
                (10.5 + .12 * (r.az2 - 150.0) * (g * .8 + (1.0 - g) - 0.2 * g)) * r.z;
  r.y = mu_y + 12.0 * norm(rng);
  r.w = r.y >= 140.0 ? 1.0 : 0.0;
  return r;
}

}  // namespace

Dataset dgm_generate(Eigen::Index n, DgmArm arm, std::uint64_t seed,
                     bool binary_outcome) {
  if (n <= 0) throw ValidationError("dgm_generate: n must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::string> names{"G",  "Ay1", "Ay2", "N1", "N2",
                                 "Az1", "Az2", "Z",   "Y",  "W"};
  std::vector<Eigen::VectorXd> cols(names.size(), Eigen::VectorXd(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Row r = draw(rng, arm, -1);
    double vals[] = {r.g, r.ay1, r.ay2, r.n1, r.n2, r.az1, r.az2, r.z, r.y, r.w};
    for (std::size_t k = 0; k < names.size(); ++k) cols[k][i] = vals[k];
  }
  Roles roles;
  roles.group = "G";
  roles.outcome = binary_outcome ? "W" : "Y";
  roles.binary_outcome = "W";
  roles.z = {"Z"};
  roles.ay = {"Ay1", "Ay2"};
  roles.az = {"Az1", "Az2"};
  roles.n = {"N1", "N2"};
  std::vector<std::pair<std::string, Eigen::VectorXd>> pairs;
  for (std::size_t k = 0; k < names.size(); ++k)
    pairs.emplace_back(names[k], std::move(cols[k]));
  return Dataset::from_columns(std::move(pairs), roles);
}

TruthEstimate dgm_truth(Eigen::Index n, DgmArm arm, int group, std::uint64_t seed,
                        bool binary_outcome) {
  auto [y, w] = dgm_truth_both(n, arm, group, seed);
  return binary_outcome ? w : y;
}

std::pair<TruthEstimate, TruthEstimate> dgm_truth_both(Eigen::Index n, DgmArm arm,
                                                       int group, std::uint64_t seed) {
  if (n <= 0) throw ValidationError("dgm_truth: n must be positive");
  std::mt19937_64 rng(seed);
  double sum = 0.0, sumsq = 0.0, wsum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Row r = draw(rng, arm, group);
    sum += r.y;
    sumsq += r.y * r.y;
    wsum += r.w;
  }
  auto finish = [n](double s, double ss) {
    TruthEstimate t;
    t.n = n;
    t.value = s / static_cast<double>(n);
    double var = (ss - s * t.value) / static_cast<double>(n - 1);
    t.mc_se = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
    return t;
  };
  return {finish(sum, sumsq), finish(wsum, wsum)};
}

}  // namespace cda
