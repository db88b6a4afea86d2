#pragma once

#include "cda/density.hpp"

namespace cda {

// ▲ z_model: G=1 base, Z redrawn from λ̂_0^Z
// △ n_model: G=0 base, N redrawn from λ̂_1^N
// ◆ z_bridge: G=1 base, Z assigned from a convenient distribution
// ◇ n_bridge: G=0 base, N assigned from a convenient distribution
// □ z_check: G=0 base, Z redrawn from λ̂_0^Z (diagnostic)
// ■ n_check: G=1 base, N redrawn from λ̂_1^N (diagnostic)
enum class SampleKind { z_model, n_model, z_bridge, n_bridge, z_check, n_check };

struct ConvenientDist {
  enum class Mode { enumeration, resample_contrast, uniform };
  Mode mode = Mode::enumeration;
};

struct SampleOptions {
  int m = 100;  // clones per origin row in sampling modes
  std::uint64_t seed = 0;
  // model-based kinds enumerate the replaced block's support with the model
  // probability as the clone weight whenever the support is small enough
  bool enumerate_when_discrete = true;
  int max_enumeration = 64;
  // convenient-sample gate: force the replaced columns to closed_value on
  // rows where gate_col < gate_threshold
  std::string gate_col;
  double gate_threshold = 0.0;
  double gate_closed_value = 0.0;
};

struct ArtificialSample {
  SampleKind kind;
  Dataset data;                       // stacked clones, same roles as the base
  std::vector<Eigen::Index> origin;   // per clone: row index in the source dataset
  Eigen::VectorXd clone_weight;       // per clone; sums to 1 per origin row
  int clones_per_row = 0;
  std::vector<std::string> replaced;

  bool base_is_group1() const {
    return kind == SampleKind::z_model || kind == SampleKind::z_bridge ||
           kind == SampleKind::n_check;
  }
  bool replaces_z() const {
    return kind == SampleKind::z_model || kind == SampleKind::z_bridge ||
           kind == SampleKind::z_check;
  }
  void write_csv(const std::string& path) const;
};

/// Model-based kinds (▲ △ □ ■) take `model`; convenient kinds (◆ ◇) take
/// `conv`. The model's targets / the role block determine the replaced
/// columns.
ArtificialSample build_sample(const Dataset& ds, SampleKind kind,
                              const DensityModel* model, const ConvenientDist* conv,
                              const SampleOptions& opts);

struct ConvenientCheck {
  bool coverage_pass = false;
  bool independence_pass = false;
  double max_dependence = 0.0;  // largest |weighted corr| of replaced vs retained
  std::string detail;
};

/// Verifies a ◆/◇ sample's convenient distribution: support coverage
/// against the contrast group (hard requirement) and approximate
/// conditional independence of the replaced block from the retained block.
ConvenientCheck convenient_distribution_check(const Dataset& ds,
                                              const ArtificialSample& sample);

}  // namespace cda
