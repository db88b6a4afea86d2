#pragma once

#include "cda/dataset.hpp"

namespace cda {

/// observed: the analytic sample. observation: outcome-allowables drawn
/// from the standard population, Z left alone. intervention: additionally
/// Z for G=1 redrawn from the G=0 conditional density.
enum class DgmArm { observed, observation, intervention };

struct TruthEstimate {
  double value = 0.0;
  double mc_se = 0.0;
  Eigen::Index n = 0;
};

/// Benchmark blood-pressure-style generator: binary G, allowables
/// (Ay1,Ay2), non-allowables (N1,N2), intervention-allowables (Az1,Az2)
/// with the Az2>=140 deterministic treatment gate, binary Z, continuous Y
/// and binary W = I(Y>=140). Roles are pre-assigned; outcome role is Y or
/// W per binary_outcome.
Dataset dgm_generate(Eigen::Index n, DgmArm arm, std::uint64_t seed,
                     bool binary_outcome = false);

/// Streaming group-conditional outcome mean in the given arm (rows are
/// generated with G fixed at `group`), with its Monte Carlo SE.
TruthEstimate dgm_truth(Eigen::Index n, DgmArm arm, int group, std::uint64_t seed,
                        bool binary_outcome = false);

/// Continuous and binary truth from one pass over the same stream.
std::pair<TruthEstimate, TruthEstimate> dgm_truth_both(Eigen::Index n, DgmArm arm,
                                                       int group, std::uint64_t seed);

}  // namespace cda
