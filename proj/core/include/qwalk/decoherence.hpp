#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qwalk/walk.hpp"

namespace qwalk {

struct DecoherenceConfig {
  /// Probability, per step, of a global projective measurement of the coin.
  /// 0 is the closed unitary walk, 1 the fully classical one.
  double p_measure = 0.0;
};

struct DecoheredSite {
  int position = 0;
  double mean_probability = 0.0;
  double std_error = 0.0;
};

struct DecoheredDistribution {
  std::vector<DecoheredSite> sites;  // ascending position, zero-mass sites dropped
  int steps = 0;
  int trajectories = 0;
  double p_measure = 0.0;
  std::uint64_t seed = 0;
};

/// Monte Carlo average over measurement trajectories. Each trajectory draws
/// its RNG from (seed, trajectory index) alone, and partial sums reduce in a
/// fixed chunk order, so the result is bit-identical for a given seed no
/// matter how many threads run. p_measure = 0 short-circuits to the unitary
/// engine: means match position_distribution exactly, std errors are zero.
/// steps is capped at 200 (CostError above).
DecoheredDistribution evolve_decohered(complexd alpha, complexd beta,
                                       const PhaseDefect& defect,
                                       const DecoherenceConfig& config,
                                       int steps, int n_trajectories,
                                       std::uint64_t seed);

/// Exact position distribution of the classical symmetric walk from the
/// origin: P(-t + 2k) = binom(t, k) / 2^t. The p_measure = 1 limit of the
/// decohered walk converges to this for every defect phase.
std::vector<std::pair<int, double>> classical_reference(int steps);

}  // namespace qwalk
