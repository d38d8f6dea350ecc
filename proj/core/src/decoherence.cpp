#include "qwalk/decoherence.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr int kMaxSteps = 200;
constexpr int kChunks = 64;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// splitmix64 finalizer over the (seed, index) stream. Keeps trajectory RNGs
// decorrelated without any cross-trajectory state.
std::uint64_t trajectory_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) from the top 53 bits; pinned bit pattern, unlike
// uniform_real_distribution which the standard leaves implementation-defined.
double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

struct ChunkSums {
  std::vector<double> p;
  std::vector<double> p2;
};

// One trajectory on a dense buffer indexed by position + steps. The per-site
// arithmetic is the same expression tree as the sparse engine, and every
// target component has a single source, so the p = 0 limit of this loop is
// bit-identical to the sparse walk.
void run_trajectory(std::mt19937_64& eng, complexd alpha, complexd beta,
                    complexd omega, double p_measure, int steps,
                    std::vector<complexd>& a, std::vector<complexd>& b,
                    std::vector<complexd>& na, std::vector<complexd>& nb,
                    ChunkSums& sums) {
  const int span = 2 * steps + 1;
  const int origin = steps;
  std::fill(a.begin(), a.end(), complexd{});
  std::fill(b.begin(), b.end(), complexd{});
  a[origin] = alpha;
  b[origin] = beta;
  int lo = origin;
  int hi = origin;

  for (int t = 0; t < steps; ++t) {
    for (int i = lo - 1; i <= hi + 1; ++i) {
      na[i] = complexd{};
      nb[i] = complexd{};
    }
    for (int i = lo; i <= hi; ++i) {
      const complexd ha = (a[i] + b[i]) * kInvSqrt2;
      const complexd hb = (a[i] - b[i]) * kInvSqrt2;
      const complexd phase = (i == origin) ? omega : complexd{1.0, 0.0};
      na[i - 1] = phase * ha;
      nb[i + 1] = phase * hb;
    }
    --lo;
    ++hi;
    a.swap(na);
    b.swap(nb);

    if (p_measure > 0.0 && uniform01(eng) < p_measure) {
      double pa = 0.0;
      double pb = 0.0;
      for (int i = lo; i <= hi; ++i) {
        pa += std::norm(a[i]);
        pb += std::norm(b[i]);
      }
      const bool coin_zero = uniform01(eng) * (pa + pb) < pa;
      if (coin_zero) {
        const double scale = 1.0 / std::sqrt(pa);
        for (int i = lo; i <= hi; ++i) {
          a[i] *= scale;
          b[i] = complexd{};
        }
      } else {
        const double scale = 1.0 / std::sqrt(pb);
        for (int i = lo; i <= hi; ++i) {
          a[i] = complexd{};
          b[i] *= scale;
        }
      }
    }
  }

  for (int i = 0; i < span; ++i) {
    const double p = std::norm(a[i]) + std::norm(b[i]);
    sums.p[i] += p;
    sums.p2[i] += p * p;
  }
}

}  // namespace

DecoheredDistribution evolve_decohered(complexd alpha, complexd beta,
                                       const PhaseDefect& defect,
                                       const DecoherenceConfig& config,
                                       int steps, int n_trajectories,
                                       std::uint64_t seed) {
  if (!(config.p_measure >= 0.0 && config.p_measure <= 1.0)) {
    throw DomainError("measurement probability must lie in [0, 1]");
  }
  if (steps < 0) throw DomainError("step count must be non-negative");
  if (steps > kMaxSteps) {
    throw CostError("decohered evolution is capped at 200 steps");
  }
  if (n_trajectories < 1) {
    throw DomainError("at least one trajectory is required");
  }

  DecoheredDistribution out;
  out.steps = steps;
  out.trajectories = n_trajectories;
  out.p_measure = config.p_measure;
  out.seed = seed;

  if (config.p_measure == 0.0) {
    // Closed evolution: no randomness, no trajectory spread.
    const WalkState st =
        evolve(initial_state(alpha, beta), defect, steps);
    for (const auto& [n, p] : position_distribution(st)) {
      out.sites.push_back({n, p, 0.0});
    }
    return out;
  }

  // The initial-state precondition is the unitary engine's; enforce it here
  // too since the short-circuit path above would have.
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTol) {
    throw NormalizationError("initial coin state is not normalized");
  }

  const complexd omega = defect.omega();
  const int span = 2 * steps + 1;
  const int n_chunks = std::min<long long>(kChunks, n_trajectories);
  std::vector<ChunkSums> chunk_sums(n_chunks);

  auto run_chunk = [&](int chunk) {
    ChunkSums& sums = chunk_sums[chunk];
    sums.p.assign(span, 0.0);
    sums.p2.assign(span, 0.0);
    std::vector<complexd> a(span), b(span), na(span), nb(span);
    const long long begin =
        static_cast<long long>(n_trajectories) * chunk / n_chunks;
    const long long end =
        static_cast<long long>(n_trajectories) * (chunk + 1) / n_chunks;
    for (long long traj = begin; traj < end; ++traj) {
      std::mt19937_64 eng(trajectory_seed(seed, static_cast<std::uint64_t>(traj)));
      run_trajectory(eng, alpha, beta, omega, config.p_measure, steps, a, b, na,
                     nb, sums);
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = static_cast<int>(
      std::min<unsigned>(std::max(1u, hw), static_cast<unsigned>(n_chunks)));
  if (workers <= 1) {
    for (int c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&] {
        for (int c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
          run_chunk(c);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Fixed-order reduction: chunk 0, 1, 2, ... regardless of which thread ran
  // which chunk, so thread count cannot change the result.
  std::vector<double> sum_p(span, 0.0);
  std::vector<double> sum_p2(span, 0.0);
  for (const auto& sums : chunk_sums) {
    for (int i = 0; i < span; ++i) {
      sum_p[i] += sums.p[i];
      sum_p2[i] += sums.p2[i];
    }
  }

  const double n = static_cast<double>(n_trajectories);
  for (int i = 0; i < span; ++i) {
    if (sum_p[i] <= 0.0) continue;
    const double mean = sum_p[i] / n;
    double se = 0.0;
    if (n_trajectories > 1) {
      const double var =
          std::max(0.0, (sum_p2[i] - sum_p[i] * sum_p[i] / n) / (n - 1.0));
      se = std::sqrt(var / n);
    }
    out.sites.push_back({i - steps, mean, se});
  }
  return out;
}

std::vector<std::pair<int, double>> classical_reference(int steps) {
  if (steps < 0) throw DomainError("step count must be non-negative");
  std::vector<std::pair<int, double>> dist;
  dist.reserve(steps + 1);
  double c = std::pow(2.0, -steps);  // exact: a power of two
  for (int k = 0; k <= steps; ++k) {
    dist.emplace_back(-steps + 2 * k, c);
    c = c * static_cast<double>(steps - k) / static_cast<double>(k + 1);
  }
  return dist;
}

}  // namespace qwalk
