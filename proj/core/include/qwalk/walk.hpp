#pragma once

#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace qwalk {

using complexd = std::complex<double>;

inline constexpr double kNormTol = 1e-12;

/// Two-component coin amplitude at one lattice site. alpha multiplies the
/// coin-|0> (left-moving) component, beta the coin-|1> (right-moving) one.
struct CoinSpinor {
  complexd alpha{0.0, 0.0};
  complexd beta{0.0, 0.0};

  double norm2() const { return std::norm(alpha) + std::norm(beta); }
};

/// Hadamard coin on one spinor: (alpha, beta) -> (alpha+beta, alpha-beta)/sqrt(2).
/// Involutive: applying it twice is the identity (up to rounding).
CoinSpinor hadamard_coin(const CoinSpinor& s);

/// Phase defect at node 0. Amplitudes leaving node 0 (in either direction)
/// pick up the factor omega = exp(2*pi*i*phi). An inactive defect is the
/// homogeneous lattice and its omega is exactly 1. omega is recomputed from
/// phi on every call, never cached, so |omega| = 1 always holds to rounding.
class PhaseDefect {
 public:
  static PhaseDefect none();
  /// Requires 0 < phi < 1 (exclusive); throws DomainError otherwise.
  static PhaseDefect with_phi(double phi);

  bool active() const { return phi_.has_value(); }
  /// Throws DomainError if the defect is inactive.
  double phi() const;
  complexd omega() const;

 private:
  PhaseDefect() = default;
  std::optional<double> phi_;
};

/// Sparse state of the walk: site -> coin spinor, plus the number of steps
/// taken since the initial state. Sites outside the map are exactly zero.
class WalkState {
 public:
  WalkState() = default;
  WalkState(std::map<int, CoinSpinor> amplitudes, int steps_taken);

  const std::map<int, CoinSpinor>& amplitudes() const { return amps_; }
  int steps_taken() const { return steps_; }
  /// Spinor at site n; zero spinor off the stored support.
  CoinSpinor at(int n) const;
  double total_norm() const;

 private:
  std::map<int, CoinSpinor> amps_;
  int steps_ = 0;
};

/// Walker at node 0 with coin state (alpha, beta). The coin vector must be
/// normalized to within kNormTol; throws NormalizationError otherwise.
WalkState initial_state(complexd alpha, complexd beta);

/// One step: Hadamard coin, then the phase-twisted shift. Site-by-site this is
///   sqrt(2) alpha'_n = w_{n+1} (alpha_{n+1} + beta_{n+1}),
///   sqrt(2) beta'_n  = w_{n-1} (alpha_{n-1} - beta_{n-1}),
/// with w_m = omega for m = 0 and 1 elsewhere. Norm-preserving.
WalkState step(const WalkState& s, const PhaseDefect& defect);

/// Inverse of step (the adjoint of a unitary). step_adjoint(step(s)) == s to
/// rounding. steps_taken decrements, saturating at 0.
WalkState step_adjoint(const WalkState& s, const PhaseDefect& defect);

/// Two steps. The double-step operator maps the even sublattice to itself,
/// which is what the bound-state analysis diagonalizes.
WalkState double_step(const WalkState& s, const PhaseDefect& defect);

/// n_steps applications of step; n_steps >= 0 (DomainError otherwise).
WalkState evolve(const WalkState& s, const PhaseDefect& defect, int n_steps);

/// Position marginal |alpha_n|^2 + |beta_n|^2, ascending in n. Sites with
/// probability <= floor are dropped.
std::vector<std::pair<int, double>> position_distribution(const WalkState& s,
                                                          double floor = 1e-16);

/// Probability of finding the walker at node 0.
double origin_probability(const WalkState& s);

}  // namespace qwalk
