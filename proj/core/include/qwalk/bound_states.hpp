#pragma once

#include "qwalk/walk.hpp"

namespace qwalk {

/// The two point-spectrum branches of the double-step operator.
enum class Branch { plus, minus };

constexpr double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }
constexpr const char* branch_name(Branch b) {
  return b == Branch::plus ? "plus" : "minus";
}

/// Sign s in the node-0 coin component beta_0 = s*i*C: s = -1 on the plus
/// branch, +1 on the minus branch. This single constant fixes the relative
/// coin phase everywhere (amplitudes and overlaps both read it), and it is
/// re-derived at runtime from dynamics by oracle::resolve_sign_pairing, which
/// fails hard if the two ever disagree.
constexpr double coin_phase_sign(Branch b) {
  return b == Branch::plus ? -1.0 : 1.0;
}

/// omega = exp(2*pi*i*phi). Requires 0 < phi < 1 (DomainError otherwise).
complexd omega_of(double phi);

/// Eigenvalue of the double-step operator,
///   lambda = omega ((1-omega)^2 +- i (1 - omega + omega^2)) / (1 - 2 omega + 2 omega^2).
/// Unimodular for every phi in (0,1).
complexd lambda_pm(Branch b, double phi);

/// Decay ratio of the bound state on the reduced (even) lattice, in the
/// manifestly real trigonometric form
///   x = 1 / (2 cos(2 pi phi) -+ 2 sin(2 pi phi) - 3).
/// Always negative; the bound state exists iff |x| < 1.
double x_pm(Branch b, double phi);

/// The same ratio in its rational-in-omega form,
///   x = omega / (omega^2 - 3 omega + 1 +- i (omega^2 - 1)).
/// Imaginary part vanishes identically; kept complex so the equivalence with
/// x_pm can be asserted, not assumed.
complexd x_pm_rational(Branch b, double phi);

/// Normalizability: |x| < 1, strictly. The plus branch exists for phi < 3/4,
/// the minus branch for phi > 1/4 (|x| = 1 exactly at the endpoints).
bool exists(Branch b, double phi);

/// Residual of the characteristic polynomial lambda x^2 - 2(lambda^2 - lambda + 1) x + lambda
/// at the point (lambda, x). Zero (to rounding) for both x and 1/x.
complexd char_poly(complexd lambda, complexd x);

/// Normalized bound state of one branch at one phi. Construction evaluates the
/// closed forms and cross-checks them against each other (unimodularity of
/// lambda, trig/rational agreement for x, characteristic polynomial, and the
/// analytic normalization sum); any violation throws ToleranceError rather
/// than returning a silently wrong state.
class BoundState {
 public:
  /// Throws NonNormalizableError if |x| >= 1 at this phi.
  static BoundState make(Branch b, double phi);

  Branch branch() const { return branch_; }
  double phi() const { return phi_; }
  complexd lambda() const { return lambda_; }
  double x() const { return x_; }
  /// Node-0 amplitude scale C = sqrt((1+x)/2).
  double c_norm() const { return c_; }

  /// Spinor at reduced site n (the physical site is 2n). Piecewise:
  ///   n = 0:   (C, s i C)
  ///   n >= 1:  (C x^n, C (1 - omega + s i omega) x^n)
  ///   n <= -1: (C (omega + s i omega - s i) x^{|n|}, s i C x^{|n|})
  /// with s = coin_phase_sign(branch). Both side coefficients have squared
  /// magnitude -1/x, which is what makes the normalization sum collapse to 1.
  CoinSpinor amplitude_at(int reduced_n) const;

 private:
  BoundState() = default;
  Branch branch_ = Branch::plus;
  double phi_ = 0.0;
  complexd lambda_;
  double x_ = 0.0;
  double c_ = 0.0;
  complexd omega_;
};

/// Embed the bound state on the physical lattice: site 2n gets amplitude_at(n)
/// for |n| <= window, steps_taken = 0. The probability mass dropped by the
/// truncation is exactly 2 C^2 (1 - 1/x) x^{2(window+1)} / (1 - x^2), bounded
/// above by 2 |x|^{2 window}; if it exceeds max_tail the call refuses with
/// DomainError instead of returning a visibly unnormalized state.
WalkState materialize(const BoundState& state, int window, double max_tail = 1e-12);

/// Squared projection of the initial coin state (alpha, beta) onto the branch
/// bound state: F = ((1 + x) / 2) |alpha - s i beta|^2, s = coin_phase_sign(b).
/// Returns 0 when the branch does not exist at this phi.
double overlap_F(Branch b, double phi, complexd alpha, complexd beta);

struct OverlapReport {
  double f_plus = 0.0;
  double f_minus = 0.0;
  double total = 0.0;
  bool exists_plus = false;
  bool exists_minus = false;
};

/// Both branch overlaps at once. total sums only existing branches. This is
/// the walker's total trapped mass: an upper bound on the long-time node-0
/// occupancy and a lower bound on the mass that stays near the defect.
OverlapReport total_overlap(double phi, complexd alpha, complexd beta);

}  // namespace qwalk
