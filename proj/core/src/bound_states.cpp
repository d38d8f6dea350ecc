#include "qwalk/bound_states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr complexd kI{0.0, 1.0};
constexpr double kFormTol = 1e-12;
constexpr double kDenomTol = 1e-12;
constexpr double kNormSeriesTol = 1e-10;

void require_phi(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw DomainError("phi must lie in the open interval (0, 1)");
  }
}

std::string describe(const char* what, Branch b, double phi, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (branch " << branch_name(b) << ", phi = " << phi
     << ", value = " << value << ")";
  return os.str();
}

}  // namespace

complexd omega_of(double phi) {
  require_phi(phi);
  return std::polar(1.0, 2.0 * std::numbers::pi * phi);
}

complexd lambda_pm(Branch b, double phi) {
  const complexd w = omega_of(phi);
  const complexd denom = 1.0 - 2.0 * w + 2.0 * w * w;
  // The roots of the denominator have |omega|^2 = 1/2, off the unit circle,
  // so this cannot trigger for real phi; kept as a hard guard regardless.
  if (std::abs(denom) < kDenomTol) {
    throw SingularityError(describe("eigenvalue denominator vanished", b, phi,
                                    std::abs(denom)));
  }
  const complexd one_minus_w = 1.0 - w;
  return w * (one_minus_w * one_minus_w + branch_sign(b) * kI * (1.0 - w + w * w)) /
         denom;
}

double x_pm(Branch b, double phi) {
  require_phi(phi);
  const double theta = 2.0 * std::numbers::pi * phi;
  // |2 cos - 2 s sin| <= 2 sqrt(2) < 3, so the denominator stays negative.
  const double denom =
      2.0 * std::cos(theta) - branch_sign(b) * 2.0 * std::sin(theta) - 3.0;
  if (std::abs(denom) < kDenomTol) {
    throw SingularityError(describe("decay-ratio denominator vanished", b, phi, denom));
  }
  return 1.0 / denom;
}

complexd x_pm_rational(Branch b, double phi) {
  const complexd w = omega_of(phi);
  const complexd denom =
      w * w - 3.0 * w + 1.0 + branch_sign(b) * kI * (w * w - 1.0);
  if (std::abs(denom) < kDenomTol) {
    throw SingularityError(describe("rational decay-ratio denominator vanished", b,
                                    phi, std::abs(denom)));
  }
  return w / denom;
}

bool exists(Branch b, double phi) { return std::abs(x_pm(b, phi)) < 1.0; }

complexd char_poly(complexd lambda, complexd x) {
  return lambda * x * x - 2.0 * (lambda * lambda - lambda + 1.0) * x + lambda;
}

BoundState BoundState::make(Branch b, double phi) {
  const double x = x_pm(b, phi);
  // Strictly inside the existence region, and not within rounding distance of
  // its boundary: at |x| = 1 - eps the normalization 1 + x is pure
  // cancellation and no advertised tolerance can be met honestly.
  if (!(std::abs(x) < 1.0 - 1e-12)) {
    throw NonNormalizableError(
        describe("bound state does not exist at (or within rounding of) |x| = 1",
                 b, phi, x));
  }

  BoundState st;
  st.branch_ = b;
  st.phi_ = phi;
  st.omega_ = omega_of(phi);
  st.x_ = x;
  st.lambda_ = lambda_pm(b, phi);
  st.c_ = std::sqrt((1.0 + x) / 2.0);

  // Cross-check every closed form against the others before handing the
  // state out. These are coding-error tripwires, not physics tolerances.
  const double unimod = std::abs(std::abs(st.lambda_) - 1.0);
  if (unimod > kFormTol) {
    throw ToleranceError(describe("eigenvalue modulus drifted off 1", b, phi, unimod));
  }
  const double form_gap = std::abs(x_pm_rational(b, phi) - complexd{x, 0.0});
  if (form_gap > kFormTol) {
    throw ToleranceError(
        describe("trig and rational decay ratios disagree", b, phi, form_gap));
  }
  const double cp_x = std::abs(char_poly(st.lambda_, complexd{x, 0.0}));
  const double cp_inv = std::abs(char_poly(st.lambda_, complexd{1.0 / x, 0.0}));
  if (cp_x > kFormTol || cp_inv > kFormTol) {
    throw ToleranceError(describe("characteristic polynomial residual", b, phi,
                                  std::max(cp_x, cp_inv)));
  }

  // Normalization: finite sum over |n| <= N plus the exact geometric tail.
  constexpr int kSeriesTerms = 200;
  double sum = st.amplitude_at(0).norm2();
  for (int n = 1; n <= kSeriesTerms; ++n) {
    sum += st.amplitude_at(n).norm2() + st.amplitude_at(-n).norm2();
  }
  const double x2 = x * x;
  const double tail = 2.0 * st.c_ * st.c_ * (1.0 - 1.0 / x) *
                      std::pow(x2, kSeriesTerms + 1) / (1.0 - x2);
  const double norm_gap = std::abs(sum + tail - 1.0);
  if (norm_gap > kNormSeriesTol) {
    throw ToleranceError(
        describe("amplitude series does not sum to 1", b, phi, norm_gap));
  }
  return st;
}

CoinSpinor BoundState::amplitude_at(int reduced_n) const {
  const double s = coin_phase_sign(branch_);
  const complexd si = s * kI;
  if (reduced_n == 0) {
    return {complexd{c_, 0.0}, si * c_};
  }
  const double xn = std::pow(x_, std::abs(reduced_n));
  if (reduced_n > 0) {
    return {c_ * xn, c_ * (1.0 - omega_ + si * omega_) * xn};
  }
  return {c_ * (omega_ + si * omega_ - si) * xn, si * c_ * xn};
}

WalkState materialize(const BoundState& state, int window, double max_tail) {
  if (window < 0) throw DomainError("materialize window must be non-negative");
  const double x = state.x();
  const double x2 = x * x;
  const double c2 = state.c_norm() * state.c_norm();
  const double tail =
      2.0 * c2 * (1.0 - 1.0 / x) * std::pow(x2, window + 1) / (1.0 - x2);
  if (tail > max_tail) {
    std::ostringstream os;
    os.precision(17);
    os << "materialize window " << window << " drops probability " << tail
       << " > max_tail " << max_tail << "; widen the window";
    throw DomainError(os.str());
  }
  std::map<int, CoinSpinor> amps;
  for (int n = -window; n <= window; ++n) {
    amps[2 * n] = state.amplitude_at(n);
  }
  return WalkState{std::move(amps), 0};
}

double overlap_F(Branch b, double phi, complexd alpha, complexd beta) {
  if (!exists(b, phi)) return 0.0;
  const double x = x_pm(b, phi);
  const complexd proj = alpha - coin_phase_sign(b) * kI * beta;
  return 0.5 * (1.0 + x) * std::norm(proj);
}

OverlapReport total_overlap(double phi, complexd alpha, complexd beta) {
  OverlapReport r;
  r.exists_plus = exists(Branch::plus, phi);
  r.exists_minus = exists(Branch::minus, phi);
  r.f_plus = overlap_F(Branch::plus, phi, alpha, beta);
  r.f_minus = overlap_F(Branch::minus, phi, alpha, beta);
  r.total = r.f_plus + r.f_minus;
  return r;
}

}  // namespace qwalk
