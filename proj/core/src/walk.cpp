#include "qwalk/walk.hpp"

#include <cmath>
#include <numbers>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool finite(complexd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

CoinSpinor hadamard_coin(const CoinSpinor& s) {
  return {(s.alpha + s.beta) * kInvSqrt2, (s.alpha - s.beta) * kInvSqrt2};
}

PhaseDefect PhaseDefect::none() { return PhaseDefect{}; }

PhaseDefect PhaseDefect::with_phi(double phi) {
  if (!(phi > 0.0 && phi < 1.0)) {
    throw DomainError("defect phase phi must lie in the open interval (0, 1)");
  }
  PhaseDefect d;
  d.phi_ = phi;
  return d;
}

double PhaseDefect::phi() const {
  if (!phi_) throw DomainError("phi() called on an inactive defect");
  return *phi_;
}

complexd PhaseDefect::omega() const {
  if (!phi_) return {1.0, 0.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * *phi_);
}

WalkState::WalkState(std::map<int, CoinSpinor> amplitudes, int steps_taken)
    : amps_(std::move(amplitudes)), steps_(steps_taken) {}

CoinSpinor WalkState::at(int n) const {
  auto it = amps_.find(n);
  return it == amps_.end() ? CoinSpinor{} : it->second;
}

double WalkState::total_norm() const {
  double total = 0.0;
  for (const auto& [n, s] : amps_) total += s.norm2();
  return total;
}

WalkState initial_state(complexd alpha, complexd beta) {
  if (!finite(alpha) || !finite(beta)) {
    throw NormalizationError("initial coin state has non-finite entries");
  }
  const double n2 = std::norm(alpha) + std::norm(beta);
  if (std::abs(n2 - 1.0) > kNormTol) {
    throw NormalizationError("initial coin state is not normalized");
  }
  std::map<int, CoinSpinor> amps;
  amps[0] = CoinSpinor{alpha, beta};
  return WalkState{std::move(amps), 0};
}

WalkState step(const WalkState& s, const PhaseDefect& defect) {
  const complexd omega = defect.omega();
  std::map<int, CoinSpinor> out;
  for (const auto& [n, spin] : s.amplitudes()) {
    const CoinSpinor h = hadamard_coin(spin);
    const complexd phase = (n == 0) ? omega : complexd{1.0, 0.0};
    // Each target component has exactly one source, so there is no
    // accumulation-order freedom here.
    out[n - 1].alpha += phase * h.alpha;
    out[n + 1].beta += phase * h.beta;
  }
  return WalkState{std::move(out), s.steps_taken() + 1};
}

WalkState step_adjoint(const WalkState& s, const PhaseDefect& defect) {
  const complexd omega_conj = std::conj(defect.omega());
  const auto& amps = s.amplitudes();
  std::map<int, CoinSpinor> out;
  if (!amps.empty()) {
    const int lo = amps.begin()->first - 1;
    const int hi = amps.rbegin()->first + 1;
    for (int n = lo; n <= hi; ++n) {
      const complexd phase = (n == 0) ? omega_conj : complexd{1.0, 0.0};
      const CoinSpinor h{phase * s.at(n - 1).alpha, phase * s.at(n + 1).beta};
      if (h.alpha == complexd{} && h.beta == complexd{}) continue;
      out[n] = hadamard_coin(h);  // H is its own inverse
    }
  }
  const int steps = s.steps_taken() > 0 ? s.steps_taken() - 1 : 0;
  return WalkState{std::move(out), steps};
}

WalkState double_step(const WalkState& s, const PhaseDefect& defect) {
  return step(step(s, defect), defect);
}

WalkState evolve(const WalkState& s, const PhaseDefect& defect, int n_steps) {
  if (n_steps < 0) throw DomainError("evolve requires a non-negative step count");
  WalkState cur = s;
  for (int i = 0; i < n_steps; ++i) cur = step(cur, defect);
  return cur;
}

std::vector<std::pair<int, double>> position_distribution(const WalkState& s,
                                                          double floor) {
  std::vector<std::pair<int, double>> dist;
  dist.reserve(s.amplitudes().size());
  for (const auto& [n, spin] : s.amplitudes()) {
    const double p = spin.norm2();
    if (p > floor) dist.emplace_back(n, p);
  }
  return dist;
}

double origin_probability(const WalkState& s) { return s.at(0).norm2(); }

}  // namespace qwalk
