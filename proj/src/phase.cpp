#include "spirallab/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spirallab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Phase::Phase(Family f, double param, double domain_end)
    : family_(f), param_(param), domain_end_(domain_end) {}

Phase Phase::power(double exponent, double domain_end) {
  if (!(exponent > 0.0 && exponent < 1.0))
    throw std::invalid_argument("Phase::power: exponent must lie in (0, 1)");
  if (!(domain_end > 0.0 && domain_end <= 1.0))
    throw std::invalid_argument("Phase::power: domain end must lie in (0, 1]");
  Phase p(Family::Power, exponent, domain_end);
  p.min_angle_ = p.phi_unchecked(domain_end);
  return p;
}

Phase Phase::log_power(double exponent, double domain_end) {
  if (!(exponent > 1.0))
    throw std::invalid_argument("Phase::log_power: exponent must exceed 1");
  if (!(domain_end > 0.0 && domain_end < 1.0))
    throw std::invalid_argument("Phase::log_power: domain end must lie in (0, 1)");
  Phase p(Family::LogPower, exponent, domain_end);
  p.min_angle_ = p.phi_unchecked(domain_end);
  return p;
}

Phase Phase::scaled_double_log(double scale, double domain_end) {
  if (!(scale > 0.0))
    throw std::invalid_argument("Phase::scaled_double_log: scale must be positive");
  if (!(domain_end > 0.0 && domain_end < 1.0))
    throw std::invalid_argument("Phase::scaled_double_log: domain end must lie in (0, 1)");
  Phase p(Family::ScaledDoubleLog, scale, domain_end);
  p.min_angle_ = p.phi_unchecked(domain_end);
  return p;
}

Phase Phase::tabulated(std::vector<double> t, std::vector<double> phi,
                       std::vector<double> phi_dot) {
  if (t.size() < 2 || t.size() != phi.size() || t.size() != phi_dot.size())
    throw std::invalid_argument("Phase::tabulated: need >= 2 rows of equal length");
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (!(t[i] > 0.0 && t[i] < t[i + 1]))
      throw std::invalid_argument("Phase::tabulated: times must be positive and increasing");
  auto table = std::make_shared<Table>();
  table->t = std::move(t);
  table->phi = std::move(phi);
  table->phid = std::move(phi_dot);
  Phase p(Family::Tabulated, 0.0, table->t.back());
  p.table_ = std::move(table);
  p.min_angle_ = p.table_->phi.back();
  return p;
}

double Phase::domain_start() const {
  return family_ == Family::Tabulated ? table_->t.front() : 0.0;
}

double Phase::phi_unchecked(double t) const {
  switch (family_) {
    case Family::Power:
      return std::pow(t, -param_);
    case Family::LogPower:
      return std::pow(-std::log(t), param_);
    case Family::ScaledDoubleLog:
      return param_ * std::log(-std::log(t));
    case Family::Tabulated:
      break;
  }
  // Cubic Hermite segment through the bracketing rows.
  const auto& tb = *table_;
  const auto it = std::upper_bound(tb.t.begin(), tb.t.end(), t);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - tb.t.begin())) - 1;
  i = std::min(i, tb.t.size() - 2);
  const double h = tb.t[i + 1] - tb.t[i];
  const double s = (t - tb.t[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * tb.phi[i] + (s3 - 2 * s2 + s) * h * tb.phid[i] +
         (-2 * s3 + 3 * s2) * tb.phi[i + 1] + (s3 - s2) * h * tb.phid[i + 1];
}

double Phase::phi(double t) const {
  if (!(t >= domain_start() && t <= domain_end_) || t <= 0.0)
    throw std::invalid_argument("Phase::phi: time outside the domain");
  return phi_unchecked(t);
}

double Phase::phi_dot(double t) const {
  if (!(t >= domain_start() && t <= domain_end_) || t <= 0.0)
    throw std::invalid_argument("Phase::phi_dot: time outside the domain");
  switch (family_) {
    case Family::Power:
      return -param_ * std::pow(t, -param_ - 1.0);
    case Family::LogPower:
      return -param_ * std::pow(-std::log(t), param_ - 1.0) / t;
    case Family::ScaledDoubleLog:
      return param_ / (t * std::log(t));
    case Family::Tabulated:
      break;
  }
  const auto& tb = *table_;
  const auto it = std::upper_bound(tb.t.begin(), tb.t.end(), t);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - tb.t.begin())) - 1;
  i = std::min(i, tb.t.size() - 2);
  const double h = tb.t[i + 1] - tb.t[i];
  const double s = (t - tb.t[i]) / h;
  const double s2 = s * s;
  return (6 * s2 - 6 * s) / h * tb.phi[i] + (3 * s2 - 4 * s + 1) * tb.phid[i] +
         (-6 * s2 + 6 * s) / h * tb.phi[i + 1] + (3 * s2 - 2 * s) * tb.phid[i + 1];
}

double Phase::psi(double angle) const {
  if (angle < min_angle_)
    throw std::invalid_argument("Phase::psi: angle below phi(T)");
  switch (family_) {
    case Family::Power:
      return std::pow(angle, -1.0 / param_);
    case Family::LogPower:
      return std::exp(-std::pow(angle, 1.0 / param_));
    case Family::ScaledDoubleLog:
      return std::exp(-std::exp(angle / param_));
    case Family::Tabulated:
      return psi_bisect(angle);
  }
  return 0.0;  // unreachable
}

double Phase::psi_bisect(double angle) const {
  // Bracket by geometric scanning from the outer end, then bisect. The phase
  // decreases in t, so phi(lo) >= angle >= phi(hi) is the invariant.
  const double floor = domain_start();
  double hi = domain_end_;
  double lo = hi;
  while (phi_unchecked(lo) < angle) {
    hi = lo;
    if (lo <= floor)
      throw std::invalid_argument("Phase::psi: angle above the tabulated range");
    lo = std::max(0.5 * lo, floor);
  }
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (phi_unchecked(mid) >= angle)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

PhaseDiagnostics diagnose_phase(const Phase& phase, int samples) {
  PhaseDiagnostics d;
  d.unverified_asymptotics = phase.unverified_asymptotics();
  const double start = std::max(phase.domain_start(), 1e-300);
  std::vector<double> ts;
  double t = phase.domain_end();
  for (int j = 0; j < samples && t > start; ++j) {
    ts.push_back(t);
    t *= 0.5;
  }
  if (ts.size() < 2) return d;

  d.monotone_decreasing = true;
  d.phi_dot_negative = true;
  double prev_phi = phase.phi(ts.front());
  for (std::size_t j = 1; j < ts.size(); ++j) {
    const double cur = phase.phi(ts[j]);
    if (!(cur > prev_phi)) d.monotone_decreasing = false;
    prev_phi = cur;
  }
  for (double tj : ts) {
    const double pd = phase.phi_dot(tj);
    if (!(pd < 0.0)) d.phi_dot_negative = false;
    d.sup_t_phi_dot = std::max(d.sup_t_phi_dot, std::abs(tj * pd));
  }
  d.phi_span = phase.phi(ts.back()) - phase.phi(ts.front());
  d.phi_dot_ratio = std::abs(phase.phi_dot(ts.back())) /
                    std::max(std::abs(phase.phi_dot(ts.front())), 1e-300);
  return d;
}

Eigen::Vector2d Spiral::kappa(double t) const {
  const double a = phase_.phi(t);
  return {t * std::cos(a), t * std::sin(a)};
}

Eigen::Vector2d Spiral::kappa_dot(double t) const {
  const double a = phase_.phi(t);
  const double ad = phase_.phi_dot(t);
  const double c = std::cos(a), s = std::sin(a);
  return {c - t * s * ad, s + t * c * ad};
}

double Spiral::kappa2_dot(double t) const {
  const double a = phase_.phi(t);
  return std::sin(a) + t * std::cos(a) * phase_.phi_dot(t);
}

double Spiral::t_k(int k) const { return phase_.psi(kTwoPi * k); }

double Spiral::t_k_eta(int k, double eta) const {
  if (!(eta >= 0.0 && eta < kTwoPi))
    throw std::invalid_argument("Spiral::t_k_eta: eta must lie in [0, 2 pi)");
  return phase_.psi(kTwoPi * k + eta);
}

QuadResult arc_length(const Spiral& s, double a, double b, const QuadratureConfig& cfg) {
  if (!(a > 0.0 && a <= b && b <= s.domain_end() && a >= s.phase().domain_start()))
    throw std::invalid_argument("arc_length: window outside the spiral domain");
  const Phase& phase = s.phase();
  return integrate(
      [&phase](double t) {
        const double x = t * phase.phi_dot(t);
        return std::sqrt(1.0 + x * x);
      },
      a, b, cfg);
}

std::vector<double> blowup_distances(const Spiral& s, const Eigen::Vector2d& v,
                                     const std::vector<int>& n_list, double window_a,
                                     double window_b, int grid) {
  if (std::abs(v.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("blowup_distances: direction must be a unit vector");
  if (!(window_a > 0.0 && window_a < window_b))
    throw std::invalid_argument("blowup_distances: bad window");
  double arg = std::atan2(v[1], v[0]);
  if (arg < 0.0) arg += kTwoPi;

  std::vector<double> out;
  out.reserve(n_list.size());
  for (int n : n_list) {
    const double lambda = s.phase().psi(kTwoPi * n + arg);
    if (!(lambda * window_b <= s.domain_end()))
      throw std::invalid_argument("blowup_distances: rescaled window leaves the domain");
    double sup = 0.0;
    for (int g = 0; g <= grid; ++g) {
      const double t = window_a + (window_b - window_a) * g / grid;
      const Eigen::Vector2d rescaled = s.kappa(lambda * t) / lambda;
      sup = std::max(sup, (rescaled - t * v).norm());
    }
    out.push_back(sup);
  }
  return out;
}

}  // namespace spirallab
