#include "spirallab/solver.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spirallab/calculus.hpp"
#include "spirallab/numeric.hpp"

namespace spirallab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Jacobian entry at eps = 0 for one (coordinate, device) pair.
double jac_entry(const Spiral& s, const StratifiedModel& m, int coordinate, int h, double eta,
                 const QuadratureConfig& cfg) {
  const MonomialLayer& layer = m.layer(coordinate);
  double v = (layer.alpha + 1) *
             moment_integral(s, layer.alpha - 1, layer.beta, device_window(h, eta), cfg).value;
  if (!m.remainder(coordinate).empty()) {
    v += integrate(
             [&](double t) {
               const Eigen::Vector2d p = s.kappa(t);
               return m.remainder_d1(coordinate, p[0], p[1]) * s.kappa2_dot(t);
             },
             s.t_k_eta(h, eta), s.t_k(h), cfg)
             .value;
  }
  return v;
}

struct Level {
  int h = 0;
  double eta = 0.0;
};

int first_admissible_h(const Spiral& s, const SelectorConfig& sel) {
  int h = std::max(1, sel.h_min);
  while (kTwoPi * h < s.phase().min_angle()) ++h;
  return h;
}

/// Recursive level selection over a row set (coordinates, ascending).
/// Returns levels outermost-column-first, i.e. descending h.
bool select_levels(const Spiral& s, const StratifiedModel& m, const SelectorConfig& sel,
                   const QuadratureConfig& cfg, const std::vector<int>& rows,
                   std::vector<Level>& out, SelectionDiagnostics& diag) {
  const std::size_t mrows = rows.size();

  // Minimal row under the exponent order.
  int iota = rows.front();
  for (int r : rows) {
    const OrderKey a{m.layer(r).alpha, m.layer(r).beta};
    const OrderKey b{m.layer(iota).alpha, m.layer(iota).beta};
    if (a < b) iota = r;
  }

  if (mrows == 1) {
    // Accept once the full entry keeps at least det_fraction of its monomial
    // part, so low-order remainder interference pushes h outward.
    for (double eta : sel.eta_grid) {
      for (long long h = first_admissible_h(s, sel); h <= sel.h_budget; h *= 2) {
        ++diag.attempts;
        const int hi = static_cast<int>(h);
        if (!(s.t_k_eta(hi, eta) > 1e-290)) break;  // window underflowed
        const MonomialLayer& layer = m.layer(rows[0]);
        const double mono =
            (layer.alpha + 1) *
            moment_integral(s, layer.alpha - 1, layer.beta, device_window(hi, eta), cfg).value;
        const double full = jac_entry(s, m, rows[0], hi, eta, cfg);
        if (std::abs(full) >= sel.det_fraction * std::abs(mono) && full != 0.0) {
          out.assign(1, {hi, eta});
          diag.iota_coordinate = iota;
          diag.abs_det = std::abs(full);
          diag.lead = std::abs(mono);
          return true;
        }
      }
    }
    diag.message = "single-row certificate failed within the h budget";
    return false;
  }

  std::vector<int> inner_rows;
  for (int r : rows)
    if (r != iota) inner_rows.push_back(r);
  std::vector<Level> inner;
  if (!select_levels(s, m, sel, cfg, inner_rows, inner, diag)) return false;

  // Minors over the inner columns: minor(i) drops row i.
  auto minor_det = [&](int dropped) {
    Eigen::MatrixXd M(mrows - 1, mrows - 1);
    int r = 0;
    for (int row : rows) {
      if (row == dropped) continue;
      for (std::size_t c = 0; c < inner.size(); ++c)
        M(r, c) = jac_entry(s, m, row, inner[c].h, inner[c].eta, cfg);
      ++r;
    }
    return M.determinant();
  };
  std::vector<double> minors;
  minors.reserve(mrows);
  for (int row : rows) minors.push_back(minor_det(row));

  double minor_iota = 0.0;
  {
    int idx = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i] == iota) idx = static_cast<int>(i);
    minor_iota = minors[idx];
  }
  if (minor_iota == 0.0) {
    diag.message = "inner minor vanished";
    return false;
  }

  const double eps0 = 1.0 / (2.0 * static_cast<double>(mrows));
  const long long h_floor = 2LL * inner.front().h;

  for (double eta : sel.eta_grid) {
    for (long long h = h_floor; h <= sel.h_budget; h *= 2) {
      ++diag.attempts;
      const int hi = static_cast<int>(h);
      if (!(s.t_k_eta(hi, eta) > 1e-290)) break;

      double lead = 0.0;
      std::vector<double> products(mrows, 0.0);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double a = jac_entry(s, m, rows[i], hi, eta, cfg);
        products[i] = std::abs(a * minors[i]);
        if (rows[i] == iota) lead = products[i];
      }
      if (lead == 0.0) continue;
      bool dominated = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] == iota) continue;
        if (products[i] > eps0 * lead) {
          dominated = false;
          break;
        }
      }
      if (!dominated) continue;

      // Full determinant certificate at these parameters.
      std::vector<Level> levels;
      levels.push_back({hi, eta});
      levels.insert(levels.end(), inner.begin(), inner.end());
      Eigen::MatrixXd A(mrows, mrows);
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < levels.size(); ++c)
          A(r, c) = jac_entry(s, m, rows[r], levels[c].h, levels[c].eta, cfg);
      const double det = A.determinant();
      if (std::abs(det) >= sel.det_fraction * lead) {
        out = std::move(levels);
        diag.iota_coordinate = iota;
        diag.abs_det = std::abs(det);
        diag.lead = lead;
        diag.dominance.clear();
        for (std::size_t i = 0; i < rows.size(); ++i)
          if (rows[i] != iota) diag.dominance.push_back(products[i] / (eps0 * lead));
        return true;
      }
    }
  }
  diag.message = "dominance certificate failed within the h budget";
  return false;
}

}  // namespace

DeviceSet DeviceParams::with(int cut_k, const Eigen::VectorXd& eps) const {
  if (eps.size() != count())
    throw std::invalid_argument("DeviceParams::with: eps size mismatch");
  DeviceSet set;
  set.cut_k = cut_k;
  for (int j = 0; j < count(); ++j) set.devices.push_back({h[j], eta[j], eps[j]});
  return set;
}

SelectionResult select_device_params(const Spiral& s, const StratifiedModel& m,
                                     const SelectorConfig& sel, const QuadratureConfig& cfg) {
  SelectionResult res;
  const ModelValidation v = validate_model(m);
  if (!v.ok()) {
    res.diag.message = "model failed validation";
    return res;
  }
  std::vector<int> rows;
  for (int i = 3; i <= m.dimension(); ++i) rows.push_back(i);

  std::vector<Level> levels;
  if (!select_levels(s, m, sel, cfg, rows, levels, res.diag)) return res;

  for (const Level& l : levels) {
    res.params.h.push_back(l.h);
    res.params.eta.push_back(l.eta);
  }
  res.success = true;
  return res;
}

Eigen::VectorXd assemble_rhs(const Spiral& s, const StratifiedModel& m, int k,
                             const QuadratureConfig& cfg) {
  if (k < 1) throw std::invalid_argument("assemble_rhs: cut index must be positive");
  const int n = m.dimension();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n - 2);
  for (int i = 3; i <= n; ++i) {
    const MonomialLayer& layer = m.layer(i);
    b[i - 3] = moment_integral(s, layer.alpha, layer.beta, full_turn_window(k), cfg).value;
    if (!m.remainder(i).empty()) {
      b[i - 3] += integrate(
                      [&](double t) {
                        const Eigen::Vector2d p = s.kappa(t);
                        return m.remainder_value(i, p[0], p[1]) * s.kappa2_dot(t);
                      },
                      s.t_k(k + 1), s.t_k(k), cfg)
                      .value;
    }
  }
  return b;
}

EndpointSystem::EndpointSystem(Spiral s, StratifiedModel m, int k, DeviceParams params,
                               QuadratureConfig cfg)
    : spiral_(std::move(s)), model_(std::move(m)), k_(k), params_(std::move(params)), quad_(cfg) {
  const int n = model_.dimension();
  if (params_.count() != n - 2)
    throw std::invalid_argument("EndpointSystem: one device per coordinate 3..n required");
  for (int j = 1; j < params_.count(); ++j)
    if (!(params_.h[j] < params_.h[j - 1]))
      throw std::invalid_argument("EndpointSystem: device indices must decrease strictly");
  if (!(params_.h.front() < k_))
    throw std::invalid_argument("EndpointSystem: cut index must exceed every device index");

  b_ = assemble_rhs(spiral_, model_, k_, quad_);
  box_.resize(params_.count());
  for (int j = 0; j < params_.count(); ++j)
    box_[j] = spiral_.t_k_eta(params_.h[j], params_.eta[j]);

  moments_.resize(n - 2);
  for (int i = 3; i <= n; ++i) {
    const MonomialLayer& layer = model_.layer(i);
    moments_[i - 3].resize(params_.count());
    for (int j = 0; j < params_.count(); ++j) {
      auto& store = moments_[i - 3][j];
      store.resize(layer.alpha + 1);
      for (int order = 0; order <= layer.alpha; ++order)
        store[order] = moment_integral(spiral_, order - 1, layer.beta,
                                       device_window(params_.h[j], params_.eta[j]), quad_)
                           .value;
    }
  }
}

double EndpointSystem::remainder_difference(int coordinate, int j, double eps) const {
  if (model_.remainder(coordinate).empty() || eps == 0.0) return 0.0;
  return integrate(
             [&](double t) {
               const Eigen::Vector2d p = spiral_.kappa(t);
               return model_.remainder_shift_difference(coordinate, p[0], p[1], eps) *
                      spiral_.kappa2_dot(t);
             },
             spiral_.t_k_eta(params_.h[j], params_.eta[j]), spiral_.t_k(params_.h[j]), quad_)
      .value;
}

double EndpointSystem::remainder_derivative(int coordinate, int j, double eps) const {
  if (model_.remainder(coordinate).empty()) return 0.0;
  return integrate(
             [&](double t) {
               const Eigen::Vector2d p = spiral_.kappa(t);
               return model_.remainder_d1(coordinate, p[0] + eps, p[1]) * spiral_.kappa2_dot(t);
             },
             spiral_.t_k_eta(params_.h[j], params_.eta[j]), spiral_.t_k(params_.h[j]), quad_)
      .value;
}

Eigen::VectorXd EndpointSystem::f(const Eigen::VectorXd& eps) const {
  if (eps.size() != size()) throw std::invalid_argument("EndpointSystem::f: eps size mismatch");
  for (int j = 0; j < size(); ++j)
    if (!(std::abs(eps[j]) < box_[j]))
      throw std::invalid_argument("EndpointSystem::f: |eps| outside the admissible box");
  const int n = model_.dimension();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n - 2);
  for (int i = 3; i <= n; ++i) {
    const MonomialLayer& layer = model_.layer(i);
    double acc = 0.0;
    for (int j = 0; j < size(); ++j) {
      acc += translation_increment_from_moments(moments_[i - 3][j], layer.alpha, eps[j]);
      acc -= remainder_difference(i, j, eps[j]);
    }
    out[i - 3] = acc;
  }
  return out;
}

Eigen::MatrixXd EndpointSystem::jacobian(const Eigen::VectorXd& eps) const {
  if (eps.size() != size())
    throw std::invalid_argument("EndpointSystem::jacobian: eps size mismatch");
  const int n = model_.dimension();
  Eigen::MatrixXd A(n - 2, size());
  for (int i = 3; i <= n; ++i) {
    const MonomialLayer& layer = model_.layer(i);
    for (int j = 0; j < size(); ++j) {
      A(i - 3, j) = translation_increment_derivative(moments_[i - 3][j], layer.alpha, eps[j]) +
                    remainder_derivative(i, j, eps[j]);
    }
  }
  return A;
}

Eigen::MatrixXd EndpointSystem::jacobian_at_zero() const {
  return jacobian(Eigen::VectorXd::Zero(size()));
}

Eigen::VectorXd assemble_f(const Spiral& s, const StratifiedModel& m, const DeviceParams& params,
                           const Eigen::VectorXd& eps, const QuadratureConfig& cfg) {
  // Cheap one-off assembly without the cut-side rhs.
  const int n = m.dimension();
  if (params.count() != n - 2 || eps.size() != n - 2)
    throw std::invalid_argument("assemble_f: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n - 2);
  for (int i = 3; i <= n; ++i) {
    const MonomialLayer& layer = m.layer(i);
    double acc = 0.0;
    for (int j = 0; j < params.count(); ++j) {
      acc += translation_increment(s, layer.alpha, layer.beta, params.h[j], params.eta[j], eps[j],
                                   cfg);
      if (!m.remainder(i).empty() && eps[j] != 0.0) {
        acc -= integrate(
                   [&](double t) {
                     const Eigen::Vector2d p = s.kappa(t);
                     return m.remainder_shift_difference(i, p[0], p[1], eps[j]) *
                            s.kappa2_dot(t);
                   },
                   s.t_k_eta(params.h[j], params.eta[j]), s.t_k(params.h[j]), cfg)
                   .value;
      }
    }
    out[i - 3] = acc;
  }
  return out;
}

Eigen::MatrixXd jacobian_at_zero(const Spiral& s, const StratifiedModel& m,
                                 const DeviceParams& params, const QuadratureConfig& cfg) {
  const int n = m.dimension();
  if (params.count() != n - 2) throw std::invalid_argument("jacobian_at_zero: size mismatch");
  Eigen::MatrixXd A(n - 2, n - 2);
  for (int i = 3; i <= n; ++i)
    for (int j = 0; j < params.count(); ++j)
      A(i - 3, j) = jac_entry(s, m, i, params.h[j], params.eta[j], cfg);
  return A;
}

SolverReport newton_solve(const EndpointSystem& system, double tol, int max_iter) {
  SolverReport rep;
  const int n = system.size();
  rep.eps = Eigen::VectorXd::Zero(n);

  const Eigen::MatrixXd A0 = system.jacobian_at_zero();
  rep.abs_det = std::abs(A0.determinant());

  const Eigen::VectorXd& b = system.rhs();
  const double b_sum = b.cwiseAbs().sum();
  if (b_sum == 0.0) {
    rep.converged = true;
    rep.residual_norm = 0.0;
    return rep;
  }
  if (!(rep.abs_det > 0.0) || !std::isfinite(rep.abs_det)) {
    rep.failure = "singular jacobian at zero";
    return rep;
  }

  const Eigen::VectorXd& box = system.device_box();
  Eigen::VectorXd residual = system.f(rep.eps) - b;
  rep.residual_history.push_back(residual.norm());

  for (int iter = 1; iter <= max_iter; ++iter) {
    const Eigen::MatrixXd A = system.jacobian(rep.eps);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::VectorXd step = lu.solve(-residual);
    if (!step.allFinite()) {
      rep.failure = "non-finite newton step";
      return rep;
    }

    // Clamp into the admissible box, keeping a margin off the boundary.
    double lambda = 1.0;
    for (int j = 0; j < n; ++j) {
      const double room = 0.9 * box[j] - std::abs(rep.eps[j]);
      const double want = std::abs(step[j]);
      if (want > room) lambda = std::min(lambda, room / want);
    }
    if (!(lambda > 0.0)) {
      rep.failure = "step clamped to zero at the box boundary";
      return rep;
    }

    rep.eps += lambda * step;
    rep.iterations = iter;
    residual = system.f(rep.eps) - b;
    rep.residual_norm = residual.norm();
    rep.residual_history.push_back(rep.residual_norm);
    if (rep.residual_norm <= tol) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && rep.failure.empty()) rep.failure = "max iterations exceeded";
  rep.bound_ratio = rep.eps.norm() / b_sum;
  return rep;
}

bool BibaReport::bounded(double factor) const {
  if (rows.size() < 4) return true;
  double early = 0.0;
  for (std::size_t i = 0; i < 3; ++i) early = std::max(early, rows[i].ratio);
  for (const auto& r : rows)
    if (r.ratio > factor * early) return false;
  return true;
}

BibaReport verify_biba(const Spiral& s, const StratifiedModel& m, const DeviceParams& params,
                       const std::vector<int>& ks, double tol, int max_iter,
                       const QuadratureConfig& cfg) {
  if (ks.size() < 3)
    throw std::invalid_argument("verify_biba: needs at least three cut indices");
  BibaReport report;
  for (int k : ks) {
    EndpointSystem system(s, m, k, params, cfg);
    const SolverReport sol = newton_solve(system, tol, max_iter);
    BibaRow row;
    row.k = k;
    row.converged = sol.converged;
    row.eps_norm = sol.eps.norm();
    row.b_sum = system.rhs().cwiseAbs().sum();
    row.ratio = row.b_sum > 0.0 ? row.eps_norm / row.b_sum : 0.0;
    row.viola = integrate(
                    [&](double t) { return t * t * std::abs(s.phase().phi_dot(t)); },
                    s.t_k(k + 1), s.t_k(k), cfg)
                    .value;
    row.viola_ratio = row.viola > 0.0 ? row.eps_norm / row.viola : 0.0;
    report.rows.push_back(row);
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    report.c3 = std::max(report.c3, row.viola_ratio);
  }
  return report;
}

}  // namespace spirallab
