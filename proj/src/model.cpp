#include "spirallab/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "spirallab/numeric.hpp"

namespace spirallab {

StratifiedModel::StratifiedModel(std::vector<int> weights, std::vector<MonomialLayer> layers,
                                 std::vector<std::pair<int, std::vector<RemainderTerm>>> remainders)
    : weights_(std::move(weights)) {
  const int n = static_cast<int>(weights_.size());
  if (n < 3) throw std::invalid_argument("StratifiedModel: dimension must be >= 3");
  if (static_cast<int>(layers.size()) != n - 2)
    throw std::invalid_argument("StratifiedModel: expected one layer per coordinate 3..n");

  layers_.resize(n - 2);
  std::vector<bool> seen(n - 2, false);
  for (const auto& l : layers) {
    if (l.coordinate < 3 || l.coordinate > n)
      throw std::invalid_argument("StratifiedModel: layer coordinate out of range");
    if (seen[l.coordinate - 3])
      throw std::invalid_argument("StratifiedModel: duplicate layer coordinate");
    if (l.alpha < 0 || l.beta < 0)
      throw std::invalid_argument("StratifiedModel: layer exponents must be nonnegative");
    seen[l.coordinate - 3] = true;
    layers_[l.coordinate - 3] = l;
  }

  remainders_.resize(n - 2);
  for (auto& [coord, terms] : remainders) {
    if (coord < 3 || coord > n)
      throw std::invalid_argument("StratifiedModel: remainder coordinate out of range");
    for (const auto& t : terms)
      if (t.pow_x1 < 0 || t.pow_x2 < 0)
        throw std::invalid_argument("StratifiedModel: remainder exponents must be nonnegative");
    auto& dst = remainders_[coord - 3];
    dst.insert(dst.end(), terms.begin(), terms.end());
  }
}

StratifiedModel StratifiedModel::heisenberg() {
  return StratifiedModel({1, 1, 2}, {{3, 0, 0}});
}

StratifiedModel StratifiedModel::engel() {
  return StratifiedModel({1, 1, 2, 3}, {{3, 0, 0}, {4, 1, 0}});
}

void StratifiedModel::check_coordinate(int coordinate) const {
  if (coordinate < 3 || coordinate > dimension())
    throw std::out_of_range("StratifiedModel: coordinate index out of range");
}

int StratifiedModel::weight(int coordinate) const {
  if (coordinate < 1 || coordinate > dimension())
    throw std::out_of_range("StratifiedModel: coordinate index out of range");
  return weights_[coordinate - 1];
}

const MonomialLayer& StratifiedModel::layer(int coordinate) const {
  check_coordinate(coordinate);
  return layers_[coordinate - 3];
}

const std::vector<RemainderTerm>& StratifiedModel::remainder(int coordinate) const {
  check_coordinate(coordinate);
  return remainders_[coordinate - 3];
}

bool StratifiedModel::has_remainders() const {
  for (const auto& r : remainders_)
    if (!r.empty()) return true;
  return false;
}

double StratifiedModel::monomial(int coordinate, double x1, double x2) const {
  const MonomialLayer& l = layer(coordinate);
  return ipow(x1, l.alpha + 1) * ipow(x2, l.beta);
}

double StratifiedModel::remainder_value(int coordinate, double x1, double x2) const {
  double r = 0.0;
  for (const auto& t : remainder(coordinate)) r += t.coeff * ipow(x1, t.pow_x1) * ipow(x2, t.pow_x2);
  return r;
}

double StratifiedModel::remainder_shift_difference(int coordinate, double x1, double x2,
                                                   double eps) const {
  double r = 0.0;
  for (const auto& t : remainder(coordinate)) {
    if (t.pow_x1 == 0) continue;  // x1-independent terms cancel exactly
    double inc = 0.0;             // (x1 + eps)^a1 - x1^a1
    for (int m = 0; m < t.pow_x1; ++m)
      inc += binomial(t.pow_x1, m) * ipow(x1, m) * ipow(eps, t.pow_x1 - m);
    r -= t.coeff * inc * ipow(x2, t.pow_x2);
  }
  return r;
}

double StratifiedModel::remainder_d1(int coordinate, double x1, double x2) const {
  double r = 0.0;
  for (const auto& t : remainder(coordinate)) {
    if (t.pow_x1 == 0) continue;
    r += t.coeff * t.pow_x1 * ipow(x1, t.pow_x1 - 1) * ipow(x2, t.pow_x2);
  }
  return r;
}

double StratifiedModel::coefficient(int coordinate, double x1, double x2) const {
  return monomial(coordinate, x1, x2) + remainder_value(coordinate, x1, x2);
}

ModelValidation validate_model(const StratifiedModel& m) {
  ModelValidation report;
  const auto& w = m.weights();
  const int n = m.dimension();

  if (w[0] != 1 || w[1] != 1)
    report.violations.push_back({0, "weights w_1 and w_2 must both equal 1"});
  for (int i = 3; i <= n; ++i) {
    if (w[i - 1] < 2)
      report.violations.push_back({i, "weight must be >= 2 for coordinates beyond the plane"});
    if (i > 3 && w[i - 1] < w[i - 2])
      report.violations.push_back({i, "weights must be nondecreasing for i >= 3"});
  }

  std::set<std::pair<int, int>> seen;
  for (int i = 3; i <= n; ++i) {
    const MonomialLayer& l = m.layer(i);
    if (l.alpha + l.beta != w[i - 1] - 2)
      report.violations.push_back({i, "layer exponents must satisfy alpha + beta = w_i - 2"});
    if (!seen.insert({l.alpha, l.beta}).second)
      report.violations.push_back({i, "duplicate layer exponent pair (alpha, beta)"});
  }

  for (int i = 3; i <= n; ++i) {
    for (const auto& t : m.remainder(i)) {
      if (t.pow_x1 + t.pow_x2 < w[i - 1])
        report.violations.push_back(
            {i, "remainder term degree below the coordinate weight"});
    }
  }
  return report;
}

double pseudo_norm(const StratifiedModel& m, const Eigen::VectorXd& x) {
  if (x.size() != m.dimension())
    throw std::invalid_argument("pseudo_norm: point dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i)
    s += std::pow(std::abs(x[i]), 1.0 / m.weights()[i]);
  return s;
}

Eigen::VectorXd dilate(const StratifiedModel& m, double lambda, const Eigen::VectorXd& x) {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
  if (x.size() != m.dimension())
    throw std::invalid_argument("dilate: point dimension mismatch");
  Eigen::VectorXd y(x.size());
  for (int i = 0; i < x.size(); ++i) y[i] = ipow(lambda, m.weights()[i]) * x[i];
  return y;
}

double check_homogeneity(const StratifiedModel& m, int coordinate,
                         const std::vector<Eigen::Vector2d>& samples,
                         const std::vector<double>& lambdas) {
  if (samples.empty() || lambdas.empty())
    throw std::invalid_argument("check_homogeneity: needs nonempty samples and lambdas");
  const int degree = m.weight(coordinate) - 1;
  double worst = 0.0;
  for (const auto& x : samples) {
    const double base = m.monomial(coordinate, x[0], x[1]);
    for (double lam : lambdas) {
      if (!(lam > 0.0)) throw std::invalid_argument("check_homogeneity: lambda must be positive");
      const double scaled = m.monomial(coordinate, lam * x[0], lam * x[1]);
      const double expected = ipow(lam, degree) * base;
      const double denom = std::max(std::abs(expected), 1e-300);
      worst = std::max(worst, std::abs(scaled - expected) / denom);
    }
  }
  return worst;
}

double remainder_bound_constant(const StratifiedModel& m, int coordinate, int grid) {
  const int w = m.weight(coordinate);
  double sup = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double x1 = -1.0 + 2.0 * i / (grid - 1);
      const double x2 = -1.0 + 2.0 * j / (grid - 1);
      const double nrm = std::abs(x1) + std::abs(x2);  // planar pseudo-norm, weights 1
      if (nrm == 0.0 || nrm > 1.0) continue;
      const double r = std::abs(m.remainder_value(coordinate, x1, x2));
      sup = std::max(sup, r / ipow(nrm, w));
    }
  }
  return sup;
}

}  // namespace spirallab
