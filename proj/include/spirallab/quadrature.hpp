#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace spirallab {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 32;
  /// Work cap: once this many panels have been accepted the remaining stack
  /// is drained without further subdivision and the result is flagged. Keeps
  /// non-convergent integrands (noise-dominated differences, hidden kinks)
  /// from costing exponential time.
  long max_panels = 200000;

  /// Pure relative control: the absolute floor is pushed below any value this
  /// library produces, so accuracy scales with the integrand no matter how
  /// small the window gets.
  static QuadratureConfig relative(double rel, int depth = 40) {
    QuadratureConfig cfg;
    cfg.abs_tol = 1e-290;
    cfg.rel_tol = rel;
    cfg.max_depth = depth;
    return cfg;
  }
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  ///< accumulated panel error estimates (an upper proxy)
  double l1 = 0.0;     ///< approximate integral of |f|
  bool converged = true;
  int depth = 0;
  int panels = 0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    l1 += o.l1;
    converged = converged && o.converged;
    depth = std::max(depth, o.depth);
    panels += o.panels;
    return *this;
  }
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Even indices of kGkNodes are Kronrod-only points, odd indices (and the
// centre) are the Gauss points.
inline constexpr double kGkNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kGkWeightsK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGkWeightsG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double value = 0.0;
  double error = 0.0;
  double resabs = 0.0;  // approximation of integral of |f|
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv1[7], fv2[7];
  const double fc = f(centre);
  double resg = fc * kGkWeightsG[3];
  double resk = fc * kGkWeightsK[7];
  double resabs = std::abs(resk);

  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;  // Gauss points
    const double absc = half * kGkNodes[jtw];
    fv1[jtw] = f(centre - absc);
    fv2[jtw] = f(centre + absc);
    const double fsum = fv1[jtw] + fv2[jtw];
    resg += kGkWeightsG[j] * fsum;
    resk += kGkWeightsK[jtw] * fsum;
    resabs += kGkWeightsK[jtw] * (std::abs(fv1[jtw]) + std::abs(fv2[jtw]));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;  // Kronrod-only points
    const double absc = half * kGkNodes[jtwm1];
    fv1[jtwm1] = f(centre - absc);
    fv2[jtwm1] = f(centre + absc);
    const double fsum = fv1[jtwm1] + fv2[jtwm1];
    resk += kGkWeightsK[jtwm1] * fsum;
    resabs += kGkWeightsK[jtwm1] * (std::abs(fv1[jtwm1]) + std::abs(fv2[jtwm1]));
  }

  const double reskh = resk * 0.5;
  double resasc = kGkWeightsK[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kGkWeightsK[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  Panel p;
  p.value = resk * half;
  p.resabs = resabs * std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (p.resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(eps50 * p.resabs, err);
  p.error = err;
  return p;
}

}  // namespace detail

/// Adaptive quadrature of f over [a, b]: Gauss-Kronrod 7/15 per panel with
/// bisection of panels whose error estimate exceeds its tolerance share.
/// The relative test is against the panel's L1 mass, so oscillatory integrands
/// with interior zero crossings do not force runaway refinement.
/// Non-convergence at max_depth is reported through the flag, never thrown.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  if (!(a <= b)) throw std::invalid_argument("integrate: requires a <= b");
  QuadResult out;
  if (a == b) return out;

  struct Item {
    double a, b, abs_share;
    int depth;
  };
  std::vector<Item> stack;
  stack.push_back({a, b, cfg.abs_tol, 0});

  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    detail::Panel p = detail::gk15(f, it.a, it.b);
    const double tol = std::max(it.abs_share, cfg.rel_tol * p.resabs);
    const double width = it.b - it.a;
    const bool tiny = width <= 8.0 * std::numeric_limits<double>::epsilon() *
                                   (std::abs(it.a) + std::abs(it.b));
    if (out.panels >= cfg.max_panels) {
      out.value += p.value;
      out.error += p.error;
      out.l1 += p.resabs;
      ++out.panels;
      out.converged = false;
      continue;
    }
    if (p.error <= tol || tiny) {
      out.value += p.value;
      out.error += p.error;
      out.l1 += p.resabs;
      out.depth = std::max(out.depth, it.depth);
      ++out.panels;
    } else if (it.depth >= cfg.max_depth) {
      out.value += p.value;
      out.error += p.error;
      out.l1 += p.resabs;
      out.depth = std::max(out.depth, it.depth);
      ++out.panels;
      out.converged = false;
    } else {
      const double m = 0.5 * (it.a + it.b);
      stack.push_back({it.a, m, 0.5 * it.abs_share, it.depth + 1});
      stack.push_back({m, it.b, 0.5 * it.abs_share, it.depth + 1});
    }
  }
  return out;
}

}  // namespace spirallab
