#pragma once

// Fixed Gauss-Legendre rules and a globally adaptive Gauss-Kronrod (7/15)
// integrator over batch-evaluated integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace osgood::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::span<const double> nodes;
  std::span<const double> weights;
};

/// Supported point counts: 2, 3, 4, 8.
[[nodiscard]] const GaussLegendreRule& gauss_legendre(int points);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

namespace detail {

// Kronrod nodes on [0, 1); the Gauss nodes are the odd entries.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class BatchFn>
Panel gk15(BatchFn& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> x;
  std::array<double, 15> y;
  for (int j = 0; j < 7; ++j) {
    x[2 * j] = c - h * kXgk[j];
    x[2 * j + 1] = c + h * kXgk[j];
  }
  x[14] = c;
  f(std::span<const double>(x), std::span<double>(y));
  double kron = kWgk[7] * y[14];
  double gauss = kWg[3] * y[14];
  for (int j = 0; j < 7; ++j) {
    const double pair = y[2 * j] + y[2 * j + 1];
    kron += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  return Panel{a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Integrates f over [breakpoints.front(), breakpoints.back()], starting from
/// one panel per breakpoint interval and bisecting the panel with the largest
/// error estimate until the summed estimate is below max(abs_tol, rel_tol*|I|)
/// or max_panels is reached. `f(x, y)` must fill y[i] = f(x[i]).
template <class BatchFn>
AdaptiveResult integrate_adaptive(BatchFn&& f, std::span<const double> breakpoints,
                                  double abs_tol, double rel_tol,
                                  std::size_t max_panels = 4000) {
  AdaptiveResult out;
  std::priority_queue<detail::Panel> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    const detail::Panel p = detail::gk15(f, breakpoints[i], breakpoints[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  auto target = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
  while (!heap.empty() && err > target() && heap.size() < max_panels) {
    const detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const detail::Panel left = detail::gk15(f, worst.a, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  err = 0.0;
  out.panels = heap.size();
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = err;
  out.converged = err <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

}  // namespace osgood::quad
