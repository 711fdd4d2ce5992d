#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace lticap::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = true;
};

/// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 tables).
struct GaussKronrod15 {
  static const std::array<double, 8> nodes;           // descending, last is 0
  static const std::array<double, 8> kronrod_weights;
  static const std::array<double, 4> gauss_weights;   // at nodes[1], nodes[3], nodes[5], nodes[7]
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const auto& x = GaussKronrod15::nodes;
  const auto& wk = GaussKronrod15::kronrod_weights;
  const auto& wg = GaussKronrod15::gauss_weights;
  const double fc = f(c);
  double k = wk[7] * fc;
  double g = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * x[j];
    const double s = f(c - dx) + f(c + dx);
    k += wk[j] * s;
    if (j % 2 == 1) g += wg[j / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over a set of disjoint panels.
/// Bisects the panel with the largest error estimate until the summed estimate
/// drops below max(abs_tol, rel_tol * |I|).
template <class F>
Result integrate_panels(F&& f, std::span<const std::pair<double, double>> initial, double rel_tol,
                        double abs_tol = 0.0, int max_panels = 20000) {
  Result r;
  std::priority_queue<detail::Panel> queue;
  double value = 0.0, error = 0.0;
  for (const auto& [a, b] : initial) {
    if (!(b > a)) continue;
    auto p = detail::gk15(f, a, b);
    value += p.value;
    error += p.error;
    queue.push(p);
  }
  while (!queue.empty() && error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (static_cast<int>(queue.size()) >= max_panels) {
      r.converged = false;
      break;
    }
    const auto worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      r.converged = false;
      break;
    }
    queue.pop();
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum in detuning order; the running totals carry cancellation from the updates.
  r.panels = static_cast<int>(queue.size());
  std::vector<detail::Panel> panels;
  panels.reserve(queue.size());
  while (!queue.empty()) {
    panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& rr) { return l.a < rr.a; });
  for (const auto& p : panels) {
    r.value += p.value;
    r.error += p.error;
  }
  return r;
}

/// Same, with the initial panels delimited by consecutive sorted knots.
template <class F>
Result integrate(F&& f, std::span<const double> knots, double rel_tol, double abs_tol = 0.0) {
  std::vector<std::pair<double, double>> panels;
  for (std::size_t i = 1; i < knots.size(); ++i) panels.emplace_back(knots[i - 1], knots[i]);
  return integrate_panels(std::forward<F>(f), std::span<const std::pair<double, double>>(panels), rel_tol,
                          abs_tol);
}

template <class F>
Result integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0) {
  const std::array<double, 2> knots{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(knots), rel_tol, abs_tol);
}

}  // namespace lticap::quad
