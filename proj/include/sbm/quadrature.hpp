#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sbm {

/// Gauss-Legendre rule on [0, 1]: nodes and weights (weights sum to 1).
template <typename Scalar = double>
struct LineRule {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;
};

/// Reference-triangle rule in barycentric coordinates; weights sum to 1 so the
/// physical weight is weight * area.
template <typename Scalar = double>
struct TriangleRule {
  std::vector<Eigen::Matrix<Scalar, 3, 1>> bary;
  std::vector<Scalar> weights;
};

template <typename Scalar = double>
LineRule<Scalar> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  LineRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-16)) break;
    }
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    // Map from [-1,1] to [0,1].
    rule.nodes[i] = (1 - x) / 2;
    rule.nodes[n - 1 - i] = (1 + x) / 2;
    rule.weights[i] = w / 2;
    rule.weights[n - 1 - i] = w / 2;
  }
  return rule;
}

/// Edge-midpoint rule, exact for quadratics.
template <typename Scalar = double>
TriangleRule<Scalar> triangle_rule_degree2() {
  using V = Eigen::Matrix<Scalar, 3, 1>;
  const Scalar h = Scalar(0.5);
  const Scalar third = Scalar(1) / 3;
  return {{V(h, h, 0), V(0, h, h), V(h, 0, h)}, {third, third, third}};
}

/// Six-point symmetric rule, exact for quartics.
template <typename Scalar = double>
TriangleRule<Scalar> triangle_rule_degree4() {
  using V = Eigen::Matrix<Scalar, 3, 1>;
  const Scalar a = Scalar(0.44594849091596488632);
  const Scalar b = Scalar(0.09157621350977074346);
  const Scalar wa = Scalar(0.22338158967801146570);
  const Scalar wb = Scalar(0.10995174365532186764);
  const Scalar ca = 1 - 2 * a;
  const Scalar cb = 1 - 2 * b;
  return {{V(a, a, ca), V(a, ca, a), V(ca, a, a), V(b, b, cb), V(b, cb, b), V(cb, b, b)},
          {wa, wa, wa, wb, wb, wb}};
}

}  // namespace sbm
