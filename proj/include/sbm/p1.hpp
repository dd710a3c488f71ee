#pragma once

#include <Eigen/Core>

#include <array>

namespace sbm {

/// Affine triangle with the constant gradients of its three hat functions.
template <typename Scalar = double>
struct P1Triangle {
  using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
  using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

  std::array<Vec2, 3> x;
  Eigen::Matrix<Scalar, 2, 3> grads;  // column k = grad(phi_k)
  Scalar area;

  P1Triangle(const Vec2& a, const Vec2& b, const Vec2& c) : x{a, b, c} {
    const Scalar two_area = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    area = two_area / 2;
    // grad(phi_k) = perp(opposite edge) / (2 area)
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = x[(k + 1) % 3];
      const Vec2& q = x[(k + 2) % 3];
      grads(0, k) = (p.y() - q.y()) / two_area;
      grads(1, k) = (q.x() - p.x()) / two_area;
    }
  }

  Vec3 barycentric(const Vec2& p) const {
    Vec3 lambda;
    for (int k = 0; k < 3; ++k) lambda(k) = Scalar(1) / 3 + grads.col(k).dot(p - centroid());
    return lambda;
  }

  Vec2 centroid() const { return (x[0] + x[1] + x[2]) / 3; }

  Vec2 point(const Vec3& bary) const { return bary(0) * x[0] + bary(1) * x[1] + bary(2) * x[2]; }

  /// Exact P1 stiffness: area * grad(phi_i) . grad(phi_j).
  Eigen::Matrix<Scalar, 3, 3> stiffness() const { return area * grads.transpose() * grads; }
};

/// S_h v = v + grad(v) . d for a P1 function given by its nodal values on `tri`,
/// evaluated at x_tilde on the triangle's closure.
template <typename Scalar>
Scalar shift_eval(const P1Triangle<Scalar>& tri, const Eigen::Matrix<Scalar, 3, 1>& nodal,
                  const Eigen::Matrix<Scalar, 2, 1>& x_tilde, const Eigen::Matrix<Scalar, 2, 1>& d) {
  const Eigen::Matrix<Scalar, 2, 1> grad = tri.grads * nodal;
  return tri.barycentric(x_tilde).dot(nodal) + grad.dot(d);
}

}  // namespace sbm
