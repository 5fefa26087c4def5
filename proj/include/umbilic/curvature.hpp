#pragma once

#include <cmath>
#include <functional>

#include "field.hpp"

namespace umbilic {

// Normal curvature of graph(f) along the tangent vector projecting onto X:
//   k = f_XX / ((1 + f_X^2) sqrt(1 + |grad f|^2)).
inline double normal_curvature(const Jet2& j, const Direction& X) {
  const auto [fX, fXX] = directional(j, X);
  return fXX / ((1.0 + fX * fX) * std::sqrt(1.0 + j.grad_norm2()));
}

inline double normal_curvature(const ScalarField& field, Point2 p, const Direction& X) {
  return normal_curvature(field.jet(p), X);
}

// Same quantity written out in theta; kept separate from the X form so the two
// expressions can be checked against each other.
inline double normal_curvature_theta(const Jet2& j, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double num = j.f11 * c * c + j.f12 * std::sin(2.0 * theta) + j.f22 * s * s;
  const double slope = j.f1 * c + j.f2 * s;
  return num / (1.0 + slope * slope) / std::sqrt(1.0 + j.grad_norm2());
}

inline double normal_curvature_theta(const ScalarField& field, Point2 p, double theta) {
  return normal_curvature_theta(field.jet(p), theta);
}

/// d/dtheta of k(p, X(theta)) at theta0, evaluated in the frame rotated so
/// that X(theta0) is the first axis.
inline double dk_dtheta(const Jet2& j, double theta0) {
  const Jet2 r = rotate_frame(j, theta0);
  const double a = 1.0 + r.f1 * r.f1;
  return 2.0 * (a * r.f12 - r.f2 * r.f1 * r.f11) / (a * a * std::sqrt(1.0 + r.grad_norm2()));
}

inline double dk_dtheta(const ScalarField& field, Point2 p, double theta0) {
  return dk_dtheta(field.jet(p), theta0);
}

struct PrincipalData {
  double k1{0.0};  // k1 <= k2
  double k2{0.0};
  Vec2 e1{1.0, 0.0};  // projected principal directions, Euclidean unit length
  Vec2 e2{0.0, 1.0};
  double H{0.0};
  double K{0.0};
  // k1 == k2 within 1e-10: e1, e2 are then arbitrary.
  bool directions_arbitrary{false};
};

struct Mat2 {
  double a11, a12, a21, a22;
};

/// Shape operator S = g^{-1} h of graph(f) in graph-plane coordinates, with
/// g = I + grad f grad f^T and h = Hess f / sqrt(1+q).
inline Mat2 shape_matrix(const Jet2& j) {
  const double q = j.grad_norm2();
  const double w = 1.0 + q;
  const double sw = std::sqrt(w);
  // grad f^T Hess f
  const double t1 = j.f1 * j.f11 + j.f2 * j.f12;
  const double t2 = j.f1 * j.f12 + j.f2 * j.f22;
  return {(j.f11 - j.f1 * t1 / w) / sw, (j.f12 - j.f1 * t2 / w) / sw,
          (j.f12 - j.f2 * t1 / w) / sw, (j.f22 - j.f2 * t2 / w) / sw};
}

namespace detail {

// Unit vector with ties broken toward the positive x half-plane.
inline Vec2 canonical_direction(Vec2 v) {
  const double n = norm(v);
  v = v / n;
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
  return v;
}

// Eigenvector for one eigenvalue: by Cayley-Hamilton the columns of
// (S - other*I) span it; take the column with the larger norm.
inline Vec2 eigenvector(const Mat2& s, double other) {
  const Vec2 c1{s.a11 - other, s.a21};
  const Vec2 c2{s.a12, s.a22 - other};
  return canonical_direction(norm(c1) >= norm(c2) ? c1 : c2);
}

}  // namespace detail

inline PrincipalData shape_operator(const Jet2& j) {
  const Mat2 s = shape_matrix(j);
  PrincipalData out;
  out.H = 0.5 * (s.a11 + s.a22);
  out.K = j.hessian_det() / ((1.0 + j.grad_norm2()) * (1.0 + j.grad_norm2()));
  // H^2 - K written without cancellation of the two large terms.
  const double half_diff = 0.5 * (s.a11 - s.a22);
  const double disc = std::max(0.0, half_diff * half_diff + s.a12 * s.a21);
  const double root = std::sqrt(disc);
  out.k1 = out.H - root;
  out.k2 = out.H + root;
  if (out.k2 - out.k1 <= 1e-10) {
    out.directions_arbitrary = true;
    return out;
  }
  out.e1 = detail::eigenvector(s, out.k2);
  out.e2 = detail::eigenvector(s, out.k1);
  return out;
}

inline PrincipalData shape_operator(const ScalarField& field, Point2 p) {
  return shape_operator(field.jet(p));
}

/// Residuals whose common zeros are the umbilics of graph(f).
struct UmbilicResiduals {
  double P1{0.0};  // (1+f1^2) f12 - f1 f2 f11
  double P2{0.0};  // (1+f1^2) f22 - (1+f2^2) f11
  double D{0.0};   // quartic discriminant, = 4 (1+q)^3 (H^2 - K)
};

inline UmbilicResiduals umbilic_residuals(const Jet2& j) {
  const double a = 1.0 + j.f1 * j.f1;
  const double b = 1.0 + j.f2 * j.f2;
  const double m = j.f22 * a - 2.0 * j.f1 * j.f2 * j.f12 + j.f11 * b;
  return {a * j.f12 - j.f1 * j.f2 * j.f11, a * j.f22 - b * j.f11,
          m * m - 4.0 * (1.0 + j.grad_norm2()) * j.hessian_det()};
}

inline UmbilicResiduals umbilic_residuals(const ScalarField& field, Point2 p) {
  return umbilic_residuals(field.jet(p));
}

/// D / (1+q)^3 = 4 (H^2 - K); scale-portable umbilic indicator.
inline double normalized_discriminant(const Jet2& j) {
  const double w = 1.0 + j.grad_norm2();
  return umbilic_residuals(j).D / (w * w * w);
}

/// max(|P1|, |P2|) / (1+q)^{3/2}.
inline double normalized_umbilic_residual(const Jet2& j) {
  const UmbilicResiduals r = umbilic_residuals(j);
  const double w = 1.0 + j.grad_norm2();
  return std::max(std::abs(r.P1), std::abs(r.P2)) / (w * std::sqrt(w));
}

inline constexpr double default_umbilic_tolerance = 1e-10;

/// Planar points count as umbilics.
inline bool is_umbilic(const Jet2& j, double tol = default_umbilic_tolerance) {
  return normalized_discriminant(j) < tol;
}

/// (div(grad f / sqrt(1+q)))^2 - 4 det Hess f / (1+q)^2, the divergence taken
/// analytically from the jet. Equals 4 (H^2 - K).
inline double coordinate_free_discriminant(const Jet2& j) {
  const double w = 1.0 + j.grad_norm2();
  const double sw = std::sqrt(w);
  const double grad_hess_grad =
      j.f1 * (j.f1 * j.f11 + j.f2 * j.f12) + j.f2 * (j.f1 * j.f12 + j.f2 * j.f22);
  const double div = j.hessian_trace() / sw - grad_hess_grad / (w * sw);
  return div * div - 4.0 * j.hessian_det() / (w * w);
}

struct PlaneSample {
  Vec2 v;
  double div{0.0};
};

/// Vector field on R^2 with its analytic divergence. `stated`, when set, is
/// the curvature integrand of the matching integral identity, already
/// multiplied by the area factor so it integrates against dx dy.
struct PlaneField {
  std::function<PlaneSample(Point2)> eval;
  std::function<double(Point2)> stated;
};

/// Central-difference divergence of a plane field's vector part.
inline double fd_divergence(const PlaneField& V, Point2 p) {
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, norm(p));
  const double dx = (V.eval({p.x + h, p.y}).v.x - V.eval({p.x - h, p.y}).v.x) / (2.0 * h);
  const double dy = (V.eval({p.x, p.y + h}).v.y - V.eval({p.x, p.y - h}).v.y) / (2.0 * h);
  return dx + dy;
}

/// Field from the (k_X - k_Y) identity: u = f_X (1+f_Y^2), v = f_Y (1+f_X^2),
/// V = (u X^1 - v Y^1, u X^2 - v Y^2), div V = f_XX (1+f_Y^2) - f_YY (1+f_X^2).
inline PlaneField thm2_vectorfield(const ScalarField& field, const Direction& X,
                                   const Direction& Y) {
  PlaneField out;
  out.eval = [field, X, Y](Point2 p) {
    const Jet2 j = field.jet(p);
    const auto [fX, fXX] = directional(j, X);
    const auto [fY, fYY] = directional(j, Y);
    const double u = fX * (1.0 + fY * fY);
    const double v = fY * (1.0 + fX * fX);
    const Vec2 x = X.vec();
    const Vec2 y = Y.vec();
    return PlaneSample{{u * x.x - v * y.x, u * x.y - v * y.y},
                       fXX * (1.0 + fY * fY) - fYY * (1.0 + fX * fX)};
  };
  out.stated = [field, X, Y](Point2 p) {
    const Jet2 j = field.jet(p);
    const double fX = directional(j, X).fX;
    const double fY = directional(j, Y).fX;
    return (normal_curvature(j, X) - normal_curvature(j, Y)) * (1.0 + fX * fX) *
           (1.0 + fY * fY) * std::sqrt(1.0 + j.grad_norm2());
  };
  return out;
}

/// Field from the dk/dtheta identity: in the frame rotated by theta0,
/// V = (f2 / sqrt(1+f1^2), 0), mapped back to base coordinates. Its
/// divergence is ((1+f1^2) f12 - f1 f2 f11) / (1+f1^2)^{3/2}; the stated
/// integrand (dk/dtheta)(1+f_X^2) sqrt(1+q) equals 2 sqrt(1+f1^2) div V.
inline PlaneField thm3_vectorfield(const ScalarField& field, double theta0) {
  const double c = std::cos(theta0);
  const double s = std::sin(theta0);
  PlaneField out;
  out.eval = [field, theta0, c, s](Point2 p) {
    const Jet2 r = rotate_frame(field.jet(p), theta0);
    const double a = 1.0 + r.f1 * r.f1;
    const double sa = std::sqrt(a);
    const double comp = r.f2 / sa;
    return PlaneSample{{c * comp, s * comp}, (a * r.f12 - r.f1 * r.f2 * r.f11) / (a * sa)};
  };
  out.stated = [field, theta0](Point2 p) {
    const Jet2 j = field.jet(p);
    const Jet2 r = rotate_frame(j, theta0);
    return dk_dtheta(j, theta0) * (1.0 + r.f1 * r.f1) * std::sqrt(1.0 + j.grad_norm2());
  };
  return out;
}

}  // namespace umbilic
