#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace umbilic {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Error taxonomy shared by every module. The CLI maps these onto exit codes.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x{0.0};
  double y{0.0};

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

// Points of the graph plane share the vector representation.
using Point2 = Vec2;

inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

using Point3 = Vec3;

inline constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }
inline bool is_finite(Vec3 a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Unoriented angle between two lines spanned by a and b, in [0, pi/2].
inline double line_angle(Vec3 a, Vec3 b) {
  const double c = std::abs(dot(a, b));
  const double s = norm(cross(a, b));
  return std::atan2(s, c);
}

// Row-major 3x3 matrix; used for rigid motions and quadratic forms.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static constexpr Mat3 identity() { return {}; }
  static constexpr Mat3 diag(double a, double b, double c) {
    return {{a, 0, 0, 0, b, 0, 0, 0, c}};
  }
  constexpr double operator()(int i, int j) const { return m[3 * i + j]; }
  constexpr double& operator()(int i, int j) { return m[3 * i + j]; }

  constexpr Mat3 transposed() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }

  friend constexpr Vec3 operator*(const Mat3& a, Vec3 v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
            a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
            a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
  }
  friend constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 c = diag(0, 0, 0);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) c(i, j) += a(i, k) * b(k, j);
    return c;
  }
  friend constexpr Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int i = 0; i < 9; ++i) c.m[i] = a.m[i] + b.m[i];
    return c;
  }
  friend constexpr Mat3 operator*(double s, const Mat3& a) {
    Mat3 c;
    for (int i = 0; i < 9; ++i) c.m[i] = s * a.m[i];
    return c;
  }
};

// Rotation by angle about a unit axis (Rodrigues).
inline Mat3 axis_angle(Vec3 axis, double angle) {
  const Vec3 k = normalized(axis);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double t = 1.0 - c;
  Mat3 r;
  r(0, 0) = c + t * k.x * k.x;
  r(0, 1) = t * k.x * k.y - s * k.z;
  r(0, 2) = t * k.x * k.z + s * k.y;
  r(1, 0) = t * k.y * k.x + s * k.z;
  r(1, 1) = c + t * k.y * k.y;
  r(1, 2) = t * k.y * k.z - s * k.x;
  r(2, 0) = t * k.z * k.x - s * k.y;
  r(2, 1) = t * k.z * k.y + s * k.x;
  r(2, 2) = c + t * k.z * k.z;
  return r;
}

// Smallest rotation taking unit vector `from` onto unit vector `to`.
inline Mat3 rotation_between(Vec3 from, Vec3 to) {
  const Vec3 a = normalized(from);
  const Vec3 b = normalized(to);
  const Vec3 axis = cross(a, b);
  const double s = norm(axis);
  const double c = dot(a, b);
  if (s < 1e-15) {
    if (c > 0.0) return Mat3::identity();
    // Antipodal: rotate by pi about any axis orthogonal to a.
    const Vec3 helper = std::abs(a.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    return axis_angle(cross(a, helper), pi);
  }
  return axis_angle(axis, std::atan2(s, c));
}

// Angle reduced to [0, 2*pi).
inline double reduce_angle(double theta) {
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t = 0.0;
  return t;
}

struct PolarPoint {
  double r{0.0};
  double theta{0.0};  // in [0, 2*pi)
};

inline PolarPoint to_polar(Point2 p) {
  return {norm(p), p.x == 0.0 && p.y == 0.0 ? 0.0 : reduce_angle(std::atan2(p.y, p.x))};
}

inline Point2 to_cartesian(double r, double theta) {
  return {r * std::cos(theta), r * std::sin(theta)};
}

inline Point2 to_cartesian(PolarPoint p) { return to_cartesian(p.r, p.theta); }

// Unit direction X(theta) = (cos theta, sin theta) in the graph plane.
class Direction {
 public:
  explicit Direction(double theta)
      : theta_(theta), u_{std::cos(theta), std::sin(theta)} {}

  static Direction from_vector(Vec2 v) { return Direction(std::atan2(v.y, v.x)); }

  double theta() const { return theta_; }
  Vec2 vec() const { return u_; }
  Direction perp() const { return Direction(theta_ + 0.5 * pi); }

 private:
  double theta_;
  Vec2 u_;
};

}  // namespace umbilic
