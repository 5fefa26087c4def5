#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace umbilic {

/// Value, gradient and Hessian of a scalar field at one point.
struct Jet2 {
  double f{0.0};
  double f1{0.0};
  double f2{0.0};
  double f11{0.0};
  double f12{0.0};
  double f22{0.0};

  Vec2 gradient() const { return {f1, f2}; }
  /// q = |grad f|^2
  double grad_norm2() const { return f1 * f1 + f2 * f2; }
  double hessian_trace() const { return f11 + f22; }
  double hessian_det() const { return f11 * f22 - f12 * f12; }
  bool finite() const {
    return std::isfinite(f) && std::isfinite(f1) && std::isfinite(f2) && std::isfinite(f11) &&
           std::isfinite(f12) && std::isfinite(f22);
  }
};

// Jet algebra used to assemble closed-form jets from simpler pieces.

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.f + b.f, a.f1 + b.f1, a.f2 + b.f2, a.f11 + b.f11, a.f12 + b.f12, a.f22 + b.f22};
}

inline Jet2 operator*(double s, const Jet2& a) {
  return {s * a.f, s * a.f1, s * a.f2, s * a.f11, s * a.f12, s * a.f22};
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.f * b.f,
          a.f1 * b.f + a.f * b.f1,
          a.f2 * b.f + a.f * b.f2,
          a.f11 * b.f + 2.0 * a.f1 * b.f1 + a.f * b.f11,
          a.f12 * b.f + a.f1 * b.f2 + a.f2 * b.f1 + a.f * b.f12,
          a.f22 * b.f + 2.0 * a.f2 * b.f2 + a.f * b.f22};
}

inline Jet2 constant_jet(double c) { return {c, 0, 0, 0, 0, 0}; }
inline Jet2 x_jet(Point2 p) { return {p.x, 1, 0, 0, 0, 0}; }
inline Jet2 y_jet(Point2 p) { return {p.y, 0, 1, 0, 0, 0}; }

/// Chain rule for g(inner) given g, g', g'' at inner.f.
inline Jet2 compose(const Jet2& inner, double g, double dg, double d2g) {
  return {g,
          dg * inner.f1,
          dg * inner.f2,
          d2g * inner.f1 * inner.f1 + dg * inner.f11,
          d2g * inner.f1 * inner.f2 + dg * inner.f12,
          d2g * inner.f2 * inner.f2 + dg * inner.f22};
}

struct DirectionalDerivatives {
  double fX{0.0};
  double fXX{0.0};
};

/// f_X = <grad f, X> and f_XX = X^T Hess f X.
inline DirectionalDerivatives directional(const Jet2& j, const Direction& dir) {
  const Vec2 x = dir.vec();
  return {j.f1 * x.x + j.f2 * x.y,
          j.f11 * x.x * x.x + 2.0 * j.f12 * x.x * x.y + j.f22 * x.y * x.y};
}

/// Mixed second derivative f_XY = X^T Hess f Y.
inline double mixed(const Jet2& j, const Direction& a, const Direction& b) {
  const Vec2 x = a.vec();
  const Vec2 y = b.vec();
  return j.f11 * x.x * y.x + j.f12 * (x.x * y.y + x.y * y.x) + j.f22 * x.y * y.y;
}

/// Expresses the jet in coordinates whose first axis is X(theta0): the
/// gradient is rotated by -theta0 and the Hessian conjugated accordingly.
inline Jet2 rotate_frame(const Jet2& j, double theta0) {
  const double c = std::cos(theta0);
  const double s = std::sin(theta0);
  Jet2 r;
  r.f = j.f;
  r.f1 = c * j.f1 + s * j.f2;
  r.f2 = -s * j.f1 + c * j.f2;
  r.f11 = c * c * j.f11 + 2.0 * c * s * j.f12 + s * s * j.f22;
  r.f12 = (c * c - s * s) * j.f12 + c * s * (j.f22 - j.f11);
  r.f22 = s * s * j.f11 - 2.0 * c * s * j.f12 + c * c * j.f22;
  return r;
}

enum class FieldKind { closed_form, tabulated, derived };

struct FieldInfo {
  std::string name;
  std::map<std::string, double> params;
  FieldKind kind{FieldKind::closed_form};
  // Constant the field tends to at infinity, when the family defines one.
  std::optional<double> asymptotic_constant;
  // Evaluation is restricted to the open disk of this radius, if set.
  std::optional<double> domain_radius;
  // Evaluation is restricted to this closed rectangle, if set.
  std::optional<std::array<double, 4>> domain_box;
  // Evaluation is restricted to |p| >= this radius, if set.
  std::optional<double> exterior_radius;
};

/// Immutable scalar field f: R^2 -> R with second-order jets. Copies share
/// the evaluator; evaluation is pure and safe to call from several threads.
class ScalarField {
 public:
  using JetFn = std::function<Jet2(Point2)>;

  ScalarField(FieldInfo info, JetFn jet)
      : info_(std::make_shared<const FieldInfo>(std::move(info))),
        jet_(std::make_shared<const JetFn>(std::move(jet))) {}

  const FieldInfo& info() const { return *info_; }
  const std::string& name() const { return info_->name; }

  bool contains(Point2 p) const {
    if (!is_finite(p)) return false;
    if (info_->domain_radius && !(norm(p) < *info_->domain_radius)) return false;
    if (info_->exterior_radius && norm(p) < *info_->exterior_radius) return false;
    if (info_->domain_box) {
      const auto& b = *info_->domain_box;
      if (p.x < b[0] || p.y < b[1] || p.x > b[2] || p.y > b[3]) return false;
    }
    return true;
  }

  Jet2 jet(Point2 p) const {
    if (!contains(p))
      throw DomainError("field '" + info_->name + "': point (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ") outside domain");
    return (*jet_)(p);
  }

  double value(Point2 p) const { return jet(p).f; }

 private:
  std::shared_ptr<const FieldInfo> info_;
  std::shared_ptr<const JetFn> jet_;
};

inline Jet2 eval_jet(const ScalarField& field, Point2 p) { return field.jet(p); }

// Finite-difference steps balancing truncation and round-off.
inline double gradient_step(Point2 p) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, norm(p));
}
inline double hessian_step(Point2 p) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, norm(p));
}

/// Central-difference jet of a value function.
template <typename ValueFn>
Jet2 fd_jet(ValueFn&& value, Point2 p) {
  const double h1 = gradient_step(p);
  const double h2 = hessian_step(p);
  Jet2 j;
  j.f = value(p);
  j.f1 = (value(Point2{p.x + h1, p.y}) - value(Point2{p.x - h1, p.y})) / (2.0 * h1);
  j.f2 = (value(Point2{p.x, p.y + h1}) - value(Point2{p.x, p.y - h1})) / (2.0 * h1);
  const double fxp = value(Point2{p.x + h2, p.y});
  const double fxm = value(Point2{p.x - h2, p.y});
  const double fyp = value(Point2{p.x, p.y + h2});
  const double fym = value(Point2{p.x, p.y - h2});
  j.f11 = (fxp - 2.0 * j.f + fxm) / (h2 * h2);
  j.f22 = (fyp - 2.0 * j.f + fym) / (h2 * h2);
  j.f12 = (value(Point2{p.x + h2, p.y + h2}) - value(Point2{p.x + h2, p.y - h2}) -
           value(Point2{p.x - h2, p.y + h2}) + value(Point2{p.x - h2, p.y - h2})) /
          (4.0 * h2 * h2);
  return j;
}

/// Finite-difference jet of any field, using only its values.
inline Jet2 fd_jet(const ScalarField& field, Point2 p) {
  return fd_jet([&](Point2 q) { return field.value(q); }, p);
}

/// Field sampled on a regular grid over the rectangle [x0,x1] x [y0,y1].
/// Node jets come from second-order differences of the samples (one-sided at
/// the border); jets between nodes are bilinear blends of the node jets.
inline ScalarField make_tabulated(std::string name, std::array<double, 4> box, int nx, int ny,
                                  std::vector<double> values) {
  if (nx < 3 || ny < 3) throw std::invalid_argument("tabulated field needs at least 3x3 nodes");
  if (values.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw std::invalid_argument("tabulated field: value count does not match grid");
  const double hx = (box[2] - box[0]) / (nx - 1);
  const double hy = (box[3] - box[1]) / (ny - 1);
  if (!(hx > 0.0) || !(hy > 0.0)) throw std::invalid_argument("tabulated field: empty box");

  auto at = [&](int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; };
  // d/di with second-order stencils, one-sided at the ends.
  auto diff = [](auto&& g, int i, int n, double h) {
    if (i == 0) return (-3.0 * g(0) + 4.0 * g(1) - g(2)) / (2.0 * h);
    if (i == n - 1) return (3.0 * g(n - 1) - 4.0 * g(n - 2) + g(n - 3)) / (2.0 * h);
    return (g(i + 1) - g(i - 1)) / (2.0 * h);
  };
  std::vector<double> gx(values.size()), gy(values.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      gx[k] = diff([&](int a) { return at(a, j); }, i, nx, hx);
      gy[k] = diff([&](int b) { return at(i, b); }, j, ny, hy);
    }
  auto jets = std::make_shared<std::vector<Jet2>>(values.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * nx + i;
      auto gxa = [&](int a, int b) { return gx[static_cast<std::size_t>(b) * nx + a]; };
      auto gya = [&](int a, int b) { return gy[static_cast<std::size_t>(b) * nx + a]; };
      Jet2& jt = (*jets)[k];
      jt.f = values[k];
      jt.f1 = gx[k];
      jt.f2 = gy[k];
      jt.f11 = diff([&](int a) { return gxa(a, j); }, i, nx, hx);
      jt.f22 = diff([&](int b) { return gya(i, b); }, j, ny, hy);
      jt.f12 = 0.5 * (diff([&](int b) { return gxa(i, b); }, j, ny, hy) +
                      diff([&](int a) { return gya(a, j); }, i, nx, hx));
    }

  FieldInfo info;
  info.name = std::move(name);
  info.kind = FieldKind::tabulated;
  info.domain_box = box;
  return ScalarField(std::move(info), [jets, box, nx, ny, hx, hy](Point2 p) {
    const double s = std::clamp((p.x - box[0]) / hx, 0.0, double(nx - 1));
    const double t = std::clamp((p.y - box[1]) / hy, 0.0, double(ny - 1));
    const int i = std::min(static_cast<int>(s), nx - 2);
    const int j = std::min(static_cast<int>(t), ny - 2);
    const double a = s - i;
    const double b = t - j;
    auto node = [&](int di, int dj) -> const Jet2& {
      return (*jets)[static_cast<std::size_t>(j + dj) * nx + (i + di)];
    };
    return (1 - a) * (1 - b) * node(0, 0) + a * (1 - b) * node(1, 0) + (1 - a) * b * node(0, 1) +
           a * b * node(1, 1);
  });
}

/// Samples a field's values onto a grid, producing a tabulated field.
inline ScalarField tabulate(const ScalarField& field, std::array<double, 4> box, int nx, int ny) {
  std::vector<double> v(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Point2 p{box[0] + (box[2] - box[0]) * i / (nx - 1),
                     box[1] + (box[3] - box[1]) * j / (ny - 1)};
      v[static_cast<std::size_t>(j) * nx + i] = field.value(p);
    }
  return make_tabulated(field.name() + "@table", box, nx, ny, std::move(v));
}

struct DecayRow {
  double r{0.0};
  double sup_deviation{0.0};  // sampled sup over theta of |f - c|
  double sup_r_grad{0.0};     // sampled sup over theta of r |grad f|
};

struct DecayProfile {
  double c{0.0};
  bool c_estimated{false};
  // Variance of f over the largest ring; zero when c comes from metadata.
  double c_variance{0.0};
  std::vector<DecayRow> rows;
};

/// Sampled asymptotic-constancy profile on rings of the given radii. The sup
/// over a uniform theta grid is a lower bound for the true supremum.
inline DecayProfile decay_profile(const ScalarField& field, std::span<const double> radii,
                                  int n_theta = 256) {
  if (radii.empty()) throw std::invalid_argument("decay_profile: no radii");
  if (n_theta < 8) throw std::invalid_argument("decay_profile: n_theta must be >= 8");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("decay_profile: radii must be positive and increasing");
  }
  auto ring_point = [&](double r, int k) { return to_cartesian(r, two_pi * k / n_theta); };

  DecayProfile out;
  if (field.info().asymptotic_constant) {
    out.c = *field.info().asymptotic_constant;
  } else {
    out.c_estimated = true;
    const double r = radii.back();
    std::vector<double> vals(n_theta);
    for (int k = 0; k < n_theta; ++k) vals[k] = field.value(ring_point(r, k));
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= n_theta;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    out.c = mean;
    out.c_variance = var / n_theta;
  }
  for (double r : radii) {
    DecayRow row{r, 0.0, 0.0};
    for (int k = 0; k < n_theta; ++k) {
      const Jet2 j = field.jet(ring_point(r, k));
      row.sup_deviation = std::max(row.sup_deviation, std::abs(j.f - out.c));
      row.sup_r_grad = std::max(row.sup_r_grad, r * std::sqrt(j.grad_norm2()));
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace umbilic
