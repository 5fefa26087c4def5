#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "curvature.hpp"
#include "field.hpp"

namespace umbilic {

// ---------------------------------------------------------------------------
// Inversion p -> p / |p|^2 in R^3.

inline Point3 invert_point(Point3 q) {
  const double n2 = dot(q, q);
  if (!(n2 > 0.0)) throw DomainError("inversion is undefined at the origin");
  return q / n2;
}

/// Differential of the inversion at q applied to w:
///   w / |q|^2 - 2 <q,w> q / |q|^4.
inline Vec3 pushforward_inversion(Point3 q, Vec3 w) {
  const double n2 = dot(q, q);
  if (!(n2 > 0.0)) throw DomainError("inversion is undefined at the origin");
  return w / n2 - (2.0 * dot(q, w) / (n2 * n2)) * q;
}

/// Second differential of the inversion at q, symmetric in (a, b).
inline Vec3 inversion_second_differential(Point3 q, Vec3 a, Vec3 b) {
  const double n2 = dot(q, q);
  if (!(n2 > 0.0)) throw DomainError("inversion is undefined at the origin");
  const double n4 = n2 * n2;
  const double qa = dot(q, a);
  const double qb = dot(q, b);
  return (-2.0 * qb / n4) * a + (-2.0 * qa / n4) * b +
         (-2.0 * dot(a, b) / n4 + 8.0 * qa * qb / (n4 * n2)) * q;
}

// ---------------------------------------------------------------------------
// Local graphs through the origin and their inversions.

struct GraphConditionReport {
  bool precondition_ok{false};
  double f_origin{0.0};     // |f(o)|
  double grad_origin{0.0};  // |grad f(o)|
  bool passes{false};
  double sup_fr{0.0};  // sampled sup of |df/dr| on B_{r0}
};

/// Sufficient test that the inversion of graph(f) over B_{r0} is a graph:
/// sup |df/dr| < 1 on a polar sample grid of B_{r0}.
inline GraphConditionReport graph_condition(const ScalarField& field, double r0,
                                            int n_samples = 64) {
  if (!(r0 > 0.0)) throw std::invalid_argument("graph_condition: r0 must be positive");
  if (n_samples < 2) throw std::invalid_argument("graph_condition: n_samples must be >= 2");
  GraphConditionReport rep;
  const Jet2 o = field.jet({0.0, 0.0});
  rep.f_origin = std::abs(o.f);
  rep.grad_origin = std::sqrt(o.grad_norm2());
  rep.precondition_ok = rep.f_origin <= 1e-10 && rep.grad_origin <= 1e-10;
  const int n_theta = std::max(16, n_samples);
  for (int i = 1; i <= n_samples; ++i) {
    const double r = r0 * i / n_samples;
    for (int k = 0; k < n_theta; ++k) {
      const double th = two_pi * k / n_theta;
      const Point2 p = to_cartesian(r, th);
      if (!field.contains(p)) {
        rep.sup_fr = std::numeric_limits<double>::infinity();
        continue;
      }
      const Jet2 j = field.jet(p);
      const double fr = (p.x * j.f1 + p.y * j.f2) / r;
      rep.sup_fr = std::max(rep.sup_fr, std::abs(fr));
    }
  }
  rep.passes = rep.precondition_ok && rep.sup_fr < 1.0;
  return rep;
}

inline std::string describe(const GraphConditionReport& rep) {
  std::ostringstream os;
  os.precision(6);
  if (!rep.precondition_ok)
    os << "precondition violated: |f(o)| = " << rep.f_origin << ", |grad f(o)| = "
       << rep.grad_origin;
  else
    os << "sup |f_r| = " << rep.sup_fr << (rep.passes ? " < 1" : " >= 1");
  return os.str();
}

struct NormalizedField {
  ScalarField field;
  double scale{1.0};  // surface scaled by this factor
};

/// Rescales graph(f) about the origin so an umbilic at o with positive
/// curvature k becomes curvature 2: f_s(p) = s f(p/s), s = k/2.
inline NormalizedField normalize_at_umbilic(const ScalarField& field) {
  const Jet2 o = field.jet({0.0, 0.0});
  if (std::abs(o.f) > 1e-10 || std::sqrt(o.grad_norm2()) > 1e-10)
    throw CheckFailed("normalize_at_umbilic: f(o) and grad f(o) must vanish");
  if (!is_umbilic(o) || !(o.f11 > 0.0))
    throw CheckFailed("normalize_at_umbilic: origin is not a positively curved umbilic");
  const double k = 0.5 * o.hessian_trace();
  const double s = 0.5 * k;
  FieldInfo info = field.info();
  info.name += "@normalized";
  info.kind = FieldKind::derived;
  if (info.domain_radius) info.domain_radius = *info.domain_radius * s;
  if (info.domain_box) {
    auto b = *info.domain_box;
    for (double& v : b) v *= s;
    info.domain_box = b;
  }
  info.asymptotic_constant.reset();
  ScalarField out(std::move(info), [field, s](Point2 p) {
    const Jet2 j = field.jet(p / s);
    return Jet2{s * j.f, j.f1, j.f2, j.f11 / s, j.f12 / s, j.f22 / s};
  });
  return {std::move(out), s};
}

/// Inversion of graph(f|B_{r0}) written as a graph over the exterior region
/// r_bar >= rbar_min.
struct ExteriorGraph {
  ScalarField source;
  double r0{0.0};
  double rbar_min{0.0};
  // Limit of f_bar at infinity, k/2 for an umbilic of curvature k at o;
  // unset when the origin is not a positively curved umbilic.
  std::optional<double> limit;
};

inline ExteriorGraph invert_local_graph(const ScalarField& field, double r0, int n_samples = 64) {
  const GraphConditionReport rep = graph_condition(field, r0, n_samples);
  if (!rep.passes) throw CheckFailed("invert_local_graph: graph condition fails: " + describe(rep));
  ExteriorGraph g{field, r0, 0.0, std::nullopt};
  // Every theta-ray must reach r0, so take the largest boundary image radius.
  const int n_theta = std::max(64, n_samples);
  for (int k = 0; k < n_theta; ++k) {
    const double f = field.value(to_cartesian(r0, two_pi * k / n_theta));
    g.rbar_min = std::max(g.rbar_min, r0 / (r0 * r0 + f * f));
  }
  const Jet2 o = field.jet({0.0, 0.0});
  if (is_umbilic(o) && o.f11 > 0.0) g.limit = 0.25 * o.hessian_trace();
  return g;
}

struct ExteriorSample {
  double fbar{0.0};
  double fbar_rbar{0.0};
  double fbar_theta{0.0};
  double r{0.0};  // solved preimage radius
};

/// Evaluates the exterior graph at polar (rbar, theta): bisection for r on
/// [1/(2 rbar), min(1/rbar, r0)], then the chain rule through r(rbar, theta).
inline ExteriorSample exterior_eval(const ExteriorGraph& g, double rbar, double theta) {
  if (!(rbar >= g.rbar_min * (1.0 - 1e-14)))
    throw DomainError("exterior_eval: rbar below the exterior graph's domain");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  auto image_radius = [&](double r) {
    const double f = g.source.value({r * c, r * s});
    return r / (r * r + f * f);
  };
  double lo = 0.5 / rbar;
  double hi = std::min(1.0 / rbar, g.r0);
  // image_radius decreases in r on the bracket; equality at an end is a root.
  const double flo = image_radius(lo) - rbar;
  const double fhi = image_radius(hi) - rbar;
  double r;
  if (fhi == 0.0) {
    r = hi;
  } else if (flo == 0.0) {
    r = lo;
  } else {
    if (flo < 0.0 || fhi > 0.0)
      throw ConvergenceError("exterior_eval: root not bracketed (graph condition breached)");
    int iter = 0;
    for (; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = image_radius(mid) - rbar;
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      (fm > 0.0 ? lo : hi) = mid;
    }
    if (iter == 200) throw ConvergenceError("exterior_eval: bisection did not converge");
    r = 0.5 * (lo + hi);
  }

  const Point2 p{r * c, r * s};
  const Jet2 j = g.source.jet(p);
  const double f = j.f;
  const double fr = c * j.f1 + s * j.f2;
  const double ft = -p.y * j.f1 + p.x * j.f2;
  const double d = r * r + f * f;
  // Partials of f_bar = f/d and r_bar = r/d in (r, theta); the common 1/d^2
  // factor cancels in the ratios below.
  const double fbar_r = r * r * fr - 2.0 * r * f - f * f * fr;
  const double rbar_r = -r * r + f * f - 2.0 * r * f * fr;
  const double fbar_t = (r * r - f * f) * ft;
  const double rbar_t = -2.0 * r * f * ft;
  ExteriorSample out;
  out.r = r;
  out.fbar = f / d;
  out.fbar_rbar = fbar_r / rbar_r;
  out.fbar_theta = (fbar_t - fbar_r * rbar_t / rbar_r) / (d * d);
  return out;
}

/// The exterior graph as a scalar field over |p| >= rbar_min. First
/// derivatives come from exterior_eval; second derivatives are central
/// differences of that gradient.
inline ScalarField exterior_field(const ExteriorGraph& g) {
  FieldInfo info;
  info.name = g.source.name() + "@inverted";
  info.kind = FieldKind::derived;
  info.exterior_radius = g.rbar_min;
  info.asymptotic_constant = g.limit;
  auto first = [g](Point2 p, double& f, double& gx, double& gy) {
    const PolarPoint pp = to_polar(p);
    const ExteriorSample e = exterior_eval(g, pp.r, pp.theta);
    const double c = std::cos(pp.theta);
    const double s = std::sin(pp.theta);
    f = e.fbar;
    gx = c * e.fbar_rbar - s * e.fbar_theta / pp.r;
    gy = s * e.fbar_rbar + c * e.fbar_theta / pp.r;
  };
  return ScalarField(std::move(info), [first](Point2 p) {
    Jet2 j;
    first(p, j.f, j.f1, j.f2);
    const double h = hessian_step(p);
    double f, ax, ay, bx, by, cx, cy, dx, dy;
    first({p.x + h, p.y}, f, ax, ay);
    first({p.x - h, p.y}, f, bx, by);
    first({p.x, p.y + h}, f, cx, cy);
    first({p.x, p.y - h}, f, dx, dy);
    j.f11 = (ax - bx) / (2.0 * h);
    j.f22 = (cy - dy) / (2.0 * h);
    j.f12 = 0.5 * ((ay - by) + (cx - dx)) / (2.0 * h);
    return j;
  });
}

// ---------------------------------------------------------------------------
// Parametric patches.

struct PatchJet {
  Point3 X;
  Vec3 Xu, Xv;
  Vec3 Xuu, Xuv, Xvv;
};

/// Regular parametric patch (u, v) -> R^3 with analytic second derivatives.
/// orientation = +1 means the outward normal is Xu x Xv normalized.
struct Patch3 {
  std::function<PatchJet(double, double)> eval;
  std::array<double, 4> domain{0.0, 0.0, 1.0, 1.0};  // u0, v0, u1, v1
  int orientation{1};
};

inline Vec3 patch_normal(const PatchJet& j, int orientation) {
  return (orientation >= 0 ? 1.0 : -1.0) * normalized(cross(j.Xu, j.Xv));
}

struct PatchPrincipal {
  double k1{0.0};  // k1 <= k2, sign convention dn(X) = k X
  double k2{0.0};
  Vec3 d1, d2;                    // unit tangent principal directions
  std::array<double, 2> c1{}, c2{};  // the same directions in (u, v) coordinates
  bool umbilic{false};
};

/// Principal data from the fundamental forms; the Weingarten matrix is
/// A = -I^{-1} II, so that dn(X_j) = sum_k A_kj X_k.
inline std::array<double, 4> weingarten(const PatchJet& j, int orientation) {
  const Vec3 n = patch_normal(j, orientation);
  const double E = dot(j.Xu, j.Xu), F = dot(j.Xu, j.Xv), G = dot(j.Xv, j.Xv);
  const double L = dot(j.Xuu, n), M = dot(j.Xuv, n), N = dot(j.Xvv, n);
  const double det = E * G - F * F;
  // -I^{-1} II, row-major a11 a12 a21 a22
  return {-(G * L - F * M) / det, -(G * M - F * N) / det, -(-F * L + E * M) / det,
          -(-F * M + E * N) / det};
}

inline PatchPrincipal patch_principal(const PatchJet& j, int orientation,
                                      double umbilic_tol = 1e-8) {
  const auto a = weingarten(j, orientation);
  const double H = 0.5 * (a[0] + a[3]);
  const double half = 0.5 * (a[0] - a[3]);
  const double root = std::sqrt(std::max(0.0, half * half + a[1] * a[2]));
  PatchPrincipal out;
  out.k1 = H - root;
  out.k2 = H + root;
  out.umbilic = (out.k2 - out.k1) <= umbilic_tol * std::max(1.0, std::abs(out.k1) + std::abs(out.k2));
  auto vec_for = [&](double other, std::array<double, 2>& coeff) {
    const std::array<double, 2> c1{a[0] - other, a[2]};
    const std::array<double, 2> c2{a[1], a[3] - other};
    const auto& c = std::hypot(c1[0], c1[1]) >= std::hypot(c2[0], c2[1]) ? c1 : c2;
    coeff = c;
    return normalized(c[0] * j.Xu + c[1] * j.Xv);
  };
  if (out.umbilic) {
    out.d1 = normalized(j.Xu);
    out.d2 = normalized(cross(patch_normal(j, orientation), out.d1));
    out.c1 = {1.0, 0.0};
    out.c2 = {0.0, 1.0};
    return out;
  }
  out.d1 = vec_for(out.k2, out.c1);
  out.d2 = vec_for(out.k1, out.c2);
  return out;
}

/// Ellipsoid center + (a sin u cos v, b sin u sin v, c cos u), outward normal;
/// u is kept away from the poles where the chart degenerates.
inline Patch3 ellipsoid_patch(double a, double b, double c, Point3 center = {},
                              double pole_margin = 0.15) {
  Patch3 p;
  p.domain = {pole_margin, 0.0, pi - pole_margin, two_pi};
  p.orientation = 1;
  p.eval = [=](double u, double v) {
    const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
    PatchJet j;
    j.X = center + Vec3{a * su * cv, b * su * sv, c * cu};
    j.Xu = {a * cu * cv, b * cu * sv, -c * su};
    j.Xv = {-a * su * sv, b * su * cv, 0.0};
    j.Xuu = {-a * su * cv, -b * su * sv, -c * cu};
    j.Xuv = {-a * cu * sv, b * cu * cv, 0.0};
    j.Xvv = {-a * su * cv, -b * su * sv, 0.0};
    return j;
  };
  return p;
}

inline Patch3 sphere_patch(double radius, Point3 center = {}) {
  return ellipsoid_patch(radius, radius, radius, center);
}

inline Patch3 plane_patch(double half_width = 1.0) {
  Patch3 p;
  p.domain = {-half_width, -half_width, half_width, half_width};
  p.orientation = 1;
  p.eval = [](double u, double v) {
    return PatchJet{{u, v, 0.0}, {1, 0, 0}, {0, 1, 0}, {}, {}, {}};
  };
  return p;
}

/// Outer parallel patch X + r n. First derivatives use the Weingarten
/// equations; the normal part of the second derivatives is exact
/// (<Y_ij, n> = -<Y_i, n_j>) and the tangential part is a central difference.
inline Patch3 parallel_patch(const Patch3& P, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("parallel_patch: r must be >= 0");
  struct First {
    Point3 Y;
    Vec3 Yu, Yv, n, nu, nv;
  };
  auto first = [P, r](double u, double v) {
    const PatchJet j = P.eval(u, v);
    const auto a = weingarten(j, P.orientation);
    const PatchPrincipal pd = patch_principal(j, P.orientation);
    if (std::abs(1.0 + r * pd.k1) < 1e-12 || std::abs(1.0 + r * pd.k2) < 1e-12)
      throw DomainError("parallel_patch: 1 + r k vanishes, parallel surface is singular");
    First o;
    o.n = patch_normal(j, P.orientation);
    o.nu = a[0] * j.Xu + a[2] * j.Xv;
    o.nv = a[1] * j.Xu + a[3] * j.Xv;
    o.Y = j.X + r * o.n;
    o.Yu = j.Xu + r * o.nu;
    o.Yv = j.Xv + r * o.nv;
    return o;
  };
  Patch3 out;
  out.domain = P.domain;
  out.orientation = P.orientation;
  out.eval = [first](double u, double v) {
    const First c = first(u, v);
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(u) + std::abs(v));
    const First up = first(u + h, v), um = first(u - h, v);
    const First vp = first(u, v + h), vm = first(u, v - h);
    auto with_normal = [&](Vec3 t, double normal_part) {
      return t - dot(t, c.n) * c.n + normal_part * c.n;
    };
    PatchJet j;
    j.X = c.Y;
    j.Xu = c.Yu;
    j.Xv = c.Yv;
    j.Xuu = with_normal((up.Yu - um.Yu) / (2.0 * h), -dot(c.Yu, c.nu));
    j.Xvv = with_normal((vp.Yv - vm.Yv) / (2.0 * h), -dot(c.Yv, c.nv));
    j.Xuv = with_normal(0.5 * ((vp.Yu - vm.Yu) + (up.Yv - um.Yv)) / (2.0 * h),
                        -0.5 * (dot(c.Yu, c.nv) + dot(c.Yv, c.nu)));
    return j;
  };
  return out;
}

/// Inversion of a patch, with analytic second derivatives.
inline Patch3 inverted_patch(const Patch3& P) {
  Patch3 out;
  out.domain = P.domain;
  out.orientation = -P.orientation;  // inversion reverses orientation
  out.eval = [P](double u, double v) {
    const PatchJet j = P.eval(u, v);
    PatchJet m;
    m.X = invert_point(j.X);
    m.Xu = pushforward_inversion(j.X, j.Xu);
    m.Xv = pushforward_inversion(j.X, j.Xv);
    m.Xuu = inversion_second_differential(j.X, j.Xu, j.Xu) + pushforward_inversion(j.X, j.Xuu);
    m.Xuv = inversion_second_differential(j.X, j.Xu, j.Xv) + pushforward_inversion(j.X, j.Xuv);
    m.Xvv = inversion_second_differential(j.X, j.Xv, j.Xv) + pushforward_inversion(j.X, j.Xvv);
    return m;
  };
  return out;
}

struct PreservationReport {
  double max_angle_error{0.0};  // radians
  int usable{0};
  int skipped_umbilic{0};
};

struct InversionTransform {};
struct ParallelTransform {
  double r{0.0};
};

namespace detail {

// Deterministic low-discrepancy samples of the unit square (R2 sequence).
inline std::array<double, 2> r2_sample(int i) {
  constexpr double g = 1.32471795724474602596;  // plastic number
  const double a1 = 1.0 / g;
  const double a2 = 1.0 / (g * g);
  const double s = std::fmod(0.5 + a1 * (i + 1), 1.0);
  const double t = std::fmod(0.5 + a2 * (i + 1), 1.0);
  return {s, t};
}

template <typename MapDirection>
PreservationReport preservation(const Patch3& P, const Patch3& Q, int samples,
                                MapDirection&& map_direction) {
  PreservationReport rep;
  for (int i = 0; i < samples; ++i) {
    const auto [s, t] = r2_sample(i);
    const double u = P.domain[0] + s * (P.domain[2] - P.domain[0]);
    const double v = P.domain[1] + t * (P.domain[3] - P.domain[1]);
    const PatchJet before = P.eval(u, v);
    const PatchPrincipal pd = patch_principal(before, P.orientation);
    if (pd.umbilic) {
      ++rep.skipped_umbilic;
      continue;
    }
    const PatchJet after = Q.eval(u, v);
    const PatchPrincipal qd = patch_principal(after, Q.orientation);
    ++rep.usable;
    for (const auto& [d, c] : {std::pair{pd.d1, pd.c1}, std::pair{pd.d2, pd.c2}}) {
      const Vec3 mapped = map_direction(before, after, d, c);
      const double err = std::min(line_angle(mapped, qd.d1), line_angle(mapped, qd.d2));
      rep.max_angle_error = std::max(rep.max_angle_error, err);
    }
  }
  return rep;
}

}  // namespace detail

/// Maps principal directions through the inversion differential and compares
/// them with the principal directions recomputed on the inverted patch.
inline PreservationReport principal_preservation_check(const Patch3& P, InversionTransform,
                                                       int samples) {
  return detail::preservation(P, inverted_patch(P), samples,
                              [](const PatchJet& before, const PatchJet&, Vec3 d, auto) {
                                return pushforward_inversion(before.X, d);
                              });
}

/// Same check for X -> X + r n, whose differential sends a Xu + b Xv to
/// a Yu + b Yv.
inline PreservationReport principal_preservation_check(const Patch3& P, ParallelTransform t,
                                                       int samples) {
  return detail::preservation(P, parallel_patch(P, t.r), samples,
                              [](const PatchJet&, const PatchJet& after, Vec3,
                                 const std::array<double, 2>& c) {
                                return c[0] * after.Xu + c[1] * after.Xv;
                              });
}

}  // namespace umbilic
