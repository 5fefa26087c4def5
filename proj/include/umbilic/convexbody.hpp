#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geometry.hpp"
#include "parallel.hpp"
#include "transform.hpp"

namespace umbilic {

/// Convex body given by its support function on the unit sphere,
///   h(u) = c0 + <a, u> + u^T Q u,   Q symmetric.
/// The boundary point with outward normal u is X(u) = h(u) u + grad_S2 h(u).
struct SupportBody {
  std::string name{"body"};
  double c0{1.0};
  Vec3 a{};
  Mat3 Q = Mat3::diag(0, 0, 0);

  double support(Vec3 u) const { return c0 + dot(a, u) + dot(u, Q * u); }
};

inline SupportBody sphere_body(double radius = 1.0) { return {"sphere", radius, {}, Mat3::diag(0, 0, 0)}; }

/// h = 1 + eps (3 u_z^2 - 1); umbilics at the poles.
inline SupportBody axial_body(double eps) {
  return {"axial", 1.0 - eps, {}, Mat3::diag(0.0, 0.0, 3.0 * eps)};
}

/// h = 1 + eps (qx u_x^2 + qy u_y^2 + qz u_z^2).
inline SupportBody triaxial_body(double eps, double qx = 1.0, double qy = 2.0, double qz = 3.0) {
  return {"triaxial", 1.0, {}, Mat3::diag(eps * qx, eps * qy, eps * qz)};
}

/// The body rotated by R: h'(u) = h(R^T u).
inline SupportBody rotated(const SupportBody& B, const Mat3& R) {
  SupportBody out = B;
  out.a = R * B.a;
  out.Q = R * B.Q * R.transposed();
  return out;
}

/// Support-function parallel body h + r, optionally rescaled by 1/(1+r).
inline SupportBody parallel_body(const SupportBody& B, double r, bool rescale = false) {
  if (!(r >= 0.0)) throw std::invalid_argument("parallel_body: r must be >= 0");
  SupportBody out = B;
  out.c0 = B.c0 + r;
  if (rescale) {
    const double s = 1.0 / (1.0 + r);
    out.c0 *= s;
    out.a = s * B.a;
    out.Q = s * B.Q;
  }
  return out;
}

namespace detail {

// Extension G(x) = c0 x + a + 2 Q x - (x^T Q x) x; equals X(u) on |u| = 1.
inline Vec3 support_map(const SupportBody& B, Vec3 x) {
  return B.c0 * x + B.a + 2.0 * (B.Q * x) - dot(x, B.Q * x) * x;
}

inline Vec3 support_map_d1(const SupportBody& B, Vec3 x, Vec3 t) {
  return B.c0 * t + 2.0 * (B.Q * t) - (2.0 * dot(x, B.Q * t)) * x - dot(x, B.Q * x) * t;
}

inline Vec3 support_map_d2(const SupportBody& B, Vec3 x, Vec3 s, Vec3 t) {
  return (-2.0 * dot(s, B.Q * t)) * x - (2.0 * dot(x, B.Q * t)) * s - (2.0 * dot(x, B.Q * s)) * t;
}

inline std::array<Vec3, 2> tangent_frame(Vec3 u) {
  const Vec3 helper = std::abs(u.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  const Vec3 e1 = normalized(cross(helper, u));
  return {e1, cross(u, e1)};
}

// Radii-of-curvature matrix (Hessian of the support function plus h I) in
// the tangent frame (e1, e2) at u.
inline std::array<double, 3> radii_matrix(const SupportBody& B, Vec3 u, Vec3 e1, Vec3 e2) {
  const double base = B.c0 - dot(u, B.Q * u);
  return {base + 2.0 * dot(e1, B.Q * e1), 2.0 * dot(e1, B.Q * e2), base + 2.0 * dot(e2, B.Q * e2)};
}

// Traceless part (m11 - m22, 2 m12); vanishes exactly at umbilics.
inline std::array<double, 2> traceless(const std::array<double, 3>& m) {
  return {m[0] - m[2], 2.0 * m[1]};
}

}  // namespace detail

inline Point3 body_point(const SupportBody& B, Vec3 u) { return detail::support_map(B, u); }

struct Radii {
  double rho1{0.0};  // rho1 <= rho2
  double rho2{0.0};
};

inline Radii radii_unchecked(const SupportBody& B, Vec3 u) {
  const auto [e1, e2] = detail::tangent_frame(u);
  const auto m = detail::radii_matrix(B, u, e1, e2);
  const double mean = 0.5 * (m[0] + m[2]);
  const double half = 0.5 * std::hypot(m[0] - m[2], 2.0 * m[1]);
  return {mean - half, mean + half};
}

/// Principal radii of curvature at the point with outward normal u.
inline Radii radii_of_curvature(const SupportBody& B, Vec3 u) {
  const Radii r = radii_unchecked(B, u);
  if (!(r.rho1 > 0.0))
    throw CheckFailed("convexity violated: radius of curvature " + std::to_string(r.rho1) +
                      " <= 0");
  return r;
}

/// rho2 - rho1 at u.
inline double umbilic_gap(const SupportBody& B, Vec3 u) {
  const Radii r = radii_unchecked(B, u);
  return r.rho2 - r.rho1;
}

/// Unit vector at latitude index i in [0, n] (south to north pole) and
/// longitude index j in [0, 2n).
inline Vec3 latlong_point(int i, int j, int n) {
  const double polar = pi * (1.0 - static_cast<double>(i) / n);  // from +z
  const double az = pi * j / n;
  return {std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az), std::cos(polar)};
}

/// Smallest radius of curvature over a latitude-longitude grid.
inline double min_radius(const SupportBody& B, int n = 48) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < (i == 0 || i == n ? 1 : 2 * n); ++j)
      m = std::min(m, radii_unchecked(B, latlong_point(i, j, n)).rho1);
  return m;
}

struct UmbilicSite {
  Vec3 u;
  double residual{0.0};  // rho2 - rho1
  bool converged{false};
};

namespace detail {

// Newton iteration on the traceless radii matrix in a chart around u0. The
// frame at u(s,t) comes from projecting the fixed frame at u0, so the
// residual is smooth in (s, t).
inline UmbilicSite refine_umbilic(const SupportBody& B, Vec3 u0, double tol) {
  const auto [f1, f2] = tangent_frame(u0);
  auto chart = [&](double s, double t) { return normalized(u0 + s * f1 + t * f2); };
  auto residual = [&](double s, double t) {
    const Vec3 u = chart(s, t);
    const Vec3 e1 = normalized(f1 - dot(f1, u) * u);
    const Vec3 e2 = cross(u, e1);
    return traceless(radii_matrix(B, u, e1, e2));
  };
  double s = 0.0, t = 0.0;
  auto r = residual(s, t);
  auto size = [](const std::array<double, 2>& v) { return std::hypot(v[0], v[1]); };
  const double h = 1e-7;
  for (int iter = 0; iter < 200; ++iter) {
    const auto rsp = residual(s + h, t), rsm = residual(s - h, t);
    const auto rtp = residual(s, t + h), rtm = residual(s, t - h);
    const double j11 = (rsp[0] - rsm[0]) / (2 * h), j21 = (rsp[1] - rsm[1]) / (2 * h);
    const double j12 = (rtp[0] - rtm[0]) / (2 * h), j22 = (rtp[1] - rtm[1]) / (2 * h);
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) break;
    double ds = -(j22 * r[0] - j12 * r[1]) / det;
    double dt = -(-j21 * r[0] + j11 * r[1]) / det;
    // Damping: halve until the residual does not grow.
    double step = 1.0;
    auto trial = residual(s + ds, t + dt);
    while (size(trial) > size(r) && step > 1e-6) {
      step *= 0.5;
      trial = residual(s + step * ds, t + step * dt);
    }
    s += step * ds;
    t += step * dt;
    r = trial;
    if (std::hypot(step * ds, step * dt) < 1e-15) break;
  }
  const Vec3 u = chart(s, t);
  const double gap = umbilic_gap(B, u);
  return {u, gap, gap < tol};
}

}  // namespace detail

/// All umbilics found by a latitude-longitude scan of rho2 - rho1 followed
/// by Newton refinement of each grid local minimum. Sites closer than 1e-6
/// are merged. A body whose every grid sample is umbilic yields one site,
/// -e_z. Sorted by residual.
inline std::vector<UmbilicSite> find_umbilics(const SupportBody& B, int grid_n = 48,
                                              double refine_tol = 1e-8, int max_candidates = 32) {
  if (grid_n < 4) throw std::invalid_argument("find_umbilics: grid_n must be >= 4");
  if (min_radius(B, grid_n) <= 0.0) throw CheckFailed("find_umbilics: body is not convex");
  const int n = grid_n;
  const int m = 2 * n;
  auto index = [&](int i, int j) { return static_cast<std::size_t>(i) * m + ((j % m) + m) % m; };
  std::vector<double> gap(static_cast<std::size_t>(n + 1) * m);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < m; ++j) gap[index(i, j)] = umbilic_gap(B, latlong_point(i, j, n));

  if (*std::max_element(gap.begin(), gap.end()) < refine_tol)
    return {UmbilicSite{{0.0, 0.0, -1.0}, umbilic_gap(B, {0.0, 0.0, -1.0}), true}};

  struct Candidate {
    double value;
    int i, j;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i <= n; ++i) {
    const int jcount = (i == 0 || i == n) ? 1 : m;
    for (int j = 0; j < jcount; ++j) {
      const double v = gap[index(i, j)];
      bool is_min = true;
      if (i == 0 || i == n) {
        const int ring = i == 0 ? 1 : n - 1;
        for (int jj = 0; jj < m && is_min; ++jj) is_min = v <= gap[index(ring, jj)];
      } else {
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1 && is_min; ++dj) {
            if (di == 0 && dj == 0) continue;
            const int ii = i + di;
            if (ii == 0 || ii == n) {
              is_min = v <= gap[index(ii, 0)];
            } else {
              is_min = v <= gap[index(ii, j + dj)];
            }
          }
      }
      if (is_min) cands.push_back({v, i, j});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  if (static_cast<int>(cands.size()) > max_candidates) cands.resize(max_candidates);

  std::vector<UmbilicSite> refined(cands.size());
  parallel_for(cands.size(), [&](std::size_t k) {
    refined[k] = detail::refine_umbilic(B, latlong_point(cands[k].i, cands[k].j, n), refine_tol);
  });
  std::vector<UmbilicSite> sites;
  for (const UmbilicSite& s : refined) {
    bool duplicate = false;
    for (UmbilicSite& kept : sites)
      if (norm(kept.u - s.u) < 1e-6) {
        duplicate = true;
        if (s.residual < kept.residual) kept = s;
      }
    if (!duplicate) sites.push_back(s);
  }
  std::stable_sort(sites.begin(), sites.end(), [](const UmbilicSite& a, const UmbilicSite& b) {
    return a.residual < b.residual;
  });
  return sites;
}

/// Best umbilic site; `converged` is false when no site reaches refine_tol.
inline UmbilicSite find_umbilic(const SupportBody& B, int grid_n = 48, double refine_tol = 1e-8) {
  const auto sites = find_umbilics(B, grid_n, refine_tol);
  if (sites.empty()) throw ConvergenceError("find_umbilic: no local minimum found");
  return sites.front();
}

/// Rigid motion x -> R (x - X(u*)) taking the point with normal u* to the
/// origin with outward normal -e_z.
struct Pose {
  Mat3 R;
  Vec3 translation;  // -R X(u*)
  Vec3 apply(Vec3 x) const { return R * x + translation; }
};

inline Pose pose_for(const SupportBody& B, Vec3 u_star) {
  const Mat3 R = rotation_between(u_star, {0.0, 0.0, -1.0});
  return {R, -(R * body_point(B, u_star))};
}

/// Posed body near the umbilic as a patch over the gnomonic chart of the
/// normal hemisphere around -e_z: normal w(s,t) = (s, t, -1)/|(s, t, -1)|.
inline Patch3 pose_at_umbilic(const SupportBody& B, Vec3 u_star, double chart_half_width = 1.0) {
  const Pose pose = pose_for(B, u_star);
  const SupportBody posed = rotated(B, pose.R);
  const Vec3 anchor = body_point(posed, {0.0, 0.0, -1.0});
  auto eval = [posed, anchor](double s, double t) {
    const Vec3 v{s, t, -1.0};
    const double rho2 = 1.0 + s * s + t * t;
    const double rho = std::sqrt(rho2);
    const double r3 = rho * rho2;
    const double r5 = r3 * rho2;
    const Vec3 es{1, 0, 0}, et{0, 1, 0};
    const Vec3 w = v / rho;
    const Vec3 ws = es / rho - (s / r3) * v;
    const Vec3 wt = et / rho - (t / r3) * v;
    const Vec3 wss = (-2.0 * s / r3) * es - v / r3 + (3.0 * s * s / r5) * v;
    const Vec3 wtt = (-2.0 * t / r3) * et - v / r3 + (3.0 * t * t / r5) * v;
    const Vec3 wst = (-t / r3) * es - (s / r3) * et + (3.0 * s * t / r5) * v;
    PatchJet j;
    j.X = detail::support_map(posed, w) - anchor;
    j.Xu = detail::support_map_d1(posed, w, ws);
    j.Xv = detail::support_map_d1(posed, w, wt);
    j.Xuu = detail::support_map_d2(posed, w, ws, ws) + detail::support_map_d1(posed, w, wss);
    j.Xuv = detail::support_map_d2(posed, w, ws, wt) + detail::support_map_d1(posed, w, wst);
    j.Xvv = detail::support_map_d2(posed, w, wt, wt) + detail::support_map_d1(posed, w, wtt);
    return j;
  };
  Patch3 p;
  p.domain = {-chart_half_width, -chart_half_width, chart_half_width, chart_half_width};
  p.eval = eval;
  // Outward normal is w; pick the orientation of Xu x Xv that matches it.
  const PatchJet o = eval(0.0, 0.0);
  p.orientation = dot(cross(o.Xu, o.Xv), Vec3{0, 0, -1}) >= 0.0 ? 1 : -1;
  return p;
}

struct PipelineRow {
  double rbar{0.0};
  double sup_height_dev{0.0};  // sup over angles of |f_bar - c|
  double sup_rbar_slope{0.0};  // sup over angles of rbar * |grad f_bar|
};

struct PipelineReport {
  UmbilicSite umbilic;
  Pose pose;
  double offset_r{0.0};
  double scale{1.0};        // rescale factor 1/(1+r) applied after the offset
  double rho_umbilic{0.0};  // radius of curvature at the umbilic, scaled body
  double c{0.0};            // limit height 1/(2 rho_umbilic)
  bool graph_check{false};
  double min_vertical_normal{0.0};  // min |n_z| of the inverted surface over the check grid
  int angular_samples{0};
  std::vector<PipelineRow> rows;
};

struct PipelineOptions {
  int grid_n{48};
  double refine_tol{1e-8};
  int angular_samples{512};
  int check_polar{192};
  int check_azimuthal{96};
};

namespace detail {

// Inverted point and normal of the posed body (umbilic normal -e_z at the
// origin) at posed normal w = (sin b cos p, sin b sin p, -cos b). The offset
// from the umbilic is built from w - w* without cancellation.
struct InvertedSample {
  double rbar, height, slope, normal_z;
};

inline InvertedSample inverted_sample(const SupportBody& posed, double beta, double phi) {
  const double sb = std::sin(beta), cb = std::cos(beta);
  const double shalf = std::sin(0.5 * beta);
  const Vec3 w{sb * std::cos(phi), sb * std::sin(phi), -cb};
  const Vec3 ws{0.0, 0.0, -1.0};
  const Vec3 delta{w.x, w.y, 2.0 * shalf * shalf};  // w - w*
  const double qw = dot(w, posed.Q * w);
  const double dq = dot(delta, posed.Q * (w + ws));  // q(w) - q(w*)
  const Vec3 Z = posed.c0 * delta + 2.0 * (posed.Q * delta) - qw * delta - dq * ws;
  const double z2 = dot(Z, Z);
  const Vec3 zhat = Z / std::sqrt(z2);
  // The inversion maps normals by reflection in the plane orthogonal to Z.
  const Vec3 n = w - (2.0 * dot(w, zhat)) * zhat;
  InvertedSample s;
  s.rbar = std::hypot(Z.x, Z.y) / z2;
  s.height = Z.z / z2;
  s.normal_z = n.z;
  s.slope = std::hypot(n.x, n.y) / std::abs(n.z);
  return s;
}

}  // namespace detail

struct GraphCheck {
  bool ok{false};
  double min_abs_normal_z{0.0};
};

/// Vertical-line test of the inverted surface of a posed body (umbilic normal
/// -e_z at the origin): the normal must keep one strict sign of its vertical
/// component over a polar x azimuthal grid of normals.
inline GraphCheck inverted_graph_check(const SupportBody& posed, int n_polar = 192,
                                       int n_azimuthal = 96) {
  if (n_polar < 2 || n_azimuthal < 1) throw std::invalid_argument("graph check grid too small");
  GraphCheck out{true, std::numeric_limits<double>::infinity()};
  double sign = 0.0;
  for (int i = 1; i < n_polar; ++i) {
    const double beta = pi * i / n_polar;
    for (int k = 0; k < n_azimuthal; ++k) {
      const auto s = detail::inverted_sample(posed, beta, two_pi * k / n_azimuthal);
      out.min_abs_normal_z = std::min(out.min_abs_normal_z, std::abs(s.normal_z));
      const double sg = s.normal_z > 0 ? 1.0 : (s.normal_z < 0 ? -1.0 : 0.0);
      if (sign == 0.0) sign = sg;
      if (sg == 0.0 || sg != sign) out.ok = false;
    }
  }
  return out;
}

/// Offset used when none is given: ten times the largest support value.
inline double default_offset(const SupportBody& B, int n = 48) {
  double m = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j < (i == 0 || i == n ? 1 : 2 * n); ++j)
      m = std::max(m, B.support(latlong_point(i, j, n)));
  return 10.0 * m;
}

/// Inverts the offset, rescaled body about an umbilic and measures how fast
/// the resulting graph approaches a constant height: per target rbar, the
/// sup over angular samples of |f_bar - c| and rbar * slope.
inline PipelineReport theorem1_pipeline(const SupportBody& B, double offset_r,
                                        std::span<const double> radii,
                                        const PipelineOptions& opt = {}) {
  if (!(offset_r >= 0.0)) throw std::invalid_argument("pipeline: offset must be >= 0");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("pipeline: radii must be positive and increasing");
  if (min_radius(B, opt.grid_n) <= 0.0) throw CheckFailed("pipeline: body is not convex");

  PipelineReport rep;
  rep.umbilic = find_umbilic(B, opt.grid_n, opt.refine_tol);
  if (!rep.umbilic.converged)
    throw ConvergenceError("pipeline: no umbilic reached tolerance; best residual " +
                           std::to_string(rep.umbilic.residual));
  rep.offset_r = offset_r;
  rep.scale = 1.0 / (1.0 + offset_r);
  const SupportBody scaled = parallel_body(B, offset_r, true);
  rep.pose = pose_for(scaled, rep.umbilic.u);
  const SupportBody posed = rotated(scaled, rep.pose.R);
  const Radii rho = radii_of_curvature(posed, {0.0, 0.0, -1.0});
  rep.rho_umbilic = 0.5 * (rho.rho1 + rho.rho2);
  rep.c = 0.5 / rep.rho_umbilic;
  rep.angular_samples = opt.angular_samples;

  const GraphCheck check = inverted_graph_check(posed, opt.check_polar, opt.check_azimuthal);
  rep.graph_check = check.ok;
  rep.min_vertical_normal = check.min_abs_normal_z;

  const int n_ang = opt.angular_samples;
  for (double target : radii) {
    std::vector<PipelineRow> per(static_cast<std::size_t>(n_ang));
    parallel_for(per.size(), [&](std::size_t k) {
      const double phi = two_pi * static_cast<double>(k) / n_ang;
      // rbar ~ 1/(rho beta) near the umbilic and decreases in beta there.
      double lo = 0.25 / (rep.rho_umbilic * target);
      double hi = 4.0 / (rep.rho_umbilic * target);
      hi = std::min(hi, 0.5 * pi);
      auto rb = [&](double beta) { return detail::inverted_sample(posed, beta, phi).rbar; };
      for (int e = 0; e < 60 && rb(lo) < target; ++e) lo *= 0.5;
      if (rb(lo) < target || rb(hi) > target)
        throw ConvergenceError("pipeline: cannot bracket rbar = " + std::to_string(target));
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (rb(mid) > target ? lo : hi) = mid;
      }
      const auto s = detail::inverted_sample(posed, 0.5 * (lo + hi), phi);
      per[k] = {s.rbar, std::abs(s.height - rep.c), s.rbar * s.slope};
    });
    PipelineRow row{target, 0.0, 0.0};
    for (const auto& p : per) {
      row.sup_height_dev = std::max(row.sup_height_dev, p.sup_height_dev);
      row.sup_rbar_slope = std::max(row.sup_rbar_slope, p.sup_rbar_slope);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

/// Parses `sphere[:R=..]`, `axial[:eps=..]`, `triaxial[:eps=..,qx=..,qy=..,qz=..]`
/// or `quadratic:c0=..,ax=..,ay=..,az=..,qxx=..,qxy=..,qxz=..,qyy=..,qyz=..,qzz=..`.
inline SupportBody parse_body_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::map<std::string, double> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument("body parameter '" + std::string(item) + "' lacks '='");
      const std::string value(item.substr(eq + 1));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || value.empty() || !std::isfinite(v))
        throw std::invalid_argument("body parameter: bad value '" + value + "'");
      kv[std::string(item.substr(0, eq))] = v;
    }
  }
  auto take = [&](const std::string& key, double def) {
    const auto it = kv.find(key);
    if (it == kv.end()) return def;
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  SupportBody b;
  if (name == "sphere") {
    b = sphere_body(take("R", 1.0));
  } else if (name == "axial") {
    b = axial_body(take("eps", 0.05));
  } else if (name == "triaxial") {
    const double eps = take("eps", 0.05);
    const double qx = take("qx", 1.0), qy = take("qy", 2.0), qz = take("qz", 3.0);
    b = triaxial_body(eps, qx, qy, qz);
  } else if (name == "quadratic") {
    b.name = "quadratic";
    b.c0 = take("c0", 1.0);
    b.a = {take("ax", 0.0), take("ay", 0.0), take("az", 0.0)};
    const double qxx = take("qxx", 0.0), qxy = take("qxy", 0.0), qxz = take("qxz", 0.0);
    const double qyy = take("qyy", 0.0), qyz = take("qyz", 0.0), qzz = take("qzz", 0.0);
    b.Q = Mat3{{qxx, qxy, qxz, qxy, qyy, qyz, qxz, qyz, qzz}};
  } else {
    throw std::invalid_argument("unknown body '" + name + "'");
  }
  if (!kv.empty()) throw std::invalid_argument("body '" + name + "': unknown parameter '" + kv.begin()->first + "'");
  return b;
}

}  // namespace umbilic
