#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curvature.hpp"
#include "parallel.hpp"

namespace umbilic {

struct Region {
  double x0{-1.0}, y0{-1.0}, x1{1.0}, y1{1.0};

  void validate() const {
    if (!(x1 > x0) || !(y1 > y0) || !std::isfinite(x0) || !std::isfinite(x1) ||
        !std::isfinite(y0) || !std::isfinite(y1))
      throw std::invalid_argument("region must satisfy x0 < x1 and y0 < y1");
  }
};

enum class Residual { delta_k, dk_dtheta, P1, P2, D };

inline const char* to_string(Residual r) {
  switch (r) {
    case Residual::delta_k: return "DeltaK";
    case Residual::dk_dtheta: return "DkDtheta";
    case Residual::P1: return "P1";
    case Residual::P2: return "P2";
    case Residual::D: return "D";
  }
  return "?";
}

inline Residual parse_residual(std::string_view s) {
  for (Residual r : {Residual::delta_k, Residual::dk_dtheta, Residual::P1, Residual::P2, Residual::D})
    if (s == to_string(r)) return r;
  throw std::invalid_argument("unknown residual '" + std::string(s) +
                              "' (DeltaK, DkDtheta, P1, P2, D)");
}

struct ResidualParams {
  Direction X{0.0};
  Direction Y{0.5 * pi};
  double theta0{0.0};
};

/// Raw residual value at p (no (1+q) normalization).
inline double residual_at(const Jet2& j, Residual r, const ResidualParams& prm) {
  switch (r) {
    case Residual::delta_k: return normal_curvature(j, prm.X) - normal_curvature(j, prm.Y);
    case Residual::dk_dtheta: return dk_dtheta(j, prm.theta0);
    case Residual::P1: return umbilic_residuals(j).P1;
    case Residual::P2: return umbilic_residuals(j).P2;
    case Residual::D: return umbilic_residuals(j).D;
  }
  return 0.0;
}

inline double residual_at(const ScalarField& f, Point2 p, Residual r, const ResidualParams& prm) {
  return residual_at(f.jet(p), r, prm);
}

/// Samples on an n x m lattice including the region corners; value(i, j)
/// sits at x = x0 + i dx, y = y0 + j dy.
struct Grid {
  Region region;
  int n{0};
  int m{0};
  std::string quantity;
  std::vector<double> values;  // row-major in j

  double dx() const { return (region.x1 - region.x0) / (n - 1); }
  double dy() const { return (region.y1 - region.y0) / (m - 1); }
  Point2 point(int i, int j) const {
    // Last node pinned to the region edge.
    const double x = i == n - 1 ? region.x1 : region.x0 + i * dx();
    const double y = j == m - 1 ? region.y1 : region.y0 + j * dy();
    return {x, y};
  }
  double value(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
};

template <typename Fn>
Grid sample_grid(Fn&& fn, const Region& region, int n, int m, std::string quantity = "value") {
  region.validate();
  if (n < 2 || m < 2) throw std::invalid_argument("grid needs n, m >= 2");
  Grid g{region, n, m, std::move(quantity), {}};
  g.values.resize(static_cast<std::size_t>(n) * m);
  parallel_for(g.values.size(), [&](std::size_t k) {
    const int i = static_cast<int>(k % n);
    const int j = static_cast<int>(k / n);
    const double v = fn(g.point(i, j));
    if (!std::isfinite(v)) throw DomainError("grid sample is not finite");
    g.values[k] = v;
  });
  return g;
}

inline Grid grid_field(const ScalarField& field, Residual residual, const Region& region, int n,
                       int m, const ResidualParams& prm = {}) {
  return sample_grid([&](Point2 p) { return residual_at(field, p, residual, prm); }, region, n, m,
                     to_string(residual));
}

struct Polyline {
  std::vector<Point2> points;
  bool closed{false};
};

struct ContourSet {
  std::vector<Polyline> lines;
};

namespace detail {

// Edge keys: horizontal edge (i,j)-(i+1,j) -> 2*(j*n+i), vertical edge
// (i,j)-(i,j+1) -> 2*(j*n+i)+1.
struct ContourSegment {
  long a, b;
};

}  // namespace detail

/// Marching squares on the `level` set. A sample equal to the level counts as
/// above it. Saddle cells are split according to the mean of the four corners.
/// Segments are linked into polylines in cell order, open lines first.
inline ContourSet contours(const Grid& g, double level = 0.0) {
  const int n = g.n, m = g.m;
  auto above = [&](int i, int j) { return g.value(i, j) >= level; };
  auto hkey = [&](int i, int j) { return 2L * (static_cast<long>(j) * n + i); };
  auto vkey = [&](int i, int j) { return 2L * (static_cast<long>(j) * n + i) + 1; };

  std::vector<detail::ContourSegment> segs;
  for (int j = 0; j + 1 < m; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const int c = (above(i, j) ? 1 : 0) | (above(i + 1, j) ? 2 : 0) |
                    (above(i + 1, j + 1) ? 4 : 0) | (above(i, j + 1) ? 8 : 0);
      if (c == 0 || c == 15) continue;
      const long bottom = hkey(i, j), top = hkey(i, j + 1);
      const long left = vkey(i, j), right = vkey(i + 1, j);
      auto add = [&](long a, long b) { segs.push_back({a, b}); };
      switch (c) {
        case 1: case 14: add(left, bottom); break;
        case 2: case 13: add(bottom, right); break;
        case 3: case 12: add(left, right); break;
        case 4: case 11: add(right, top); break;
        case 6: case 9: add(bottom, top); break;
        case 7: case 8: add(left, top); break;
        case 5: case 10: {
          const double center =
              0.25 * (g.value(i, j) + g.value(i + 1, j) + g.value(i + 1, j + 1) + g.value(i, j + 1));
          const bool center_above = center >= level;
          // Corners 0 and 2 share a side of the level in case 5.
          if ((c == 5) == center_above) {
            add(left, top);
            add(bottom, right);
          } else {
            add(left, bottom);
            add(right, top);
          }
          break;
        }
        default: break;
      }
    }

  auto edge_point = [&](long key) {
    const long node = key / 2;
    const int i = static_cast<int>(node % n);
    const int j = static_cast<int>(node / n);
    const Point2 p = g.point(i, j);
    const Point2 q = (key % 2 == 0) ? g.point(i + 1, j) : g.point(i, j + 1);
    const double a = g.value(i, j);
    const double b = (key % 2 == 0) ? g.value(i + 1, j) : g.value(i, j + 1);
    const double t = (a == b) ? 0.5 : std::clamp((level - a) / (b - a), 0.0, 1.0);
    return p + t * (q - p);
  };

  std::map<long, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    incident[segs[s].a].push_back(s);
    incident[segs[s].b].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  ContourSet out;
  auto trace = [&](std::size_t start, long from) {
    Polyline line;
    line.points.push_back(edge_point(from));
    std::size_t s = start;
    long at = from;
    while (true) {
      used[s] = true;
      const long next = segs[s].a == at ? segs[s].b : segs[s].a;
      line.points.push_back(edge_point(next));
      at = next;
      std::optional<std::size_t> follow;
      for (std::size_t t : incident[at])
        if (!used[t]) {
          follow = t;
          break;
        }
      if (!follow) break;
      s = *follow;
    }
    if (at == from && line.points.size() > 2) {
      line.closed = true;
      line.points.pop_back();
    }
    out.lines.push_back(std::move(line));
  };
  // Open lines start at an edge on the grid boundary (one incident segment).
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    if (incident[segs[s].a].size() == 1) trace(s, segs[s].a);
    else if (incident[segs[s].b].size() == 1) trace(s, segs[s].b);
  }
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) trace(s, segs[s].a);
  return out;
}

struct SignWitness {
  Point2 positive;
  Point2 negative;
  double max_value;
  double min_value;
};

/// argmax and argmin of the samples when they have opposite strict signs.
inline std::optional<SignWitness> sign_witness(const Grid& g) {
  std::size_t imax = 0, imin = 0;
  for (std::size_t k = 1; k < g.values.size(); ++k) {
    if (g.values[k] > g.values[imax]) imax = k;
    if (g.values[k] < g.values[imin]) imin = k;
  }
  if (!(g.values[imax] > 0.0 && g.values[imin] < 0.0)) return std::nullopt;
  auto pt = [&](std::size_t k) {
    return g.point(static_cast<int>(k % g.n), static_cast<int>(k / g.n));
  };
  return SignWitness{pt(imax), pt(imin), g.values[imax], g.values[imin]};
}

struct UmbilicCandidate {
  Point2 p;
  double D_normalized{0.0};  // D / (1+q)^3
  double P_normalized{0.0};  // max(|P1|, |P2|) / (1+q)^{3/2}
  bool refined{false};       // false: coarse grid minimum, Newton did not converge
};

struct UmbilicSearchResult {
  std::vector<UmbilicCandidate> points;
  bool totally_umbilic_region{false};  // more than half of the samples below tol
  double fraction_below{0.0};
};

namespace detail {

struct NewtonResult {
  Point2 p;
  bool converged;
};

// Damped Newton on (P1, P2) with a central-difference Jacobian.
inline NewtonResult newton_umbilic(const ScalarField& f, Point2 p0, const Region& region,
                                   double residual_tol) {
  auto res = [&](Point2 p) {
    const UmbilicResiduals r = umbilic_residuals(f.jet(p));
    return Vec2{r.P1, r.P2};
  };
  auto inside = [&](Point2 p) {
    return p.x >= region.x0 && p.x <= region.x1 && p.y >= region.y0 && p.y <= region.y1 &&
           f.contains(p);
  };
  Point2 p = p0;
  Vec2 r = res(p);
  for (int iter = 0; iter < 200; ++iter) {
    if (r.x == 0.0 && r.y == 0.0) break;
    const double h = 1e-6 * std::max(1.0, norm(p));
    const Vec2 rxp = res({p.x + h, p.y}), rxm = res({p.x - h, p.y});
    const Vec2 ryp = res({p.x, p.y + h}), rym = res({p.x, p.y - h});
    const double j11 = (rxp.x - rxm.x) / (2 * h), j21 = (rxp.y - rxm.y) / (2 * h);
    const double j12 = (ryp.x - rym.x) / (2 * h), j22 = (ryp.y - rym.y) / (2 * h);
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) break;
    const Vec2 step{-(j22 * r.x - j12 * r.y) / det, -(-j21 * r.x + j11 * r.y) / det};
    double t = 1.0;
    Point2 trial = p + step;
    bool ok = false;
    for (int k = 0; k < 40; ++k) {
      if (inside(trial)) {
        const Vec2 rt = res(trial);
        if (norm(rt) <= norm(r)) {
          p = trial;
          r = rt;
          ok = true;
          break;
        }
      }
      t *= 0.5;
      trial = p + t * step;
    }
    if (!ok || t * norm(step) < 1e-12) break;
  }
  const Jet2 j = f.jet(p);
  return {p, normalized_umbilic_residual(j) < residual_tol};
}

}  // namespace detail

/// Umbilic candidates: grid local minima of D/(1+q)^3, refined by damped
/// Newton on (P1, P2). A refined point is kept when its normalized D is below
/// tol; an unrefined grid minimum already below tol is kept as a coarse
/// minimum. Points closer than 1e-6 are merged.
inline UmbilicSearchResult umbilic_search(const ScalarField& field, const Region& region, int n,
                                          double tol = default_umbilic_tolerance,
                                          int max_candidates = 64) {
  const Grid g = sample_grid([&](Point2 p) { return normalized_discriminant(field.jet(p)); },
                             region, n, n, "D_normalized");
  UmbilicSearchResult out;
  const auto below = std::count_if(g.values.begin(), g.values.end(),
                                   [&](double v) { return v < tol; });
  out.fraction_below = static_cast<double>(below) / static_cast<double>(g.values.size());
  if (out.fraction_below > 0.5) {
    out.totally_umbilic_region = true;
    return out;
  }

  struct Cand {
    double v;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double v = g.value(i, j);
      bool is_min = true, strict = false;
      for (int dj = -1; dj <= 1 && is_min; ++dj)
        for (int di = -1; di <= 1 && is_min; ++di) {
          const int ii = i + di, jj = j + dj;
          if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= n || jj >= n) continue;
          const double w = g.value(ii, jj);
          if (w < v) is_min = false;
          if (w > v) strict = true;
        }
      if (is_min && (strict || v < tol)) cands.push_back({v, i, j});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
  if (static_cast<int>(cands.size()) > max_candidates) cands.resize(max_candidates);

  std::vector<std::optional<UmbilicCandidate>> found(cands.size());
  parallel_for(cands.size(), [&](std::size_t k) {
    const Point2 start = g.point(cands[k].i, cands[k].j);
    const auto nr = detail::newton_umbilic(field, start, region, 1e-8);
    const Jet2 j = field.jet(nr.p);
    const double dn = normalized_discriminant(j);
    if (nr.converged && dn < tol) {
      found[k] = UmbilicCandidate{nr.p, dn, normalized_umbilic_residual(j), true};
    } else if (cands[k].v < tol) {
      const Jet2 j0 = field.jet(start);
      found[k] = UmbilicCandidate{start, cands[k].v, normalized_umbilic_residual(j0), false};
    }
  });
  for (const auto& c : found) {
    if (!c) continue;
    bool dup = false;
    for (auto& kept : out.points)
      if (norm(kept.p - c->p) < 1e-6) {
        dup = true;
        if (c->refined && (!kept.refined || c->D_normalized < kept.D_normalized)) kept = *c;
      }
    if (!dup) out.points.push_back(*c);
  }
  return out;
}

struct FloorReport {
  double floor{0.0};  // min over samples of max(|P1|, |P2|) / (1+q)^{3/2}
  Point2 argmin;
};

/// Lower envelope of the normalized umbilic residual over an n x n grid. A
/// positive floor is evidence, not proof, that the region has no umbilic.
inline FloorReport umbilic_free_floor(const ScalarField& field, const Region& region, int n) {
  const Grid g = sample_grid([&](Point2 p) { return normalized_umbilic_residual(field.jet(p)); },
                             region, n, n, "P_normalized");
  std::size_t best = 0;
  for (std::size_t k = 1; k < g.values.size(); ++k)
    if (g.values[k] < g.values[best]) best = k;
  return {g.values[best], g.point(static_cast<int>(best % n), static_cast<int>(best / n))};
}

}  // namespace umbilic
