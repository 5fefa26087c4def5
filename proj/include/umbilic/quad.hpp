#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "curvature.hpp"
#include "parallel.hpp"

namespace umbilic {

/// Polar product rule: n_r Gauss-Legendre nodes per unit-width annulus,
/// n_theta uniform angles.
struct QuadScheme {
  int n_r{16};
  int n_theta{128};

  void validate() const {
    if (n_r < 4) throw std::invalid_argument("QuadScheme: n_r must be >= 4");
    if (n_theta < 16 || n_theta % 2 != 0)
      throw std::invalid_argument("QuadScheme: n_theta must be even and >= 16");
  }
  QuadScheme doubled() const { return {2 * n_r, 2 * n_theta}; }
};

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1], ascending
  std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on P_n from Chebyshev guesses.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

struct QuadNode {
  Point2 p;
  double weight;  // includes the polar Jacobian rho
};

/// Nodes of the disk rule over B_r. Annuli have unit width except the last,
/// so disks of different integer radii share their inner nodes.
inline std::vector<QuadNode> disk_nodes(double r, const QuadScheme& s) {
  if (!(r > 0.0)) throw std::invalid_argument("disk_nodes: r must be positive");
  s.validate();
  const GaussRule rule = gauss_legendre(s.n_r);
  const int segments = static_cast<int>(std::ceil(r - 1e-12));
  const double dtheta = two_pi / s.n_theta;
  std::vector<QuadNode> nodes;
  nodes.reserve(static_cast<std::size_t>(segments) * s.n_r * s.n_theta);
  for (int seg = 0; seg < segments; ++seg) {
    const double a = seg;
    const double b = std::min(r, seg + 1.0);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < s.n_r; ++i) {
      const double rho = a + half * (rule.nodes[i] + 1.0);
      const double w = half * rule.weights[i] * rho * dtheta;
      for (int k = 0; k < s.n_theta; ++k) nodes.push_back({to_cartesian(rho, k * dtheta), w});
    }
  }
  return nodes;
}

/// Integral of g over B_r with dx dy, summed pairwise in node order.
template <typename Fn>
double disk_integral(Fn&& g, double r, const QuadScheme& s = {}) {
  const std::vector<QuadNode> nodes = disk_nodes(r, s);
  std::vector<double> terms(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { terms[i] = nodes[i].weight * g(nodes[i].p); });
  return pairwise_sum(terms);
}

/// Outward flux of V through the circle of radius r (uniform trapezoid).
inline double boundary_flux(const PlaneField& V, double r, int n_theta) {
  if (!(r > 0.0)) throw std::invalid_argument("boundary_flux: r must be positive");
  if (n_theta < 1) throw std::invalid_argument("boundary_flux: n_theta must be positive");
  const double dtheta = two_pi / n_theta;
  std::vector<double> terms(static_cast<std::size_t>(n_theta));
  parallel_for(terms.size(), [&](std::size_t k) {
    const double th = static_cast<double>(k) * dtheta;
    const Vec2 n{std::cos(th), std::sin(th)};
    terms[k] = dot(V.eval(r * n).v, n) * r * dtheta;
  });
  return pairwise_sum(terms);
}

/// M(r) = int_0^{2pi} |V(r, theta)| r dtheta, bounding |flux| by Cauchy-Schwarz.
inline double flux_majorant(const PlaneField& V, double r, int n_theta) {
  const double dtheta = two_pi / n_theta;
  std::vector<double> terms(static_cast<std::size_t>(n_theta));
  parallel_for(terms.size(), [&](std::size_t k) {
    terms[k] = norm(V.eval(to_cartesian(r, static_cast<double>(k) * dtheta)).v) * r * dtheta;
  });
  return pairwise_sum(terms);
}

/// |int_{B_r} div V - flux through the boundary|; validates the quadrature.
inline double divergence_consistency(const PlaneField& V, double r, const QuadScheme& s = {}) {
  const double area = disk_integral([&](Point2 p) { return V.eval(p).div; }, r, s);
  return std::abs(area - boundary_flux(V, r, s.n_theta));
}

struct DecayTableRow {
  double r{0.0};
  double I_area{0.0};
  double I_flux{0.0};
  double majorant{0.0};
  std::optional<double> I_stated;  // dk/dtheta form, reported next to the divergence form
};

struct DecayTable {
  std::vector<DecayTableRow> rows;
};

namespace detail {
inline void check_radii(std::span<const double> radii) {
  if (radii.empty()) throw std::invalid_argument("radius ladder is empty");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("radii must be positive and strictly increasing");
}
}  // namespace detail

/// Per radius: area integral of (k_X - k_Y)(1+f_X^2)(1+f_Y^2) dA, the
/// boundary flux of the matching field, and the flux majorant.
inline DecayTable verify_thm2(const ScalarField& field, const Direction& X, const Direction& Y,
                              std::span<const double> radii, const QuadScheme& s = {}) {
  detail::check_radii(radii);
  const PlaneField V = thm2_vectorfield(field, X, Y);
  DecayTable t;
  for (double r : radii) {
    DecayTableRow row;
    row.r = r;
    row.I_area = disk_integral(V.stated, r, s);
    row.I_flux = boundary_flux(V, r, s.n_theta);
    row.majorant = flux_majorant(V, r, s.n_theta);
    t.rows.push_back(row);
  }
  return t;
}

/// Per radius: area integral of the divergence form, boundary flux, majorant,
/// and the area integral of (dk/dtheta)(1+f_X^2) dA as stated.
inline DecayTable verify_thm3(const ScalarField& field, double theta0,
                              std::span<const double> radii, const QuadScheme& s = {}) {
  detail::check_radii(radii);
  const PlaneField V = thm3_vectorfield(field, theta0);
  DecayTable t;
  for (double r : radii) {
    DecayTableRow row;
    row.r = r;
    row.I_area = disk_integral([&](Point2 p) { return V.eval(p).div; }, r, s);
    row.I_flux = boundary_flux(V, r, s.n_theta);
    row.majorant = flux_majorant(V, r, s.n_theta);
    row.I_stated = disk_integral(V.stated, r, s);
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace umbilic
