#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "field.hpp"

namespace umbilic {

enum class Expectation { yes, no, unknown };

inline const char* to_string(Expectation e) {
  switch (e) {
    case Expectation::yes: return "yes";
    case Expectation::no: return "no";
    default: return "unknown";
  }
}

/// Registry entry describing one named field family.
struct FamilySpec {
  std::string name;
  std::string formula;
  std::map<std::string, double> defaults;
  std::string domain;
  Expectation asymptotically_constant{Expectation::unknown};
  Expectation umbilic_free{Expectation::unknown};
  Expectation positively_curved{Expectation::unknown};
  bool reference_family{true};
};

namespace detail {

struct Profile {
  double g, dg, d2g;
};

using ProfileFn = Profile (*)(double);

inline Profile profile_zero(double) { return {0, 0, 0}; }

inline Profile profile_sqrt(double t) {
  const double s = std::sqrt(1.0 + t * t);
  return {s, t / s, 1.0 / (s * s * s)};
}

inline Profile profile_sqrt_lin(double t) {
  const Profile p = profile_sqrt(t);
  return {p.g + t, p.dg + 1.0, p.d2g};
}

inline Profile profile_exp(double t) {
  const double e = std::exp(t);
  return {e, e, e};
}

inline Profile profile_softplus(double t) {
  // log(1 + e^t) and the logistic function, both evaluated stably.
  const double g = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  const double sig = t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  return {g, sig, sig * (1.0 - sig)};
}

// Profiles admissible for the separable family: g' never zero, g'' > 0.
inline const std::vector<std::pair<std::string, ProfileFn>>& separable_profiles() {
  static const std::vector<std::pair<std::string, ProfileFn>> table{
      {"sqrt_lin", &profile_sqrt_lin}, {"exp", &profile_exp}, {"softplus", &profile_softplus}};
  return table;
}

inline Jet2 separable_jet(Point2 p, double c0, double lambda, ProfileFn g, ProfileFn h) {
  const Profile a = g(p.x);
  const Profile b = h(p.y);
  return {c0 + lambda * (a.g + b.g), lambda * a.dg, lambda * b.dg, lambda * a.d2g, 0.0,
          lambda * b.d2g};
}

inline Jet2 radius_squared_jet(Point2 p) {
  return {p.x * p.x + p.y * p.y, 2.0 * p.x, 2.0 * p.y, 2.0, 0.0, 2.0};
}

// Jet of phi(r) for r > 0 from phi, phi', phi'' in r.
inline Jet2 radial_jet(Point2 p, double phi, double dphi, double d2phi) {
  const double r = norm(p);
  const double ux = p.x / r;
  const double uy = p.y / r;
  const double t = dphi / r;
  return {phi,
          dphi * ux,
          dphi * uy,
          d2phi * ux * ux + t * (1.0 - ux * ux),
          (d2phi - t) * ux * uy,
          d2phi * uy * uy + t * (1.0 - uy * uy)};
}

inline Jet2 gaussian_jet(Point2 p) {
  const double e = std::exp(-(p.x * p.x + p.y * p.y));
  return compose(radius_squared_jet(p), e, -e, e);
}

// Quintic smoothstep cutoff rising from 0 at r = e to 1 at r = e + 1.
inline Jet2 loglog_jet(Point2 p) {
  const double e = std::numbers::e;
  const double r = norm(p);
  if (r <= e) return {};
  const double lr = std::log(r);
  const double L = std::log(lr);
  const double dL = 1.0 / (r * lr);
  const double d2L = -(lr + 1.0) / ((r * lr) * (r * lr));
  double chi = 1.0, dchi = 0.0, d2chi = 0.0;
  if (r < e + 1.0) {
    const double t = r - e;
    chi = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    dchi = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    d2chi = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
  }
  return radial_jet(p, chi * L, dchi * L + chi * dL, d2chi * L + 2.0 * dchi * dL + chi * d2L);
}

inline Jet2 bates_like_jet(Point2 p, double lambda) {
  const Jet2 t{p.x + p.y * p.y, 1.0, 2.0 * p.y, 0.0, 0.0, 2.0};
  const double w = 1.0 + t.f * t.f;
  const double sw = std::sqrt(w);
  const double s = t.f / sw;
  const double ds = 1.0 / (w * sw);
  const double d2s = -3.0 * t.f / (w * w * sw);
  return constant_jet(1.0) + lambda * compose(t, s, ds, d2s);
}

inline Jet2 asym_bump_jet(Point2 p) {
  const Jet2 poly = constant_jet(1.0) + 0.3 * x_jet(p) + 0.2 * (x_jet(p) * y_jet(p));
  return gaussian_jet(p) * poly;
}

inline double param(const std::map<std::string, double>& params, const std::string& key) {
  return params.at(key);
}

}  // namespace detail

inline const std::vector<FamilySpec>& list_families() {
  using E = Expectation;
  static const std::vector<FamilySpec> registry{
      {"plane", "c", {{"c", 0.0}}, "R^2", E::yes, E::no, E::no, false},
      {"saddle", "x*y", {}, "R^2", E::no, E::yes, E::no, true},
      {"cylinder", "a*x^2", {{"a", 1.0}}, "R^2", E::no, E::yes, E::no, true},
      {"paraboloid", "a*(x^2+y^2)", {{"a", 1.0}}, "R^2", E::no, E::no, E::yes, true},
      {"sphere_cap", "R - sqrt(R^2 - x^2 - y^2)", {{"R", 1.0}}, "open disk r < R", E::no, E::no,
       E::yes, true},
      {"gaussian_bump", "exp(-(x^2+y^2))", {}, "R^2", E::yes, E::unknown, E::no, false},
      {"inverse_quadratic", "1/(1+x^2+y^2)", {}, "R^2", E::yes, E::unknown, E::no, false},
      {"loglog_tail", "chi(r)*ln(ln r), chi quintic smoothstep on [e, e+1]", {}, "R^2", E::no,
       E::unknown, E::no, true},
      {"bates_like", "1 + lambda*(x+y^2)/sqrt(1+(x+y^2)^2)", {{"lambda", 0.1}}, "R^2", E::no,
       E::yes, E::no, true},
      {"ridge", "1 + lambda*sqrt(1+x^2)", {{"lambda", 0.1}}, "R^2", E::no, E::yes, E::no, true},
      {"cone_type", "1 + lambda*(sqrt(1+x^2)+x+sqrt(1+y^2)+y)", {{"lambda", 0.1}}, "R^2", E::no,
       E::yes, E::yes, true},
      {"separable", "1 + lambda*(g(x)+h(y)), g,h in {sqrt_lin, exp, softplus}",
       {{"lambda", 0.1}, {"g", 0.0}, {"h", 0.0}}, "R^2", E::no, E::yes, E::yes, true},
      {"asym_bump", "exp(-(x^2+y^2))*(1 + 0.3*x + 0.2*x*y)", {}, "R^2", E::yes, E::unknown, E::no,
       false},
  };
  return registry;
}

inline const FamilySpec& find_family(const std::string& name) {
  for (const auto& f : list_families())
    if (f.name == name) return f;
  throw std::invalid_argument("unknown field family '" + name + "'");
}

/// Builds a registry field. Missing parameters take the family defaults;
/// unknown keys and non-positive lambda are rejected.
inline ScalarField make_field(const std::string& name,
                              const std::map<std::string, double>& overrides = {}) {
  const FamilySpec& spec = find_family(name);
  std::map<std::string, double> params = spec.defaults;
  for (const auto& [k, v] : overrides) {
    if (!params.contains(k))
      throw std::invalid_argument("field '" + name + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("parameter '" + k + "' is not finite");
    params[k] = v;
  }
  if (params.contains("lambda") && !(params.at("lambda") > 0.0))
    throw std::invalid_argument("field '" + name + "' requires lambda > 0");

  FieldInfo info;
  info.name = name;
  info.params = params;
  info.kind = FieldKind::closed_form;
  using detail::param;
  ScalarField::JetFn fn;

  if (name == "plane") {
    const double c = param(params, "c");
    info.asymptotic_constant = c;
    fn = [c](Point2) { return constant_jet(c); };
  } else if (name == "saddle") {
    fn = [](Point2 p) { return x_jet(p) * y_jet(p); };
  } else if (name == "cylinder") {
    const double a = param(params, "a");
    fn = [a](Point2 p) { return Jet2{a * p.x * p.x, 2.0 * a * p.x, 0.0, 2.0 * a, 0.0, 0.0}; };
  } else if (name == "paraboloid") {
    const double a = param(params, "a");
    fn = [a](Point2 p) { return a * detail::radius_squared_jet(p); };
  } else if (name == "sphere_cap") {
    const double R = param(params, "R");
    if (!(R > 0.0)) throw std::invalid_argument("sphere_cap requires R > 0");
    info.domain_radius = R;
    fn = [R](Point2 p) {
      const Jet2 s = detail::radius_squared_jet(p);
      const double w = R * R - s.f;
      const double sw = std::sqrt(w);
      // R - sqrt(R^2 - r^2) without cancellation near the pole.
      return compose(s, s.f / (R + sw), 0.5 / sw, 0.25 / (w * sw));
    };
  } else if (name == "gaussian_bump") {
    info.asymptotic_constant = 0.0;
    fn = [](Point2 p) { return detail::gaussian_jet(p); };
  } else if (name == "inverse_quadratic") {
    info.asymptotic_constant = 0.0;
    fn = [](Point2 p) {
      const Jet2 s = detail::radius_squared_jet(p);
      const double w = 1.0 / (1.0 + s.f);
      return compose(s, w, -w * w, 2.0 * w * w * w);
    };
  } else if (name == "loglog_tail") {
    fn = [](Point2 p) { return detail::loglog_jet(p); };
  } else if (name == "bates_like") {
    const double lambda = param(params, "lambda");
    fn = [lambda](Point2 p) { return detail::bates_like_jet(p, lambda); };
  } else if (name == "ridge") {
    const double lambda = param(params, "lambda");
    fn = [lambda](Point2 p) {
      return detail::separable_jet(p, 1.0, lambda, &detail::profile_sqrt, &detail::profile_zero);
    };
  } else if (name == "cone_type") {
    const double lambda = param(params, "lambda");
    fn = [lambda](Point2 p) {
      return detail::separable_jet(p, 1.0, lambda, &detail::profile_sqrt_lin,
                                   &detail::profile_sqrt_lin);
    };
  } else if (name == "separable") {
    const double lambda = param(params, "lambda");
    const auto& table = detail::separable_profiles();
    auto pick = [&](const char* key) {
      const double v = param(params, key);
      const auto idx = static_cast<std::size_t>(v);
      if (v < 0 || static_cast<double>(idx) != v || idx >= table.size())
        throw std::invalid_argument(std::string("separable: invalid profile index for ") + key);
      return table[idx].second;
    };
    const auto g = pick("g");
    const auto h = pick("h");
    fn = [lambda, g, h](Point2 p) { return detail::separable_jet(p, 1.0, lambda, g, h); };
  } else if (name == "asym_bump") {
    info.asymptotic_constant = 0.0;
    fn = [](Point2 p) { return detail::asym_bump_jet(p); };
  } else {
    throw std::invalid_argument("unknown field family '" + name + "'");
  }
  return ScalarField(std::move(info), std::move(fn));
}

/// Parses the CLI vocabulary `name[:key=value[,key=value...]]`. The key
/// `λ` is accepted as an alias of `lambda`; separable profiles may be named
/// (g=exp) or given by index.
inline ScalarField parse_field_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  std::map<std::string, double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw std::invalid_argument("field parameter '" + std::string(item) + "' lacks '='");
      std::string key(item.substr(0, eq));
      const std::string value(item.substr(eq + 1));
      if (key == "λ") key = "lambda";
      double v = 0.0;
      bool named = false;
      if (name == "separable" && (key == "g" || key == "h")) {
        const auto& table = detail::separable_profiles();
        for (std::size_t i = 0; i < table.size(); ++i)
          if (table[i].first == value) {
            v = static_cast<double>(i);
            named = true;
          }
      }
      if (!named) {
        std::size_t used = 0;
        try {
          v = std::stod(value, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != value.size() || value.empty())
          throw std::invalid_argument("field parameter '" + key + "': bad value '" + value + "'");
      }
      params[key] = v;
    }
  }
  return make_field(name, params);
}

}  // namespace umbilic
