#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "umbilic/umbilic.hpp"

using namespace umbilic;

namespace {

struct RunConfig {
  std::optional<std::string> field;
  std::optional<std::string> region;
  std::optional<int> n;
  std::optional<int> m;
  std::optional<std::string> radii;
  double X{0.0};
  double Y{0.5 * pi};
  double theta0{0.0};
  int n_r{QuadScheme{}.n_r};
  int n_theta{QuadScheme{}.n_theta};
  std::string out;
  std::string svg;
  std::uint64_t seed{1};
  std::string body{"axial:eps=0.05"};
  std::string offset{"0"};
  double r0{0.5};
  std::string quantity{"DeltaK"};
  double level{0.0};
  int samples{256};
  double tol{default_umbilic_tolerance};
  bool normalize{false};
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v))
      throw std::invalid_argument(std::string(what) + ": bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

Region parse_region(const std::string& text) {
  const auto v = parse_list(text, "--region");
  if (v.size() != 4) throw std::invalid_argument("--region needs x0,y0,x1,y1");
  Region r{v[0], v[1], v[2], v[3]};
  r.validate();
  return r;
}

QuadScheme scheme_of(const RunConfig& c) {
  QuadScheme s{c.n_r, c.n_theta};
  s.validate();
  return s;
}

int positive(int v, const char* what) {
  if (v < 2) throw std::invalid_argument(std::string(what) + " must be >= 2");
  return v;
}

// Text produced by a command, written once after it succeeds.
struct Output {
  CsvTable csv{{}};
  std::string svg;
  int exit_code{0};
};

void emit(const Output& o, const RunConfig& c) {
  if (c.out.empty()) {
    o.csv.write(std::cout);
  } else {
    write_text_file(c.out, o.csv.str());
  }
  if (!c.svg.empty() && !o.svg.empty()) write_text_file(c.svg, o.svg);
}

void field_comments(CsvTable& t, const ScalarField& f) {
  std::string params;
  for (const auto& [k, v] : f.info().params) params += (params.empty() ? "" : ",") + k + "=" + format_number(v);
  t.comment("field: " + f.info().name + (params.empty() ? "" : ":" + params));
}

Output fields_list() {
  Output o;
  o.csv = CsvTable({"name", "formula", "defaults", "domain", "asymptotically_constant", "umbilic_free",
                    "positively_curved", "origin"});
  o.csv.comment("registry of named height fields f(x, y)");
  for (const auto& s : list_families()) {
    std::string defaults;
    for (const auto& [k, v] : s.defaults) defaults += (defaults.empty() ? "" : ";") + k + "=" + format_number(v);
    o.csv.add_row({s.name, s.formula, defaults, s.domain, to_string(s.asymptotically_constant),
                   to_string(s.umbilic_free), to_string(s.positively_curved),
                   s.reference_family ? "reference" : "synthetic"});
  }
  return o;
}

Grid residual_grid(const RunConfig& c, const ScalarField& f) {
  const Region r = parse_region(c.region.value_or("-3,-3,3,3"));
  const int n = positive(c.n.value_or(101), "--n");
  const int m = positive(c.m.value_or(n), "--m");
  return grid_field(f, parse_residual(c.quantity), r, n, m, {Direction(c.X), Direction(c.Y), c.theta0});
}

void grid_comments(CsvTable& t, const Grid& g, const RunConfig& c) {
  t.comment("quantity: " + g.quantity + " (X=" + format_number(c.X) + " rad, Y=" + format_number(c.Y) +
            " rad, theta0=" + format_number(c.theta0) + " rad)");
  t.comment("units: DeltaK and DkDtheta in 1/length; P1, P2 and D are dimensionless polynomial residuals");
  t.comment("grid: " + std::to_string(g.n) + "x" + std::to_string(g.m));
}

Output curvature_map(const RunConfig& c) {
  const ScalarField f = parse_field_spec(c.field.value_or("asym_bump"));
  const Grid g = residual_grid(c, f);
  Output o;
  o.csv = grid_csv(g);
  field_comments(o.csv, f);
  grid_comments(o.csv, g, c);
  if (const auto w = sign_witness(g))
    o.csv.comment("sign change: +" + format_number(w->max_value) + " at (" + format_number(w->positive.x) +
                  "," + format_number(w->positive.y) + "), " + format_number(w->min_value) + " at (" +
                  format_number(w->negative.x) + "," + format_number(w->negative.y) + ")");
  o.svg = grid_svg(g);
  return o;
}

Output contour_cmd(const RunConfig& c) {
  const ScalarField f = parse_field_spec(c.field.value_or("asym_bump"));
  const Grid g = residual_grid(c, f);
  const ContourSet cs = contours(g, c.level);
  Output o;
  o.csv = contour_csv(cs);
  field_comments(o.csv, f);
  grid_comments(o.csv, g, c);
  o.csv.comment("level: " + format_number(c.level) + "; polylines from marching squares");
  o.svg = grid_svg(g, &cs);
  return o;
}

Output umbilic_scan(const RunConfig& c) {
  const ScalarField f = parse_field_spec(c.field.value_or("paraboloid"));
  const Region r = parse_region(c.region.value_or("-2,-2,2,2"));
  const UmbilicSearchResult s = umbilic_search(f, r, positive(c.n.value_or(81), "--n"), c.tol);
  Output o;
  o.csv = CsvTable({"x", "y", "D_normalized", "P_normalized", "refined"});
  field_comments(o.csv, f);
  o.csv.comment("quantity: umbilic points, D/(1+|grad f|^2)^3 below " + format_number(c.tol) + " (dimensionless)");
  o.csv.comment(std::string("totally umbilic region: ") + (s.totally_umbilic_region ? "yes" : "no") +
                ", fraction of samples below tolerance " + format_number(s.fraction_below));
  for (const auto& p : s.points)
    o.csv.add_row({format_number(p.p.x), format_number(p.p.y), format_number(p.D_normalized),
                   format_number(p.P_normalized), p.refined ? "1" : "0"});
  return o;
}

Output floor_cmd(const RunConfig& c) {
  const ScalarField f = parse_field_spec(c.field.value_or("ridge:lambda=0.1"));
  const Region r = parse_region(c.region.value_or("-20,-20,20,20"));
  const FloorReport rep = umbilic_free_floor(f, r, positive(c.n.value_or(401), "--n"));
  Output o;
  o.csv = CsvTable({"floor", "argmin_x", "argmin_y"});
  field_comments(o.csv, f);
  o.csv.comment("quantity: grid minimum of max(|P1|,|P2|)/(1+|grad f|^2)^(3/2) (dimensionless)");
  o.csv.add_row({rep.floor, rep.argmin.x, rep.argmin.y});
  return o;
}

Output invert_graph(const RunConfig& c) {
  ScalarField f = parse_field_spec(c.field.value_or("sphere_cap"));
  double scale = 1.0;
  if (c.normalize) {
    NormalizedField nf = normalize_at_umbilic(f);
    scale = nf.scale;
    f = std::move(nf.field);
  }
  const GraphConditionReport gc = graph_condition(f, c.r0);
  std::cerr << describe(gc) << '\n';
  const ExteriorGraph g = invert_local_graph(f, c.r0);
  const auto radii = parse_list(c.radii.value_or("10,100,1000"), "--radii");
  if (c.samples < 1) throw std::invalid_argument("--samples must be positive");
  // Angles from a fixed 64-bit generator so the CSV is reproducible everywhere.
  std::mt19937_64 rng(c.seed);
  std::vector<double> thetas(static_cast<std::size_t>(c.samples));
  for (double& t : thetas) t = two_pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;

  Output o;
  o.csv = CsvTable({"rbar", "fbar_min", "fbar_max", "sup_abs_fbar_minus_limit", "sup_rbar_abs_dfbar_drbar",
                    "sup_abs_r_rbar_minus_1"});
  field_comments(o.csv, f);
  o.csv.comment("quantity: inversion of graph(f) over the disk of radius r0=" + format_number(c.r0) +
                " as a graph fbar(rbar, theta); lengths in field units");
  o.csv.comment("rbar_min: " + format_number(g.rbar_min) + "; sup |df/dr|: " + format_number(gc.sup_fr) +
                "; scale: " + format_number(scale));
  o.csv.comment("limit: " + (g.limit ? format_number(*g.limit) : std::string("none")) + "; " +
                std::to_string(c.samples) + " theta samples, seed " + std::to_string(c.seed));
  for (double rbar : radii) {
    if (rbar < g.rbar_min) throw std::invalid_argument("--radii: " + format_number(rbar) + " is below rbar_min");
    std::vector<ExteriorSample> s(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t k) { s[k] = exterior_eval(g, rbar, thetas[k]); });
    double lo = 1e300, hi = -1e300, dev = 0.0, slope = 0.0, rr = 0.0;
    for (const auto& e : s) {
      lo = std::min(lo, e.fbar);
      hi = std::max(hi, e.fbar);
      if (g.limit) dev = std::max(dev, std::abs(e.fbar - *g.limit));
      slope = std::max(slope, rbar * std::abs(e.fbar_rbar));
      rr = std::max(rr, std::abs(e.r * rbar - 1.0));
    }
    o.csv.add_row({rbar, lo, hi, g.limit ? dev : std::nan(""), slope, rr});
  }
  return o;
}

Output verify_table(const RunConfig& c, bool thm3) {
  const ScalarField f = parse_field_spec(c.field.value_or("asym_bump"));
  const auto radii = parse_list(c.radii.value_or("2,4,8"), "--radii");
  const QuadScheme s = scheme_of(c);
  Output o;
  if (!thm3) {
    const DecayTable t = verify_thm2(f, Direction(c.X), Direction(c.Y), radii, s);
    o.csv = CsvTable({"r", "I_area", "I_flux", "majorant"});
    field_comments(o.csv, f);
    o.csv.comment("quantity: I(r) = integral over the disk B_r of (k_X - k_Y)(1+f_X^2)(1+f_Y^2) dA, X=" +
                  format_number(c.X) + " rad, Y=" + format_number(c.Y) + " rad");
    o.csv.comment("units: r in length, I in length; majorant bounds |I_flux| by the boundary integral of |V.n|");
    for (const auto& row : t.rows) o.csv.add_row({row.r, row.I_area, row.I_flux, row.majorant});
  } else {
    const DecayTable t = verify_thm3(f, c.theta0, radii, s);
    o.csv = CsvTable({"r", "I_area", "I_flux", "majorant", "I_stated", "stated_over_area"});
    field_comments(o.csv, f);
    o.csv.comment("quantity: divergence form integral over B_r for the direction theta0=" +
                  format_number(c.theta0) + " rad; I_stated integrates (dk/dtheta)(1+f_1^2) dA");
    o.csv.comment("units: r in length, integrals in length");
    for (const auto& row : t.rows)
      o.csv.add_row({row.r, row.I_area, row.I_flux, row.majorant, *row.I_stated, *row.I_stated / row.I_area});
  }
  o.csv.comment("scheme: n_r=" + std::to_string(s.n_r) + ", n_theta=" + std::to_string(s.n_theta));
  return o;
}

Output verify_divergence(const RunConfig& c) {
  const ScalarField f = parse_field_spec(c.field.value_or("asym_bump"));
  const auto radii = parse_list(c.radii.value_or("2,4,8"), "--radii");
  detail::check_radii(radii);
  const QuadScheme base = scheme_of(c);
  Output o;
  o.csv = CsvTable({"vector_field", "n_r", "n_theta", "r", "area", "flux", "abs_difference"});
  field_comments(o.csv, f);
  o.csv.comment("quantity: disk integral of div V against the boundary flux of V, default and doubled scheme");
  const std::pair<const char*, PlaneField> fields[] = {
      {"V2", thm2_vectorfield(f, Direction(c.X), Direction(c.Y))},
      {"V3", thm3_vectorfield(f, c.theta0)}};
  for (const auto& [name, V] : fields)
    for (const QuadScheme& s : {base, base.doubled()})
      for (double r : radii) {
        const double area = disk_integral([&](Point2 p) { return V.eval(p).div; }, r, s);
        const double flux = boundary_flux(V, r, s.n_theta);
        o.csv.add_row({name, std::to_string(s.n_r), std::to_string(s.n_theta), format_number(r),
                       format_number(area), format_number(flux), format_number(std::abs(area - flux))});
      }
  return o;
}

Output pipeline_thm1(const RunConfig& c) {
  const SupportBody B = parse_body_spec(c.body);
  double offset = 0.0;
  if (c.offset == "auto") {
    offset = default_offset(B);
  } else {
    offset = parse_list(c.offset, "--offset").at(0);
  }
  const auto radii = parse_list(c.radii.value_or("10,100,1000"), "--radii");
  const PipelineReport r = theorem1_pipeline(B, offset, radii);
  Output o;
  o.csv = CsvTable({"rbar", "sup_height_dev", "sup_rbar_slope"});
  o.csv.comment("body: " + c.body + "; offset " + format_number(offset));
  o.csv.comment("quantity: inverted parallel body as a graph over the plane; sup |fbar - c| and sup rbar |dfbar/drbar| per bin");
  o.csv.comment("umbilic normal: (" + format_number(r.umbilic.u.x) + "," + format_number(r.umbilic.u.y) + "," +
                format_number(r.umbilic.u.z) + "), residual " + format_number(r.umbilic.residual));
  o.csv.comment("radius of curvature at umbilic: " + format_number(r.rho_umbilic) + "; c = " + format_number(r.c) +
                "; scale " + format_number(r.scale));
  o.csv.comment(std::string("graph check: ") + (r.graph_check ? "pass" : "FAIL") + ", min |n_z| " +
                format_number(r.min_vertical_normal) + "; " + std::to_string(r.angular_samples) + " angles");
  for (const auto& row : r.rows) o.csv.add_row({row.rbar, row.sup_height_dev, row.sup_rbar_slope});
  if (!r.graph_check) {
    std::cerr << "inverted surface is not a graph over the plane\n";
    o.exit_code = 3;
  }
  return o;
}

Output decay_cmd(const RunConfig& c) {
  const ScalarField f = parse_field_spec(c.field.value_or("gaussian_bump"));
  const auto radii = parse_list(c.radii.value_or("1,2,5,10,20"), "--radii");
  const DecayProfile p = decay_profile(f, radii, std::max(8, c.n_theta));
  Output o;
  o.csv = CsvTable({"r", "sup_abs_f_minus_c", "sup_r_abs_grad_f"});
  field_comments(o.csv, f);
  o.csv.comment("quantity: ring samples of |f - c| and r |grad f|, both in length units");
  o.csv.comment("c: " + format_number(p.c) + (p.c_estimated ? " (estimated, variance " + format_number(p.c_variance) + ")"
                                                            : " (from metadata)"));
  for (const auto& row : p.rows) o.csv.add_row({row.r, row.sup_deviation, row.sup_r_grad});
  return o;
}

// Reads key=value lines; '#' starts a comment.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    out.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  return out;
}

// Splices config entries after the subcommand words so later flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args;
  std::string config;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) throw std::invalid_argument("--config needs a path");
      config = argv[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config = a.substr(9);
    } else {
      args.push_back(a);
    }
  }
  if (config.empty()) return args;
  std::size_t words = 0;
  while (words < args.size() && !args[words].empty() && args[words][0] != '-') ++words;
  const auto extra = config_tokens(config);
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(words), extra.begin(), extra.end());
  return args;
}

enum class Opt : unsigned {
  field = 1, region = 2, grid = 4, radii = 8, dirs = 16, scheme = 32, svg = 64, seed = 128,
  body = 256, r0 = 512, quantity = 1024, level = 2048, tol = 4096
};
constexpr unsigned operator|(Opt a, Opt b) { return unsigned(a) | unsigned(b); }
constexpr unsigned operator|(unsigned a, Opt b) { return a | unsigned(b); }

void add_options(CLI::App* app, RunConfig& c, unsigned which) {
  auto has = [&](Opt o) { return (which & unsigned(o)) != 0; };
  app->add_option("--out", c.out, "CSV output path (default: standard output)");
  if (has(Opt::field)) app->add_option("--field", c.field, "field spec name[:key=value,...]");
  if (has(Opt::region)) app->add_option("--region", c.region, "x0,y0,x1,y1");
  if (has(Opt::grid)) {
    app->add_option("--n", c.n, "samples along x");
    app->add_option("--m", c.m, "samples along y (default: n)");
  }
  if (has(Opt::radii)) app->add_option("--radii", c.radii, "comma separated increasing radii");
  if (has(Opt::dirs)) {
    app->add_option("--X", c.X, "first direction angle (radians)");
    app->add_option("--Y", c.Y, "second direction angle (radians)");
    app->add_option("--theta0", c.theta0, "frame angle (radians)");
  }
  if (has(Opt::scheme)) {
    app->add_option("--n-r", c.n_r, "Gauss-Legendre nodes per unit annulus");
    app->add_option("--n-theta", c.n_theta, "angular nodes");
  }
  if (has(Opt::svg)) app->add_option("--svg", c.svg, "SVG heatmap output path");
  if (has(Opt::seed)) {
    app->add_option("--seed", c.seed, "seed for sampled angles");
    app->add_option("--samples", c.samples, "angles sampled per radius");
  }
  if (has(Opt::body)) {
    app->add_option("--body", c.body, "sphere:R=.., axial:eps=.., triaxial:eps=.., or quadratic:c0=..,qxx=..");
    app->add_option("--offset", c.offset, "parallel body offset, or 'auto'");
  }
  if (has(Opt::r0)) {
    app->add_option("--r0", c.r0, "radius of the local graph");
    app->add_flag("--normalize", c.normalize, "rescale so the umbilic at the origin has curvature 2");
  }
  if (has(Opt::quantity)) app->add_option("--quantity", c.quantity, "DeltaK, DkDtheta, P1, P2 or D");
  if (has(Opt::level)) app->add_option("--level", c.level, "contour level");
  if (has(Opt::tol)) app->add_option("--tol", c.tol, "umbilic tolerance on the normalized discriminant");
}

int run(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Numerical toolkit for umbilics of surfaces and convex bodies"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");
  app.add_option("--config", "key=value file; command line flags override it");

  std::function<Output()> action;
  auto leaf = [&](CLI::App* parent, const char* name, const char* desc, unsigned opts, auto fn) {
    CLI::App* sub = parent->add_subcommand(name, desc);
    add_options(sub, c, opts);
    sub->callback([&action, fn, &c] { action = [fn, &c] { return fn(c); }; });
    return sub;
  };
  auto group = [&](const char* name, const char* desc) {
    CLI::App* g = app.add_subcommand(name, desc);
    g->require_subcommand(1);
    return g;
  };
  const unsigned grid_opts = Opt::field | Opt::region | Opt::grid | Opt::dirs | Opt::svg | Opt::quantity;

  leaf(group("fields", "field registry"), "list", "list named fields", 0, [](const RunConfig&) { return fields_list(); });
  leaf(group("curvature", "curvature residuals"), "map", "sample a residual on a grid", grid_opts, curvature_map);
  leaf(group("umbilic", "umbilic search"), "scan", "locate umbilics of a field", Opt::field | Opt::region | Opt::grid | Opt::tol,
       umbilic_scan);
  leaf(&app, "floor", "lower bound of the umbilic residual on a grid", Opt::field | Opt::region | Opt::grid, floor_cmd);
  leaf(group("invert", "inversion in the unit sphere"), "graph", "invert a local graph", Opt::field | Opt::r0 | Opt::radii | Opt::seed,
       invert_graph);
  CLI::App* verify = group("verify", "integral identities on disks");
  const unsigned verify_opts = Opt::field | Opt::radii | Opt::dirs | Opt::scheme;
  leaf(verify, "thm2", "curvature difference integral", verify_opts, [](const RunConfig& cfg) { return verify_table(cfg, false); });
  leaf(verify, "thm3", "angular derivative integral", verify_opts, [](const RunConfig& cfg) { return verify_table(cfg, true); });
  leaf(verify, "divergence", "area against flux", verify_opts, verify_divergence);
  leaf(group("pipeline", "convex body pipeline"), "thm1", "invert a parallel body about an umbilic", Opt::body | Opt::radii,
       pipeline_thm1);
  leaf(&app, "contour", "zero set polylines of a residual", grid_opts | Opt::level, contour_cmd);
  leaf(&app, "decay", "asymptotic constancy profile", Opt::field | Opt::radii | Opt::scheme, decay_cmd);

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const Output o = action();
    emit(o, c);
    return o.exit_code;
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
