#include "isaacs/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "isaacs/coefficients.hpp"
#include "isaacs/errors.hpp"
#include "isaacs/geometry.hpp"

namespace isaacs {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::solve:
      return "solve";
    case RunMode::rates:
      return "rates";
    case RunMode::sandwich:
      return "sandwich";
    case RunMode::check_decomposition:
      return "check-decomposition";
    case RunMode::verify_barrier:
      return "verify-barrier";
  }
  return "unknown";
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

const json& member(const json& obj, const std::string& ctx, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(ctx + "." + key, "missing required field");
  return *it;
}

const json* optional_member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(ctx + "." + it.key(), "unknown field");
  }
}

const json& as_object(const json& v, const std::string& field) {
  if (!v.is_object()) fail(field, "expected an object");
  return v;
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

Point as_point(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) fail(field, "expected [x, y]");
  Point p(2);
  p << as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]");
  return p;
}

std::vector<double> as_number_list(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) fail(field, "expected a nonempty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Domain parse_domain(const json& v, const std::string& ctx) {
  const json& obj = as_object(v, ctx);
  const std::string kind = as_string(member(obj, ctx, "kind"), ctx + ".kind");
  if (kind == "disk") {
    check_keys(obj, ctx, {"kind", "center", "radius"});
    const Point center = as_point(member(obj, ctx, "center"), ctx + ".center");
    const double radius = as_number(member(obj, ctx, "radius"), ctx + ".radius");
    if (!(radius > 0.0)) fail(ctx + ".radius", "must be positive");
    return make_disk(center, radius);
  }
  if (kind == "ellipse") {
    check_keys(obj, ctx, {"kind", "center", "semi_x", "semi_y"});
    const Point center = as_point(member(obj, ctx, "center"), ctx + ".center");
    const double sx = as_number(member(obj, ctx, "semi_x"), ctx + ".semi_x");
    const double sy = as_number(member(obj, ctx, "semi_y"), ctx + ".semi_y");
    if (!(sx > 0.0)) fail(ctx + ".semi_x", "must be positive");
    if (!(sy > 0.0)) fail(ctx + ".semi_y", "must be positive");
    return make_ellipse(center, sx, sy);
  }
  if (kind == "box" || kind == "rounded-box") {
    const Point lo = as_point(member(obj, ctx, "lo"), ctx + ".lo");
    const Point hi = as_point(member(obj, ctx, "hi"), ctx + ".hi");
    if (!(lo[0] < hi[0] && lo[1] < hi[1]))
      fail(ctx + ".hi", "must exceed lo componentwise");
    if (kind == "box") {
      check_keys(obj, ctx, {"kind", "lo", "hi"});
      return make_box(lo, hi);
    }
    check_keys(obj, ctx, {"kind", "lo", "hi", "corner_radius"});
    const double r =
        as_number(member(obj, ctx, "corner_radius"), ctx + ".corner_radius");
    const double half = 0.5 * std::min(hi[0] - lo[0], hi[1] - lo[1]);
    if (!(r > 0.0) || r > half)
      fail(ctx + ".corner_radius", "must lie in (0, half the short side]");
    return make_rounded_box(lo, hi, r);
  }
  fail(ctx + ".kind", "unknown domain kind '" + kind + "'");
}

SmoothFunction zero_function() {
  SmoothFunction f;
  f.value = [](const Point&) { return 0.0; };
  f.gradient = [](const Point& x) {
    return Eigen::VectorXd::Zero(x.size()).eval();
  };
  f.hessian = [](const Point& x) {
    return Eigen::MatrixXd::Zero(x.size(), x.size()).eval();
  };
  return f;
}

SmoothFunction parse_boundary(const json& v, const std::string& ctx) {
  const json& obj = as_object(v, ctx);
  const std::string kind = as_string(member(obj, ctx, "kind"), ctx + ".kind");
  if (kind == "zero") {
    check_keys(obj, ctx, {"kind"});
    return zero_function();
  }
  if (kind == "affine") {
    check_keys(obj, ctx, {"kind", "slope", "offset"});
    const Point slope = as_point(member(obj, ctx, "slope"), ctx + ".slope");
    const double offset =
        as_number(member(obj, ctx, "offset"), ctx + ".offset");
    SmoothFunction f;
    const Eigen::Vector2d s = slope;
    f.value = [s, offset](const Point& x) { return s.dot(x) + offset; };
    f.gradient = [s](const Point&) { return Eigen::VectorXd(s); };
    f.hessian = [](const Point& x) {
      return Eigen::MatrixXd::Zero(x.size(), x.size()).eval();
    };
    return f;
  }
  fail(ctx + ".kind", "unknown boundary kind '" + kind + "'");
}

std::vector<std::string> default_labels(const char* prefix, std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i)
    labels.push_back(prefix + std::to_string(i));
  return labels;
}

std::vector<std::string> parse_labels(const json* v, const std::string& field,
                                      const char* prefix, std::size_t n) {
  if (!v) return default_labels(prefix, n);
  if (!v->is_array() || v->size() != n)
    fail(field, "expected " + std::to_string(n) + " labels");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i)
    labels.push_back(as_string((*v)[i], field + "[" + std::to_string(i) + "]"));
  return labels;
}

void parse_constant_family(const json& obj, const std::string& ctx,
                           double gamma, double tau, RunConfig& out) {
  const json& ja = member(obj, ctx, "a");
  if (!ja.is_array() || ja.empty()) fail(ctx + ".a", "expected a nonempty array");
  const std::size_t na = ja.size();
  if (!ja[0].is_array() || ja[0].empty())
    fail(ctx + ".a[0]", "expected a nonempty array");
  const std::size_t nb = ja[0].size();

  std::vector<std::vector<Eigen::Matrix2d>> a(na,
                                              std::vector<Eigen::Matrix2d>(nb));
  std::vector<std::vector<Eigen::Vector2d>> b(na,
                                              std::vector<Eigen::Vector2d>(nb));
  std::vector<std::vector<double>> c(na, std::vector<double>(nb));
  std::vector<std::vector<double>> f(na, std::vector<double>(nb));

  const json& jb = member(obj, ctx, "b");
  const json& jc = member(obj, ctx, "c");
  const json& jf = member(obj, ctx, "f");
  for (const auto& [name, table] :
       {std::pair<const char*, const json*>{"b", &jb}, {"c", &jc}, {"f", &jf}}) {
    if (!table->is_array() || table->size() != na)
      fail(ctx + "." + name, "expected " + std::to_string(na) + " rows");
  }

  for (std::size_t i = 0; i < na; ++i) {
    const std::string row = ctx + ".a[" + std::to_string(i) + "]";
    if (!ja[i].is_array() || ja[i].size() != nb)
      fail(row, "expected " + std::to_string(nb) + " entries");
    if (!jb[i].is_array() || jb[i].size() != nb)
      fail(ctx + ".b[" + std::to_string(i) + "]",
           "expected " + std::to_string(nb) + " entries");
    if (!jc[i].is_array() || jc[i].size() != nb)
      fail(ctx + ".c[" + std::to_string(i) + "]",
           "expected " + std::to_string(nb) + " entries");
    if (!jf[i].is_array() || jf[i].size() != nb)
      fail(ctx + ".f[" + std::to_string(i) + "]",
           "expected " + std::to_string(nb) + " entries");
    for (std::size_t j = 0; j < nb; ++j) {
      const std::string cellname = row + "[" + std::to_string(j) + "]";
      const json& m = ja[i][j];
      if (!m.is_array() || m.size() != 2) fail(cellname, "expected a 2x2 matrix");
      Eigen::Matrix2d mat;
      for (int r = 0; r < 2; ++r) {
        if (!m[r].is_array() || m[r].size() != 2)
          fail(cellname, "expected a 2x2 matrix");
        for (int s = 0; s < 2; ++s)
          mat(r, s) = as_number(m[r][s], cellname);
      }
      if (std::abs(mat(0, 1) - mat(1, 0)) > 1e-12)
        fail(cellname, "matrix must be symmetric");
      a[i][j] = mat;
      b[i][j] = as_point(jb[i][j], ctx + ".b[" + std::to_string(i) + "][" +
                                       std::to_string(j) + "]");
      c[i][j] = as_number(jc[i][j], ctx + ".c[" + std::to_string(i) + "][" +
                                        std::to_string(j) + "]");
      if (c[i][j] < 0.0)
        fail(ctx + ".c[" + std::to_string(i) + "][" + std::to_string(j) + "]",
             "must be nonnegative");
      f[i][j] = as_number(jf[i][j], ctx + ".f[" + std::to_string(i) + "][" +
                                        std::to_string(j) + "]");
    }
  }

  out.problem.controls_a.labels =
      parse_labels(optional_member(obj, "labels_a"), ctx + ".labels_a", "a", na);
  out.problem.controls_b.labels =
      parse_labels(optional_member(obj, "labels_b"), ctx + ".labels_b", "b", nb);
  out.problem.coeffs = make_constant_field(a, b, c, f, gamma, tau);
}

double field_or(const json& obj, const std::string& ctx, const char* key,
                double fallback) {
  const json* v = optional_member(obj, key);
  return v ? as_number(*v, ctx + "." + key) : fallback;
}

void parse_problem(const json& v, RunConfig& out) {
  const std::string ctx = "problem";
  const json& obj = as_object(v, ctx);
  const std::string family =
      as_string(member(obj, ctx, "family"), ctx + ".family");
  out.problem_family = family;

  if (family == "bellman-benchmark" || family == "saddle-benchmark" ||
      family == "rough-benchmark") {
    check_keys(obj, ctx, {"family"});
    if (family == "bellman-benchmark") {
      out.manufactured = make_default_bellman_benchmark();
      out.problem = out.manufactured->problem;
    } else if (family == "saddle-benchmark") {
      out.manufactured = make_default_saddle_benchmark();
      out.problem = out.manufactured->problem;
    } else {
      out.problem = make_rough_benchmark();
    }
    return;
  }

  if (family != "constant" && family != "smooth" && family != "rough")
    fail(ctx + ".family", "unknown family '" + family + "'");

  out.chi = field_or(obj, ctx, "chi", 0.1);
  if (!(out.chi > 0.0) || out.chi >= 1.0) fail(ctx + ".chi", "must lie in (0, 1)");
  const double tau = field_or(obj, ctx, "tau", 0.5);
  if (!(tau > 0.0) || tau > 1.0) fail(ctx + ".tau", "must lie in (0, 1]");
  const double gamma = hoelder_gamma(out.chi);

  const double delta = as_number(member(obj, ctx, "delta"), ctx + ".delta");
  if (!(delta > 0.0) || delta >= 1.0) fail(ctx + ".delta", "must lie in (0, 1)");
  const double k0 = as_number(member(obj, ctx, "k0"), ctx + ".k0");
  if (!(k0 > 0.0)) fail(ctx + ".k0", "must be positive");
  out.problem.bounds = {delta, k0};
  out.problem.domain = parse_domain(member(obj, ctx, "domain"), ctx + ".domain");
  out.problem.g = parse_boundary(member(obj, ctx, "boundary"), ctx + ".boundary");

  if (family == "constant") {
    check_keys(obj, ctx,
               {"family", "chi", "tau", "delta", "k0", "domain", "boundary", "a",
                "b", "c", "f", "labels_a", "labels_b"});
    parse_constant_family(obj, ctx, gamma, tau, out);
    return;
  }

  const auto n_alpha = as_integer(member(obj, ctx, "n_alpha"), ctx + ".n_alpha");
  const auto n_beta = as_integer(member(obj, ctx, "n_beta"), ctx + ".n_beta");
  if (n_alpha < 1 || n_alpha > 64) fail(ctx + ".n_alpha", "must lie in [1, 64]");
  if (n_beta < 1 || n_beta > 64) fail(ctx + ".n_beta", "must lie in [1, 64]");
  out.problem.controls_a.labels =
      default_labels("a", static_cast<std::size_t>(n_alpha));
  out.problem.controls_b.labels =
      default_labels("b", static_cast<std::size_t>(n_beta));

  if (family == "smooth") {
    check_keys(obj, ctx,
               {"family", "chi", "tau", "delta", "k0", "domain", "boundary",
                "n_alpha", "n_beta", "smooth_params"});
    SmoothFamilyParams params;
    if (const json* p = optional_member(obj, "smooth_params")) {
      const std::string pctx = ctx + ".smooth_params";
      const json& pobj = as_object(*p, pctx);
      check_keys(pobj, pctx,
                 {"anisotropy", "drift", "zeroth", "source", "frequency"});
      params.anisotropy = field_or(pobj, pctx, "anisotropy", params.anisotropy);
      params.drift = field_or(pobj, pctx, "drift", params.drift);
      params.zeroth = field_or(pobj, pctx, "zeroth", params.zeroth);
      params.source = field_or(pobj, pctx, "source", params.source);
      params.frequency = field_or(pobj, pctx, "frequency", params.frequency);
    }
    out.problem.coeffs =
        make_smooth_periodic_field(static_cast<std::size_t>(n_alpha),
                                   static_cast<std::size_t>(n_beta), gamma, tau,
                                   params);
    return;
  }

  check_keys(obj, ctx,
             {"family", "chi", "tau", "delta", "k0", "domain", "boundary",
              "n_alpha", "n_beta", "rough_params"});
  RoughFamilyParams params;
  if (const json* p = optional_member(obj, "rough_params")) {
    const std::string pctx = ctx + ".rough_params";
    const json& pobj = as_object(*p, pctx);
    check_keys(pobj, pctx,
               {"anisotropy", "drift", "zeroth", "source", "anchor_radius"});
    params.anisotropy = field_or(pobj, pctx, "anisotropy", params.anisotropy);
    params.drift = field_or(pobj, pctx, "drift", params.drift);
    params.zeroth = field_or(pobj, pctx, "zeroth", params.zeroth);
    params.source = field_or(pobj, pctx, "source", params.source);
    params.anchor_radius =
        field_or(pobj, pctx, "anchor_radius", params.anchor_radius);
  }
  out.problem.coeffs =
      make_rough_field(static_cast<std::size_t>(n_alpha),
                       static_cast<std::size_t>(n_beta), gamma, tau,
                       out.problem.domain, params);
}

void parse_scheme(const json* v, RunConfig& out) {
  out.stencil = default_stencil(2);
  out.stencil_name = "standard";
  out.pucci = default_pucci_params(out.problem.bounds);
  if (!v) return;
  const std::string ctx = "scheme";
  const json& obj = as_object(*v, ctx);
  check_keys(obj, ctx, {"stencil", "delta_hat", "k1"});
  if (const json* s = optional_member(obj, "stencil")) {
    const std::string name = as_string(*s, ctx + ".stencil");
    if (name == "axis")
      out.stencil = axis_stencil(2);
    else if (name == "standard")
      out.stencil = default_stencil(2);
    else if (name == "extended")
      out.stencil = extended_stencil();
    else
      fail(ctx + ".stencil", "unknown stencil '" + name + "'");
    out.stencil_name = name;
  }
  if (const json* dh = optional_member(obj, "delta_hat")) {
    out.pucci.delta_hat = as_number(*dh, ctx + ".delta_hat");
    out.pucci_overridden = true;
  }
  if (const json* k1 = optional_member(obj, "k1")) {
    out.pucci.k1 = as_number(*k1, ctx + ".k1");
    out.pucci_overridden = true;
  }
  if (!(out.pucci.delta_hat > 0.0) || out.pucci.delta_hat >= 1.0)
    fail(ctx + ".delta_hat", "must lie in (0, 1)");
  if (out.pucci.k1 < 0.0) fail(ctx + ".k1", "must be nonnegative");
}

void parse_solver(const json* v, RunConfig& out) {
  if (!v) return;
  const std::string ctx = "solver";
  const json& obj = as_object(*v, ctx);
  check_keys(obj, ctx,
             {"residual_tol", "max_policy_iters", "max_pseudo_steps",
              "pseudo_step_safety", "linear_tol"});
  SolveConfig& s = out.solver;
  s.residual_tol = field_or(obj, ctx, "residual_tol", s.residual_tol);
  if (const json* m = optional_member(obj, "max_policy_iters"))
    s.max_policy_iters =
        static_cast<int>(as_integer(*m, ctx + ".max_policy_iters"));
  if (const json* m = optional_member(obj, "max_pseudo_steps"))
    s.max_pseudo_steps = as_integer(*m, ctx + ".max_pseudo_steps");
  s.pseudo_step_safety =
      field_or(obj, ctx, "pseudo_step_safety", s.pseudo_step_safety);
  s.linear_tol = field_or(obj, ctx, "linear_tol", s.linear_tol);
  if (!(s.residual_tol > 0.0)) fail(ctx + ".residual_tol", "must be positive");
  if (s.max_policy_iters < 0)
    fail(ctx + ".max_policy_iters", "must be nonnegative");
  if (s.max_pseudo_steps < 0)
    fail(ctx + ".max_pseudo_steps", "must be nonnegative");
  if (!(s.pseudo_step_safety > 0.0) || s.pseudo_step_safety > 1.0)
    fail(ctx + ".pseudo_step_safety", "must lie in (0, 1]");
  if (!(s.linear_tol > 0.0)) fail(ctx + ".linear_tol", "must be positive");
}

void parse_study(const json* v, RunConfig& out) {
  const std::string ctx = "study";
  out.samples = out.mode == RunMode::verify_barrier ? 10'000 : 200;
  if (v) {
    const json& obj = as_object(*v, ctx);
    check_keys(obj, ctx, {"h", "h_sequence", "levels", "samples"});
    if (const json* h = optional_member(obj, "h")) {
      out.h = as_number(*h, ctx + ".h");
      if (!(out.h > 0.0)) fail(ctx + ".h", "must be positive");
    }
    if (const json* seq = optional_member(obj, "h_sequence")) {
      out.h_sequence = as_number_list(*seq, ctx + ".h_sequence");
      for (std::size_t i = 0; i < out.h_sequence.size(); ++i) {
        if (!(out.h_sequence[i] > 0.0))
          fail(ctx + ".h_sequence", "entries must be positive");
        if (i > 0 && !(out.h_sequence[i] < out.h_sequence[i - 1]))
          fail(ctx + ".h_sequence", "must be strictly decreasing");
      }
    }
    if (const json* lv = optional_member(obj, "levels")) {
      out.levels = as_number_list(*lv, ctx + ".levels");
      for (std::size_t i = 0; i < out.levels.size(); ++i) {
        if (!(out.levels[i] >= 1.0))
          fail(ctx + ".levels", "entries must be at least 1");
        if (i > 0 && !(out.levels[i] > out.levels[i - 1]))
          fail(ctx + ".levels", "must be strictly increasing");
      }
    }
    if (const json* s = optional_member(obj, "samples")) {
      out.samples = static_cast<int>(as_integer(*s, ctx + ".samples"));
      if (out.samples < 1) fail(ctx + ".samples", "must be positive");
    }
  }

  switch (out.mode) {
    case RunMode::solve:
    case RunMode::sandwich:
      if (!(out.h > 0.0)) fail(ctx + ".h", "required for this mode");
      if (out.mode == RunMode::sandwich && out.levels.empty())
        fail(ctx + ".levels", "required for sandwich mode");
      break;
    case RunMode::rates:
      if (out.h_sequence.size() < 2)
        fail(ctx + ".h_sequence", "rates mode needs at least two h values");
      if (!out.manufactured)
        fail("problem.family",
             "rates mode needs a manufactured benchmark family "
             "(bellman-benchmark or saddle-benchmark)");
      break;
    case RunMode::check_decomposition:
    case RunMode::verify_barrier:
      break;
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, /*allow_exceptions=*/true,
                       /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") +
                      e.what());
  }
  if (!root.is_object()) throw ConfigError("configuration root: expected an object");
  check_keys(root, "configuration",
             {"mode", "output_dir", "seed", "problem", "scheme", "solver",
              "study"});

  RunConfig out;
  const std::string mode =
      as_string(member(root, "configuration", "mode"), "mode");
  if (mode == "solve")
    out.mode = RunMode::solve;
  else if (mode == "rates")
    out.mode = RunMode::rates;
  else if (mode == "sandwich")
    out.mode = RunMode::sandwich;
  else if (mode == "check-decomposition")
    out.mode = RunMode::check_decomposition;
  else if (mode == "verify-barrier")
    out.mode = RunMode::verify_barrier;
  else
    fail("mode", "unknown mode '" + mode + "'");

  if (const json* dir = optional_member(root, "output_dir"))
    out.output_dir = as_string(*dir, "output_dir");
  if (const json* seed = optional_member(root, "seed")) {
    const std::int64_t s = as_integer(*seed, "seed");
    if (s < 0) fail("seed", "must be nonnegative");
    out.seed = static_cast<std::uint64_t>(s);
  }

  parse_problem(member(root, "configuration", "problem"), out);
  parse_scheme(optional_member(root, "scheme"), out);
  parse_solver(optional_member(root, "solver"), out);
  parse_study(optional_member(root, "study"), out);

  // Semantic validation of the assembled problem: ranges, ellipticity,
  // regularity. Never start a solve from data that fails its own contract.
  const ValidationReport report = validate_problem(out.problem, 64, out.seed);
  if (!report.ok)
    throw ConfigError("problem: validation failed (" + report.first_failure +
                      ")");
  return out;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file '" + path.string() + "': cannot read");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace isaacs
