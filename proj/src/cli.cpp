// SPDX-License-Identifier: Apache-2.0
#include "cfm/cli.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cfm/error.hpp"
#include "cfm/mercator.hpp"

namespace cfm {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

// Recursive descent over + - * / ( ), numbers, pi and sqrt().
class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}
  double parse() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail() const { config_error("cannot parse number '" + s_ + "'"); }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) fail();
      return v;
    }
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
      const std::string id = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (id == "pi") return kPi;
      if (id == "sqrt") {
        if (!eat('(')) fail();
        const double v = sum();
        if (!eat(')')) fail();
        return std::sqrt(v);
      }
      fail();
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail();
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  boost::split(parts, value, boost::is_any_of(","));
  for (auto& p : parts) boost::trim(p);
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  for (const auto& p : parts)
    if (p.empty()) config_error("empty list entry in '" + value + "'");
  return parts;
}

std::vector<double> number_list(const std::string& value) {
  std::vector<double> out;
  for (const auto& p : split_list(value)) out.push_back(parse_number(p));
  return out;
}

int integer(const std::string& key, const std::string& value) {
  const double v = parse_number(value);
  if (v != std::floor(v) || std::abs(v) > 1e9) config_error(key + " must be an integer");
  return static_cast<int>(v);
}

bool boolean(const std::string& key, const std::string& value) {
  const std::string v = boost::to_lower_copy(boost::trim_copy(value));
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  config_error(key + " must be a boolean");
}

const std::set<std::string> kModes = {"modulus", "map", "convergence", "mercator", "multiholes"};

const std::map<std::string, std::set<std::string>> kKeys = {
    {"experiment", {"name", "mode"}},
    {"surface", {"name", "params"}},
    {"domain", {"name", "u", "v", "corners", "periodic_v", "center", "radius", "s", "holes", "corner_angles"}},
    {"quadrilateral", {"rotation"}},
    {"mesh",
     {"grid_u", "grid_v", "target", "cusp_slices", "cusp_ratio", "edges", "edge_levels", "edge_grading", "corners",
      "corner_levels", "corner_grading", "graded_degrees"}},
    {"solver", {"p", "estimates"}},
    {"map", {"isolines_u", "isolines_v"}},
    {"mercator", {"eps", "samples"}},
    {"optimizer", {"tol", "xtol", "max_sweeps"}},
    {"output", {"report", "isolines", "mesh", "discrepancy"}},
};

void check_edge_selector(const DomainSpec& d, const std::string& sel) {
  for (const auto& s : d.outer)
    if (s.label == sel || s.tag.str() == sel) return;
  for (const auto& loop : d.holes)
    for (const auto& s : loop)
      if (s.label == sel || s.tag.str() == sel) return;
  if (sel == "natural") return;
  config_error("unknown edge '" + sel + "' for domain " + d.name);
}

std::string format_convergence(const std::vector<ModulusReport>& reps) {
  std::string out;
  char buf[512];
  for (const auto& r : reps) {
    std::snprintf(buf, sizeof buf,
                  "p = %d M_Q = %.17g M_conj = %.17g reci = %.17g est_err_Q = %.17g est_err_conj = %.17g dofs = %d\n",
                  r.p, r.M_Q, r.M_conj, r.reci, r.est_err_Q, r.est_err_conj, r.dofs);
    out += buf;
  }
  return out;
}

}  // namespace

double parse_number(const std::string& text) { return ExprParser(text).parse(); }

ExperimentConfig parse_config(const std::string& text, const std::string& mode) {
  namespace pt = boost::property_tree;
  // '#' comments are accepted alongside the INI ';'
  std::istringstream raw(text);
  std::ostringstream cleaned;
  for (std::string line; std::getline(raw, line);) {
    const std::string t = boost::trim_copy(line);
    cleaned << (!t.empty() && t[0] == '#' ? std::string() : line) << '\n';
  }
  pt::ptree tree;
  try {
    std::istringstream in(cleaned.str());
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    config_error(e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ExperimentConfig cfg;
  bool mode_given = false, has_domain = false;
  for (const auto& [section, body] : tree) {
    auto allowed = kKeys.find(section);
    if (allowed == kKeys.end()) {
      if (body.empty()) config_error("key '" + section + "' outside of a section");
      config_error("unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!allowed->second.count(key)) config_error("unknown key '" + key + "' in [" + section + "]");
      const std::string value = boost::trim_copy(node.data());
      const std::string where = section + "." + key;
      try {
        if (section == "experiment") {
          if (key == "name") cfg.name = value;
          if (key == "mode") {
            cfg.mode = value;
            mode_given = true;
          }
        } else if (section == "surface") {
          if (key == "name") cfg.surface = value;
          if (key == "params") cfg.surface_params = number_list(value);
        } else if (section == "domain") {
          has_domain = true;
          if (key == "name") cfg.domain = value;
          else cfg.domain_params[key] = number_list(value);
        } else if (section == "quadrilateral") {
          cfg.rotation = integer(where, value);
        } else if (section == "mesh") {
          if (key == "grid_u") cfg.mesh_options.grid_u = integer(where, value);
          if (key == "grid_v") cfg.mesh_options.grid_v = integer(where, value);
          if (key == "target") cfg.mesh_options.target = integer(where, value);
          if (key == "cusp_slices") cfg.mesh_options.cusp_slices = integer(where, value);
          if (key == "cusp_ratio") cfg.mesh_options.cusp_ratio = parse_number(value);
          if (key == "edges") cfg.edges = split_list(value);
          if (key == "edge_levels") cfg.edge_levels = integer(where, value);
          if (key == "edge_grading") cfg.edge_grading = parse_number(value);
          if (key == "corners") {
            cfg.corners.clear();
            if (boost::to_lower_copy(value) == "all") cfg.corners = {1, 2, 3, 4};
            else
              for (const auto& c : split_list(value)) cfg.corners.push_back(integer(where, c));
          }
          if (key == "corner_levels") cfg.corner_levels = integer(where, value);
          if (key == "corner_grading") cfg.corner_grading = parse_number(value);
          if (key == "graded_degrees") cfg.graded_degrees = boolean(where, value);
        } else if (section == "solver") {
          if (key == "p") {
            cfg.ps.clear();
            for (const auto& x : split_list(value)) cfg.ps.push_back(integer(where, x));
          }
          if (key == "estimates") cfg.estimates = boolean(where, value);
        } else if (section == "map") {
          if (key == "isolines_u") cfg.isolines_u = integer(where, value);
          if (key == "isolines_v") cfg.isolines_v = integer(where, value);
        } else if (section == "mercator") {
          if (key == "eps") cfg.eps = parse_number(value);
          if (key == "samples") cfg.samples = integer(where, value);
        } else if (section == "optimizer") {
          if (key == "tol") cfg.optimizer.tol = parse_number(value);
          if (key == "xtol") cfg.optimizer.xtol = parse_number(value);
          if (key == "max_sweeps") cfg.optimizer.max_sweeps = integer(where, value);
        } else if (section == "output") {
          if (value.empty()) config_error(where + " is empty");
          if (key == "report") cfg.report_path = value;
          if (key == "isolines") cfg.isolines_path = value;
          if (key == "mesh") cfg.mesh_path = value;
          if (key == "discrepancy") cfg.discrepancy_path = value;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw Error(ErrorCode::ConfigError, where + ": " + e.what());
        throw;
      }
    }
  }

  if (!mode.empty()) {
    if (mode_given && cfg.mode != mode) config_error("config mode '" + cfg.mode + "' does not match '" + mode + "'");
    cfg.mode = mode;
  }
  if (!kModes.count(cfg.mode)) config_error("unknown mode '" + cfg.mode + "'");
  if (cfg.ps.empty()) config_error("solver.p is empty");
  for (int p : cfg.ps)
    if (p < 1 || p > 30) config_error("polynomial degrees must lie in 1..30");
  if (cfg.edge_levels < 0 || cfg.corner_levels < 0) config_error("refinement levels must be non-negative");
  if (!(cfg.edge_grading > 0.0 && cfg.edge_grading < 1.0) || !(cfg.corner_grading > 0.0 && cfg.corner_grading < 1.0))
    config_error("grading must lie in (0, 1)");
  for (int c : cfg.corners)
    if (c < 1 || c > 4) config_error("mesh.corners entries must lie in 1..4");
  if (cfg.isolines_u < 0 || cfg.isolines_v < 0) config_error("isoline counts must be non-negative");
  if (cfg.samples < 0) config_error("mercator.samples must be non-negative");
  if (!(cfg.optimizer.tol > 0.0) || !(cfg.optimizer.xtol > 0.0) || cfg.optimizer.max_sweeps < 1)
    config_error("optimizer settings must be positive");
  if (cfg.mode == "mercator") {
    if (has_domain) config_error("mercator mode generates its own domain; drop [domain]");
    if (cfg.surface != "ellipsoid") config_error("mercator mode needs the ellipsoid surface");
    if (!(cfg.eps > 0.0 && cfg.eps < kPi / 2)) config_error("mercator.eps must lie in (0, pi/2)");
  }
  if (!cfg.discrepancy_path.empty() && cfg.mode != "mercator") config_error("output.discrepancy needs mercator mode");
  if (!cfg.isolines_path.empty() && cfg.mode != "map") config_error("output.isolines needs map mode");

  // surface, domain and edges are checked by constructing them
  try {
    (void)build_experiment(cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), mode);
}

Experiment build_experiment(const ExperimentConfig& cfg) {
  Surface surface = make_catalog_surface(cfg.surface, cfg.surface_params);
  DomainSpec domain;
  if (cfg.mode == "mercator") {
    const auto& r = cfg.surface_params;
    domain = mercator_quadrilateral(r.at(0), r.at(1), r.at(2), cfg.eps).domain;
  } else {
    domain = make_domain(cfg.domain, cfg.domain_params);
  }
  if (cfg.mode == "multiholes" && domain.num_holes() < 1) config_error("multiholes mode needs a domain with holes");
  MeshRecipe recipe;
  recipe.options = cfg.mesh_options;
  recipe.graded_degrees = cfg.graded_degrees;
  for (const auto& e : cfg.edges) {
    check_edge_selector(domain, e);
    RefineStep s;
    s.kind = RefineStep::Kind::Edge;
    s.selector = e;
    s.levels = cfg.edge_levels;
    s.grading = cfg.edge_grading;
    recipe.steps.push_back(s);
  }
  for (int c : cfg.corners) {
    RefineStep s;
    s.kind = RefineStep::Kind::Corner;
    s.point = domain.corners[c - 1];
    s.levels = cfg.corner_levels;
    s.grading = cfg.corner_grading;
    recipe.steps.push_back(s);
  }
  return {Quadrilateral(std::move(domain), std::move(surface), cfg.rotation), std::move(recipe)};
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  const Experiment ex = build_experiment(cfg);
  const Quadrilateral& q = ex.quad;
  const int p = cfg.ps.back();
  RunOutput out;
  auto add = [&](const std::string& path, std::string content) {
    if (!path.empty()) out.files.emplace_back(path, std::move(content));
  };

  if (cfg.mode == "modulus" || cfg.mode == "map") {
    const HpMesh mesh = build_mesh(q.domain, ex.recipe, p);
    const bool est = cfg.estimates || cfg.mode == "map";
    const PairResult pair = modulus_pair(q, mesh, est);
    out.report = report_text(pair.report);
    if (cfg.mode == "map") {
      const double err = std::max({std::sqrt(pair.report.est_err_Q), std::sqrt(pair.report.est_err_conj), 1e-10});
      const ConformalMap map = build_map(q, pair.u, pair.u_conj, pair.report.M_Q, 10.0 * err);
      char buf[128];
      std::snprintf(buf, sizeof buf, "corner_deviation = %.17g\n", map.corner_deviation);
      out.report += buf;
      add(cfg.isolines_path, isolines_csv(extract_isolines(map, q.surface, cfg.isolines_u, cfg.isolines_v)));
    }
    add(cfg.mesh_path, export_mesh(mesh));
  } else if (cfg.mode == "convergence") {
    int pmax = 0;
    for (int x : cfg.ps) pmax = std::max(pmax, x);
    const HpMesh mesh = build_mesh(q.domain, ex.recipe, pmax);
    out.report = format_convergence(convergence_study(q, mesh, cfg.ps));
    add(cfg.mesh_path, export_mesh(mesh));
  } else if (cfg.mode == "mercator") {
    char buf[256];
    SolutionField last;
    for (int pp : cfg.ps) {
      const ModulusResult r = modulus(q, ex.recipe, pp);
      const MercatorErrors e = mercator_errors(r.field, cfg.eps);
      std::snprintf(buf, sizeof buf, "p = %d l2 = %.17g h1 = %.17g M = %.17g dofs = %d\n", pp, e.l2, e.h1, r.M, e.dofs);
      out.report += buf;
      last = r.field;
    }
    if (cfg.samples > 0) {
      std::string csv = "theta,difference\n";
      for (const auto& [t, d] : mercator_discrepancy(last, cfg.eps, cfg.samples)) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, d);
        csv += buf;
      }
      add(cfg.discrepancy_path, csv);
    }
    add(cfg.mesh_path, export_mesh(build_mesh(q.domain, ex.recipe, p)));
  } else if (cfg.mode == "multiholes") {
    OptimizeOptions opt = cfg.optimizer;
    opt.estimates = cfg.estimates;
    const HpMesh mesh = build_mesh(q.domain, ex.recipe, p);
    out.report = multihole_report_text(optimize_potentials(q, mesh, opt));
    add(cfg.mesh_path, export_mesh(mesh));
  }
  add(cfg.report_path, out.report);
  return out;
}

RunOutput run(const ExperimentConfig& cfg) {
  RunOutput out = run_experiment(cfg);
  for (const auto& [path, content] : out.files) write_file(path, content);
  return out;
}

std::string catalog_text() {
  std::string s = "surfaces:";
  for (const auto& n : catalog_surface_names()) s += " " + n;
  s += "\ndomains:";
  for (const auto& n : catalog_domain_names()) s += " " + n;
  s += "\nmodes:";
  for (const auto& m : kModes) s += " " + m;
  return s + "\n";
}

}  // namespace cfm
