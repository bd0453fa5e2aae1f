// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cfm/conformal.hpp"
#include "cfm/multiply_connected.hpp"

namespace cfm {

// Experiment description read from an INI file. Sections and keys:
//   [experiment] name, mode (modulus | map | convergence | mercator | multiholes)
//   [surface]    name, params
//   [domain]     name, plus the domain parameters (u, v, corners, periodic_v,
//                center, radius, s, holes, corner_angles)
//   [quadrilateral] rotation
//   [mesh]       grid_u, grid_v, target, cusp_slices, cusp_ratio, edges,
//                edge_levels, edge_grading, corners, corner_levels,
//                corner_grading, graded_degrees
//   [solver]     p, estimates
//   [map]        isolines_u, isolines_v
//   [mercator]   eps, samples (the surface must be an ellipsoid)
//   [optimizer]  tol, xtol, max_sweeps
//   [output]     report, isolines, mesh, discrepancy
// Numeric values accept arithmetic with pi and sqrt(); lists are separated by
// commas. Levels 0 mean "use p". In mercator mode the domain is generated
// from eps and no [domain] section is allowed.
struct ExperimentConfig {
  std::string name;
  std::string mode = "modulus";

  std::string surface = "plane";
  std::vector<double> surface_params;

  std::string domain = "rect";
  DomainParams domain_params;
  int rotation = 0;

  MeshOptions mesh_options;
  std::vector<std::string> edges;
  int edge_levels = 0;
  double edge_grading = 0.15;
  std::vector<int> corners;  // 1-based corner indices
  int corner_levels = 0;
  double corner_grading = 0.15;
  bool graded_degrees = false;

  std::vector<int> ps = {2};
  bool estimates = true;

  int isolines_u = 9, isolines_v = 9;

  double eps = 0.01;
  int samples = 0;

  OptimizeOptions optimizer;

  std::string report_path, isolines_path, mesh_path, discrepancy_path;
};

// Parses and validates (ConfigError on malformed input or unknown keys).
// A non-empty mode (the CLI verb) must agree with [experiment] mode if given.
ExperimentConfig parse_config(const std::string& text, const std::string& mode = "");
ExperimentConfig load_config(const std::string& path, const std::string& mode = "");

// Evaluates a numeric expression such as "2*pi - 0.1" or "pi/(8*sqrt(2))".
double parse_number(const std::string& text);

struct Experiment {
  Quadrilateral quad;
  MeshRecipe recipe;
};
// Surface, domain and recipe of a config (cheap; runs the domain checks).
Experiment build_experiment(const ExperimentConfig& cfg);

struct RunOutput {
  std::string report;
  std::vector<std::pair<std::string, std::string>> files;  // path, content
};

// Runs the experiment and returns the report plus the files it would write.
RunOutput run_experiment(const ExperimentConfig& cfg);
// Runs and writes every requested file atomically.
RunOutput run(const ExperimentConfig& cfg);

std::string catalog_text();

}  // namespace cfm
