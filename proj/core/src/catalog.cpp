#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "holderlab/lab.hpp"

namespace holderlab {

namespace {

struct Entry {
  const char* name;
  const char* config;
};

// Built-in experiments. Each runs in well under a minute at its default resolution.
const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {"barenblatt-m2-freeboundary", R"json({
  "kind": "analyze",
  "description": "Holder exponent of the m = 2 porous medium flow at the Barenblatt free boundary",
  "equation": {"class": "pme", "m": 2, "n": 1},
  "reference": {"kind": "barenblatt", "m": 2, "n": 1, "C": 1},
  "field": "solve",
  "grid": {"dim": 1, "x": [-6, 6], "nx": 2049, "t": [1, 2], "nt": 1001},
  "solver": {"boundary": "dirichlet-zero"},
  "analysis": {"center": {"free_boundary": true, "t": 2}, "theta": "formula",
               "lambda": 0.5, "k_max": 6, "base_radius": 1, "gamma": 0.49},
  "assertions": [
    {"metric": "fit.osc.exponent", "min": 0.93, "max": 1.07},
    {"metric": "iteration.smallest_constant", "max": 10},
    {"metric": "solve.error_linf", "max": 0.01}
  ]
})json"},
      {"barenblatt-m3-freeboundary", R"json({
  "kind": "analyze",
  "description": "Holder exponent of the m = 3 porous medium flow at the Barenblatt free boundary",
  "equation": {"class": "pme", "m": 3, "n": 1},
  "reference": {"kind": "barenblatt", "m": 3, "n": 1, "C": 1},
  "field": "solve",
  "grid": {"dim": 1, "x": [-6, 6], "nx": 2049, "t": [1, 2], "nt": 1001},
  "solver": {"boundary": "dirichlet-zero"},
  "analysis": {"center": {"free_boundary": true, "t": 2}, "theta": "formula",
               "lambda": 0.5, "k_max": 6, "base_radius": 1, "gamma": 0.49},
  "assertions": [
    {"metric": "fit.osc.exponent", "min": 0.43, "max": 0.57},
    {"metric": "iteration.smallest_constant", "max": 10}
  ]
})json"},
      {"heat-separable-oracle", R"json({
  "kind": "solve",
  "description": "Explicit heat solver against the separable mode sin(pi x) exp(-pi^2 t)",
  "equation": {"class": "heat", "n": 1},
  "reference": {"kind": "heat_separable", "k": 1, "n": 1},
  "grid": {"dim": 1, "x": [0, 1], "nx": 257, "t": [0, 0.1], "nt": 11},
  "solver": {"boundary": "dirichlet-zero"},
  "assertions": [{"metric": "solve.error_linf", "max": 5e-4}]
})json"},
      {"barenblatt-m2-oracle", R"json({
  "kind": "solve",
  "description": "Porous medium solver (m = 2) against the Barenblatt profile on [1, 2]",
  "equation": {"class": "pme", "m": 2, "n": 1},
  "reference": {"kind": "barenblatt", "m": 2, "n": 1, "C": 1},
  "grid": {"dim": 1, "x": [-6, 6], "nx": 1025, "t": [1, 2], "nt": 101},
  "solver": {"boundary": "dirichlet-zero"},
  "assertions": [{"metric": "solve.error_linf", "max": 0.01}]
})json"},
      {"heat-campanato", R"json({
  "kind": "analyze",
  "description": "Campanato sequence of a heat flow with a smooth source at an interior point",
  "equation": {"class": "heat", "n": 1},
  "q": 2, "r": 2,
  "source": {"kind": "trig", "w": 3.141592653589793, "amplitude": 1},
  "initial": {"kind": "heat_mode", "k": 1, "amplitude": 1, "n": 1},
  "field": "solve",
  "grid": {"dim": 1, "x": [0, 1], "nx": 257, "t": [0, 0.5], "nt": 1001},
  "solver": {"boundary": "dirichlet-zero"},
  "analysis": {"center": {"x": 0.4, "t": 0.45}, "theta": "formula",
               "lambda": 0.5, "k_max": 6, "base_radius": 0.25},
  "assertions": [
    {"metric": "campanato.rate_margin", "min": -0.05},
    {"metric": "fit.osc.margin", "min": -0.07}
  ]
})json"},
      {"power-profile-campanato", R"json({
  "kind": "analyze",
  "description": "Campanato sequence and oscillation ladder of |x|^0.75 at the origin",
  "reference": {"kind": "power_profile", "s": 0.75, "x0": 0},
  "field": "reference",
  "grid": {"dim": 1, "x": [-1, 1], "nx": 1025, "t": [0, 0.25], "nt": 1025},
  "analysis": {"center": {"x": 0, "t": 0.25}, "theta": 2,
               "lambda": 0.5, "k_max": 5, "base_radius": 0.5},
  "assertions": [
    {"metric": "campanato.decay_rate", "min": 0.70},
    {"metric": "fit.osc.exponent", "min": 0.68, "max": 0.82}
  ]
})json"},
      {"pme-caccioppoli", R"json({
  "kind": "analyze",
  "description": "Caccioppoli energy ratio of a forced m = 2 porous medium flow under refinement",
  "equation": {"class": "pme", "m": 2, "n": 1},
  "q": "inf", "r": "inf",
  "source": {"kind": "gaussian", "width": 0.5, "amplitude": 0.1},
  "reference": {"kind": "barenblatt", "m": 2, "n": 1, "C": 1},
  "field": "solve",
  "grid": {"dim": 1, "x": [-6, 6], "nx": 513, "t": [1, 2], "nt": 401},
  "solver": {"boundary": "dirichlet-zero"},
  "analysis": {"center": {"x": 0.5, "t": 2}, "theta": "formula",
               "lambda": 0.5, "k_max": 5, "base_radius": 1, "min_cells": 2,
               "caccioppoli": {"radius": 1.0, "duration": 0.5, "refine": true}},
  "assertions": [
    {"metric": "caccioppoli.ratio", "max": 50},
    {"metric": "caccioppoli.refinement_change", "max": 0.2}
  ]
})json"},
      {"pme-zoom-norm-chain", R"json({
  "kind": "scale-verify",
  "description": "Source norm transport under the porous medium zoom",
  "equation": {"class": "pme", "m": 2, "n": 1},
  "q": 4, "r": 4,
  "source": {"kind": "gaussian", "width": 0.3, "amplitude": 1, "x0": 0.1},
  "grid": {"dim": 1},
  "scaling": {"kind": "pme-zoom", "lambda": 0.5, "k": 1, "alpha": 1.0, "theta": 1.5,
              "gamma": 0.5, "anchor": {"x": 0, "t": 0}, "resolution": 201},
  "assertions": [{"metric": "scale.rel_error", "max": 0.01}]
})json"},
      {"p-parabolic-exponents", R"json({
  "kind": "exponents",
  "description": "Sharp exponents of the p-parabolic equation with p = 3, n = 3, q = 2, r = inf",
  "equation": {"class": "p-parabolic", "p": 3, "n": 3},
  "q": 2, "r": "inf",
  "assertions": [
    {"metric": "alpha", "min": 0.749999999999, "max": 0.750000000001},
    {"metric": "theta", "min": 2.249999999999, "max": 2.250000000001}
  ]
})json"},
      {"p-parabolic-sweep", R"json({
  "kind": "sweep",
  "description": "Sharp exponents over 100 seeded admissible p-parabolic tuples",
  "equation": {"class": "p-parabolic", "p": 3, "n": 1},
  "sweep": {"count": 100},
  "assertions": [
    {"metric": "sweep.count", "min": 100, "max": 100},
    {"metric": "sweep.min_alpha", "min": 0},
    {"metric": "sweep.max_alpha", "max": 1}
  ]
})json"},
  };
  return list;
}

}  // namespace

std::vector<std::string> catalog_names() {
  std::vector<std::string> names;
  for (const auto& e : entries()) names.emplace_back(e.name);
  return names;
}

ExperimentConfig catalog_config(std::string_view name) {
  const auto& list = entries();
  const auto it = std::find_if(list.begin(), list.end(),
                               [&](const Entry& e) { return name == e.name; });
  if (it == list.end()) {
    throw Error(ErrorKind::ConfigInvalid,
                "name: no catalog experiment named '" + std::string(name) + "'");
  }
  ExperimentConfig cfg = ExperimentConfig::from_json(it->config);
  cfg.name = it->name;
  return cfg;
}

}  // namespace holderlab
