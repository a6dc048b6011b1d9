#pragma once

// Experiment runner: configuration, the built-in catalog of reproducible
// experiments, and report emission (CSV, JSON, SVG).

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "holderlab/error.hpp"
#include "holderlab/exponents.hpp"
#include "holderlab/fields.hpp"
#include "holderlab/geometry.hpp"
#include "holderlab/regularity.hpp"
#include "holderlab/solvers.hpp"

namespace holderlab {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { Exponents, Admissible, ScaleVerify, Solve, Analyze, Reproduce, Sweep };

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> experiment_kind_from_string(std::string_view name);

enum class ThetaSource { FromFormula, Explicit };

/// Where an analyzed field comes from.
enum class FieldOrigin { Solve, Reference, File };

struct ReferenceSpec {
  std::string kind;  // "barenblatt", "heat_separable", "heat_kernel", "power_profile"
  double m = 2.0;
  int n = 1;
  std::optional<double> constant_c;
  std::optional<double> mass;
  int mode = 1;
  double amplitude = 1.0;
  double s = 1.0;
  double x0 = 0.0;

  ReferenceSolution build() const;
};

struct CaccioppoliSpec {
  double radius = 0.5;
  double duration = 0.25;  // the region is B_radius(center) x (t0 - duration, t0)
  bool refine = false;     // repeat on a grid with half the spacing (solved fields only)
};

struct AnalysisParams {
  SpaceTimePoint center;
  bool center_at_free_boundary = false;
  ThetaSource theta_source = ThetaSource::FromFormula;
  double theta = 2.0;
  double lambda = 0.5;
  int k_max = 6;
  double base_radius = 1.0;
  double p = 2.0;
  double min_cells = 8.0;
  std::optional<double> gamma;
  std::optional<CaccioppoliSpec> caccioppoli;
  bool time_ladder = false;
};

struct ScaleVerifySpec {
  ScalingKind kind = ScalingKind::PmeZoom;
  ScalingParams params;
  SpaceTimePoint anchor;
  int resolution = 201;
};

struct AssertionSpec {
  std::string metric;
  std::optional<double> min;
  std::optional<double> max;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Exponents;
  std::string name;  // catalog name for Reproduce
  std::string description;
  EquationParams equation = EquationParams::heat(1);
  double q = std::numeric_limits<double>::infinity();
  double r = std::numeric_limits<double>::infinity();
  std::optional<double> homogeneous;
  std::optional<Expression> source;
  std::optional<Expression> initial;
  std::optional<ReferenceSpec> reference;
  FieldOrigin origin = FieldOrigin::Solve;
  std::filesystem::path field_path;
  GridSpec grid;
  SolverConfig solver;
  std::optional<AnalysisParams> analysis;
  std::optional<ScaleVerifySpec> scale;
  int sweep_count = 100;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::vector<AssertionSpec> assertions;

  /// Throws ConfigInvalid with the offending field in the message.
  static ExperimentConfig from_json(std::string_view text);
  std::string to_json() const;

  SourceTerm source_term() const;
};

/// Embedded catalog.
std::vector<std::string> catalog_names();
/// Throws ConfigInvalid for an unknown name.
ExperimentConfig catalog_config(std::string_view name);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ProfilePlot {
  std::string name;
  std::string quantity;
  std::vector<double> radii;
  std::vector<double> values;
  std::optional<HolderFit> fit;
};

struct AssertionResult {
  std::string metric;
  double value = 0.0;
  std::optional<double> min;
  std::optional<double> max;
  bool passed = false;
};

struct RunArtifacts {
  ExperimentConfig config;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> labels;
  std::vector<Table> tables;
  std::vector<ProfilePlot> plots;
  std::vector<AssertionResult> assertions;
  std::optional<SpaceTimeField> field;
  std::map<std::string, double> timings;  // seconds, manifest only
  std::optional<ErrorKind> error_kind;
  std::string error_message;

  bool passed() const noexcept;
  /// 0 all assertions pass, 1 an assertion failed, 2 config error, 3 runtime error.
  int exit_code() const noexcept;
};

/// Never throws for experiment failures; they are recorded in the artifacts.
RunArtifacts run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Csv, Json, Svg };

/// Parses "csv,json,svg". Throws ConfigInvalid.
std::set<ReportFormat> parse_formats(std::string_view list);

/// Writes the manifest (always), results.json, one CSV per table and one SVG
/// per profile plot. Returns the written paths. Throws IoFailure.
std::vector<std::filesystem::path> emit_report(const RunArtifacts& artifacts,
                                               const std::filesystem::path& out_dir,
                                               const std::set<ReportFormat>& formats);

/// Deterministic results document (metrics, labels, assertions).
std::string results_json(const RunArtifacts& artifacts);

std::string render_svg(const ProfilePlot& plot);

struct ExponentTuple {
  EquationParams params;
  double q = 0.0;
  double r = 0.0;
};

/// `count` seeded random tuples of class `cls` that pass check_admissibility.
/// A fraction of the tuples uses r = inf (and q = inf where admissible).
std::vector<ExponentTuple> admissible_sweep(EquationClass cls, int count, std::uint64_t seed);

}  // namespace holderlab
