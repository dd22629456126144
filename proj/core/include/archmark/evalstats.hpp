#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "archmark/mesh_io.hpp"

namespace archmark {

struct ErrorSample {
  std::string model_id;
  int landmark = 0;
  double error = 0.0;  // mm
};

struct ErrorSet {
  std::vector<ErrorSample> samples;
  int skipped = 0;  // pairs with either side absent
};

/// Euclidean error per landmark present in both sets. SchemaMismatch when the
/// two sets name landmark 7 differently (and neither uses the placeholder).
ErrorSet landmark_errors(const LandmarkSet& predicted, const LandmarkSet& truth, const std::string& model_id = {});

/// fraction * volume, read as millimeters. NonpositiveVolume unless volume > 0;
/// InvalidParams unless fraction > 0.
double threshold_from_volume(double volume_mm3, double fraction);

/// Percentage of errors <= threshold. EmptyErrors for an empty list.
double accuracy(std::span<const double> errors, double threshold);

struct LandmarkStatsRow {
  int landmark = 0;
  int n = 0;
  double mean = 0.0;
  double rmse = 0.0;
  double sd = 0.0;  // n - 1 denominator
  double max = 0.0;
  double min = 0.0;
  double nme = 0.0;  // percent of the normalization distance
  double cov = 0.0;  // sd / mean; NaN only inside reports when mean == 0
  double skewness = 0.0;  // population moments; 0 when all errors are equal
};

/// InsufficientSamples for fewer than two errors; ZeroMean when the mean is 0;
/// InvalidParams unless normalization_distance > 0.
LandmarkStatsRow per_landmark_stats(int landmark, std::span<const double> errors, double normalization_distance);

struct TTest {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Two-sided p-value of Student's t with df degrees of freedom.
double student_t_p_two_sided(double t, double df);

/// InsufficientSamples for n < 2, ZeroVariance for sd == 0.
TTest one_sample_t(std::span<const double> errors, double mu0 = 0.0);

/// Welch's unequal-variance test with Welch-Satterthwaite degrees of freedom.
/// InsufficientSamples if a group has fewer than two values, ZeroVariance if
/// both groups are constant.
TTest two_sample_t(std::span<const double> a, std::span<const double> b);

/// min(1, p * m); m defaults to the number of p-values. InvalidP for p outside [0, 1].
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m = 0);

// ---------------------------------------------------------------------------
// Report

struct ModelEvaluation {
  std::string model_id;
  LandmarkSet predicted;
  LandmarkSet truth;
  double volume_mm3 = 0.0;
};

struct EvalConfig {
  double volume_fraction = 1e-4;
  /// 0 derives the distance as the mean ground-truth |L15 - L16|.
  double normalization_distance_mm = 0.0;
  std::vector<int> edge_group{5, 6, 9, 10};
};

struct SignificanceResult {
  std::optional<TTest> test;  // empty when undefined (see note)
  std::string note;
};

struct OverallStats {
  int n = 0;
  int skipped = 0;
  double accuracy = 0.0;
  double mae = 0.0;
  double mae_sd = 0.0;
  double max = 0.0;
  double min = 0.0;
  double skewness = 0.0;
  double mean_volume = 0.0;
  double error_to_volume_ratio = 0.0;
  double normalization_distance = 0.0;
};

struct EvaluationReport {
  std::vector<LandmarkStatsRow> rows;  // landmarks with at least two samples, ascending
  OverallStats overall;
  std::array<SignificanceResult, kLandmarkCount> landmark_t;  // vs mean error 0
  std::array<std::optional<double>, kLandmarkCount> landmark_p_bonferroni;
  SignificanceResult group_t;  // edge_group vs all other landmarks
  std::vector<ErrorSample> samples;
};

/// EmptyErrors when no pair could be compared.
EvaluationReport build_report(std::span<const ModelEvaluation> models, const EvalConfig& config = {});

/// Landmark, RMSE±SD, Max–Min, NME, CoV, Skewness.
std::string report_table_csv(const EvaluationReport& report);
std::string report_json(const EvaluationReport& report);

}  // namespace archmark
