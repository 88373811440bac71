#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cxr/coco.hpp"
#include "cxr/image.hpp"

namespace cxr {

/// |a & b| / |a | b|; 1.0 when both are empty. Throws DimensionMismatch.
double iou(const BinaryMask& a, const BinaryMask& b);

/// Semantic IoU of the rasterized union of predicted vs ground-truth instances.
double image_iou(const std::vector<Polygon>& pred, const std::vector<Polygon>& gt, std::size_t width,
                 std::size_t height);

/// Two-sided Student-t critical value t_{(1+confidence)/2, df}.
double t_critical(double confidence, double df);

struct MeanMargin {
  double mean = 0.0;
  double sample_std = 0.0;
  double margin = 0.0;
};

/// Mean and one-sample t-interval half-width t * s / sqrt(n) with the n-1
/// standard deviation. Throws InsufficientSamples for n < 2.
MeanMargin t_margin(const std::vector<double>& scores, double confidence = 0.95);

struct IoUReport {
  std::vector<std::pair<std::int64_t, double>> per_image;
  std::size_t n = 0;
  double mean = 0.0;
  double sample_std = 0.0;
  double margin = 0.0;
  double confidence = 0.95;
  std::size_t skipped_empty = 0;
};

struct EvalOptions {
  double confidence = 0.95;
  // Leave images where both masks are empty out of the statistics instead of scoring them 1.0.
  bool skip_both_empty = false;
  std::optional<std::filesystem::path> overlay_dir;
};

/// Scores every ground-truth image; images without predictions score against
/// an empty mask. A single scored image yields margin 0.
IoUReport evaluate(const CocoDataset& pred, const CocoDataset& gt, const EvalOptions& opts = {},
                   const std::filesystem::path& gt_dir = {});
IoUReport evaluate_dataset(const std::filesystem::path& pred_coco, const std::filesystem::path& gt_coco,
                           const EvalOptions& opts = {});

/// "0.8056 ± 0.0266"
std::string format_mean_margin(double mean, double margin, int decimals = 4);
std::string format_report_table(const IoUReport& r);
std::string report_json(const IoUReport& r);

}  // namespace cxr
