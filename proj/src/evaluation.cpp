#include "cxr/evaluation.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "cxr/error.hpp"
#include "cxr/kernels.hpp"
#include "cxr/raster.hpp"

namespace cxr {

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                                                  std::to_string(b.width) + "x" + std::to_string(b.height));
  }
  const auto c = kernels::active().mask_overlap(a.bits.data(), b.bits.data(), a.bits.size());
  if (c.union_ == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

double image_iou(const std::vector<Polygon>& pred, const std::vector<Polygon>& gt, std::size_t width,
                 std::size_t height) {
  return iou(rasterize_union(pred, width, height), rasterize_union(gt, width, height));
}

double t_critical(double confidence, double df) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error(ErrorKind::ConfigError, "confidence must lie in (0, 1)");
  if (!(df > 0.0)) throw Error(ErrorKind::InsufficientSamples, "degrees of freedom must be positive");
  boost::math::students_t_distribution<double> dist(df);
  return boost::math::quantile(dist, 0.5 * (1.0 + confidence));
}

MeanMargin t_margin(const std::vector<double>& scores, double confidence) {
  const std::size_t n = scores.size();
  if (n < 2) throw Error(ErrorKind::InsufficientSamples, "need at least 2 scores, have " + std::to_string(n));
  MeanMargin r;
  if (std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores.front(); })) {
    r.mean = scores.front();
    return r;
  }
  r.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double s : scores) ss += (s - r.mean) * (s - r.mean);
  r.sample_std = std::sqrt(ss / static_cast<double>(n - 1));
  r.margin = r.sample_std == 0.0 ? 0.0
                                 : t_critical(confidence, static_cast<double>(n - 1)) * r.sample_std /
                                       std::sqrt(static_cast<double>(n));
  return r;
}

namespace {

void write_overlay(const std::filesystem::path& path, const BinaryMask& pred, const BinaryMask& gt,
                   const std::filesystem::path& image_path) {
  Image8 base(gt.width, gt.height, 1);
  if (!image_path.empty() && std::filesystem::exists(image_path)) {
    Image8 loaded = read_png(image_path);
    if (loaded.width == gt.width && loaded.height == gt.height) base = std::move(loaded);
  }
  Image8 out(gt.width, gt.height, 3);
  for (std::size_t y = 0; y < gt.height; ++y) {
    for (std::size_t x = 0; x < gt.width; ++x) {
      const double g = base.at(x, y, 0);
      double rgb[3] = {g, g, g};
      // ground truth in green, prediction in red, overlap reads yellow
      if (gt.get(x, y)) rgb[1] = 0.5 * g + 127.5;
      if (pred.get(x, y)) rgb[0] = 0.5 * g + 127.5;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(rgb[c]));
    }
  }
  write_png(path, out);
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace

IoUReport evaluate(const CocoDataset& pred, const CocoDataset& gt, const EvalOptions& opts,
                   const std::filesystem::path& gt_dir) {
  std::map<std::int64_t, const ManifestEntry*> gt_images;
  for (const auto& e : gt.manifest.entries) gt_images[e.image_id] = &e;
  for (const auto& e : pred.manifest.entries) {
    if (!gt_images.contains(e.image_id)) {
      throw Error(ErrorKind::ImageSetMismatch, "prediction image " + std::to_string(e.image_id) + " is not in ground truth");
    }
  }
  std::map<std::int64_t, std::vector<Polygon>> pred_polys;
  std::map<std::int64_t, std::vector<Polygon>> gt_polys;
  for (const auto& a : pred.annotations) {
    if (!gt_images.contains(a.image_id)) {
      throw Error(ErrorKind::ImageSetMismatch, "prediction annotation " + std::to_string(a.id) +
                                                   " references unknown image " + std::to_string(a.image_id));
    }
    auto& v = pred_polys[a.image_id];
    v.insert(v.end(), a.segmentation.begin(), a.segmentation.end());
  }
  for (const auto& a : gt.annotations) {
    auto& v = gt_polys[a.image_id];
    v.insert(v.end(), a.segmentation.begin(), a.segmentation.end());
  }
  if (opts.overlay_dir) std::filesystem::create_directories(*opts.overlay_dir);

  IoUReport r;
  r.confidence = opts.confidence;
  for (const auto& [id, entry] : gt_images) {
    const BinaryMask pm = rasterize_union(pred_polys[id], entry->width, entry->height);
    const BinaryMask gm = rasterize_union(gt_polys[id], entry->width, entry->height);
    if (opts.skip_both_empty && pm.empty() && gm.empty()) {
      ++r.skipped_empty;
      continue;
    }
    r.per_image.emplace_back(id, iou(pm, gm));
    if (opts.overlay_dir) {
      write_overlay(*opts.overlay_dir / ("overlay_" + std::to_string(id) + ".png"), pm, gm,
                    gt_dir.empty() ? std::filesystem::path{} : gt_dir / entry->file_name);
    }
  }
  r.n = r.per_image.size();
  if (r.n == 0) throw Error(ErrorKind::InsufficientSamples, "no ground-truth images to score");
  std::vector<double> scores;
  for (const auto& [id, s] : r.per_image) scores.push_back(s);
  if (r.n == 1) {
    r.mean = scores[0];
  } else {
    const MeanMargin mm = t_margin(scores, opts.confidence);
    r.mean = mm.mean;
    r.sample_std = mm.sample_std;
    r.margin = mm.margin;
  }
  return r;
}

IoUReport evaluate_dataset(const std::filesystem::path& pred_coco, const std::filesystem::path& gt_coco,
                           const EvalOptions& opts) {
  const CocoDataset pred = import_coco(pred_coco);
  const CocoDataset gt = import_coco(gt_coco);
  return evaluate(pred, gt, opts, gt_coco.parent_path());
}

std::string format_mean_margin(double mean, double margin, int decimals) {
  return fmt(mean, decimals) + " ± " + fmt(margin, decimals);
}

std::string format_report_table(const IoUReport& r) {
  std::ostringstream os;
  os << "image_id    IoU\n";
  for (const auto& [id, s] : r.per_image) {
    char line[64];
    std::snprintf(line, sizeof line, "%8lld  %.4f\n", static_cast<long long>(id), s);
    os << line;
  }
  os << "n = " << r.n;
  if (r.skipped_empty) os << " (" << r.skipped_empty << " empty-vs-empty images skipped)";
  os << ", confidence " << fmt(r.confidence * 100.0, 0) << "%\n";
  os << "IoU " << format_mean_margin(r.mean, r.margin) << "\n";
  return os.str();
}

std::string report_json(const IoUReport& r) {
  std::ostringstream os;
  os << "{\n  \"n\": " << r.n << ",\n  \"mean\": " << fmt(r.mean, 6) << ",\n  \"sample_std\": " << fmt(r.sample_std, 6)
     << ",\n  \"margin\": " << fmt(r.margin, 6) << ",\n  \"confidence\": " << fmt(r.confidence, 6)
     << ",\n  \"summary\": \"" << format_mean_margin(r.mean, r.margin) << "\",\n  \"per_image\": [";
  for (std::size_t i = 0; i < r.per_image.size(); ++i) {
    os << (i ? ",\n" : "\n") << "    {\"image_id\": " << r.per_image[i].first << ", \"iou\": " << fmt(r.per_image[i].second, 6)
       << "}";
  }
  os << (r.per_image.empty() ? "]\n}\n" : "\n  ]\n}\n");
  return os.str();
}

}  // namespace cxr
